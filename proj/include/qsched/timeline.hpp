#ifndef QSCHED_TIMELINE_HPP
#define QSCHED_TIMELINE_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "qsched/types.hpp"

namespace qsched {

/// Piecewise-constant schedule of parameter values over [0, horizon).
/// Segment k covers [starts[k], starts[k+1]); lookups inside a segment all
/// return the same value.
template <class T>
class Timeline {
 public:
  Timeline() = default;

  Timeline(std::vector<Slot> starts, std::vector<T> values, Slot horizon)
      : starts_(std::move(starts)), values_(std::move(values)), horizon_(horizon) {
    if (starts_.empty() || starts_.size() != values_.size())
      throw ConfigError("timeline needs one value per segment");
    if (starts_.front() != 0)
      throw ConfigError("timeline must start at slot 0");
    for (size_t k = 1; k < starts_.size(); ++k)
      if (starts_[k] <= starts_[k - 1])
        throw ConfigError("timeline breakpoints must be strictly ascending");
    if (horizon_ < 1 || starts_.back() >= horizon_)
      throw ConfigError("timeline segments must cover [0, horizon)");
  }

  static Timeline constant(T value, Slot horizon) {
    return Timeline({0}, {std::move(value)}, horizon);
  }

  const T& at(Slot t) const { return values_[segment_index(t)]; }

  size_t segment_index(Slot t) const {
    if (t < 0 || t >= horizon_)
      throw ContractViolation("timeline query at slot " + std::to_string(t) +
                              " outside [0, " + std::to_string(horizon_) + ")");
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    return static_cast<size_t>(it - starts_.begin()) - 1;
  }

  size_t num_segments() const { return values_.size(); }
  Slot segment_start(size_t k) const { return starts_[k]; }
  Slot segment_end(size_t k) const {
    return k + 1 < starts_.size() ? starts_[k + 1] : horizon_;
  }
  const T& segment_value(size_t k) const { return values_[k]; }
  Slot horizon() const { return horizon_; }

 private:
  std::vector<Slot> starts_;
  std::vector<T> values_;
  Slot horizon_ = 0;
};

}  // namespace qsched

#endif  // QSCHED_TIMELINE_HPP
