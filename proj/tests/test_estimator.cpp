#include <doctest.h>

#include <cmath>
#include <vector>

#include "qsched/estimator.hpp"
#include "qsched/random.hpp"

using namespace qsched;

namespace {

const SystemConfig kCfg{1, 1, 1, 100, 100000};

SlotEvents events_for(TypeId scheduled, TypeId completed, bool nonidle, int len) {
  SlotEvents ev;
  ev.arrivals = {0};
  ev.scheduled = {scheduled};
  ev.completed = {completed};
  ev.completed_len = {completed == kNoType ? 0 : len};
  ev.nonidle = {static_cast<uint8_t>(nonidle)};
  return ev;
}

}  // namespace

TEST_CASE("pure discount when nothing completes") {
  EstimatorState est(kCfg, 0.9, 2.0);
  est.n_hat[0] = 2.0;
  est.phi_hat[0] = 5.0;
  est.update(events_for(kNoType, kNoType, false, 0));
  CHECK(est.n_hat[0] == doctest::Approx(1.8));
  CHECK(est.phi_hat[0] == doctest::Approx(4.5));
}

TEST_CASE("a completed job enters discounted from its start slot") {
  // Job starts at slot 0 with S = 2: busy slots 0 and 1, completes at the
  // end of slot 1. After the update at t = 2, the stats hold gamma^1 and
  // gamma^1 * 2.
  EstimatorState est(kCfg, 0.5, 2.0);
  est.update(events_for(0, kNoType, true, 0));  // t=1 sees slot-0 events
  CHECK(est.served[0] == 1);
  CHECK(est.n_hat[0] == 0.0);
  est.update(events_for(0, 0, true, 2));  // t=2 sees the completion
  CHECK(est.n_hat[0] == doctest::Approx(0.5));
  CHECK(est.phi_hat[0] == doctest::Approx(1.0));
  CHECK(est.served[0] == 0);  // counter reset after the completion
  // estimated rate n/phi = 0.5
  CHECK(est.n_hat[0] / est.phi_hat[0] == doctest::Approx(0.5));

  const auto sums = closed_form_stats(
      std::vector<CompletedJob>{{0, 2}}, 2, 0.5);
  CHECK(sums.n_hat == doctest::Approx(est.n_hat[0]));
  CHECK(sums.phi_hat == doctest::Approx(est.phi_hat[0]));
}

TEST_CASE("gamma = 1 degenerates to plain counts and sums") {
  EstimatorState est(kCfg, 1.0, 2.0);
  est.n_hat[0] = 3.0;
  est.phi_hat[0] = 17.0;
  // a 9-slot job: eight busy slots, then the completion adds (1, 9)
  for (int k = 0; k < 8; ++k) est.update(events_for(0, kNoType, true, 0));
  est.update(events_for(0, 0, true, 9));
  CHECK(est.n_hat[0] == 4.0);
  CHECK(est.phi_hat[0] == 17.0 + 9.0);
  CHECK(est.n_hat[0] == std::round(est.n_hat[0]));
  CHECK(est.phi_hat[0] == std::round(est.phi_hat[0]));
}

TEST_CASE("an idle pick only discounts") {
  EstimatorState est(kCfg, 0.9, 2.0);
  est.n_hat[0] = 1.0;
  est.phi_hat[0] = 4.0;
  // indicator fires with eta = 0: no mass, and the counter resets
  est.update(events_for(0, 0, false, 0));
  CHECK(est.n_hat[0] == doctest::Approx(0.9));
  CHECK(est.phi_hat[0] == doctest::Approx(3.6));
  CHECK(est.served[0] == 0);
}

TEST_CASE("closed-form sums over explicit job logs") {
  CHECK(closed_form_stats(std::vector<CompletedJob>{}, 5, 0.9).n_hat == 0.0);
  CHECK(closed_form_stats(std::vector<CompletedJob>{}, 5, 0.9).phi_hat == 0.0);

  const std::vector<CompletedJob> jobs{{0, 2}};
  const auto sums = closed_form_stats(jobs, 2, 0.5);
  CHECK(sums.n_hat == doctest::Approx(0.5));
  CHECK(sums.phi_hat == doctest::Approx(1.0));

  // job not completed before t is a contract violation
  CHECK_THROWS_AS(closed_form_stats(jobs, 1, 0.5), ContractViolation);
}

TEST_CASE("incremental replay matches the closed form on a random job log") {
  // 50 seeded jobs over 500 slots on one pair, replayed through the
  // incremental update and compared at the end.
  Rng rng(7);
  std::vector<CompletedJob> jobs;
  Slot t = 0;
  while (jobs.size() < 50) {
    const int s = 1 + static_cast<int>(rng.uniform_int(12));
    jobs.push_back(CompletedJob{t, s});
    t += s + rng.uniform_int(4);  // idle gap between jobs
  }
  const Slot horizon = t + 3;

  for (double gamma : {0.3, 0.9, 0.999, 1.0}) {
    EstimatorState est(kCfg, gamma, 2.0);
    size_t next = 0;
    int in_service = 0;  // remaining slots
    for (Slot slot = 0; slot < horizon; ++slot) {
      SlotEvents ev = events_for(kNoType, kNoType, false, 0);
      if (in_service == 0 && next < jobs.size() && jobs[next].start == slot) {
        in_service = jobs[next].service_time;
      }
      if (in_service > 0) {
        ev.scheduled = {0};
        ev.nonidle = {1};
        in_service -= 1;
        if (in_service == 0) {
          ev.completed = {0};
          ev.completed_len = {jobs[next].service_time};
          next += 1;
        }
      }
      est.update(ev);  // update for slot `slot` happens at slot+1
      const Slot now = slot + 1;
      std::vector<CompletedJob> done(jobs.begin(), jobs.begin() + next);
      const auto want = closed_form_stats(done, now, gamma);
      const double scale = std::max({std::abs(want.n_hat), std::abs(est.n_hat[0]), 1e-300});
      CHECK(std::abs(est.n_hat[0] - want.n_hat) <= 1e-9 * scale);
      const double pscale =
          std::max({std::abs(want.phi_hat), std::abs(est.phi_hat[0]), 1e-300});
      CHECK(std::abs(est.phi_hat[0] - want.phi_hat) <= 1e-9 * pscale);
    }
    REQUIRE(next == jobs.size());
  }
}

TEST_CASE("bonus term values and sentinels") {
  SystemConfig cfg = kCfg;
  cfg.service_bound = 1;
  EstimatorState est(cfg, 1.0, 2.0);
  est.n_hat[0] = 4.0;
  CHECK(est.bonus(0, 0, 10) == doctest::Approx(2.0 * std::sqrt(std::log(10.0) / 4.0)));
  CHECK(est.bonus(0, 0, 10) == doctest::Approx(1.51743).epsilon(1e-5));

  EstimatorState half(cfg, 0.5, 2.0);
  half.n_hat[0] = 0.5;
  CHECK(half.bonus(0, 0, 2) == doctest::Approx(2.0 * std::sqrt(std::log(1.5) / 0.5)));
  CHECK(half.bonus(0, 0, 2) == doctest::Approx(1.80103).epsilon(1e-5));

  half.n_hat[0] = 0.0;
  CHECK(std::isinf(half.bonus(0, 0, 2)));
  CHECK(half.pick_denominator(0, 0, 2) == 1.0);
  CHECK_THROWS_AS(half.bonus(0, 0, 0), ContractViolation);
}

TEST_CASE("estimated mean time stays at least 1 and phi >= n") {
  Rng rng(11);
  EstimatorState est(kCfg, 0.95, 2.0);
  Slot t = 0;
  for (int job = 0; job < 300; ++job) {
    const int s = 1 + static_cast<int>(rng.uniform_int(20));
    for (int k = 0; k < s; ++k) {
      est.update(events_for(0, k == s - 1 ? 0 : kNoType, true, k == s - 1 ? s : 0));
      t += 1;
      CHECK(est.phi_hat[0] >= est.n_hat[0]);
    }
    if (est.n_hat[0] > 0.0) {
      CHECK(est.phi_hat[0] / est.n_hat[0] >= 1.0);          // mean time >= 1
      CHECK(est.n_hat[0] / est.phi_hat[0] <= 1.0 + 1e-12);  // rate <= 1
    }
  }
}

TEST_CASE("shrinking the sample mass never shrinks the pick weight") {
  // Monotone optimism: with the mean time held fixed, less mass means a
  // larger bonus, hence a smaller clamped denominator and a weight at least
  // as large.
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    EstimatorState est(kCfg, 0.9, 2.0);
    const double mean_time = 1.0 + 20.0 * rng.uniform01();
    const double n = 0.1 + 10.0 * rng.uniform01();
    const Slot t = 1 + rng.uniform_int(5000);
    est.n_hat[0] = n;
    est.phi_hat[0] = n * mean_time;
    const double before = 1.0 / est.pick_denominator(0, 0, t);

    const double shrink = 0.1 + 0.8 * rng.uniform01();
    est.n_hat[0] = n * shrink;
    est.phi_hat[0] = n * shrink * mean_time;
    const double after = 1.0 / est.pick_denominator(0, 0, t);
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("discounted horizon log closed form") {
  CHECK(discounted_horizon_log(1.0, 10) == doctest::Approx(std::log(10.0)));
  CHECK(discounted_horizon_log(0.5, 2) == doctest::Approx(std::log(1.5)));
  CHECK(discounted_horizon_log(1.0, 1) == 0.0);
  CHECK_THROWS_AS(discounted_horizon_log(0.9, 0), ContractViolation);
}
