#include <doctest.h>

#include <cmath>

#include "qsched/distributions.hpp"
#include "qsched/sources.hpp"

using namespace qsched;

TEST_CASE("truncated weibull pmf matches the closed form") {
  const WeibullParams p{0.5, 0.5};
  // P(raw 0) = (1 - iota) / (1 - iota^sqrt(100))
  const double expected = 0.5 / (1.0 - std::pow(0.5, 10.0));
  CHECK(truncated_weibull_raw_pmf(p, 0, 100) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(truncated_weibull_raw_pmf(p, 0, 100) == doctest::Approx(0.500489).epsilon(1e-6));

  double total = 0.0;
  for (int j = 0; j < 100; ++j) total += truncated_weibull_raw_pmf(p, j, 100);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(truncated_weibull_raw_pmf(p, 100, 100) == 0.0);
  CHECK(truncated_weibull_raw_pmf(p, -1, 100) == 0.0);
}

TEST_CASE("nearly all mass collapses to 1 as iota goes to zero") {
  const WeibullParams p{1e-12, 0.5};
  CHECK(exact_weibull_mean(p, 100) == doctest::Approx(1.0).epsilon(1e-9));
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(sample_truncated_weibull(p, 100, rng) == 1);
}

TEST_CASE("mean service time by law") {
  CHECK(mean_service_time(ConstantParams{10}, 100) == 10.0);
  CHECK(mean_service_time(TwoPointParams{1, 0.99, 100}, 100) ==
        doctest::Approx(1.99).epsilon(1e-12));
  // max(j, 1) merges the j=0 mass into 1, so the mean exceeds the raw mean.
  const WeibullParams p{0.5, 0.5};
  double raw_mean = 0.0;
  for (int j = 0; j < 100; ++j) raw_mean += j * truncated_weibull_raw_pmf(p, j, 100);
  CHECK(exact_weibull_mean(p, 100) ==
        doctest::Approx(raw_mean + truncated_weibull_raw_pmf(p, 0, 100)).epsilon(1e-12));
}

TEST_CASE("sampler empirical mean agrees with the exact pmf sum") {
  const WeibullParams p{0.5, 0.5};
  const int bound = 100;
  const double mean = exact_weibull_mean(p, bound);
  double second = 0.0;
  for (int j = 0; j < bound; ++j) {
    const double v = std::max(j, 1);
    second += v * v * truncated_weibull_raw_pmf(p, j, bound);
  }
  const double stddev = std::sqrt(second - mean * mean);

  const int n = 1000000;
  ServiceLawTable table(ServiceLaw{p}, bound);
  Rng rng(20240817);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const int s = table.sample(rng);
    REQUIRE(s >= 1);
    REQUIRE(s <= bound);
    sum += s;
  }
  const double empirical = sum / n;
  CHECK(std::abs(empirical - mean) <= 3.0 * stddev / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("same seed reproduces the same draw sequence") {
  const ServiceLaw law = WeibullParams{0.7, 0.5};
  ServiceLawTable table(law, 50);
  Rng a(99), b(99);
  for (int k = 0; k < 1000; ++k) CHECK(table.sample(a) == table.sample(b));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(truncated_weibull_raw_pmf(WeibullParams{1.2, 0.5}, 0, 100), ConfigError);
  CHECK_THROWS_AS(truncated_weibull_raw_pmf(WeibullParams{0.0, 0.5}, 0, 100), ConfigError);
  CHECK_THROWS_AS(exact_weibull_mean(WeibullParams{0.5, 1.5}, 100), ConfigError);
  CHECK_THROWS_AS(validate_law(ConstantParams{0}, 100), ConfigError);
  CHECK_THROWS_AS(validate_law(ConstantParams{101}, 100), ConfigError);
  CHECK_THROWS_AS(validate_law(TwoPointParams{1, -0.1, 5}, 100), ConfigError);
}

TEST_CASE("scripted sequences replay, repeat or exhaust") {
  ScriptedSequence once({5, 7}, false);
  CHECK(once.next() == 5);
  CHECK(once.next() == 7);
  CHECK_THROWS_AS(once.next(), ConfigError);

  ScriptedSequence looping({1}, true);
  for (int k = 0; k < 10; ++k) CHECK(looping.next() == 1);

  CHECK_THROWS_AS(ScriptedSequence({}, false), ConfigError);
}

TEST_CASE("scripted service prefix runs before the law") {
  const SystemConfig cfg{1, 1, 1, 100, 1000};
  std::vector<ServicePairSpec> pairs(1);
  pairs[0].script = {100, 100};
  pairs[0].laws = Timeline<ServiceLaw>::constant(ConstantParams{10}, 1000);
  const ServiceSpecSet specs(std::move(pairs), cfg);
  ServiceSource source(specs, 1);
  CHECK(source.sample(0, 0, 0) == 100);
  CHECK(source.sample(0, 0, 5) == 100);
  CHECK(source.sample(0, 0, 9) == 10);  // the law takes over
}

TEST_CASE("pure scripted service errors on exhaustion") {
  const SystemConfig cfg{1, 1, 1, 100, 1000};
  std::vector<ServicePairSpec> pairs(1);
  pairs[0].script = {5, 7};
  const ServiceSpecSet specs(std::move(pairs), cfg);
  ServiceSource source(specs, 1);
  CHECK(source.sample(0, 0, 0) == 5);
  CHECK(source.sample(0, 0, 1) == 7);
  CHECK_THROWS_AS(source.sample(0, 0, 2), ConfigError);
}

TEST_CASE("arrival sources cover the three kinds") {
  const SystemConfig cfg{3, 1, 2, 10, 1000};
  std::vector<ArrivalSpec> specs;
  specs.push_back(BernoulliArrivals{Timeline<double>::constant(0.5, 1000)});
  specs.push_back(PatternArrivals{{0, 1}});  // one job on every odd slot
  specs.push_back(ScriptedArrivals{{2, 0, 1}, false});
  const ArrivalSpecSet set(std::move(specs), cfg);

  ArrivalSource a(set, 42), b(set, 42);
  std::vector<int64_t> va, vb;
  for (Slot t = 0; t < 3; ++t) {
    a.draw(t, va);
    b.draw(t, vb);
    CHECK(va == vb);  // seeded reproducibility
    CHECK(va[1] == t % 2);
    CHECK(va[2] == std::vector<int64_t>{2, 0, 1}[t]);
  }
  CHECK_THROWS_AS(a.draw(3, va), ConfigError);  // scripted exhausted
}

TEST_CASE("arrival and service specs validate their bounds") {
  const SystemConfig cfg{1, 1, 1, 10, 100};
  CHECK_THROWS_AS(
      ArrivalSpecSet({BernoulliArrivals{Timeline<double>::constant(1.5, 100)}}, cfg),
      ConfigError);
  CHECK_THROWS_AS(ArrivalSpecSet({PatternArrivals{{0, 2}}}, cfg), ConfigError);
  CHECK_THROWS_AS(ArrivalSpecSet({PatternArrivals{{}}}, cfg), ConfigError);

  std::vector<ServicePairSpec> bad(1);
  bad[0].script = {0};  // below the minimum service time
  CHECK_THROWS_AS(ServiceSpecSet(std::move(bad), cfg), ConfigError);
  std::vector<ServicePairSpec> none(1);
  CHECK_THROWS_AS(ServiceSpecSet(std::move(none), cfg), ConfigError);
}
