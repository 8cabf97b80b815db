#include <cmath>
#include <numeric>

#include "divgrad/disorder.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/random.hpp"
#include "doctest.h"

using namespace divgrad;

TEST_CASE("distribution parameters are validated") {
  CHECK_THROWS_AS(CoefficientDistribution::uniform(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(CoefficientDistribution::uniform(2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(CoefficientDistribution::two_point(-1.0, 1.0, 0.5), ParameterError);
  CHECK_THROWS_AS(CoefficientDistribution::two_point(1.0, 2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(CoefficientDistribution::parse("gauss:0:1"), ParameterError);
  CHECK_THROWS_AS(CoefficientDistribution::parse("uniform:1"), ParameterError);
}

TEST_CASE("parse and to_string round-trip") {
  for (const char* s : {"uniform:1:2", "twopoint:0.1:1:0.5", "uniform:0.001:1"}) {
    const auto d = CoefficientDistribution::parse(s);
    CHECK(d.to_string() == s);
    CHECK(CoefficientDistribution::parse(d.to_string()).to_string() == d.to_string());
  }
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  CHECK(d.support_min() == 1.0);
  CHECK(d.support_max() == 2.0);
}

TEST_CASE("degenerate two-point law gives constant coefficients") {
  const auto d = CoefficientDistribution::two_point(1.0, 1.0, 0.5);
  const auto r = sample_sequence(d, 12345, {0, 9});
  for (std::int64_t n = 0; n <= 9; ++n) CHECK(r[n] == 1.0);
}

TEST_CASE("sampling is deterministic and index addressed") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto a = sample_sequence(d, 99, {-50, 500});
  const auto b = sample_sequence(d, 99, {-50, 500});
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  // a sub-window reproduces the same coefficients
  const auto c = sample_sequence(d, 99, {10, 20});
  for (std::int64_t n = 10; n <= 20; ++n) CHECK(c[n] == a[n]);
  for (std::int64_t n = -50; n <= 500; ++n) {
    CHECK(a[n] >= d.support_min());
    CHECK(a[n] <= d.support_max());
    CHECK(a[n] == coefficient_at(d, 99, n));
  }
  CHECK_THROWS_AS(a.slice(-60, 0), CoverageError);
  CHECK_THROWS_AS(sample_sequence(d, 1, {5, 4}), ParameterError);
}

TEST_CASE("uniform(1,2): sample mean of 1/a matches ln 2") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  constexpr std::int64_t n = 1'000'000;
  const auto r = sample_sequence(d, 2024, {0, n - 1});
  double s = 0.0, s2 = 0.0;
  for (double a : r.values()) {
    s += 1.0 / a;
    s2 += 1.0 / (a * a);
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean - std::log(2.0)) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("two-point sampling frequency") {
  const auto d = CoefficientDistribution::two_point(0.1, 1.0, 0.3);
  const auto r = sample_sequence(d, 7, {0, 99'999});
  const auto low = std::count(r.values().begin(), r.values().end(), 0.1);
  const double p = static_cast<double>(low) / 1e5;
  CHECK(std::abs(p - 0.3) <= 4.0 * std::sqrt(0.3 * 0.7 / 1e5));
}

TEST_CASE("kappa") {
  CHECK(kappa(CoefficientDistribution::constant(3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(kappa(CoefficientDistribution::uniform(1.0, 2.0)) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
  CHECK(kappa(CoefficientDistribution::uniform(1.0, 2.0)) == doctest::Approx(1.442695).epsilon(1e-6));
  CHECK(kappa(CoefficientDistribution::two_point(0.1, 1.0, 0.5)) ==
        doctest::Approx(1.0 / 5.5).epsilon(1e-14));
}

TEST_CASE("lyapunov slope constant") {
  CHECK(lyapunov_slope_constant(CoefficientDistribution::constant(1.7)) == doctest::Approx(0.0));
  const double l2 = std::log(2.0);
  // E[1/a²] = 1/2 for uniform(1,2)
  CHECK(lyapunov_slope_constant(CoefficientDistribution::uniform(1.0, 2.0)) ==
        doctest::Approx((1.0 / l2 / 8.0) * (0.5 - l2 * l2)).epsilon(1e-12));
  CHECK(lyapunov_slope_constant(CoefficientDistribution::uniform(1.0, 2.0)) ==
        doctest::Approx(3.525e-3).epsilon(1e-3));
  CHECK(lyapunov_slope_constant(CoefficientDistribution::two_point(0.1, 1.0, 0.5)) ==
        doctest::Approx((1.0 / 5.5 / 8.0) * 20.25).epsilon(1e-12));
  CHECK(lyapunov_slope_constant(CoefficientDistribution::two_point(0.1, 1.0, 0.5)) ==
        doctest::Approx(0.46023).epsilon(1e-4));
}

TEST_CASE("ids prefactor") {
  CHECK(ids_prefactor(CoefficientDistribution::constant(1.0)) == doctest::Approx(0.318310).epsilon(1e-6));
  // the tabulated 0.265016 agrees with 1/(π√κ) = 0.2650104 to 2.2e−5 relative
  CHECK(ids_prefactor(CoefficientDistribution::uniform(1.0, 2.0)) == doctest::Approx(0.265016).epsilon(3e-5));
  CHECK(ids_prefactor(CoefficientDistribution::two_point(0.1, 1.0, 0.5)) ==
        doctest::Approx(0.746510).epsilon(3e-5));
}

TEST_CASE("rng streams") {
  CHECK(rng::derive_seed(1, 0) != rng::derive_seed(1, 1));
  CHECK(rng::derive_seed(1, 0) != rng::derive_seed(2, 0));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng::uniform01_at(5, i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
