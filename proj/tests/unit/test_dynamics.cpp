#include <algorithm>
#include <cmath>
#include <numbers>

#include "divgrad/disorder.hpp"
#include "divgrad/dynamics.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/operator.hpp"
#include "divgrad/random.hpp"
#include "divgrad/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace divgrad;
constexpr double kPi = std::numbers::pi;

TEST_CASE("scalar resolvent") {
  const FiniteJacobiOperator op(std::vector<double>{1.0, 1.0});
  const auto g = green_column(op, cplx(0.0, 1.0), 0);
  CHECK(std::abs(g.values[0] - 1.0 / cplx(2.0, -1.0)) <= 1e-15);
  CHECK_THROWS_AS(green_column(op, cplx(1.0, 0.0), 0), DomainError);
  CHECK_THROWS_AS(green_column(op, cplx(1.0, 1.0), 3), CoverageError);
}

TEST_CASE("Green column against dense solves and the spectral theorem") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  for (int s = 0; s < 30; ++s) {
    const auto r = centered_realization(d, rng::derive_seed(13, s), 32);
    const auto op = centered_window(r, 32);
    CHECK(op.first_site() == -16);
    const cplx z(-0.5 + 9.0 * rng::uniform01_at(s, 0), 0.01 + rng::uniform01_at(s, 1));
    const auto g = green_column(op, z, 0);
    CHECK(g.residual <= 1e-10);
    const Eigen::MatrixXd H = oracle::dense(op);
    Eigen::MatrixXcd A = H.cast<cplx>();
    A.diagonal().array() -= z;
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(32);
    e(16) = 1.0;
    const Eigen::VectorXcd x = A.fullPivLu().solve(e);
    for (int i = 0; i < 32; ++i) CHECK(std::abs(x(i) - g.values[i]) <= 1e-10);
    // symmetry G(n, 0) = G(0, n)
    const auto g5 = green_column(op, z, 5);
    CHECK(std::abs(g5.at(0) - g.at(5)) <= 1e-10 * std::abs(g.at(5)) + 1e-14);
    // Σ|G(n,0)|² = ⟨δ_0, ((H − E)² + η²)⁻¹ δ_0⟩
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    double spec = 0.0, sum = 0.0;
    for (int j = 0; j < 32; ++j) {
      const double v = es.eigenvectors()(16, j);
      spec += v * v / (std::pow(es.eigenvalues()(j) - z.real(), 2) + z.imag() * z.imag());
    }
    for (auto v : g.values) sum += std::norm(v);
    CHECK(sum == doctest::Approx(spec).epsilon(1e-9));
  }
}

TEST_CASE("time-averaged moments: Parseval forms") {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto r = centered_realization(one, 0, 64);
  const auto op = centered_window(r, 64);
  const Eigen::MatrixXd H = oracle::dense(op);
  const double q[] = {2.0};
  QuadratureSpec spec;
  const auto exact = moments_averaged(op, 20.0, q, spec);
  CHECK(exact.values[0] == doctest::Approx(oracle::time_averaged_moment(H, 32, 20.0, 2.0)).epsilon(0.01));
  // the printed normalization reproduces the time average at T/2
  spec.form = ParsevalForm::paper;
  const auto paper = moments_averaged(op, 20.0, q, spec);
  CHECK(paper.values[0] == doctest::Approx(oracle::time_averaged_moment(H, 32, 10.0, 2.0)).epsilon(0.01));

  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto rr = centered_realization(d, 3, 64);
  const auto opr = centered_window(rr, 64);
  spec = {};
  spec.doubling_check = true;
  const auto m = moments_averaged(opr, 20.0, q, spec);
  CHECK(m.values[0] == doctest::Approx(oracle::time_averaged_moment(oracle::dense(opr), 32, 20.0, 2.0)).epsilon(0.01));
  CHECK(m.doubling_change[0] < 1e-3);
}

TEST_CASE("time-averaged moments: trivial cases and monotonicity in q") {
  const FiniteJacobiOperator single(std::vector<double>{1.0, 1.0});
  const double q2[] = {2.0};
  CHECK(moments_averaged(single, 10.0, q2, {}).values[0] == 0.0);
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto op = centered_window(centered_realization(d, 4, 48), 48);
  const double qs[] = {0.5, 1.0, 2.0, 4.0};
  const auto m = moments_averaged(op, 15.0, qs, {});
  for (std::size_t i = 1; i < 4; ++i) CHECK(m.values[i] >= m.values[i - 1]);
  const double bad[] = {-1.0};
  CHECK_THROWS_AS(moments_averaged(op, 15.0, bad, {}), ParameterError);
  CHECK_THROWS_AS(moments_averaged(op, 0.0, q2, {}), ParameterError);
}

TEST_CASE("replicate-averaged moments are reproducible") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const double q[] = {2.0};
  const auto a = moments_averaged(d, 32, 10.0, q, 3, 17, {});
  const auto b = moments_averaged(d, 32, 10.0, q, 3, 17, {});
  CHECK(a.values == b.values);
  double mean = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto op = centered_window(centered_realization(d, rng::derive_seed(17, rep), 32), 32);
    mean += moments_averaged(op, 10.0, q, {}).values[0] / 3;
  }
  CHECK(a.values[0] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("direct moments") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto op = assemble(sample_sequence(d, 5, {0, 200}), 200);
  const double q[] = {1.0, 2.0};
  const double t[] = {0.0, 1.0, 5.0};
  const auto s = moments_direct(op, q, t);
  REQUIRE(s.size() == 2);
  CHECK(s[0].values[0] == 0.0);
  CHECK(s[1].values[0] == 0.0);
  for (double u : s[0].unitarity_defect) CHECK(u <= 1e-10);
  // oracle: dense exponential
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense(op));
  const auto& V = es.eigenvectors();
  double ref = 0.0;
  for (int n = 0; n < 200; ++n) {
    cplx amp = 0.0;
    for (int j = 0; j < 200; ++j) amp += V(n, j) * V(0, j) * std::exp(cplx(0.0, -5.0 * es.eigenvalues()(j)));
    ref += n * n * std::norm(amp);
  }
  CHECK(s[1].values[2] == doctest::Approx(ref).epsilon(1e-9));
  CHECK_THROWS_AS(moments_direct(op, q, t, 100), CapacityError);
}

TEST_CASE("ballistic transport for the free Laplacian") {
  const FiniteJacobiOperator op(std::vector<double>(2001, 1.0));
  const double q[] = {2.0};
  const auto t = geometric_grid(10.0, 100.0, 15);
  const auto s = moments_direct(op, q, t);
  const auto f = fit_transport_exponent(s[0], 10.0, 100.0);
  CHECK(f.slope >= 1.9);
  CHECK(f.slope <= 2.1);
}

TEST_CASE("transport corridor on a random realization") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto op = assemble(sample_sequence(d, 2024, {0, 2000}), 2000);
  const double q[] = {10.0};
  const auto t = geometric_grid(100.0, 1e4, 30);
  const auto s = moments_direct(op, q, t);
  const auto f = fit_transport_exponent(s[0], 100.0, 1e4);
  INFO("slope " << f.slope);
  CHECK(f.slope >= 3.0);
  CHECK(f.slope <= 9.8);
}

TEST_CASE("transport exponent fits") {
  MomentSeries s;
  s.q = 6.0;
  for (int i = 0; i < 20; ++i) {
    const double t = std::pow(10.0, 2.0 + i * 0.1);
    s.abscissae.push_back(t);
    s.values.push_back(std::pow(t, s.q / 2));
  }
  const auto f = fit_transport_exponent(s, 1.0, 1e9, true);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = std::pow(s.abscissae[i], s.q - 1.0);
  const auto g = fit_transport_exponent(s, 1.0, 1e9);
  CHECK(g.slope == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g.in_corridor);
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = std::pow(s.abscissae[i], 0.5);
  CHECK_FALSE(fit_transport_exponent(s, 1.0, 1e9).in_corridor);
  CHECK(corridor_hi(6.0) == doctest::Approx(5.8));
  CHECK(corridor_lo(6.0) == 1.0);
  CHECK(corridor_lo(2.0) == 0.0);
  std::vector<bool> keep(20, false);
  CHECK_THROWS_AS(fit_transport_exponent(s, 1.0, 1e9, false, keep), ParameterError);
}

TEST_CASE("Borel transform") {
  const std::vector<double> atom = {0.0};
  const auto b = borel_transform(atom, cplx(0.0, 1.0));
  CHECK(std::abs(b.z_minus_form() - 1.0 / cplx(0.0, 1.0)) <= 1e-15);
  CHECK(b.value.imag() > 0.0);
  // Im B(E + i/T) for one atom at 0 is T⁻¹/(E² + T⁻²); its window integral is atan(1)
  CHECK(borel_window_integral(atom, 3.0) == doctest::Approx(std::atan(1.0)).epsilon(1e-14));

  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto op = assemble(sample_sequence(d, 6, {0, 300}), 300);
  const auto ev = full_spectrum(op);
  CHECK_THROWS_AS(borel_transform(ev, cplx(0.5, -0.2)), DomainError);
  for (cplx z : {cplx(0.01, 1e-3), cplx(1.0, 0.1), cplx(0.5, 0.2)}) {
    const auto x = borel_transform(ev, z), y = borel_transform(op, z);
    CHECK(std::abs(x.value - y.value) <= 1e-10 * std::abs(x.value));
    CHECK(x.value.imag() * z.imag() > 0.0);
  }
  for (double T : {10.0, 1e3}) {
    CHECK(borel_window_integral(op, T) == doctest::Approx(borel_window_integral(ev, T)).epsilon(1e-8));
  }
}

TEST_CASE("Borel bounds") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const double T[] = {1e4};
  const double deltas[] = {1e-2, 1e-3, 1e-4, 1e-5};
  const auto rep = borel_checks(d, 100000, 20, 5, T, deltas, 0.26424, 1.0);
  CHECK(rep.herglotz_ok);
  for (const auto& r : rep.lower) {
    CHECK(r.imB >= std::atan(0.5) * 0.26424 / std::sqrt(1e4));
    CHECK(r.ok);
  }
  for (const auto& r : rep.upper) CHECK(r.ok);
}

TEST_CASE("Green inequality checks") {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto r = centered_realization(one, 0, 200);
  const auto c = green_inequality_checks(r, 200, 0.0, 2.0);
  CHECK(c.initial_bound == doctest::Approx(1.0 / 12));
  CHECK(c.initial_sum >= 1.0 / 12);
  CHECK(c.initial_ok);
  CHECK(c.tails_monotone);
  for (std::size_t n = 1; n < c.tails.size(); ++n) CHECK(c.tails[n] <= c.tails[n - 1]);

  CHECK_THROWS_AS(green_inequality_checks(r, 4, 0.0, 2.0), ParameterError);
}

// Known red: per-seed minimal c is heavy-tailed (spread ~6x over 20 seeds),
// so the ±50% stability asked for does not hold. Kept as its own ctest entry.
TEST_CASE("Green tail constant stability across seeds") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  std::vector<double> cs;
  for (int s = 0; s < 20; ++s) {
    const auto rr = centered_realization(d, rng::derive_seed(71, s), 2000);
    const auto rep = green_inequality_checks(rr, 2000, 0.01, 1e4);
    CHECK(std::isfinite(rep.c_min));
    CHECK(rep.c_min > 0.0);
    cs.push_back(rep.c_min);
  }
  std::sort(cs.begin(), cs.end());
  const double med = 0.5 * (cs[9] + cs[10]);
  INFO("c_min / median over 20 seeds: " << cs.front() / med << " .. " << cs.back() / med);
  CHECK(cs.front() >= 0.5 * med);
  CHECK(cs.back() <= 1.5 * med);
}
