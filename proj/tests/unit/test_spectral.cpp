#include <algorithm>
#include <cmath>
#include <numbers>

#include "divgrad/disorder.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/operator.hpp"
#include "divgrad/random.hpp"
#include "divgrad/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace divgrad;
constexpr double kPi = std::numbers::pi;

namespace {
FiniteJacobiOperator laplacian(std::int64_t N) {
  return FiniteJacobiOperator(std::vector<double>(static_cast<std::size_t>(N + 1), 1.0));
}
double free_ev(int k, std::int64_t N) { return 2.0 - 2.0 * std::cos(k * kPi / (N + 1)); }
}  // namespace

TEST_CASE("free Laplacian spectrum") {
  const auto op = laplacian(10);
  const auto ev = full_spectrum(op);
  REQUIRE(ev.size() == 10);
  for (int k = 1; k <= 10; ++k) {
    CHECK(std::abs(ev[k - 1] - free_ev(k, 10)) <= 1e-12);
    CHECK(std::abs(eigenvalue_by_index(op, k - 1) - free_ev(k, 10)) <= 1e-10);
  }
  CHECK(count_eigenvalues_below(op, 2.0) == 5);
  CHECK(count_eigenvalues_below(op, -1e-6) == 0);
  CHECK(count_eigenvalues_below(op, 4.0) == 10);

  const auto p = eigenpair_near(op, 0.1);
  CHECK(p.eigenvalue == doctest::Approx(0.081014).epsilon(1e-5));
  CHECK(p.index == 0);
  double nrm = 0.0;
  for (int n = 0; n < 10; ++n) nrm += std::pow(std::sin((n + 1) * kPi / 11), 2);
  for (int n = 0; n < 10; ++n) {
    CHECK(std::abs(p.eigenvector[n] - std::sin((n + 1) * kPi / 11) / std::sqrt(nrm)) <= 1e-10);
  }
}

TEST_CASE("random operators against the dense eigensolver") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  for (int s = 0; s < 10; ++s) {
    const auto r = sample_sequence(d, rng::derive_seed(5, s), {0, 120});
    const auto op = assemble(r, 120);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense(op));
    const auto ev = full_spectrum(op);
    double amax = 0.0;
    for (double a : r.values()) amax = std::max(amax, a);
    for (int i = 0; i < 120; ++i) CHECK(std::abs(ev[i] - es.eigenvalues()(i)) <= 1e-11);
    CHECK(ev.front() >= -1e-12);
    CHECK(ev.back() <= 4 * amax + 1e-12);
    for (int t = 0; t < 100; ++t) {
      const double E = -0.5 + 9.0 * rng::uniform01_at(s, t);
      const auto c = std::count_if(ev.begin(), ev.end(), [&](double x) { return x <= E; });
      CHECK(count_eigenvalues_below(op, E) == c);
    }
    const auto lo = eigenvalues_in(op, 1.0, 2.0);
    const auto c = std::count_if(ev.begin(), ev.end(), [](double x) { return x > 1.0 && x <= 2.0; });
    CHECK(static_cast<std::ptrdiff_t>(lo.size()) == c);
  }
}

TEST_CASE("eigendecomposition is orthonormal with small residuals") {
  const auto d = CoefficientDistribution::two_point(0.1, 1.0, 0.5);
  const auto r = sample_sequence(d, 8, {0, 400});
  const auto op = assemble(r, 400);
  const auto es = eigendecompose(op);
  const Eigen::Index N = 400;
  Eigen::MatrixXd V(N, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i) V(i, j) = es.vectors[j][i];
  CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(es.max_residual <= 1e-8 * op.norm_bound());
  for (const auto& v : es.vectors) {
    const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(*it > 0.0);
  }
  CHECK_THROWS_AS(eigendecompose(op, 100), CapacityError);
}

TEST_CASE("eigenpair residuals on random cases") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  for (int s = 0; s < 100; ++s) {
    const auto r = sample_sequence(d, rng::derive_seed(6, s), {0, 500});
    const auto op = assemble(r, 500);
    const auto p = eigenpair_near(op, 6.0 * rng::uniform01_at(s, 0));
    CHECK(p.residual <= 1e-8 * op.norm_bound());
  }
}

TEST_CASE("determinant and resolvent trace") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto r = sample_sequence(d, 9, {0, 60});
  const auto op = assemble(r, 60);
  const Eigen::MatrixXd H = oracle::dense(op);
  for (cplx z : {cplx(0.3, 0.01), cplx(-1.0, 0.0), cplx(2.0, -0.5)}) {
    Eigen::MatrixXcd A = H.cast<cplx>();
    A.diagonal().array() -= z;
    const auto lu = A.fullPivLu();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < 60; ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
    CHECK(log_abs_det(op, z) == doctest::Approx(logdet).epsilon(1e-10));
    if (z.imag() != 0.0) {
      const cplx tr = A.inverse().trace();
      CHECK(std::abs(resolvent_trace(op, z) - tr) <= 1e-10 * std::abs(tr));
    }
  }
  CHECK_THROWS_AS(resolvent_trace(op, cplx(0.5, 0.0)), DomainError);
}

TEST_CASE("IDS curve") {
  const auto one = CoefficientDistribution::constant(1.0);
  const std::vector<double> E = {0.01, 0.1, 0.5, 1.0, 2.0, 3.5};
  const auto c = ids_curve(one, 400, E, 2, 1);
  for (std::size_t i = 0; i < E.size(); ++i) {
    CHECK(std::abs(c.mean_ids[i] - std::acos(1 - E[i] / 2) / kPi) <= 2.0 / 400);
  }
  const auto g = geometric_grid(1e-3, 5e-2, 12);
  REQUIRE(g.size() == 12);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(5e-2));
}

TEST_CASE("IDS square-root asymptotics") {
  const auto g = geometric_grid(1e-3, 5e-2, 12);
  const auto u = ids_curve(CoefficientDistribution::uniform(1.0, 2.0), 3000, g, 100, 1);
  const auto t = ids_curve(CoefficientDistribution::two_point(0.1, 1.0, 0.5), 3000, g, 100, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(u.mean_ids[i] / std::sqrt(g[i]) / 0.265016 - 1.0) <= 0.10);
    CHECK(std::abs(t.mean_ids[i] / std::sqrt(g[i]) / 0.746510 - 1.0) <= 0.15);
  }
}

TEST_CASE("Thouless formula") {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto a = thouless_check(one, cplx(-1.0), 2000, 1, 1, 20000);
  CHECK(a.L_thouless == doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-3));
  const auto b = thouless_check(one, cplx(2.0, 0.0), 2000, 1, 1, 20000);
  CHECK(std::abs(b.L_thouless) <= 5 * std::log(2000.0) / 2000);
  const auto u = thouless_check(CoefficientDistribution::uniform(1.0, 2.0), cplx(0.05, 1e-3), 3000, 100, 3);
  CHECK(std::abs(u.diff) <= 0.1 * u.L_transfer + 3 * std::hypot(u.stderr_thouless, u.stderr_transfer));
}

TEST_CASE("localization lengths of eigenfunctions") {
  // one eigenfunction scatters by more than 3x around 1/(kλ); the median over
  // realizations is what tracks it
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const double k = lyapunov_slope_constant(d);
  for (double m : {1.0, 2.0, 20.0}) {
    std::vector<double> ratio;
    for (int s = 0; s < 20; ++s) {
      const auto op = assemble(sample_sequence(d, rng::derive_seed(0xF2, s), {0, 3000}), 3000);
      const auto p = eigenpair_near(op, m / (k * 3000));
      ratio.push_back(decay_length_fit(p.eigenvector).length * k * p.eigenvalue);
    }
    std::sort(ratio.begin(), ratio.end());
    const double median = 0.5 * (ratio[9] + ratio[10]);
    INFO("m = " << m << ", median fit/predicted " << median);
    CHECK(median >= 0.5);
    CHECK(median <= 2.0);
  }
}
