#include <cmath>
#include <random>

#include "divgrad/disorder.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/prufer.hpp"
#include "divgrad/random.hpp"
#include "divgrad/transfer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace divgrad;

TEST_CASE("step matrix") {
  const auto A = step_matrix(1.0, 1.0, 0.0);
  CHECK(A.a == cplx(2.0));
  CHECK(A.b == cplx(-1.0));
  CHECK(A.c == cplx(1.0));
  CHECK(A.d == cplx(0.0));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> ua(0.1, 5.0), uz(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const auto M = step_matrix(ua(g), ua(g), cplx(uz(g), uz(g)));
    CHECK(std::abs(M.det() - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(step_matrix(0.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("cocycle reproduces the three-term recurrence") {
  // (Hu)_n = z u_n solved forward from u_{−1}, u_0
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> ua(1.0, 2.0);
  std::vector<double> a(40);
  for (auto& x : a) x = ua(g);
  const cplx z(0.3, 0.2);
  std::vector<cplx> u = {0.7, cplx(-0.4, 0.1)};  // u_{−1}, u_0
  for (int n = 0; n + 1 < 39; ++n) {
    const cplx un = u[n + 1], um = u[n];
    // −a_{n+1}u_{n+1} + (a_n + a_{n+1})u_n − a_n u_{n−1} = z u_n
    u.push_back(((a[n] + a[n + 1] - z) * un - a[n] * um) / a[n + 1]);
    const auto A = step_matrix(a[n], a[n + 1], z);
    const Vec2C v = {a[n] * un, um};
    const Vec2C w = A(v);
    const cplx e1 = a[n + 1] * u[n + 2], e2 = un;
    CHECK(std::abs(w[0] - e1) <= 1e-12 * std::abs(e1) + 1e-12);
    CHECK(std::abs(w[1] - e2) <= 1e-12 * std::abs(e2) + 1e-12);
  }
}

TEST_CASE("transfer product closed forms for a ≡ 1") {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto r = sample_sequence(one, 0, {-10, 200});
  const auto T5 = transfer_product(r, 5, 0.0).matrix();
  CHECK(std::abs(T5.a - 6.0) < 1e-12);
  CHECK(std::abs(T5.b + 5.0) < 1e-12);
  CHECK(std::abs(T5.c - 5.0) < 1e-12);
  CHECK(std::abs(T5.d + 4.0) < 1e-12);
  CHECK(std::abs(transfer_product(r, 5, 0.0).determinant() - 1.0) < 1e-12);

  const auto T0 = transfer_product(r, 0, 0.0);
  CHECK(T0.log_scale() == 0.0);
  CHECK(std::abs(T0.matrix().a - 1.0) == 0.0);
  CHECK(std::abs(T0.matrix().d - 1.0) == 0.0);

  const auto rep = deterministic_bound_check(r, 100, 0.0);
  CHECK(rep.pass);
  CHECK(rep.bound_linear == doctest::Approx(800.0));
  CHECK(rep.norm <= 2.0 * 100 + 2.0);
  CHECK(rep.norm >= 2.0 * 100);
}

TEST_CASE("transfer product equals the naive left-to-right product") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  for (int s = 0; s < 50; ++s) {
    const auto r = sample_sequence(d, rng::derive_seed(77, s), {-20, 20});
    const cplx z = std::polar(rng::uniform01_at(s, 0), 6.283185307179586 * rng::uniform01_at(s, 1));
    for (std::int64_t n : {1, 3, 10}) {
      Eigen::Matrix2cd ref = Eigen::Matrix2cd::Identity();
      for (std::int64_t j = 0; j < n; ++j) {
        Eigen::Matrix2cd A;
        A << (r[j] + r[j + 1] - z) / r[j], -r[j], 1.0 / r[j], 0.0;
        ref = A * ref;
      }
      const auto T = transfer_product(r, n, z);
      CHECK(oracle::rel_diff(oracle::to_eigen(T.matrix()), ref) <= 1e-10);
    }
    // negative n: T_{−n} = (A_{−1}⋯A_{−n})^{−1}
    Eigen::Matrix2cd back = Eigen::Matrix2cd::Identity();
    for (std::int64_t j = -7; j <= -1; ++j) {
      Eigen::Matrix2cd A;
      A << (r[j] + r[j + 1] - z) / r[j], -r[j], 1.0 / r[j], 0.0;
      back = A * back;
    }
    CHECK(oracle::rel_diff(oracle::to_eigen(transfer_product(r, -7, z).matrix()), back.inverse()) <=
          1e-10);
  }
}

TEST_CASE("LogNormProduct: no overflow, exact scale split, unimodularity") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto r = sample_sequence(d, 5, {0, 200000});
  const auto T = transfer_product(r, 200000, cplx(-1.0));
  CHECK(std::isfinite(T.log_scale()));
  CHECK(T.log_norm() > 700.0);  // beyond double range
  const auto Nm = T.normalized();
  CHECK(T.log_norm() == doctest::Approx(T.log_scale() + std::log(norm2(Nm))).epsilon(1e-15));
  CHECK(std::abs(T.determinant() - 1.0) <= 1e-9);
  CHECK_THROWS_AS(T.matrix(), NumericalError);
  // ‖M‖ = ‖M⁻¹‖ for det-1 matrices
  const auto S = transfer_product(r, 50, cplx(0.2, 0.1));
  CHECK(S.inverse().log_norm() == doctest::Approx(S.log_norm()).epsilon(1e-9));
}

TEST_CASE("LogNormProduct::log_norm_applied") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto r = sample_sequence(d, 8, {0, 30});
  const auto T = transfer_product(r, 30, cplx(0.5, 0.0));
  const auto M = oracle::to_eigen(T.matrix());
  Eigen::Vector2cd v(cplx(0.3, 0.1), cplx(-0.9, 0.2));
  CHECK(T.log_norm_applied({v(0), v(1)}) == doctest::Approx(std::log((M * v).norm())).epsilon(1e-12));
}

TEST_CASE("Lyapunov estimates") {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto e = lyapunov_estimate(one, cplx(-1.0), 20000, 2, 1);
  CHECK(e.mean == doctest::Approx(std::acosh(1.5)).epsilon(1e-3));
  const auto ell = lyapunov_estimate(one, cplx(2.0), 100000, 1, 1);
  CHECK(ell.mean <= 10.0 * std::log(1e5) / 1e5);
  // replicate samples are reproducible and ordered
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto a = lyapunov_estimate(d, cplx(0.1), 1000, 5, 3);
  const auto b = lyapunov_estimate(d, cplx(0.1), 1000, 5, 3);
  CHECK(a.samples == b.samples);
  CHECK(a.samples[2] == log_norm_rate(d, rng::derive_seed(3, 2), cplx(0.1), 1000));
}

TEST_CASE("log_norm_rate agrees with LogNormProduct on long chains") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const std::uint64_t seed = rng::derive_seed(0xA6, 0);
  for (double x : {1e-4, 1e-3, 1e-2}) {
    const auto r = sample_sequence(d, seed, {0, 100000});
    const double ref = transfer_product(r, 100000, cplx(-x)).log_norm() / 1e5;
    CHECK(log_norm_rate(d, seed, cplx(-x), 100000) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("deterministic bounds on random realizations") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  for (int s = 0; s < 100; ++s) {
    const auto r = sample_sequence(d, rng::derive_seed(9, s), {0, 10000});
    CHECK(deterministic_bound_check(r, 10000, 0.0).pass);
  }
  const auto r = sample_sequence(d, 4, {0, 1000});
  CHECK(deterministic_bound_check(r, 1000, cplx(0.0, 1e-6)).pass);
}

TEST_CASE("hyperbolic recurrence") {
  const std::vector<double> b(1000, 1.0);
  const double x = 0.01;
  const auto h = hyperbolic_bounds(b, x, 0.0, 1000);
  CHECK(h.log_norm >= 1000 * std::sqrt(x) / 2);
  CHECK(h.log_norm <= 2 * 1000 * std::sqrt(x) + std::log(3 / std::sqrt(x)));
  CHECK(h.lower_ok);
  CHECK(h.upper_ok);

  std::vector<double> bb(60);
  for (std::size_t i = 0; i < bb.size(); ++i) bb[i] = 0.5 + 0.5 * rng::uniform01_at(3, i);
  const double delta = 0.05;
  const auto rows = hyperbolic_recurrence(bb, x, delta, 60);
  REQUIRE(rows.size() == 61);
  CHECK(std::abs(rows[1].p * std::exp(rows[1].log_scale)) > 2.0);
  // entries vs the B_j matrix product, B_j at z = −x + iδ
  Eigen::Matrix2cd F = Eigen::Matrix2cd::Identity();
  for (std::size_t k = 0; k < 60; ++k) {
    Eigen::Matrix2cd B;
    B << 2.0 + cplx(x, -delta) * bb[k], -1.0, 1.0, 0.0;
    F = B * F;
    const auto& e = rows[k + 1];
    const double sc = std::exp(e.log_scale);
    const double mag = F.cwiseAbs().maxCoeff();
    CHECK(std::abs(e.p * sc - F(0, 0)) <= 1e-10 * mag);
    CHECK(std::abs(e.p_prev * sc - F(1, 0)) <= 1e-10 * mag);
    CHECK(std::abs(e.q * sc - F(0, 1)) <= 1e-10 * mag);
    CHECK(std::abs(e.q_prev * sc - F(1, 1)) <= 1e-10 * mag);
  }
}

TEST_CASE("log-log fits") {
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(i);
  }
  CHECK(fit_loglog_slope(x, y).slope == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> x2 = {1, 2, 4, 8}, y2 = {3, 3 * std::sqrt(2.0), 6, 3 * std::sqrt(8.0)};
  const auto f = fit_loglog_slope(x2, y2);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  std::mt19937_64 g(4);
  std::normal_distribution<double> nd(0.0, 0.01);
  std::vector<double> x3, y3;
  for (int i = 0; i < 50; ++i) {
    const double t = std::pow(10.0, i / 49.0 * 2);
    x3.push_back(t);
    y3.push_back(t * t * (1.0 + nd(g)));
  }
  const double s = fit_loglog_slope(x3, y3).slope;
  CHECK(s >= 1.95);
  CHECK(s <= 2.05);
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}
