#include <complex>
#include <random>

#include "divgrad/disorder.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/operator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace divgrad;

namespace {
std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(g), nd(g)};
  return v;
}
cplx dot(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}
}  // namespace

TEST_CASE("a ≡ 1 gives the discrete Laplacian") {
  const FiniteJacobiOperator op(std::vector<double>(6, 1.0));
  REQUIRE(op.size() == 5);
  for (double d : op.diag()) CHECK(d == 2.0);
  for (double o : op.offdiag()) CHECK(o == -1.0);
  std::vector<double> delta(4, 0.0);
  delta[0] = 1.0;
  const auto out = FiniteJacobiOperator(std::vector<double>(5, 1.0)).apply(std::span<const double>(delta));
  CHECK(out == std::vector<double>{2.0, -1.0, 0.0, 0.0});
}

TEST_CASE("assemble matches the dense definition") {
  const auto d = CoefficientDistribution::uniform(1.0, 2.0);
  const auto r = sample_sequence(d, 3, {-10, 40});
  const auto op = assemble(r, 20, -5);
  CHECK(op.first_site() == -5);
  const auto s = r.slice(-5, 15);
  const Eigen::MatrixXd ref = oracle::dense_from_bonds({s.begin(), s.end()});
  CHECK((oracle::dense(op) - ref).norm() == 0.0);
  for (double x : op.diag()) CHECK(x > 0.0);
  for (double x : op.offdiag()) CHECK(x < 0.0);
  CHECK_THROWS_AS(assemble(r, 60, 0), CoverageError);
  CHECK_THROWS_AS(assemble(r, 0, 0), ParameterError);
}

TEST_CASE("Neumann right end drops the last bond") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const FiniteJacobiOperator dir(a), neu(a, 0, {}, RightBoundary::neumann);
  CHECK(dir.diag()[2] == 7.0);
  CHECK(neu.diag()[2] == 3.0);
  std::vector<cplx> ones(3, 1.0);
  // only the left bond sees the constant vector
  CHECK(neu.quadratic_form(ones) == doctest::Approx(1.0));
  CHECK(dir.quadratic_form(ones) == doctest::Approx(5.0));
}

TEST_CASE("quadratic form identity, symmetry and bounds") {
  std::mt19937_64 g(11);
  const auto d = CoefficientDistribution::uniform(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = sample_sequence(d, 100 + trial, {0, 64});
    for (auto right : {RightBoundary::dirichlet, RightBoundary::neumann}) {
      const auto op = assemble(r, 64, 0, right);
      const auto phi = random_vector(64, g), psi = random_vector(64, g);
      const double q = op.quadratic_form(phi);
      const double direct = dot(phi, op.apply(phi)).real();
      CHECK(std::abs(q - direct) <= 1e-12 * std::abs(direct));
      CHECK(std::abs(dot(phi, op.apply(psi)) - dot(op.apply(phi), psi)) <=
            1e-12 * std::abs(dot(phi, op.apply(psi))) + 1e-12);
      double amax = 0.0, n2 = 0.0;
      for (double a : r.values()) amax = std::max(amax, a);
      for (auto x : phi) n2 += std::norm(x);
      CHECK(q >= 0.0);
      CHECK(q <= 4.0 * amax * n2);
    }
  }
}

TEST_CASE("quadratic form examples") {
  const FiniteJacobiOperator op(std::vector<double>(11, 1.0));
  std::vector<cplx> delta(10, 0.0);
  delta[0] = 1.0;
  CHECK(op.quadratic_form(delta) == doctest::Approx(2.0));
  CHECK(op.quadratic_form(std::vector<cplx>(10, 0.0)) == 0.0);
  CHECK(op.quadratic_form(std::vector<cplx>(10, 1.0)) > 0.0);
  CHECK(op.apply(std::vector<cplx>(10, 0.0)) == std::vector<cplx>(10, 0.0));
  CHECK_THROWS_AS(op.apply(std::vector<cplx>(9, 0.0)), ParameterError);
}

TEST_CASE("invalid bonds are rejected") {
  CHECK_THROWS_AS(FiniteJacobiOperator(std::vector<double>{1.0}), ParameterError);
  CHECK_THROWS_AS(FiniteJacobiOperator(std::vector<double>{1.0, 0.0}), ParameterError);
}
