#include "divgrad/operator.hpp"

#include <algorithm>
#include <cmath>

#include "divgrad/errors.hpp"

namespace divgrad {

namespace {

void check_length(std::size_t got, std::int64_t want, const char* what) {
  if (static_cast<std::int64_t>(got) != want) {
    throw ParameterError(std::string(what) + ": vector length " + std::to_string(got) +
                         " does not match operator size " + std::to_string(want));
  }
}

}  // namespace

FiniteJacobiOperator::FiniteJacobiOperator(std::vector<double> bonds, std::int64_t first_site,
                                           std::string provenance, RightBoundary right)
    : bonds_(std::move(bonds)),
      first_(first_site),
      provenance_(std::move(provenance)),
      right_(right) {
  if (bonds_.size() < 2) throw ParameterError("FiniteJacobiOperator: need N >= 1 (N+1 bonds)");
  for (double a : bonds_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ParameterError("FiniteJacobiOperator: bond coefficients must be finite and > 0");
    }
  }
  const std::size_t n = bonds_.size() - 1;
  diag_.resize(n);
  off_.resize(n - 1);
  off2_.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) diag_[i] = bonds_[i] + bonds_[i + 1];
  if (right_ == RightBoundary::neumann) diag_[n - 1] = bonds_[n - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    off_[i] = -bonds_[i + 1];
    off2_[i] = bonds_[i + 1] * bonds_[i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(off_[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(off_[i]) : 0.0;
    norm_bound_ = std::max(norm_bound_, std::abs(diag_[i]) + left + right);
  }
}

std::vector<cplx> FiniteJacobiOperator::apply(std::span<const cplx> phi) const {
  check_length(phi.size(), size(), "apply");
  const std::size_t n = diag_.size();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = diag_[i] * phi[i];
    if (i > 0) v += off_[i - 1] * phi[i - 1];
    if (i + 1 < n) v += off_[i] * phi[i + 1];
    out[i] = v;
  }
  return out;
}

std::vector<double> FiniteJacobiOperator::apply(std::span<const double> phi) const {
  check_length(phi.size(), size(), "apply");
  const std::size_t n = diag_.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * phi[i];
    if (i > 0) v += off_[i - 1] * phi[i - 1];
    if (i + 1 < n) v += off_[i] * phi[i + 1];
    out[i] = v;
  }
  return out;
}

double FiniteJacobiOperator::quadratic_form(std::span<const cplx> phi) const {
  check_length(phi.size(), size(), "quadratic_form");
  const std::size_t n = diag_.size();
  double s = 0.0;
  const std::size_t last = right_ == RightBoundary::neumann ? n - 1 : n;
  for (std::size_t k = 0; k <= last; ++k) {
    const cplx right = k < n ? phi[k] : cplx(0.0);
    const cplx left = k > 0 ? phi[k - 1] : cplx(0.0);
    s += bonds_[k] * std::norm(right - left);
  }
  return s;
}

FiniteJacobiOperator assemble(const DisorderRealization& r, std::int64_t N,
                              std::int64_t first_site, RightBoundary right) {
  if (N < 1) throw ParameterError("assemble: N must be >= 1");
  const auto s = r.slice(first_site, first_site + N);
  std::string prov = r.distribution().to_string() + ";seed=" + std::to_string(r.master_seed()) +
                     ";N=" + std::to_string(N) + ";first=" + std::to_string(first_site) +
                     (right == RightBoundary::neumann ? ";right=neumann" : "");
  return FiniteJacobiOperator(std::vector<double>(s.begin(), s.end()), first_site, std::move(prov),
                              right);
}

}  // namespace divgrad
