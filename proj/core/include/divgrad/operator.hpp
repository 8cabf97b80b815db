#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divgrad/disorder.hpp"
#include "divgrad/mat2.hpp"

namespace divgrad {

/// Right end condition: Dirichlet (φ_N = 0) or Neumann (φ_N = φ_{N−1}, which
/// drops the last bond from the final diagonal entry). The left end is always
/// Dirichlet.
enum class RightBoundary { dirichlet, neumann };

/// Dirichlet restriction of H to N consecutive sites, stored as a symmetric
/// tridiagonal matrix. Array site i is lattice site first_site + i; it uses
/// the left bond a_{first+i} and the right bond a_{first+i+1}, so the
/// operator consumes N+1 coefficients.
///
///   diag[i]    = a_{first+i} + a_{first+i+1}
///   offdiag[i] = −a_{first+i+1}          (couples i and i+1)
class FiniteJacobiOperator {
 public:
  /// bonds[k] = a_{first_site + k}, k = 0..N (so bonds.size() = N + 1).
  explicit FiniteJacobiOperator(std::vector<double> bonds, std::int64_t first_site = 0,
                                std::string provenance = {},
                                RightBoundary right = RightBoundary::dirichlet);

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(diag_.size()); }
  std::int64_t first_site() const noexcept { return first_; }
  std::span<const double> diag() const noexcept { return diag_; }
  std::span<const double> offdiag() const noexcept { return off_; }
  /// offdiag[i]², cached for Sturm sequences.
  std::span<const double> offdiag_squared() const noexcept { return off2_; }
  std::span<const double> bonds() const noexcept { return bonds_; }
  const std::string& provenance() const noexcept { return provenance_; }
  RightBoundary right_boundary() const noexcept { return right_; }

  /// Gershgorin bound max_i (|diag_i| + |off_{i−1}| + |off_i|) ≥ ‖H‖; at most 4·max a.
  double norm_bound() const noexcept { return norm_bound_; }

  std::vector<cplx> apply(std::span<const cplx> phi) const;
  std::vector<double> apply(std::span<const double> phi) const;

  /// Σ_k a_k |φ_k − φ_{k−1}|² with φ_{−1} = 0 and the right end condition.
  double quadratic_form(std::span<const cplx> phi) const;

 private:
  std::vector<double> bonds_, diag_, off_, off2_;
  std::int64_t first_ = 0;
  double norm_bound_ = 0.0;
  std::string provenance_;
  RightBoundary right_ = RightBoundary::dirichlet;
};

/// Restriction to sites first_site .. first_site + N − 1; needs a_first..a_{first+N}.
FiniteJacobiOperator assemble(const DisorderRealization& r, std::int64_t N,
                              std::int64_t first_site = 0,
                              RightBoundary right = RightBoundary::dirichlet);

}  // namespace divgrad
