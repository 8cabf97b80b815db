#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "divgrad/errors.hpp"

namespace divgrad {

namespace detail {
inline double cabs1(double x) noexcept { return std::abs(x); }
inline double cabs1(const std::complex<double>& x) noexcept {
  return std::abs(x.real()) + std::abs(x.imag());
}
}  // namespace detail

/// Solves a general tridiagonal system by Gaussian elimination with partial
/// pivoting (row interchanges between neighbours, LAPACK gtsv scheme).
/// dl: subdiagonal (n−1), d: diagonal (n), du: superdiagonal (n−1).
/// A pivot that is exactly zero is replaced by `zero_pivot` when that is
/// nonzero (inverse iteration), otherwise NumericalError is thrown.
template <class T>
std::vector<T> tridiagonal_solve(std::span<const T> dl_in, std::span<const T> d_in,
                                 std::span<const T> du_in, std::span<const T> rhs,
                                 double zero_pivot = 0.0) {
  using detail::cabs1;
  const std::size_t n = d_in.size();
  if (n == 0 || rhs.size() != n || dl_in.size() + 1 != n || du_in.size() + 1 != n) {
    throw ParameterError("tridiagonal_solve: inconsistent sizes");
  }
  std::vector<T> dl(dl_in.begin(), dl_in.end()), d(d_in.begin(), d_in.end()),
      du(du_in.begin(), du_in.end()), b(rhs.begin(), rhs.end());
  auto fix = [&](T& p) {
    if (p == T(0)) {
      if (zero_pivot == 0.0) throw NumericalError("tridiagonal_solve: singular matrix");
      p = T(zero_pivot);
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (cabs1(d[i]) >= cabs1(dl[i])) {
      fix(d[i]);
      const T fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = T(0);
    } else {
      const T fact = d[i] / dl[i];
      d[i] = dl[i];
      const T temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = T(0);
      }
      du[i] = temp;
      const T tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  fix(d[n - 1]);
  // dl now holds the second superdiagonal of U
  b[n - 1] /= d[n - 1];
  if (n == 1) return b;
  b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) {
    b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  }
  return b;
}

}  // namespace divgrad
