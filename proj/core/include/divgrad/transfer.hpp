#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divgrad/disorder.hpp"
#include "divgrad/mat2.hpp"

namespace divgrad {

/// One-step transfer matrix (1/a_j)·[[a_{j+1} + a_j − z, −a_j²], [1, 0]].
/// Maps (a_j u_j, u_{j−1}) to (a_{j+1} u_{j+1}, u_j) for solutions of Hu = zu.
Mat2C step_matrix(double a_j, double a_j1, cplx z);

/// Overflow-safe product of unimodular-ish 2×2 matrices.
///
/// Stored as T = Q · diag(d1, d2) · [[1, u], [0, 1]] with Q unitary and the
/// diagonal factors kept as mantissa × e^{exponent}. The triangular form lets
/// det T = det Q · d1 · d2 be reconstructed without the cancellation that
/// ruins ad − bc once ‖T‖ is large, and log‖T‖ stays finite for any length.
class LogNormProduct {
 public:
  /// Rescaling threshold R = e^64 on the diagonal mantissas.
  static constexpr double kRescaleLog = 64.0;

  LogNormProduct() = default;
  explicit LogNormProduct(const Mat2C& m) { left_multiply(m); }

  /// T ← m · T.
  void left_multiply(const Mat2C& m);

  /// Number of factors multiplied in so far (negated by inverse()).
  std::int64_t steps() const noexcept { return steps_; }

  /// log ‖T‖ in the operator 2-norm.
  double log_norm() const noexcept;
  /// log of the entrywise maximum modulus.
  double log_max_norm() const noexcept;
  /// log ‖T v‖ for a nonzero vector v.
  double log_norm_applied(const Vec2C& v) const noexcept;

  /// T = e^{log_scale()} · normalized(), with ‖normalized()‖ ≥ 1.
  double log_scale() const noexcept;
  Mat2C normalized() const noexcept;

  /// Dense T; throws NumericalError if entries would overflow.
  Mat2C matrix() const;
  /// T scaled by e^{−shift}; entries finite as long as log_norm() − shift is.
  Mat2C scaled_matrix(double shift) const noexcept;

  /// det T reconstructed from the factors (det Q · d1 · d2).
  cplx determinant() const noexcept;

  /// T⁻¹ in the same representation.
  LogNormProduct inverse() const;

 private:
  struct Scaled {
    cplx m{1.0};
    double e = 0.0;  // value = m · e^{e}
    double log_abs() const noexcept { return e + std::log(std::abs(m)); }
    void renormalize() noexcept;
  };
  Mat2C q_ = Mat2C::identity();
  Scaled d1_, d2_;
  cplx u_{0.0};
  std::int64_t steps_ = 0;

  // [[1, u], [0, d2/d1]] with d2/d1 finite or flushed to 0, times the
  // exponent that has been factored out.
  double log_norm_du() const noexcept;
};

/// T_n^z = A_{n−1} ⋯ A_0 for n > 0, identity for n = 0, and
/// [A_{−1} ⋯ A_{−n}]⁻¹ for n < 0. Needs a_0..a_n (n ≥ 0) or a_{−|n|}..a_0.
LogNormProduct transfer_product(const DisorderRealization& r, std::int64_t n, cplx z);

/// Same product from an explicit coefficient array a[0..n] (a.size() ≥ n+1).
LogNormProduct transfer_product(std::span<const double> a, std::int64_t n, cplx z);

struct DeterministicBoundReport {
  double norm = 0.0;          // ‖T_n^z‖, may be +inf if it overflows
  double log_norm = 0.0;
  double bound_linear = 0.0;  // C_1 |n|
  double log_bound_exp = 0.0; // log(C_1 |n| e^{C_2 n² |z|})
  bool pass = false;
};

/// ‖T_n^0‖ ≤ C_1|n| and ‖T_n^z‖ ≤ C_1|n|e^{C_2 n²|z|}, C_1 = 8a_+²/a_−,
/// C_2 = 8a_+²/a_−², with a_± the support bounds of the ensemble.
DeterministicBoundReport deterministic_bound_check(const DisorderRealization& r, std::int64_t n,
                                                   cplx z);

struct LyapunovEstimate {
  cplx z;
  std::int64_t n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicates = 0;
  std::vector<double> samples;  // (1/n) log‖T_n^z‖ per replicate, by index
};

/// (1/n) log‖T_n^z‖ along the realization with seed `seed`, coefficients
/// a_0..a_n generated on the fly.
double log_norm_rate(const CoefficientDistribution& dist, std::uint64_t seed, cplx z,
                     std::int64_t n);

/// Monte Carlo estimate of L(z): replicate r uses seed derive_seed(master, r);
/// replicates run in parallel and are reduced in index order.
LyapunovEstimate lyapunov_estimate(const CoefficientDistribution& dist, cplx z, std::int64_t n,
                                   std::int64_t replicates, std::uint64_t master_seed);

/// One entry row of F_k^z = B_{k−1} ⋯ B_0 at z = −x + iδ: first column
/// (P_k, P_{k−1}) and second column (Q_k, Q_{k−1}).
struct HyperbolicEntry {
  cplx p, p_prev, q, q_prev;
  double log_scale = 0.0;  // entries are scaled by e^{−log_scale}
  double log_max_norm() const noexcept;
};

/// Runs P_{k+1} = (2 + (x − iδ)b_k)P_k − P_{k−1} with P_0 = 1, P_{−1} = 0 and
/// the same recurrence for Q with Q_0 = 0, Q_{−1} = 1, k = 0..n−1. Returns
/// n+1 rows (k = 0..n). Rescales jointly to avoid overflow.
std::vector<HyperbolicEntry> hyperbolic_recurrence(std::span<const double> b, double x,
                                                   double delta, std::int64_t n);

struct HyperbolicBounds {
  double log_norm = 0.0;  // log ‖F_n‖_max
  double lower = 0.0;     // (n/2)√(x b_−)
  double upper = 0.0;     // 2n√(x b_+) + log(3/√(x b_+)); meaningful for δ = 0
  bool lower_ok = false;
  bool upper_ok = false;
};

HyperbolicBounds hyperbolic_bounds(std::span<const double> b, double x, double delta,
                                   std::int64_t n);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares of log y on log x. Needs ≥ 3 points, all positive.
LogLogFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace divgrad
