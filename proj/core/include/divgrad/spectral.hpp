#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "divgrad/disorder.hpp"
#include "divgrad/mat2.hpp"
#include "divgrad/operator.hpp"

namespace divgrad {

/// #{eigenvalues ≤ E}: number of negative pivots of the LDLᵀ factorization of
/// H − E, with near-zero pivots replaced by −pivmin.
std::int64_t count_eigenvalues_below(const FiniteJacobiOperator& op, double E);

/// k-th smallest eigenvalue (k = 0..N−1) by bisection on the Sturm count,
/// refined until the bracket cannot be split further.
double eigenvalue_by_index(const FiniteJacobiOperator& op, std::int64_t k);

/// All N eigenvalues in ascending order. Throws CapacityError if N > cap.
std::vector<double> full_spectrum(const FiniteJacobiOperator& op, std::int64_t cap = 8192);

/// Eigenvalues in (lo, hi], ascending.
std::vector<double> eigenvalues_in(const FiniteJacobiOperator& op, double lo, double hi);

struct EigenPair {
  double eigenvalue = 0.0;
  std::vector<double> eigenvector;  // unit norm, largest-modulus entry positive
  double residual = 0.0;            // ‖Hψ − λψ‖
  std::int64_t index = 0;           // position in the ascending spectrum
};

/// Eigenpair whose eigenvalue is closest to `target`.
EigenPair eigenpair_near(const FiniteJacobiOperator& op, double target);

/// Complete eigensystem; vectors[j] belongs to values[j].
struct Eigensystem {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  double max_residual = 0.0;
  std::int64_t reorthogonalized = 0;  // vectors belonging to tight clusters
};

/// Bisection for the values, inverse iteration for the vectors, modified
/// Gram–Schmidt inside clusters with gaps below 1e−6·‖H‖.
Eigensystem eigendecompose(const FiniteJacobiOperator& op, std::int64_t cap = 8192);

/// Half-open index ranges [begin, end) of runs of eigenvalues closer than
/// 1e−6·‖H‖ (values ascending). Singletons are returned as runs of length 1.
std::vector<std::pair<std::size_t, std::size_t>> eigenvalue_clusters(
    const FiniteJacobiOperator& op, std::span<const double> values);

/// Eigenvectors for values[begin..end), where the range is a union of whole
/// clusters; vectors inside a cluster are orthogonalized against each other.
std::vector<std::vector<double>> eigenvectors_for(const FiniteJacobiOperator& op,
                                                  std::span<const double> values,
                                                  std::size_t begin, std::size_t end);

/// log|det(H − z)| = Σ log|d_i| over the complex LDLᵀ pivots.
double log_abs_det(const FiniteJacobiOperator& op, cplx z);

/// Tr (H − z)⁻¹, from the derivative of the pivot recurrence. Im z ≠ 0.
cplx resolvent_trace(const FiniteJacobiOperator& op, cplx z);

struct IdsCurve {
  std::vector<double> E_grid;
  std::vector<double> mean_ids;
  std::vector<double> stderr_;
  std::int64_t N = 0;
  std::int64_t replicates = 0;
  std::string ensemble;
};

/// (1/N)#{E_j ≤ E} averaged over replicates; replicate r uses the realization
/// derive_seed(master, r) on sites 0..N−1.
IdsCurve ids_curve(const CoefficientDistribution& dist, std::int64_t N,
                   std::span<const double> E_grid, std::int64_t replicates,
                   std::uint64_t master_seed);

/// E_grid geometric from lo to hi with `points` nodes.
std::vector<double> geometric_grid(double lo, double hi, std::int64_t points);

struct ThoulessReport {
  cplx z;
  std::int64_t N = 0;
  std::int64_t replicates = 0;
  std::int64_t excluded = 0;  // real E: eigenvalues within 1e−10 of E left out of the sum
  double L_thouless = 0.0;
  double stderr_thouless = 0.0;
  double L_transfer = 0.0;
  double stderr_transfer = 0.0;
  double diff = 0.0;  // L_thouless − L_transfer
};

/// −E[log a_0] + (1/N) log|det(H_N − z)| per replicate, averaged, next to the
/// transfer-matrix estimate of L(z) at length transfer_n.
ThoulessReport thouless_check(const CoefficientDistribution& dist, cplx z, std::int64_t N,
                              std::int64_t replicates, std::uint64_t master_seed,
                              std::int64_t transfer_n = 100000);

struct DecayFit {
  std::int64_t peak = 0;
  double length = 0.0;  // ℓ with |ψ_n| ~ e^{−|n − peak|/ℓ}
  double slope = 0.0;
  std::int64_t points = 0;
};

/// Least-squares fit of log|ψ_n| against |n − peak| over entries above `floor`.
DecayFit decay_length_fit(std::span<const double> psi, double floor = 1e-12);

}  // namespace divgrad
