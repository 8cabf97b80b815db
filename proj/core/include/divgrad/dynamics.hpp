#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divgrad/disorder.hpp"
#include "divgrad/mat2.hpp"
#include "divgrad/operator.hpp"

namespace divgrad {

/// G^z(n, s) for all sites n of a finite window, s the source site.
struct GreenColumn {
  cplx z;
  std::int64_t first_site = 0;  // lattice index of values[0]
  std::int64_t source = 0;      // lattice index of the source
  std::vector<cplx> values;
  double residual = 0.0;  // ‖(H − z)G − δ_s‖ / ((‖H‖ + |z|)‖G‖)

  cplx at(std::int64_t n) const;  // lattice index; CoverageError outside
};

/// Solves (H − z)G = δ_source by pivoted complex tridiagonal elimination.
/// `source` is a lattice index inside the window; Im z must be nonzero.
GreenColumn green_column(const FiniteJacobiOperator& op, cplx z, std::int64_t source = 0);

/// Window of N sites with lattice 0 at array index N/2 (sites −N/2 .. N−1−N/2).
FiniteJacobiOperator centered_window(const DisorderRealization& r, std::int64_t N);
/// Sample path covering exactly the bonds centered_window needs.
DisorderRealization centered_realization(const CoefficientDistribution& dist, std::uint64_t seed,
                                         std::int64_t N);

enum class MomentMode { time_averaged, direct };

struct MomentSeries {
  double q = 0.0;
  std::vector<double> abscissae;  // T (time_averaged) or t (direct)
  std::vector<double> values;
  MomentMode mode = MomentMode::direct;
  std::int64_t N = 0;
  std::string ensemble;
  std::uint64_t seed = 0;
  // direct mode only, per abscissa
  std::vector<double> unitarity_defect;
  std::vector<double> boundary_mass;
};

/// Which resolvent formula is integrated. `exact` reproduces the time average
/// ∫₀^∞ (dt/T) e^{−t/T} Σ|n|^q|⟨δ_n, e^{−itH}δ_0⟩|²; it integrates at Im z = 1/(2T)
/// with prefactor 1/(2πT). `paper` integrates (1/(πT))∫Σ|n|^q|G^{E+i/T}|² dE,
/// which equals the exact time average at T/2.
enum class ParsevalForm { exact, paper };

struct QuadratureSpec {
  std::int64_t uniform_cells = 4096;  // cells on [−pad, ‖H‖_bound + pad]
  double pad = 0.5;
  std::int64_t geometric_levels = 24;  // breakpoints ±2^{−j} down to ~1/(16T)
  std::int64_t tail_nodes = 48;        // Gauss–Legendre nodes per mapped tail
  std::int64_t max_nodes = 2'000'000;  // budget; exceeding it flags the result
  bool doubling_check = false;         // rerun with twice the uniform cells
  ParsevalForm form = ParsevalForm::exact;
};

struct AveragedMoments {
  double T = 0.0;
  std::vector<double> q;
  std::vector<double> values;  // one per q
  std::int64_t quadrature_nodes = 0;
  std::int64_t replicates = 1;
  std::vector<double> doubling_change;  // relative change per q (NaN if not run)
  bool budget_exceeded = false;
  double boundary_weight = 0.0;  // largest (1/πT)∫|G|² share on the outer 10 sites
};

/// Resolvent-domain M_T^q for one operator; the source is lattice site 0.
AveragedMoments moments_averaged(const FiniteJacobiOperator& op, double T,
                                 std::span<const double> q, const QuadratureSpec& spec = {});

/// Replicate mean over centered windows of N sites; replicate r uses
/// derive_seed(master, r). One task per (replicate, E-node block).
AveragedMoments moments_averaged(const CoefficientDistribution& dist, std::int64_t N, double T,
                                 std::span<const double> q, std::int64_t replicates,
                                 std::uint64_t master_seed, const QuadratureSpec& spec = {});

/// Σ_k |n_k|^q |⟨δ_k, e^{−itH}δ_0⟩|² by spectral synthesis, one series per q.
/// Boundary mass is the probability within 10 sites of a wall not adjacent
/// to the source.
std::vector<MomentSeries> moments_direct(const FiniteJacobiOperator& op, std::span<const double> q,
                                         std::span<const double> t_grid,
                                         std::int64_t cap = 8192);

struct TransportExponentFit {
  double q = 0.0;
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  double corridor_lo = 0.0;  // max(0, q/2 − 2)
  double corridor_hi = 0.0;  // q − 1/5
  bool in_corridor = false;  // slope ∈ [lo − 3·stderr, hi + 3·stderr]
  std::int64_t points = 0;
  bool per_q = false;  // slope (and stderr) divided by q; corridor likewise
};

double corridor_lo(double q) noexcept;
double corridor_hi(double q) noexcept;

/// Least-squares slope of log M against log abscissa over [lo, hi]; points
/// with keep[i] == false (if given) are skipped. Needs at least 5 points.
TransportExponentFit fit_transport_exponent(const MomentSeries& s, double lo, double hi,
                                            bool per_q = false,
                                            const std::vector<bool>& keep = {});

/// Borel transform of an empirical measure, stored in the Herglotz convention
/// value = (1/N)Σ 1/(λ_j − z), so Im value > 0 for Im z > 0.
struct BorelValue {
  cplx z;
  cplx value;
  /// (1/N)Σ 1/(z − λ_j), the opposite sign convention.
  cplx z_minus_form() const noexcept { return -value; }
};

BorelValue borel_transform(std::span<const double> eigenvalues, cplx z);
/// Same quantity from the resolvent trace, without eigenvalues.
BorelValue borel_transform(const FiniteJacobiOperator& op, cplx z);

/// ∫₀^{1/T} Im B(E + i/T) dE in closed form over the eigenvalues.
double borel_window_integral(std::span<const double> eigenvalues, double T);
/// Same integral by Gauss–Legendre over the resolvent trace.
double borel_window_integral(const FiniteJacobiOperator& op, double T, int nodes = 64);

struct BorelRow {
  double E = 0.0;
  double delta = 0.0;
  double imB = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct BorelReport {
  std::vector<BorelRow> lower;  // E = 0, delta = 1/T, imB = window integral, bound = atan(1/2) D T^{−1/2}
  std::vector<BorelRow> upper;  // E = 0, imB = Im B(iδ), bound = C δ^{−1/2}
  double D_fit = 0.0;
  double C_fit = 0.0;
  bool herglotz_ok = true;
  std::int64_t N = 0;
  std::int64_t replicates = 0;
};

/// Lower (window integral) and upper (Im B(iδ) ≤ C δ^{−1/2}) Borel checks on
/// the replicate-averaged empirical DOS of N-site operators. C is calibrated
/// as Im B(iδ_cal)·δ_cal^{1/2}·c_margin at δ_cal = deltas.front().
BorelReport borel_checks(const CoefficientDistribution& dist, std::int64_t N,
                         std::int64_t replicates, std::uint64_t master_seed,
                         std::span<const double> T_values, std::span<const double> deltas,
                         double D_fit, double c_margin = 1.0);

struct GreenInequalityReport {
  cplx z;
  double initial_sum = 0.0;    // |g(1)|² + |g(0)|² + |g(−1)|²
  double initial_bound = 0.0;  // 1/(3(a_+ + 1)²)
  bool initial_ok = false;
  std::vector<double> tails;       // Σ_{|m|>n}|G(m,0)|², n = 0..n_max
  std::vector<double> log_max_T;   // log max_{|m|≤n} ‖T_m^z‖
  double c_min = 0.0;              // smallest c with tail ≤ c T⁶ / max‖T_m‖² for all n ≥ 1
  bool tails_monotone = false;
};

/// Initial-mass and tail checks on a centered window of N sites around lattice 0;
/// z = E + i/T. Needs N ≥ 8. n_max defaults to N/2 − 2.
GreenInequalityReport green_inequality_checks(const DisorderRealization& r, std::int64_t N,
                                              double E, double T, std::int64_t n_max = -1);

}  // namespace divgrad
