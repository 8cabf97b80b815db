#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divgrad/disorder.hpp"
#include "divgrad/mat2.hpp"
#include "divgrad/transfer.hpp"

namespace divgrad {

/// Rotation frame of the isotopic chain at energy E:
/// η = arccos(1 − E/(2κ)), P = [[1, −cos η], [0, sin η]].
struct ConjugacyFrame {
  double E = 0.0;
  double kappa = 0.0;
  double eta = 0.0;
  double cos_eta = 0.0;
  double sin_eta = 0.0;
  Mat2R P;
  Mat2R P_inv;
  /// 0 < E < 2κ, where |Q_n| ≤ √(2E/κ) and the norm bounds on P⁻¹ hold.
  bool in_paper_regime() const noexcept { return E < 2.0 * kappa; }
};

/// Requires 0 < E < 4κ (DomainError otherwise).
ConjugacyFrame frame(double E, double kappa);

/// W_n = [[1, −a_n], [1, E − a_n]] maps (a_n u_n, u_{n−1}) to (v_n, v_{n−1}),
/// v_n = a_n(u_n − u_{n−1}). det W_n = E.
struct WMatrix {
  Mat2R w;
  Mat2R w_inv;
};
WMatrix w_matrix(double a_n, double E);

/// B_j^z = [[2 − z/a_j, −1], [1, 0]].
Mat2C isotopic_step(double a_j, cplx z);

/// F_n^z = B_{n−1} ⋯ B_0 from a[0..n−1].
LogNormProduct isotopic_product(std::span<const double> a, std::int64_t n, cplx z);

struct ConjugacyReport {
  /// max_ij |F_ij − (W_n T_n W_0⁻¹)_ij| / ‖F‖.
  double residual = 0.0;
  double log_norm_T = 0.0;
  double log_norm_F = 0.0;
  /// c = (6a_+ + 2)², from ‖W_n‖ ≤ E + 2a_n + 2 and ‖W⁻¹‖ = ‖W‖/E.
  double c = 0.0;
  /// (E/c)‖F‖ ≤ ‖T‖ ≤ (c/E)‖F‖.
  bool sandwich_ok = false;
};

/// Compares F_n^E with W_n T_n^E W_0⁻¹ on the realization (needs a_0..a_n).
ConjugacyReport conjugate_check(const DisorderRealization& r, std::int64_t n, double E);

/// Q_n = (E / sin η)(1/κ − 1/a_n).
double qn(double a_n, const ConjugacyFrame& f) noexcept;

/// Modified Prüfer variables: ρ_n(cos χ_n, sin χ_n) = P(v_n, v_{n−1}).
/// chi is the continuous lift (never reduced mod π).
struct PruferState {
  std::int64_t n = 0;
  double log_rho = 0.0;
  double chi = 0.0;
};

/// State at n = 0 for the initial data (a_0 u_0, u_{−1}) = (cos β_0, sin β_0).
/// β_0 = 0 is the Dirichlet condition u_{−1} = 0, giving (v_0, v_{−1}) = (1, 1)
/// and χ_0 = (π − η)/2 independently of a_0.
PruferState prufer_initial(const ConjugacyFrame& f, double a_0, double beta0 = 0.0);

/// One step of
///   ρ' cos χ' = ρ [cos(χ + η) + Q sin(χ + η)],  ρ' sin χ' = ρ sin(χ + η),
/// computed in vector form (no cotangent). The lift keeps χ' in the same
/// π-interval as χ + η, i.e. χ' − (χ + η) = atan2(−Q sin²φ, 1 + Q sinφ cosφ).
PruferState prufer_step(const PruferState& s, double a_n, const ConjugacyFrame& f) noexcept;

/// Fast Prüfer evolution: unit vector plus half-plane winding counter, radius
/// accumulated as a rescaled product. Equivalent to iterating prufer_step.
class PruferEvolver {
 public:
  PruferEvolver(const ConjugacyFrame& f, double chi0);
  explicit PruferEvolver(const ConjugacyFrame& f) : PruferEvolver(f, 0.5 * (kPi - f.eta)) {}

  /// Advances by one site with coefficient a_n. Returns sin(χ_n + η), the
  /// martingale increment factor of this step.
  double step(double a_n) noexcept;

  std::int64_t n() const noexcept { return n_; }
  double log_rho_ratio() const noexcept;  // log(ρ_n / ρ_0)
  double chi() const noexcept;
  PruferState state(double log_rho0 = 0.0) const noexcept;

  static constexpr double kPi = 3.14159265358979323846;

 private:
  double c_, s_;  // (cos χ, sin χ)
  double ce_, se_;
  double kinv_, qscale_;
  std::int64_t winding_ = 0;
  std::int64_t n_ = 0;
  double log_acc_ = 0.0;
  double r2_prod_ = 1.0;
};

struct InitialPhaseMax {
  double rho_ratio_max = 1.0;
  double log_rho_ratio_max = 0.0;
  double chi0_argmax = 0.0;
  int grid_points = 0;
};

/// max over χ_0 ∈ [0, π) of ρ_n/ρ_0 along a_0..a_{n−1}: a uniform grid of
/// `grid` phases followed by golden-section refinement around the best node.
InitialPhaseMax max_over_initial_phase(const DisorderRealization& r, std::int64_t n,
                                       const ConjugacyFrame& f, int grid = 64);

struct MartingaleRow {
  std::int64_t m = 0;
  double threshold = 0.0;
  double empirical_prob = 0.0;           // P(X_m ≥ threshold)
  double empirical_prob_flipped = 0.0;   // P(−X_m ≥ threshold)
  double empirical_prob_two_sided = 0.0; // P(|X_m| > δ√m·max|Q|), δ = √2 n^{α/2}
  double azuma_bound = 0.0;              // e^{−n^α}
  double binomial_stderr = 0.0;          // √(b(1 − b)/R) at b = azuma_bound
  bool pass = false;
};

/// X_m = Σ_{i<m} Q_i sin(χ_i + η) against 2κ^{−1/2}E^{1/2}n^{α/2}m^{1/2},
/// at m ∈ {n/4, n/2, n}; replicate r uses seed derive_seed(master, r).
std::vector<MartingaleRow> martingale_tail(const CoefficientDistribution& dist, double E,
                                           std::int64_t n, double alpha, std::int64_t replicates,
                                           std::uint64_t master_seed);

struct LdtReport {
  double empirical_prob = 0.0;  // fraction with ‖T_n^{E+i/T}‖ ≤ C E^{−3/2}
  double paper_bound = 0.0;     // 1 − n e^{−n^α}
  double C_used = 0.0;
  double C_min = 0.0;           // max over replicates of ‖T_n‖ E^{3/2}
  std::int64_t replicates = 0;
};

/// Empirical large-deviation check for ‖T_n^z‖, z = E + i/T. Rejects
/// parameters violating n^{1+2α}E ≤ 1 or n ≤ E^{3/2}T with DomainError.
LdtReport transfer_norm_ldt(const CoefficientDistribution& dist, double E, double T,
                            std::int64_t n, double alpha, std::int64_t replicates,
                            std::uint64_t master_seed, double C = 10.0);

struct PhaseIds {
  double chi_N = 0.0;
  double ids_value = 0.0;  // χ_N / (πN)
};

/// N Prüfer steps over a_0..a_{N−1} from the Dirichlet initial phase.
PhaseIds ids_via_phase(const DisorderRealization& r, std::int64_t N, double E);

struct OscillatoryReport {
  double mean_cos2 = 0.0, stderr_cos2 = 0.0;
  double mean_cos4 = 0.0, stderr_cos4 = 0.0;
  double bound = 0.0;  // C_fit √E
  bool pass = false;
};

/// (1/n)E Σ_{i<n} cos 2(χ_i + η) and cos 4(χ_i + η); requires n > 1/E.
OscillatoryReport oscillatory_sum_check(const CoefficientDistribution& dist, double E,
                                        std::int64_t n, std::int64_t replicates,
                                        std::uint64_t master_seed, double C_fit);

/// C_fit = max(|mean_cos2|, |mean_cos4|) / √E_ref, maximized over chain
/// lengths from just above 1/E_ref up to n_max (24 geometric points). The
/// initial-phase transient ~ 1/(n sin η) oscillates in n, so a single length
/// would land on an arbitrary phase of it.
double calibrate_oscillatory_constant(const CoefficientDistribution& dist, double E_ref,
                                      std::int64_t n_max, std::int64_t replicates,
                                      std::uint64_t master_seed);

/// L(E) ≈ (1/n) log(ρ_n/ρ_0) averaged over replicates (seed derive_seed(master, r)).
LyapunovEstimate lyapunov_via_prufer(const CoefficientDistribution& dist, double E,
                                     std::int64_t n, std::int64_t replicates,
                                     std::uint64_t master_seed);

}  // namespace divgrad
