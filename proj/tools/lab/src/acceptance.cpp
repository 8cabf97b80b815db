#include "divgrad/lab/acceptance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "divgrad/csv.hpp"
#include "divgrad/disorder.hpp"
#include "divgrad/dynamics.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/operator.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/prufer.hpp"
#include "divgrad/random.hpp"
#include "divgrad/spectral.hpp"
#include "divgrad/transfer.hpp"
#include "json.hpp"

namespace divgrad::lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) { return format_double(x); }

CriterionResult verdict(std::string detail, double measured, double expected, double tol,
                        bool pass, const CsvTable& csv) {
  CriterionResult r;
  r.measured = measured;
  r.expected = expected;
  r.tolerance = tol;
  r.pass = pass;
  r.detail = std::move(detail);
  r.csv = csv.str();
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------- A1
CriterionResult a1_unimodularity() {
  constexpr int kCases = 1000;
  const auto uni = CoefficientDistribution::uniform(1.0, 2.0);
  const auto two = CoefficientDistribution::two_point(0.1, 1.0, 0.5);
  struct Row {
    std::int64_t n;
    cplx z;
    double log_norm, err;
  };
  const auto rows = parallel_map(kCases, [&](std::size_t i) {
    const std::uint64_t seed = rng::derive_seed(0xA1, i);
    const std::uint64_t aux = rng::derive_seed(seed, 1);
    const auto& dist = i % 2 == 0 ? uni : two;
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng::word_at(aux, 0) % 10000);
    const double r = rng::uniform01_at(aux, 1), th = 2.0 * kPi * rng::uniform01_at(aux, 2);
    const cplx z = std::polar(r, th);
    const auto real = sample_sequence(dist, seed, {0, n});
    const auto T = transfer_product(real, n, z);
    return Row{n, z, T.log_norm(), std::abs(T.determinant() - 1.0)};
  });
  CsvTable csv({"case", "ensemble", "n", "z_re", "z_im", "log_norm", "det_error"});
  double worst = 0.0, max_log = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    worst = std::max(worst, r.err);
    max_log = std::max(max_log, r.log_norm);
    csv.row() << i << (i % 2 == 0 ? uni.to_string() : two.to_string()) << r.n << r.z.real()
              << r.z.imag() << r.log_norm << r.err;
  }
  return verdict("max |det T − 1| over 1000 cases (max log‖T‖ = " + fmt(max_log) + ")", worst,
                 0.0, 1e-9, worst <= 1e-9, csv);
}

// ---------------------------------------------------------------- A2
CriterionResult a2_conjugacy() {
  constexpr int kCases = 200;
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  struct Row {
    std::int64_t n;
    double E;
    ConjugacyReport rep;
  };
  const auto rows = parallel_map(kCases, [&](std::size_t i) {
    const std::uint64_t seed = rng::derive_seed(0xA2, i);
    const std::uint64_t aux = rng::derive_seed(seed, 1);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng::word_at(aux, 0) % 1000);
    const double E = std::pow(10.0, -3.0 + 3.0 * rng::uniform01_at(aux, 1));
    const auto real = sample_sequence(dist, seed, {0, n});
    return Row{n, E, conjugate_check(real, n, E)};
  });
  CsvTable csv({"case", "n", "E", "residual", "log_norm_T", "log_norm_F", "c", "sandwich_ok"});
  double worst = 0.0;
  bool sandwich = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    worst = std::max(worst, r.rep.residual);
    sandwich = sandwich && r.rep.sandwich_ok;
    csv.row() << i << r.n << r.E << r.rep.residual << r.rep.log_norm_T << r.rep.log_norm_F
              << r.rep.c << r.rep.sandwich_ok;
  }
  return verdict(std::string("max conjugacy residual; norm sandwich ") +
                     (sandwich ? "holds" : "VIOLATED"),
                 worst, 0.0, 1e-9, worst <= 1e-9 && sandwich, csv);
}

// ---------------------------------------------------------------- A3
CriterionResult a3_prufer_matrix() {
  constexpr int kSeeds = 20;
  constexpr std::int64_t n = 100000;
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const double k = kappa(dist);
  const double energies[] = {1e-3, 1e-2, 1e-1, 1.0};
  struct Row {
    double E, prufer, matrix;
  };
  const auto rows = parallel_map(kSeeds, [&](std::size_t s) {
    const double E = energies[s % 4];
    const auto f = frame(E, k);
    const auto real = sample_sequence(dist, rng::derive_seed(0xA3, s), {0, n});
    PruferEvolver ev(f);
    const double chi0 = ev.chi();
    LogNormProduct m;
    const Mat2C P = to_complex(f.P), Pinv = to_complex(f.P_inv);
    for (std::int64_t j = 0; j < n; ++j) {
      ev.step(real[j]);
      m.left_multiply(P * isotopic_step(real[j], cplx(E)) * Pinv);
    }
    const double lhs = ev.log_rho_ratio();
    const double rhs = m.log_norm_applied({cplx(std::cos(chi0)), cplx(std::sin(chi0))});
    return Row{E, lhs, rhs};
  });
  CsvTable csv({"seed_index", "E", "log_rho_ratio", "log_norm_PFPinv_x", "abs_diff"});
  double worst = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const double d = std::abs(rows[s].prufer - rows[s].matrix);
    worst = std::max(worst, d);
    csv.row() << s << rows[s].E << rows[s].prufer << rows[s].matrix << d;
  }
  return verdict("max |Δlog ρ − log‖P F P⁻¹ x₀‖|, n = 1e5, E ∈ {1e-3, 1e-2, 0.1, 1}", worst, 0.0,
                 1e-8, worst <= 1e-8, csv);
}

// ---------------------------------------------------------------- A4
struct IdsCheck {
  double worst = 0.0;
  bool pass = true;
};

IdsCheck ids_check(const CoefficientDistribution& dist, double literal, double tol,
                   std::uint64_t seed, CsvTable& csv) {
  const auto grid = geometric_grid(1e-3, 5e-2, 12);
  const auto c = ids_curve(dist, 3000, grid, 100, seed);
  IdsCheck out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ratio = c.mean_ids[i] / std::sqrt(grid[i]);
    const double d = rel(ratio, literal);
    out.worst = std::max(out.worst, d);
    out.pass = out.pass && d <= tol;
    csv.row() << dist.to_string() << grid[i] << c.mean_ids[i] << c.stderr_[i] << ratio << literal
              << d;
  }
  return out;
}

CriterionResult a4_ids() {
  const auto uni = CoefficientDistribution::uniform(1.0, 2.0);
  const auto two = CoefficientDistribution::two_point(0.1, 1.0, 0.5);
  CsvTable csv({"ensemble", "E", "mean_ids", "stderr", "ids_over_sqrtE", "reference", "rel_dev"});
  const auto u = ids_check(uni, 0.265016, 0.10, 0xA4, csv);
  const auto t = ids_check(two, 0.746510, 0.15, 0xA4 + 1, csv);
  // the literal constants are the closed-form prefactor 1/(π√κ)
  const bool consts = rel(ids_prefactor(uni), 0.265016) < 1e-4 && rel(ids_prefactor(two), 0.746510) < 1e-4;
  return verdict("worst rel. deviation of 𝒩(E)/√E: uniform(1,2) " + fmt(u.worst) +
                     " (tol 0.10), two_point(0.1,1,0.5) " + fmt(t.worst) + " (tol 0.15)",
                 std::max(u.worst / 0.10, t.worst / 0.15), 0.0, 1.0, u.pass && t.pass && consts,
                 csv);
}

// ---------------------------------------------------------------- A5
CriterionResult a5_lyapunov() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const double k = lyapunov_slope_constant(dist);
  const auto grid = geometric_grid(1e-3, 1e-2, 5);
  CsvTable csv({"E", "n", "replicates", "mean", "stderr", "L_over_E", "k", "rel_dev"});
  csv.add_meta("estimator", "prufer_radius");
  std::vector<double> L;
  double worst = 0.0;
  for (double E : grid) {
    const auto est = lyapunov_via_prufer(dist, E, 1'000'000, 100, 0xA5);
    const double d = rel(est.mean / E, k);
    worst = std::max(worst, d);
    L.push_back(est.mean);
    csv.row() << E << est.n << est.replicates << est.mean << est.stderr_ << est.mean / E << k << d;
  }
  const auto fit = fit_loglog_slope(grid, L);
  csv.add_meta("loglog_slope", fit.slope);
  const bool ok = worst <= 0.25 && std::abs(fit.slope - 1.0) <= 0.1 && rel(k, 3.525e-3) < 1e-3;
  return verdict("worst |L/E − k|/k = " + fmt(worst) + " (tol 0.25), log-log slope " +
                     fmt(fit.slope) + " (1 ± 0.1), k = " + fmt(k),
                 worst, 0.0, 0.25, ok, csv);
}

// ---------------------------------------------------------------- A6
CriterionResult a6_hyperbolic() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const auto xs = geometric_grid(1e-4, 1e-2, 5);
  CsvTable csv({"part", "x", "n", "replicates_or_seed", "value", "stderr_or_lower", "upper", "ok"});
  std::vector<double> L;
  for (double x : xs) {
    const auto est = lyapunov_estimate(dist, cplx(-x), 100000, 20, 0xA6);
    L.push_back(est.mean);
    csv.row() << "lyapunov" << x << est.n << est.replicates << est.mean << est.stderr_ << 0.0
              << true;
  }
  const auto fit = fit_loglog_slope(xs, L);
  bool bounds = true;
  constexpr std::int64_t n = 1000;
  for (int s = 0; s < 50; ++s) {
    const auto real = sample_sequence(dist, rng::derive_seed(0xA6 + 1, static_cast<std::uint64_t>(s)), {0, n - 1});
    std::vector<double> b(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) b[static_cast<std::size_t>(j)] = 1.0 / real[j];
    for (double x : {1e-4, 1e-3, 1e-2}) {
      const auto hb = hyperbolic_bounds(b, x, 0.0, n);
      bounds = bounds && hb.lower_ok && hb.upper_ok;
      csv.row() << "appendix_b" << x << n << s << hb.log_norm << hb.lower << hb.upper
                << (hb.lower_ok && hb.upper_ok);
    }
  }
  const bool ok = std::abs(fit.slope - 0.5) <= 0.05 && bounds;
  return verdict("slope of log L vs log(−E) = " + fmt(fit.slope) + " (0.5 ± 0.05); entry bounds " +
                     (bounds ? "hold on 50 seeds" : "VIOLATED"),
                 fit.slope, 0.5, 0.05, ok, csv);
}

// ---------------------------------------------------------------- A7
CriterionResult a7_counting() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const double k = kappa(dist);
  constexpr std::int64_t N = 2000;
  struct Row {
    std::vector<double> E, chi, count;
  };
  const auto rows = parallel_map(20, [&](std::size_t s) {
    const auto real = sample_sequence(dist, rng::derive_seed(0xA7, s), {0, N});
    const auto op = assemble(real, N, 0, RightBoundary::neumann);
    Row r;
    for (int i = 1; i <= 100; ++i) {
      const double E = 4.0 * k * i / 101.0;
      r.E.push_back(E);
      r.chi.push_back(ids_via_phase(real, N, E).chi_N);
      r.count.push_back(static_cast<double>(count_eigenvalues_below(op, E)));
    }
    return r;
  });
  CsvTable csv({"seed_index", "E", "chi_N", "sturm_count", "mismatch"});
  double worst = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t i = 0; i < rows[s].E.size(); ++i) {
      const double d = std::abs(rows[s].chi[i] / kPi - rows[s].count[i]);
      worst = std::max(worst, d);
      csv.row() << s << rows[s].E[i] << rows[s].chi[i] << rows[s].count[i] << d;
    }
  }
  return verdict("max |χ_N/π − #{E_j ≤ E}|, N = 2000, E ∈ (0, 4κ)", worst, 0.0, 1.0 + 1e-9,
                 worst <= 1.0 + 1e-9, csv);
}

// ---------------------------------------------------------------- A8
Eigen::MatrixXd dense(const FiniteJacobiOperator& op) {
  const auto N = op.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    H(i, i) = op.diag()[static_cast<std::size_t>(i)];
    if (i + 1 < N) H(i, i + 1) = H(i + 1, i) = op.offdiag()[static_cast<std::size_t>(i)];
  }
  return H;
}

// ∫₀^∞ (dt/T) e^{−t/T} Σ_n |n|^q |⟨δ_n, e^{−itH}δ_0⟩|², with the time integral
// done in closed form: Σ_{jk} c_j c_k / (1 + iT(λ_j − λ_k)) has real part
// Σ c_j c_k / (1 + T²(λ_j − λ_k)²).
double time_domain_moment(const FiniteJacobiOperator& op, double T, double q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op));
  const auto& V = es.eigenvectors();
  const auto& lam = es.eigenvalues();
  const Eigen::Index N = V.rows(), s = -op.first_site();
  Eigen::MatrixXd K(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = 0; k < N; ++k) {
      const double d = lam(j) - lam(k);
      K(j, k) = 1.0 / (1.0 + T * T * d * d);
    }
  }
  double total = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    const double w = std::pow(std::abs(static_cast<double>(n - s)), q);
    if (w == 0.0) continue;
    Eigen::VectorXd c(N);
    for (Eigen::Index j = 0; j < N; ++j) c(j) = V(n, j) * V(s, j);
    total += w * c.dot(K * c);
  }
  return total;
}

CriterionResult a8_parseval() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  constexpr std::int64_t N = 64;
  constexpr double T = 20.0, q = 2.0;
  const auto real = centered_realization(dist, rng::derive_seed(0xA8, 0), N);
  const auto op = centered_window(real, N);
  QuadratureSpec spec;
  spec.doubling_check = true;
  const double qs[] = {q};
  const auto res = moments_averaged(op, T, qs, spec);
  const double time = time_domain_moment(op, T, q);
  const double d = rel(res.values[0], time);
  CsvTable csv({"N", "T", "q", "resolvent_Mq", "time_domain_Mq", "rel_diff", "quadrature_nodes",
                "doubling_change"});
  csv.row() << N << T << q << res.values[0] << time << d << res.quadrature_nodes
            << res.doubling_change[0];
  return verdict("relative difference resolvent vs time domain (grid-doubling change " +
                     fmt(res.doubling_change[0]) + ")",
                 d, 0.0, 0.01, d <= 0.01 && res.doubling_change[0] <= 0.005, csv);
}

// ---------------------------------------------------------------- A9
CriterionResult a9_green_oracle() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  constexpr std::int64_t N = 32;
  struct Row {
    cplx z;
    double err, gmax;
  };
  const auto rows = parallel_map(100, [&](std::size_t i) {
    const std::uint64_t seed = rng::derive_seed(0xA9, i);
    const std::uint64_t aux = rng::derive_seed(seed, 1);
    const auto real = sample_sequence(dist, seed, {0, N});
    const auto op = assemble(real, N);
    const double re = -0.5 + 9.0 * rng::uniform01_at(aux, 0);
    double im = std::pow(10.0, -1.3 + 1.3 * rng::uniform01_at(aux, 1));
    if (rng::uniform01_at(aux, 2) < 0.5) im = -im;
    const cplx z(re, im);
    const auto g = green_column(op, z, 0);
    Eigen::MatrixXcd A = dense(op).cast<cplx>();
    A.diagonal().array() -= z;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = A.fullPivLu().solve(rhs);
    double err = 0.0, gmax = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      err = std::max(err, std::abs(x(k) - g.values[static_cast<std::size_t>(k)]));
      gmax = std::max(gmax, std::abs(x(k)));
    }
    return Row{z, err, gmax};
  });
  CsvTable csv({"case", "z_re", "z_im", "max_abs_G", "max_entry_error"});
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    worst = std::max(worst, rows[i].err);
    csv.row() << i << rows[i].z.real() << rows[i].z.imag() << rows[i].gmax << rows[i].err;
  }
  return verdict("max entrywise |G_tridiag − G_dense|, N = 32, 100 cases", worst, 0.0, 1e-10,
                 worst <= 1e-10, csv);
}

// ---------------------------------------------------------------- A10
CriterionResult a10_corridor() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  constexpr std::int64_t N = 2000;
  const double qs[] = {4.0, 6.0, 10.0};
  const auto t = geometric_grid(100.0, 5000.0, 41);
  CsvTable csv({"seed_index", "q", "slope", "stderr", "corridor_lo", "corridor_hi", "points",
                "max_unitarity_defect", "ok"});
  bool ok = true;
  double worst_margin = 1e300;
  std::string detail;
  constexpr int kSeeds = 4;
  for (int s = 0; s < kSeeds; ++s) {
    const auto real = sample_sequence(dist, rng::derive_seed(0xA10, static_cast<std::uint64_t>(s)), {0, N});
    const auto series = moments_direct(assemble(real, N), qs, t);
    std::vector<bool> keep;
    for (double b : series[0].boundary_mass) keep.push_back(b < 1e-6);
    for (const auto& ser : series) {
      double defect = 0.0;
      for (double d : ser.unitarity_defect) defect = std::max(defect, d);
      const auto f = fit_transport_exponent(ser, 100.0, 5000.0, false, keep);
      const double lo = f.corridor_lo - 0.3, hi = f.corridor_hi + 0.3;
      const bool good = f.slope >= lo && f.slope <= hi && defect <= 1e-8;
      ok = ok && good;
      worst_margin = std::min({worst_margin, f.slope - lo, hi - f.slope});
      csv.row() << s << ser.q << f.slope << f.stderr_ << f.corridor_lo << f.corridor_hi << f.points
                << defect << good;
      if (s == 0) detail += "q=" + fmt(ser.q) + ": " + fmt(std::round(f.slope * 1000) / 1000) + " ";
    }
  }
  return verdict("fitted slopes (seed 0) " + detail + "; 4 seeds, boundary-mass filtered",
                 worst_margin, 0.0, 0.0, ok, csv);
}

// ---------------------------------------------------------------- A11
CriterionResult a11_martingale() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const auto rows = martingale_tail(dist, 1e-2, 10000, 0.3, 1000, 0xA11);
  CsvTable csv({"m", "threshold", "empirical_prob", "empirical_prob_flipped",
                "empirical_prob_two_sided", "azuma_bound", "binomial_stderr", "pass"});
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    ok = ok && r.pass;
    worst = std::max(worst, r.empirical_prob - (r.azuma_bound + 3.0 * r.binomial_stderr));
    csv.row() << r.m << r.threshold << r.empirical_prob << r.empirical_prob_flipped
              << r.empirical_prob_two_sided << r.azuma_bound << r.binomial_stderr << r.pass;
  }
  return verdict("max (exceedance − bound − 3·stderr) over m ∈ {n/4, n/2, n}", worst, 0.0, 0.0,
                 ok, csv);
}

// ---------------------------------------------------------------- A12
CriterionResult a12_borel() {
  const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
  const auto grid = geometric_grid(1e-3, 5e-2, 12);
  const auto ids = ids_curve(dist, 3000, grid, 100, 0xA12);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    num += std::sqrt(grid[i]) * ids.mean_ids[i];
    den += grid[i];
  }
  const double D = num / den;
  const double Ts[] = {1e2, 1e3, 1e4};
  const double ds[] = {1e-2, 1e-3, 1e-4, 1e-5};
  const auto rep = borel_checks(dist, 100000, 20, 0xA12 + 1, Ts, ds, D, 1.0);
  CsvTable csv({"check", "E", "delta", "imB", "bound", "ok"});
  csv.add_meta("D_fit", D);
  csv.add_meta("C_fit", rep.C_fit);
  bool ok = rep.herglotz_ok;
  double worst = 0.0;
  for (const auto& r : rep.lower) {
    ok = ok && r.ok;
    worst = std::max(worst, r.bound / r.imB);
    csv.row() << "lemma_window_lower" << r.E << r.delta << r.imB << r.bound << r.ok;
  }
  for (const auto& r : rep.upper) {
    ok = ok && r.ok;
    worst = std::max(worst, r.imB / r.bound);
    csv.row() << "prop_e1_upper" << r.E << r.delta << r.imB << r.bound << r.ok;
  }
  return verdict("max bound-ratio over T ∈ [1e2, 1e4], δ ∈ [1e-5, 1e-2] (D_fit = " + fmt(D) +
                     ", C_fit = " + fmt(rep.C_fit) + "); Herglotz " +
                     (rep.herglotz_ok ? "ok" : "VIOLATED"),
                 worst, 0.0, 1.0, ok, csv);
}

// ---------------------------------------------------------------- A13
CriterionResult a13_thouless() {
  const auto one = CoefficientDistribution::constant(1.0);
  const auto c = thouless_check(one, cplx(-1.0), 3000, 1, 0xA13, 100000);
  const double closed = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  const double dc = std::abs(c.L_thouless - 0.962424);
  const auto uni = CoefficientDistribution::uniform(1.0, 2.0);
  const auto r = thouless_check(uni, cplx(0.05, 1e-3), 3000, 100, 0xA13 + 1, 100000);
  const double sigma = std::hypot(r.stderr_thouless, r.stderr_transfer);
  const double allowed = 0.1 * r.L_transfer + 3.0 * sigma;
  CsvTable csv({"ensemble", "z_re", "z_im", "N", "replicates", "L_thouless", "stderr_thouless",
                "L_transfer", "stderr_transfer", "diff"});
  for (const auto* rep : {&c, &r}) {
    csv.row() << (rep == &c ? one.to_string() : uni.to_string()) << rep->z.real() << rep->z.imag()
              << rep->N << rep->replicates << rep->L_thouless << rep->stderr_thouless
              << rep->L_transfer << rep->stderr_transfer << rep->diff;
  }
  const bool ok = dc <= 1e-3 && std::abs(closed - 0.962424) < 1e-6 && std::abs(r.diff) <= allowed;
  return verdict("constant: |L − 0.962424| = " + fmt(dc) + " (≤ 1e-3); uniform(1,2): |diff| = " +
                     fmt(std::abs(r.diff)) + " ≤ " + fmt(allowed),
                 std::abs(r.diff), 0.0, allowed, ok, csv);
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"A1", "Unimodularity of transfer products", 10, true, a1_unimodularity},
      {"A2", "W-conjugacy to the isotopic chain", 10, true, a2_conjugacy},
      {"A3", "Prüfer radius vs matrix product", 30, true, a3_prufer_matrix},
      {"A4", "IDS square-root asymptotics", 300, true, a4_ids},
      {"A5", "Lyapunov linear asymptotics", 300, false, a5_lyapunov},
      {"A6", "Hyperbolic region", 120, true, a6_hyperbolic},
      {"A7", "Phase counting vs Sturm count", 60, true, a7_counting},
      {"A8", "Parseval identity", 60, true, a8_parseval},
      {"A9", "Green's function oracle", 5, true, a9_green_oracle},
      {"A10", "Transport corridor", 600, false, a10_corridor},
      {"A11", "Martingale large deviations", 120, true, a11_martingale},
      {"A12", "Borel transform bounds", 60, true, a12_borel},
      {"A13", "Thouless formula", 180, true, a13_thouless},
  };
  return all;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << ": " << r.detail
     << " | measured " << fmt(r.measured) << ", tolerance " << fmt(r.tolerance);
  if (r.budget_seconds > 0.0) {
    os << " [" << fmt(std::round(r.seconds * 100.0) / 100.0) << " s / budget "
       << fmt(r.budget_seconds) << " s]";
  }
  return os.str();
}

std::vector<CriterionResult> run_suite(const SuiteOptions& opt, std::ostream& log) {
  std::vector<const Criterion*> selected;
  for (const auto& c : criteria()) {
    const bool listed = opt.only.empty() ||
                        std::find(opt.only.begin(), opt.only.end(), c.id) != opt.only.end();
    if (!listed) continue;
    if (opt.suite == Suite::fast && !c.fast && opt.only.empty()) continue;
    selected.push_back(&c);
  }
  auto timed = [](const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = CriterionResult{};
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  std::vector<CriterionResult> results;
  const std::size_t saved = worker_count();
  set_worker_count(8);
  for (const auto* c : selected) {
    CriterionResult r = timed(*c);
    r.id = c->id;
    r.title = c->title;
    r.budget_seconds = c->budget_seconds;
    if (r.seconds > c->budget_seconds) {
      r.pass = false;
      r.detail += " (runtime over budget)";
    }
    log << format_line(r) << std::endl;
    results.push_back(std::move(r));
  }

  if (opt.determinism && !selected.empty()) {
    CriterionResult d;
    d.id = "A14";
    d.title = "Determinism across runs and worker counts {1, 8}";
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> bad;
    CsvTable csv({"criterion", "csv_sha_prefix_len", "workers1_identical", "rerun8_identical"});
    for (std::size_t i = 0; i < selected.size(); ++i) {
      set_worker_count(1);
      const auto one = timed(*selected[i]);
      set_worker_count(8);
      const auto again = timed(*selected[i]);
      const bool s1 = one.csv == results[i].csv && !results[i].csv.empty();
      const bool s8 = again.csv == results[i].csv && !results[i].csv.empty();
      if (!s1 || !s8) bad.push_back(selected[i]->id);
      csv.row() << selected[i]->id << results[i].csv.size() << s1 << s8;
    }
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d.pass = bad.empty();
    d.measured = static_cast<double>(bad.size());
    d.detail = bad.empty() ? "byte-identical CSVs for " + std::to_string(selected.size()) +
                                 " criteria (workers 8, 1, 8)"
                           : "CSV mismatch in " + [&] {
                               std::string s;
                               for (const auto& b : bad) s += b + " ";
                               return s;
                             }();
    d.csv = csv.str();
    log << format_line(d) << std::endl;
    results.push_back(std::move(d));
  }
  set_worker_count(saved);
  return results;
}

std::string report_json(const std::vector<CriterionResult>& results, const std::string& suite) {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  bool all = true;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    j["criteria"].push_back({{"id", r.id},
                             {"title", r.title},
                             {"measured", r.measured},
                             {"expected", r.expected},
                             {"tolerance", r.tolerance},
                             {"pass", r.pass},
                             {"detail", r.detail},
                             {"seconds", r.seconds}});
  }
  j["pass"] = all;
  return j.dump(2) + "\n";
}

}  // namespace divgrad::lab
