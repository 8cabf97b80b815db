#include "divgrad/prufer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "divgrad/csv.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/random.hpp"

namespace divgrad {

namespace {

constexpr double kPi = std::numbers::pi;

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  const double n = static_cast<double>(v.size());
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace

ConjugacyFrame frame(double E, double kappa) {
  if (!(kappa > 0.0)) throw ParameterError("frame: kappa must be > 0");
  if (!(E > 0.0 && E < 4.0 * kappa)) {
    throw DomainError("frame: E = " + format_double(E) + " outside (0, 4κ) = (0, " +
                      format_double(4.0 * kappa) + ")");
  }
  ConjugacyFrame f;
  f.E = E;
  f.kappa = kappa;
  f.cos_eta = 1.0 - E / (2.0 * kappa);
  f.eta = std::acos(f.cos_eta);
  // sin η = √(1 − cos²η) = √((E/κ)(1 − E/(4κ))), cancellation-free for small E
  f.sin_eta = std::sqrt(E / kappa * (1.0 - E / (4.0 * kappa)));
  f.P = {1.0, -f.cos_eta, 0.0, f.sin_eta};
  f.P_inv = {1.0, f.cos_eta / f.sin_eta, 0.0, 1.0 / f.sin_eta};
  return f;
}

WMatrix w_matrix(double a_n, double E) {
  if (E == 0.0) throw DomainError("w_matrix: W_n is singular at E = 0");
  if (!(a_n > 0.0)) throw ParameterError("w_matrix: a_n must be > 0");
  return {{1.0, -a_n, 1.0, E - a_n}, {(E - a_n) / E, a_n / E, -1.0 / E, 1.0 / E}};
}

Mat2C isotopic_step(double a_j, cplx z) {
  if (!(a_j > 0.0)) throw ParameterError("isotopic_step: a_j must be > 0");
  return {2.0 - z / a_j, cplx(-1.0), cplx(1.0), cplx(0.0)};
}

LogNormProduct isotopic_product(std::span<const double> a, std::int64_t n, cplx z) {
  if (n < 0) throw ParameterError("isotopic_product: n must be >= 0");
  if (static_cast<std::int64_t>(a.size()) < n) {
    throw CoverageError("isotopic_product: need " + std::to_string(n) + " coefficients");
  }
  LogNormProduct p;
  for (std::int64_t j = 0; j < n; ++j) p.left_multiply(isotopic_step(a[static_cast<std::size_t>(j)], z));
  return p;
}

ConjugacyReport conjugate_check(const DisorderRealization& r, std::int64_t n, double E) {
  if (n < 0) throw ParameterError("conjugate_check: n must be >= 0");
  const double ap = r.distribution().support_max();
  if (!(E > 0.0 && E <= 4.0 * ap)) {
    throw DomainError("conjugate_check: E must lie in (0, 4a_+]");
  }
  const auto a = r.slice(0, n);
  const LogNormProduct t = transfer_product(a, n, cplx(E));
  const LogNormProduct f = isotopic_product(a, n, cplx(E));

  ConjugacyReport rep;
  rep.log_norm_T = t.log_norm();
  rep.log_norm_F = f.log_norm();
  // Compare at the common scale e^{log‖F‖}.
  const double shift = rep.log_norm_F;
  const Mat2C fs = f.scaled_matrix(shift);
  const WMatrix wn = w_matrix(a[static_cast<std::size_t>(n)], E);
  const WMatrix w0 = w_matrix(a[0], E);
  const Mat2C conj = to_complex(wn.w) * t.scaled_matrix(shift) * to_complex(w0.w_inv);
  const Mat2C d = fs - conj;
  rep.residual = max_norm(d) / norm2(fs);

  const double cw = 6.0 * ap + 2.0;
  rep.c = cw * cw;
  const double lc = std::log(rep.c), le = std::log(E);
  rep.sandwich_ok = (le - lc + rep.log_norm_F <= rep.log_norm_T) &&
                    (rep.log_norm_T <= lc - le + rep.log_norm_F);
  return rep;
}

double qn(double a_n, const ConjugacyFrame& f) noexcept {
  return f.E / f.sin_eta * (1.0 / f.kappa - 1.0 / a_n);
}

PruferState prufer_initial(const ConjugacyFrame& f, double a_0, double beta0) {
  const WMatrix w = w_matrix(a_0, f.E);
  const std::array<double, 2> v = w.w(std::array<double, 2>{std::cos(beta0), std::sin(beta0)});
  const std::array<double, 2> p = f.P(v);
  PruferState s;
  s.log_rho = std::log(std::hypot(p[0], p[1]));
  s.chi = std::atan2(p[1], p[0]);
  // Lower half-plane: track −v instead, which leaves ρ_n/ρ_0 and χ mod π unchanged.
  if (s.chi < 0.0) s.chi += kPi;
  return s;
}

PruferState prufer_step(const PruferState& s, double a_n, const ConjugacyFrame& f) noexcept {
  const double phi = s.chi + f.eta;
  const double q = qn(a_n, f);
  const double sp = std::sin(phi), cp = std::cos(phi);
  PruferState out;
  out.n = s.n + 1;
  out.log_rho = s.log_rho + 0.5 * std::log1p(q * 2.0 * sp * cp + q * q * sp * sp);
  out.chi = phi + std::atan2(-q * sp * sp, 1.0 + q * sp * cp);
  return out;
}

PruferEvolver::PruferEvolver(const ConjugacyFrame& f, double chi0)
    : c_(std::cos(chi0)),
      s_(std::sin(chi0)),
      ce_(f.cos_eta),
      se_(f.sin_eta),
      kinv_(1.0 / f.kappa),
      qscale_(f.E / f.sin_eta) {
  // Winding so that chi() reproduces chi0 exactly on the same branch.
  winding_ = static_cast<std::int64_t>(std::floor((chi0 + kPi) / (2.0 * kPi)));
  const double base = chi0 - 2.0 * kPi * static_cast<double>(winding_);
  if (base > kPi) ++winding_;
}

double PruferEvolver::step(double a_n) noexcept {
  // rotation by η
  const double c1 = c_ * ce_ - s_ * se_;
  const double s1 = s_ * ce_ + c_ * se_;
  if (s_ >= 0.0 && s1 < 0.0) ++winding_;
  // shear [[1, Q], [0, 1]]
  const double q = qscale_ * (kinv_ - 1.0 / a_n);
  const double x = c1 + q * s1;
  const double r2 = x * x + s1 * s1;
  const double inv = 1.0 / std::sqrt(r2);
  c_ = x * inv;
  s_ = s1 * inv;
  r2_prod_ *= r2;
  if (r2_prod_ > 1e150 || r2_prod_ < 1e-150) {
    log_acc_ += 0.5 * std::log(r2_prod_);
    r2_prod_ = 1.0;
  }
  ++n_;
  return s1;
}

double PruferEvolver::log_rho_ratio() const noexcept { return log_acc_ + 0.5 * std::log(r2_prod_); }

double PruferEvolver::chi() const noexcept {
  return std::atan2(s_, c_) + 2.0 * kPi * static_cast<double>(winding_);
}

PruferState PruferEvolver::state(double log_rho0) const noexcept {
  return {n_, log_rho0 + log_rho_ratio(), chi()};
}

InitialPhaseMax max_over_initial_phase(const DisorderRealization& r, std::int64_t n,
                                       const ConjugacyFrame& f, int grid) {
  if (grid < 3) throw ParameterError("max_over_initial_phase: grid must be >= 3");
  if (n < 0) throw ParameterError("max_over_initial_phase: n must be >= 0");
  InitialPhaseMax out;
  out.grid_points = grid;
  if (n == 0) return out;
  const auto a = r.slice(0, n - 1);
  auto eval = [&](double chi0) {
    PruferEvolver ev(f, chi0);
    for (double v : a) ev.step(v);
    return ev.log_rho_ratio();
  };
  const double h = kPi / grid;
  int best = 0;
  double best_val = eval(0.0);
  for (int i = 1; i < grid; ++i) {
    const double v = eval(i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section on [x* − h, x* + h]; ρ_n/ρ_0 is π-periodic in χ_0.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best * h - h, hi = best * h + h;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = eval(x1);
    }
  }
  double arg = best * h;
  for (auto [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (v > best_val) {
      best_val = v;
      arg = x;
    }
  }
  arg = std::fmod(arg, kPi);
  if (arg < 0.0) arg += kPi;
  out.log_rho_ratio_max = best_val;
  out.rho_ratio_max = std::exp(best_val);
  out.chi0_argmax = arg;
  return out;
}

std::vector<MartingaleRow> martingale_tail(const CoefficientDistribution& dist, double E,
                                           std::int64_t n, double alpha, std::int64_t replicates,
                                           std::uint64_t master_seed) {
  const double k = kappa(dist);
  if (!(E > 0.0 && E <= 2.0 * k)) throw DomainError("martingale_tail: need 0 < E <= 2κ");
  if (n < 4) throw ParameterError("martingale_tail: n must be >= 4");
  if (replicates < 1) throw ParameterError("martingale_tail: replicates must be >= 1");
  if (!(alpha > 0.0)) throw ParameterError("martingale_tail: alpha must be > 0");
  const ConjugacyFrame f = frame(E, k);
  const std::array<std::int64_t, 3> ms{n / 4, n / 2, n};

  const auto sums = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
    const std::uint64_t seed = rng::derive_seed(master_seed, rep);
    PruferEvolver ev(f);
    std::array<double, 3> x{};
    double acc = 0.0;
    std::size_t next = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double a = coefficient_at(dist, seed, i);
      const double s = ev.step(a);  // sin(χ_i + η)
      acc += qn(a, f) * s;
      while (next < ms.size() && ms[next] == i + 1) x[next++] = acc;
    }
    return x;
  });

  const double bound = std::exp(-std::pow(static_cast<double>(n), alpha));
  const double R = static_cast<double>(replicates);
  std::vector<MartingaleRow> rows;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    MartingaleRow row;
    row.m = ms[j];
    row.threshold = 2.0 / std::sqrt(k) * std::sqrt(E) * std::pow(static_cast<double>(n), alpha / 2.0) *
                    std::sqrt(static_cast<double>(ms[j]));
    std::int64_t up = 0, down = 0, both = 0;
    for (const auto& x : sums) {
      up += x[j] >= row.threshold;
      down += -x[j] >= row.threshold;
      both += std::abs(x[j]) > row.threshold;
    }
    row.empirical_prob = static_cast<double>(up) / R;
    row.empirical_prob_flipped = static_cast<double>(down) / R;
    row.empirical_prob_two_sided = static_cast<double>(both) / R;
    row.azuma_bound = bound;
    row.binomial_stderr = std::sqrt(bound * (1.0 - bound) / R);
    const double two = std::min(1.0, 2.0 * bound);
    const double se2 = std::sqrt(two * (1.0 - two) / R);
    row.pass = row.empirical_prob <= bound + 3.0 * row.binomial_stderr &&
               row.empirical_prob_flipped <= bound + 3.0 * row.binomial_stderr &&
               row.empirical_prob_two_sided <= two + 3.0 * se2;
    rows.push_back(row);
  }
  return rows;
}

LdtReport transfer_norm_ldt(const CoefficientDistribution& dist, double E, double T,
                            std::int64_t n, double alpha, std::int64_t replicates,
                            std::uint64_t master_seed, double C) {
  if (!(E > 0.0) || !(T > 0.0) || n < 1 || replicates < 1 || !(alpha > 0.0) || !(C > 0.0)) {
    throw ParameterError("transfer_norm_ldt: need E, T, alpha, C > 0 and n, replicates >= 1");
  }
  const double nn = static_cast<double>(n);
  const double h1 = std::pow(nn, 1.0 + 2.0 * alpha) * E;
  if (h1 > 1.0) {
    throw DomainError("transfer_norm_ldt: hypothesis n^{1+2α}E <= 1 violated (" + format_double(h1) +
                      ")");
  }
  const double h2 = std::pow(E, 1.5) * T;
  if (nn > h2) {
    throw DomainError("transfer_norm_ldt: hypothesis n <= E^{3/2}T violated (n = " +
                      std::to_string(n) + ", E^{3/2}T = " + format_double(h2) + ")");
  }
  const cplx z(E, 1.0 / T);
  const auto scaled = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
    const std::uint64_t seed = rng::derive_seed(master_seed, rep);
    return n * log_norm_rate(dist, seed, z, n) + 1.5 * std::log(E);  // log(‖T‖ E^{3/2})
  });
  LdtReport out;
  out.C_used = C;
  out.replicates = replicates;
  out.paper_bound = 1.0 - nn * std::exp(-std::pow(nn, alpha));
  std::int64_t ok = 0;
  double worst = -1e300;
  for (double v : scaled) {
    ok += v <= std::log(C);
    worst = std::max(worst, v);
  }
  out.empirical_prob = static_cast<double>(ok) / static_cast<double>(replicates);
  out.C_min = std::exp(worst);
  return out;
}

PhaseIds ids_via_phase(const DisorderRealization& r, std::int64_t N, double E) {
  if (!(E > 0.0)) throw DomainError("ids_via_phase: E must be > 0");
  if (N < 1) throw ParameterError("ids_via_phase: N must be >= 1");
  const auto a = r.slice(0, N - 1);
  const ConjugacyFrame f = frame(E, kappa(r.distribution()));
  PruferEvolver ev(f);
  for (double v : a) ev.step(v);
  PhaseIds out;
  out.chi_N = ev.chi();
  out.ids_value = out.chi_N / (kPi * static_cast<double>(N));
  return out;
}

OscillatoryReport oscillatory_sum_check(const CoefficientDistribution& dist, double E,
                                        std::int64_t n, std::int64_t replicates,
                                        std::uint64_t master_seed, double C_fit) {
  if (!(static_cast<double>(n) > 1.0 / E)) {
    throw DomainError("oscillatory_sum_check: requires n > 1/E");
  }
  if (replicates < 1) throw ParameterError("oscillatory_sum_check: replicates must be >= 1");
  const ConjugacyFrame f = frame(E, kappa(dist));
  const auto per = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
    const std::uint64_t seed = rng::derive_seed(master_seed, rep);
    PruferEvolver ev(f);
    double s2 = 0.0, s4 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      // φ_i = χ_i + η is the rotated vector before the shear of step i
      const double chi = ev.chi();
      const double phi = chi + f.eta;
      const double c2 = std::cos(2.0 * phi);
      s2 += c2;
      s4 += 2.0 * c2 * c2 - 1.0;
      ev.step(coefficient_at(dist, seed, i));
    }
    return std::array<double, 2>{s2 / static_cast<double>(n), s4 / static_cast<double>(n)};
  });
  std::vector<double> v2, v4;
  for (const auto& p : per) {
    v2.push_back(p[0]);
    v4.push_back(p[1]);
  }
  const MeanSe m2 = mean_se(v2), m4 = mean_se(v4);
  OscillatoryReport out;
  out.mean_cos2 = m2.mean;
  out.stderr_cos2 = m2.se;
  out.mean_cos4 = m4.mean;
  out.stderr_cos4 = m4.se;
  out.bound = C_fit * std::sqrt(E);
  out.pass = std::abs(m2.mean) <= out.bound + 3.0 * m2.se && std::abs(m4.mean) <= out.bound + 3.0 * m4.se;
  return out;
}

double calibrate_oscillatory_constant(const CoefficientDistribution& dist, double E_ref,
                                      std::int64_t n_max, std::int64_t replicates,
                                      std::uint64_t master_seed) {
  const auto n_min = static_cast<std::int64_t>(std::floor(1.0 / E_ref)) + 1;
  if (n_max < n_min) throw DomainError("calibrate_oscillatory_constant: n_max must exceed 1/E_ref");
  constexpr int kPoints = 24;
  double c = 0.0;
  std::int64_t last = 0;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    const auto n = static_cast<std::int64_t>(
        std::llround(n_min * std::pow(static_cast<double>(n_max) / n_min, t)));
    if (n == last) continue;
    last = n;
    const auto rep = oscillatory_sum_check(dist, E_ref, n, replicates, master_seed, 0.0);
    c = std::max({c, std::abs(rep.mean_cos2), std::abs(rep.mean_cos4)});
  }
  return c / std::sqrt(E_ref);
}

LyapunovEstimate lyapunov_via_prufer(const CoefficientDistribution& dist, double E,
                                     std::int64_t n, std::int64_t replicates,
                                     std::uint64_t master_seed) {
  if (n < 1 || replicates < 1) {
    throw ParameterError("lyapunov_via_prufer: n and replicates must be >= 1");
  }
  const ConjugacyFrame f = frame(E, kappa(dist));
  LyapunovEstimate est;
  est.z = cplx(E);
  est.n = n;
  est.replicates = replicates;
  est.samples = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
    const std::uint64_t seed = rng::derive_seed(master_seed, rep);
    PruferEvolver ev(f);
    for (std::int64_t i = 0; i < n; ++i) ev.step(coefficient_at(dist, seed, i));
    return ev.log_rho_ratio() / static_cast<double>(n);
  });
  const MeanSe m = mean_se(est.samples);
  est.mean = m.mean;
  est.stderr_ = m.se;
  return est;
}

}  // namespace divgrad
