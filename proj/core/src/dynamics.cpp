#include "divgrad/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "divgrad/errors.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/random.hpp"
#include "divgrad/spectral.hpp"
#include "divgrad/transfer.hpp"
#include "divgrad/tridiag.hpp"

namespace divgrad {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kWallSites = 10;

struct GaussRule {
  std::vector<double> x, w;  // on [−1, 1]
};

GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[static_cast<std::size_t>(i)] = x;
    g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

struct Node {
  double E;
  double w;
};

std::vector<Node> quadrature_nodes(double lo, double hi, double eta, std::int64_t cells,
                                   std::int64_t levels, std::int64_t tail_nodes) {
  std::vector<double> br;
  br.reserve(static_cast<std::size_t>(cells + 2 * levels + 1));
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::int64_t i = 0; i <= cells; ++i) br.push_back(lo + h * static_cast<double>(i));
  br.back() = hi;
  // geometric refinement around E = 0, down to a fraction of the Lorentzian width
  for (std::int64_t j = 0; j < levels; ++j) {
    const double p = std::ldexp(1.0, static_cast<int>(-j));
    if (p < eta / 8.0) break;
    if (p < hi) br.push_back(p);
    if (-p > lo) br.push_back(-p);
  }
  br.push_back(0.0);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());

  std::vector<Node> nodes;
  nodes.reserve(br.size() + 2 * static_cast<std::size_t>(tail_nodes));
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    nodes.push_back({0.5 * (br[i] + br[i + 1]), br[i + 1] - br[i]});
  }
  // tails: E = hi + s/(1−s) and E = lo − s/(1−s), s ∈ (0, 1)
  const GaussRule g = gauss_legendre(static_cast<int>(tail_nodes));
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    const double s = 0.5 * (g.x[k] + 1.0);
    const double jac = 0.5 * g.w[k] / ((1.0 - s) * (1.0 - s));
    nodes.push_back({hi + s / (1.0 - s), jac});
    nodes.push_back({lo - s / (1.0 - s), jac});
  }
  return nodes;
}

struct NodeResult {
  std::vector<double> wq;  // Σ|n|^q|G|², one per q
  double total = 0.0;      // Σ|G|²
  double edge = 0.0;       // Σ over the outer sites
};

double site_weight(std::int64_t n, double q) {
  return n == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(n)), q);
}

bool counts_left_wall(std::int64_t s, std::int64_t) { return s >= kWallSites; }
bool counts_right_wall(std::int64_t s, std::int64_t N) { return s < N - kWallSites; }

AveragedMoments averaged_once(const FiniteJacobiOperator& op, double T, std::span<const double> q,
                              const QuadratureSpec& spec, std::int64_t cells,
                              std::int64_t tail_nodes) {
  const bool exact = spec.form == ParsevalForm::exact;
  const double eta = exact ? 0.5 / T : 1.0 / T;
  const double pref = exact ? 1.0 / (2.0 * kPi * T) : 1.0 / (kPi * T);
  const double lo = -spec.pad, hi = op.norm_bound() + spec.pad;

  AveragedMoments out;
  out.T = T;
  out.q.assign(q.begin(), q.end());
  auto nodes = quadrature_nodes(lo, hi, eta, cells, spec.geometric_levels, tail_nodes);
  if (static_cast<std::int64_t>(nodes.size()) > spec.max_nodes) {
    out.budget_exceeded = true;
    const auto extra = static_cast<std::int64_t>(nodes.size()) - spec.max_nodes;
    const std::int64_t reduced = std::max<std::int64_t>(16, cells - extra);
    nodes = quadrature_nodes(lo, hi, eta, reduced, spec.geometric_levels, tail_nodes);
  }
  out.quadrature_nodes = static_cast<std::int64_t>(nodes.size());

  const std::int64_t N = op.size();
  const std::int64_t s = -op.first_site();
  std::vector<std::vector<double>> weights(q.size(), std::vector<double>(static_cast<std::size_t>(N)));
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (std::int64_t i = 0; i < N; ++i) {
      weights[k][static_cast<std::size_t>(i)] = site_weight(i + op.first_site(), q[k]);
    }
  }

  const auto res = parallel_map(nodes.size(), [&](std::size_t j) {
    const GreenColumn g = green_column(op, cplx(nodes[j].E, eta), 0);
    NodeResult r;
    r.wq.assign(q.size(), 0.0);
    for (std::int64_t i = 0; i < N; ++i) {
      const double m2 = std::norm(g.values[static_cast<std::size_t>(i)]);
      r.total += m2;
      if ((i < kWallSites && counts_left_wall(s, N)) ||
          (i >= N - kWallSites && counts_right_wall(s, N))) {
        r.edge += m2;
      }
      for (std::size_t k = 0; k < q.size(); ++k) r.wq[k] += weights[k][static_cast<std::size_t>(i)] * m2;
    }
    return r;
  });

  out.values.assign(q.size(), 0.0);
  double total = 0.0, edge = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < q.size(); ++k) out.values[k] += nodes[j].w * res[j].wq[k];
    total += nodes[j].w * res[j].total;
    edge += nodes[j].w * res[j].edge;
  }
  for (double& v : out.values) v *= pref;
  out.boundary_weight = total > 0.0 ? edge / total : 0.0;
  out.doubling_change.assign(q.size(), std::numeric_limits<double>::quiet_NaN());
  return out;
}

Mat2C transpose(const Mat2C& m) { return {m.a, m.c, m.b, m.d}; }

}  // namespace

cplx GreenColumn::at(std::int64_t n) const {
  const std::int64_t i = n - first_site;
  if (i < 0 || i >= static_cast<std::int64_t>(values.size())) {
    throw CoverageError("GreenColumn: site " + std::to_string(n) + " outside the window");
  }
  return values[static_cast<std::size_t>(i)];
}

GreenColumn green_column(const FiniteJacobiOperator& op, cplx z, std::int64_t source) {
  if (z.imag() == 0.0) throw DomainError("green_column: Im z must be nonzero");
  const std::int64_t N = op.size();
  const std::int64_t s = source - op.first_site();
  if (s < 0 || s >= N) throw CoverageError("green_column: source outside the window");

  std::vector<cplx> d(static_cast<std::size_t>(N)), off(op.offdiag().begin(), op.offdiag().end());
  for (std::int64_t i = 0; i < N; ++i) d[static_cast<std::size_t>(i)] = op.diag()[static_cast<std::size_t>(i)] - z;
  std::vector<cplx> rhs(static_cast<std::size_t>(N), cplx(0.0));
  rhs[static_cast<std::size_t>(s)] = 1.0;

  GreenColumn g;
  g.z = z;
  g.first_site = op.first_site();
  g.source = source;
  g.values = tridiagonal_solve<cplx>(off, d, off, rhs);

  const auto hg = op.apply(g.values);
  double r2 = 0.0, g2 = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    const auto k = static_cast<std::size_t>(i);
    r2 += std::norm(hg[k] - z * g.values[k] - rhs[k]);
    g2 += std::norm(g.values[k]);
  }
  g.residual = std::sqrt(r2) / ((op.norm_bound() + std::abs(z)) * std::sqrt(g2));
  if (!(g.residual <= 1e-10)) {
    throw NumericalError("green_column: residual " + std::to_string(g.residual) + " too large");
  }
  return g;
}

FiniteJacobiOperator centered_window(const DisorderRealization& r, std::int64_t N) {
  if (N < 1) throw ParameterError("centered_window: N must be >= 1");
  return assemble(r, N, -(N / 2));
}

DisorderRealization centered_realization(const CoefficientDistribution& dist, std::uint64_t seed,
                                         std::int64_t N) {
  if (N < 1) throw ParameterError("centered_realization: N must be >= 1");
  return sample_sequence(dist, seed, {-(N / 2), N - N / 2});
}

AveragedMoments moments_averaged(const FiniteJacobiOperator& op, double T,
                                 std::span<const double> q, const QuadratureSpec& spec) {
  if (!(T > 0.0)) throw ParameterError("moments_averaged: T must be > 0");
  if (q.empty()) throw ParameterError("moments_averaged: no q given");
  for (double v : q) {
    if (!(v > 0.0)) throw ParameterError("moments_averaged: q must be > 0");
  }
  if (spec.uniform_cells < 16 || spec.tail_nodes < 4 || !(spec.pad > 0.0)) {
    throw ParameterError("moments_averaged: quadrature spec too coarse");
  }
  auto out = averaged_once(op, T, q, spec, spec.uniform_cells, spec.tail_nodes);
  if (spec.doubling_check) {
    const auto fine = averaged_once(op, T, q, spec, 2 * spec.uniform_cells, 2 * spec.tail_nodes);
    for (std::size_t k = 0; k < q.size(); ++k) {
      out.doubling_change[k] = out.values[k] > 0.0
                                   ? std::abs(fine.values[k] - out.values[k]) / out.values[k]
                                   : std::abs(fine.values[k] - out.values[k]);
    }
    out.budget_exceeded = out.budget_exceeded || fine.budget_exceeded;
  }
  return out;
}

AveragedMoments moments_averaged(const CoefficientDistribution& dist, std::int64_t N, double T,
                                 std::span<const double> q, std::int64_t replicates,
                                 std::uint64_t master_seed, const QuadratureSpec& spec) {
  if (replicates < 1) throw ParameterError("moments_averaged: replicates must be >= 1");
  AveragedMoments acc;
  for (std::int64_t r = 0; r < replicates; ++r) {
    const auto real = centered_realization(dist, rng::derive_seed(master_seed, static_cast<std::uint64_t>(r)), N);
    const auto one = moments_averaged(centered_window(real, N), T, q, spec);
    if (r == 0) {
      acc = one;
      continue;
    }
    for (std::size_t k = 0; k < q.size(); ++k) {
      acc.values[k] += one.values[k];
      if (spec.doubling_check) acc.doubling_change[k] = std::max(acc.doubling_change[k], one.doubling_change[k]);
    }
    acc.boundary_weight = std::max(acc.boundary_weight, one.boundary_weight);
    acc.budget_exceeded = acc.budget_exceeded || one.budget_exceeded;
  }
  for (double& v : acc.values) v /= static_cast<double>(replicates);
  acc.replicates = replicates;
  return acc;
}

std::vector<MomentSeries> moments_direct(const FiniteJacobiOperator& op, std::span<const double> q,
                                         std::span<const double> t_grid, std::int64_t cap) {
  for (double v : q) {
    if (!(v > 0.0)) throw ParameterError("moments_direct: q must be > 0");
  }
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("moments_direct: t must be >= 0");
  }
  const std::int64_t N = op.size();
  const std::int64_t s = -op.first_site();
  if (s < 0 || s >= N) throw CoverageError("moments_direct: lattice site 0 outside the window");

  const auto values = full_spectrum(op, cap);
  const auto clusters = eigenvalue_clusters(op, values);
  const std::size_t nt = t_grid.size();
  const auto uN = static_cast<std::size_t>(N);
  std::vector<std::vector<cplx>> amp(nt, std::vector<cplx>(uN, cplx(0.0)));

  // eigenvectors are produced in blocks of whole clusters so memory stays O(block·N)
  constexpr std::size_t kBlock = 256;
  std::size_t c = 0;
  while (c < clusters.size()) {
    const std::size_t b = clusters[c].first;
    std::size_t e = clusters[c].second;
    while (c + 1 < clusters.size() && clusters[c + 1].second - b <= kBlock) e = clusters[++c].second;
    ++c;
    const auto vecs = eigenvectors_for(op, values, b, e);
    parallel_map(nt, [&](std::size_t ti) {
      auto& row = amp[ti];
      const double t = t_grid[ti];
      for (std::size_t j = b; j < e; ++j) {
        const auto& psi = vecs[j - b];
        const cplx coef = psi[static_cast<std::size_t>(s)] * std::polar(1.0, -t * values[j]);
        for (std::size_t i = 0; i < uN; ++i) row[i] += coef * psi[i];
      }
      return 0;
    });
  }

  std::vector<MomentSeries> out(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    out[k].q = q[k];
    out[k].mode = MomentMode::direct;
    out[k].N = N;
    out[k].abscissae.assign(t_grid.begin(), t_grid.end());
    out[k].values.assign(nt, 0.0);
    out[k].unitarity_defect.assign(nt, 0.0);
    out[k].boundary_mass.assign(nt, 0.0);
  }
  for (std::size_t ti = 0; ti < nt; ++ti) {
    auto& row = amp[ti];
    if (t_grid[ti] == 0.0) {
      // exactly δ_0; avoids reporting completeness round-off as motion
      std::fill(row.begin(), row.end(), cplx(0.0));
      row[static_cast<std::size_t>(s)] = 1.0;
    }
    double total = 0.0, wall = 0.0;
    std::vector<double> mq(q.size(), 0.0);
    for (std::int64_t i = 0; i < N; ++i) {
      const double m2 = std::norm(row[static_cast<std::size_t>(i)]);
      total += m2;
      if ((i < kWallSites && counts_left_wall(s, N)) ||
          (i >= N - kWallSites && counts_right_wall(s, N))) {
        wall += m2;
      }
      for (std::size_t k = 0; k < q.size(); ++k) mq[k] += site_weight(i - s, q[k]) * m2;
    }
    for (std::size_t k = 0; k < q.size(); ++k) {
      out[k].values[ti] = mq[k];
      out[k].unitarity_defect[ti] = std::abs(total - 1.0);
      out[k].boundary_mass[ti] = wall;
    }
  }
  return out;
}

double corridor_lo(double q) noexcept { return std::max(0.0, q / 2.0 - 2.0); }
double corridor_hi(double q) noexcept { return q - 0.2; }

TransportExponentFit fit_transport_exponent(const MomentSeries& s, double lo, double hi,
                                            bool per_q, const std::vector<bool>& keep) {
  if (!keep.empty() && keep.size() != s.abscissae.size()) {
    throw ParameterError("fit_transport_exponent: mask size mismatch");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.abscissae.size(); ++i) {
    const double a = s.abscissae[i];
    if (a < lo || a > hi) continue;
    if (!keep.empty() && !keep[i]) continue;
    if (!(s.values[i] > 0.0) || !(a > 0.0)) {
      throw DomainError("fit_transport_exponent: nonpositive value in the fit window");
    }
    x.push_back(a);
    y.push_back(s.values[i]);
  }
  if (x.size() < 5) throw ParameterError("fit_transport_exponent: fewer than 5 points in window");
  const auto f = fit_loglog_slope(x, y);
  TransportExponentFit r;
  r.q = s.q;
  r.points = static_cast<std::int64_t>(x.size());
  r.per_q = per_q;
  const double scale = per_q ? 1.0 / s.q : 1.0;
  r.slope = f.slope * scale;
  r.stderr_ = f.slope_stderr * scale;
  r.intercept = f.intercept;
  r.corridor_lo = corridor_lo(s.q) * scale;
  r.corridor_hi = corridor_hi(s.q) * scale;
  r.in_corridor = r.slope >= r.corridor_lo - 3.0 * r.stderr_ && r.slope <= r.corridor_hi + 3.0 * r.stderr_;
  return r;
}

BorelValue borel_transform(std::span<const double> eigenvalues, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("borel_transform: Im z must be > 0");
  if (eigenvalues.empty()) throw ParameterError("borel_transform: empty measure");
  cplx s = 0.0;
  for (double l : eigenvalues) s += 1.0 / (l - z);
  return {z, s / static_cast<double>(eigenvalues.size())};
}

BorelValue borel_transform(const FiniteJacobiOperator& op, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("borel_transform: Im z must be > 0");
  return {z, resolvent_trace(op, z) / static_cast<double>(op.size())};
}

double borel_window_integral(std::span<const double> eigenvalues, double T) {
  if (!(T > 0.0)) throw ParameterError("borel_window_integral: T must be > 0");
  if (eigenvalues.empty()) throw ParameterError("borel_window_integral: empty measure");
  // ∫₀^{1/T} (1/T)/((E − λ)² + T⁻²) dE = atan(1 − λT) + atan(λT)
  double s = 0.0;
  for (double l : eigenvalues) s += std::atan(1.0 - l * T) + std::atan(l * T);
  return s / static_cast<double>(eigenvalues.size());
}

double borel_window_integral(const FiniteJacobiOperator& op, double T, int nodes) {
  if (!(T > 0.0)) throw ParameterError("borel_window_integral: T must be > 0");
  if (nodes < 2) throw ParameterError("borel_window_integral: need >= 2 nodes");
  const GaussRule g = gauss_legendre(nodes);
  const double half = 0.5 / T;
  double s = 0.0;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    s += g.w[k] * borel_transform(op, cplx(half * (1.0 + g.x[k]), 1.0 / T)).value.imag();
  }
  return half * s;
}

BorelReport borel_checks(const CoefficientDistribution& dist, std::int64_t N,
                         std::int64_t replicates, std::uint64_t master_seed,
                         std::span<const double> T_values, std::span<const double> deltas,
                         double D_fit, double c_margin) {
  if (N < 2 || replicates < 1) throw ParameterError("borel_checks: N >= 2 and replicates >= 1");
  if (deltas.empty()) throw ParameterError("borel_checks: need at least one δ");
  if (!(D_fit > 0.0) || !(c_margin > 0.0)) throw ParameterError("borel_checks: D_fit, c_margin > 0");
  struct Rep {
    std::vector<double> lower, upper;
    bool herglotz = true;
  };
  const auto per = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    const auto real = sample_sequence(dist, rng::derive_seed(master_seed, r), {0, N});
    const auto op = assemble(real, N);
    Rep out;
    for (double T : T_values) out.lower.push_back(borel_window_integral(op, T));
    for (double d : deltas) {
      const double im = borel_transform(op, cplx(0.0, d)).value.imag();
      out.herglotz = out.herglotz && im > 0.0;
      out.upper.push_back(im);
    }
    for (double v : out.lower) out.herglotz = out.herglotz && v > 0.0;
    return out;
  });
  BorelReport rep;
  rep.N = N;
  rep.replicates = replicates;
  rep.D_fit = D_fit;
  const double R = static_cast<double>(replicates);
  std::vector<double> lower(T_values.size(), 0.0), upper(deltas.size(), 0.0);
  for (const auto& p : per) {
    for (std::size_t i = 0; i < lower.size(); ++i) lower[i] += p.lower[i] / R;
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] += p.upper[i] / R;
    rep.herglotz_ok = rep.herglotz_ok && p.herglotz;
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const double T = T_values[i];
    const double bound = std::atan(0.5) * D_fit / std::sqrt(T);
    rep.lower.push_back({0.0, 1.0 / T, lower[i], bound, lower[i] >= bound});
  }
  rep.C_fit = upper.front() * std::sqrt(deltas.front()) * c_margin;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const double bound = rep.C_fit / std::sqrt(deltas[i]);
    rep.upper.push_back({0.0, deltas[i], upper[i], bound, upper[i] <= bound * (1.0 + 1e-12)});
  }
  return rep;
}

GreenInequalityReport green_inequality_checks(const DisorderRealization& r, std::int64_t N,
                                              double E, double T, std::int64_t n_max) {
  if (N < 8) throw ParameterError("green_inequality_checks: window too small (N < 8)");
  if (!(T > 0.0)) throw ParameterError("green_inequality_checks: T must be > 0");
  const cplx z(E, 1.0 / T);
  if (std::abs(z) > 1.0) throw DomainError("green_inequality_checks: requires |z| <= 1");
  const std::int64_t half = N / 2;
  if (n_max < 0) n_max = std::min(half, N - half) - 2;
  if (n_max < 1 || n_max > std::min(half, N - half) - 2) {
    throw ParameterError("green_inequality_checks: n_max does not fit the window");
  }
  const auto op = centered_window(r, N);
  const auto g = green_column(op, z, 0);

  GreenInequalityReport rep;
  rep.z = z;
  rep.initial_sum = std::norm(g.at(-1)) + std::norm(g.at(0)) + std::norm(g.at(1));
  const double ap = r.distribution().support_max();
  rep.initial_bound = 1.0 / (3.0 * (ap + 1.0) * (ap + 1.0));
  rep.initial_ok = rep.initial_sum >= rep.initial_bound;

  // tails[n] = Σ_{|m|>n} |G(m, 0)|², summed from the walls inwards
  const std::int64_t lo = op.first_site(), hi = op.first_site() + N - 1;
  std::vector<double> shell(static_cast<std::size_t>(std::max(-lo, hi) + 1), 0.0);
  for (std::int64_t m = lo; m <= hi; ++m) shell[static_cast<std::size_t>(std::abs(m))] += std::norm(g.at(m));
  rep.tails.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  double acc = 0.0;
  for (std::int64_t n = static_cast<std::int64_t>(shell.size()) - 1; n >= 0; --n) {
    if (n <= n_max) rep.tails[static_cast<std::size_t>(n)] = acc;
    acc += shell[static_cast<std::size_t>(n)];
  }
  rep.tails_monotone = true;
  for (std::size_t n = 1; n < rep.tails.size(); ++n) {
    rep.tails_monotone = rep.tails_monotone && rep.tails[n] <= rep.tails[n - 1];
  }

  // ‖T_{−m}‖ = ‖A_{−1} ⋯ A_{−m}‖ = ‖A_{−m}ᵀ ⋯ A_{−1}ᵀ‖ for unimodular factors
  LogNormProduct fwd, bwd;
  double best = 0.0;
  rep.log_max_T.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  const double log_T6 = 6.0 * std::log(T);
  double log_c = -std::numeric_limits<double>::infinity();
  for (std::int64_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      fwd.left_multiply(step_matrix(r.at(n - 1), r.at(n), z));
      bwd.left_multiply(transpose(step_matrix(r.at(-n), r.at(-n + 1), z)));
      best = std::max({best, fwd.log_norm(), bwd.log_norm()});
    }
    rep.log_max_T[static_cast<std::size_t>(n)] = best;
    const double t = rep.tails[static_cast<std::size_t>(n)];
    if (n >= 1 && t > 0.0) log_c = std::max(log_c, std::log(t) + 2.0 * best - log_T6);
  }
  rep.c_min = std::exp(log_c);
  return rep;
}

}  // namespace divgrad
