#include "divgrad/lab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "divgrad/disorder.hpp"
#include "divgrad/dynamics.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/lab/acceptance.hpp"
#include "divgrad/operator.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/prufer.hpp"
#include "divgrad/random.hpp"
#include "divgrad/spectral.hpp"
#include "divgrad/transfer.hpp"

namespace divgrad::lab {

namespace {

constexpr double kPi = std::numbers::pi;

// Every command reads its keys through its own table so defaults live in one place.
struct Keys {
  const Config& cfg;
  const std::vector<KeySpec>& table;

  const std::string& fallback(const std::string& key) const {
    for (const auto& k : table) {
      if (k.key == key) return k.fallback;
    }
    throw ParameterError("internal: key '" + key + "' missing from command table");
  }
  std::string str(const std::string& k) const { return cfg.get(k, fallback(k)); }
  double num(const std::string& k) const { return cfg.get_double(k, parse_double(fallback(k), k)); }
  std::int64_t integer(const std::string& k) const {
    return cfg.get_int(k, parse_int(fallback(k), k));
  }
  std::uint64_t u64(const std::string& k) const {
    return cfg.get_u64(k, static_cast<std::uint64_t>(parse_int(fallback(k), k)));
  }
  bool flag(const std::string& k) const { return cfg.get_bool(k, fallback(k) == "true"); }
  std::vector<double> grid(const std::string& k) const { return cfg.get_grid(k, fallback(k)); }
  CoefficientDistribution dist(const std::string& k = "dist") const {
    return CoefficientDistribution::parse(str(k));
  }
};

void require_positive(std::int64_t v, const char* what) {
  if (v < 1) throw ParameterError(std::string(what) + " must be >= 1");
}

// ------------------------------------------------------------------ lyapunov
CsvTable lyapunov_table(const CoefficientDistribution& dist, std::span<const double> E,
                        std::int64_t n, std::int64_t reps, std::uint64_t seed,
                        const std::string& estimator, double im) {
  require_positive(n, "n");
  require_positive(reps, "replicates");
  const double k = lyapunov_slope_constant(dist);
  CsvTable csv({"E", "n", "replicates", "mean", "stderr", "slope_ref"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("estimator", estimator);
  csv.add_meta("k", k);
  csv.add_meta("kappa", kappa(dist));
  if (estimator == "matrix") csv.add_meta("imag_part", im);
  for (std::size_t i = 0; i < E.size(); ++i) {
    LyapunovEstimate est;
    if (estimator == "prufer") {
      est = lyapunov_via_prufer(dist, E[i], n, reps, rng::derive_seed(seed, i));
    } else if (estimator == "matrix") {
      est = lyapunov_estimate(dist, cplx(E[i], im), n, reps, rng::derive_seed(seed, i));
    } else {
      throw ParameterError("estimator must be 'prufer' or 'matrix', got '" + estimator + "'");
    }
    csv.row() << E[i] << n << reps << est.mean << est.stderr_ << k * E[i];
  }
  return csv;
}

void cmd_lyapunov(RunContext& ctx, const Keys& k) {
  ctx.out.write_csv("lyapunov.csv",
                    lyapunov_table(k.dist(), k.grid("E"), k.integer("n"), k.integer("replicates"),
                                   k.u64("seed"), k.str("estimator"), k.num("im")));
}

// ----------------------------------------------------------------------- ids
CsvTable ids_table(const CoefficientDistribution& dist, std::int64_t N, std::span<const double> E,
                   std::int64_t reps, std::uint64_t seed) {
  require_positive(N, "N");
  require_positive(reps, "replicates");
  const auto c = ids_curve(dist, N, E, reps, seed);
  const double pref = ids_prefactor(dist);
  CsvTable csv({"E", "N", "replicates", "mean_ids", "stderr", "ref_sqrt"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("kappa", kappa(dist));
  csv.add_meta("prefactor", pref);
  for (std::size_t i = 0; i < E.size(); ++i) {
    csv.row() << E[i] << N << reps << c.mean_ids[i] << c.stderr_[i] << pref * std::sqrt(E[i]);
  }
  return csv;
}

void cmd_ids(RunContext& ctx, const Keys& k) {
  ctx.out.write_csv("ids.csv", ids_table(k.dist(), k.integer("N"), k.grid("E"),
                                         k.integer("replicates"), k.u64("seed")));
}

// ------------------------------------------------------------- eigenfunction
void eigenfunctions(OutputSink& out, const std::string& prefix, const CoefficientDistribution& dist,
                    std::int64_t N, std::uint64_t seed, std::span<const double> targets) {
  require_positive(N, "N");
  const auto real = sample_sequence(dist, seed, {0, N});
  const auto op = assemble(real, N);
  CsvTable ef({"site", "psi", "log_abs_psi", "eigenvalue", "target"});
  CsvTable decay({"target", "eigenvalue", "index", "residual", "peak", "decay_length",
                  "fit_points", "predicted_length"});
  ef.add_meta("dist", dist.to_string());
  ef.add_meta("N", static_cast<double>(N));
  ef.add_meta("k", lyapunov_slope_constant(dist));
  decay.add_meta("k", lyapunov_slope_constant(dist));
  const double k = lyapunov_slope_constant(dist);
  for (double target : targets) {
    const auto p = eigenpair_near(op, target);
    for (std::size_t i = 0; i < p.eigenvector.size(); ++i) {
      const double v = p.eigenvector[i];
      ef.row() << static_cast<std::int64_t>(i) << v << std::log(std::max(std::abs(v), 1e-300))
               << p.eigenvalue << target;
    }
    const auto fit = decay_length_fit(p.eigenvector);
    const double predicted = p.eigenvalue > 0.0 ? 1.0 / (k * p.eigenvalue) : 0.0;
    decay.row() << target << p.eigenvalue << p.index << p.residual << fit.peak << fit.length
                << fit.points << predicted;
  }
  out.write_csv(prefix + "eigenfunction.csv", ef);
  out.write_csv(prefix + "decay.csv", decay);
}

void cmd_eigenfunction(RunContext& ctx, const Keys& k) {
  eigenfunctions(ctx.out, "", k.dist(), k.integer("N"), k.u64("seed"), k.grid("target"));
}

// ------------------------------------------------------------ moments-direct
void moments_direct_files(OutputSink& out, const CoefficientDistribution& dist, std::int64_t N,
                          std::uint64_t seed, std::span<const double> q,
                          std::span<const double> t, std::int64_t cap, const std::string& window,
                          double fit_lo, double fit_hi, double boundary_cut, bool per_q) {
  require_positive(N, "N");
  FiniteJacobiOperator op = [&] {
    if (window == "half") return assemble(sample_sequence(dist, seed, {0, N}), N);
    if (window == "centered") return centered_window(centered_realization(dist, seed, N), N);
    throw ParameterError("window must be 'half' or 'centered', got '" + window + "'");
  }();
  const auto series = moments_direct(op, q, t, cap);
  CsvTable csv({"t", "q", "Mq", "unitarity_defect", "boundary_mass"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("N", static_cast<double>(N));
  csv.add_meta("window", window);
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.abscissae.size(); ++i) {
      csv.row() << s.abscissae[i] << s.q << s.values[i] << s.unitarity_defect[i]
                << s.boundary_mass[i];
    }
  }
  out.write_csv("moments_direct.csv", csv);

  CsvTable ex({"q", "slope", "stderr", "corridor_lo", "corridor_hi", "in_corridor", "points",
               "ref_slope_upper", "ref_slope_lower", "ref_slope_half"});
  ex.add_meta("fit_lo", fit_lo);
  ex.add_meta("fit_hi", fit_hi);
  ex.add_meta("boundary_cut", boundary_cut);
  ex.add_meta("per_q", per_q ? "true" : "false");
  std::vector<bool> keep;
  if (!series.empty()) {
    for (double b : series.front().boundary_mass) keep.push_back(b < boundary_cut);
  }
  for (const auto& s : series) {
    std::int64_t n_kept = 0;
    for (std::size_t i = 0; i < s.abscissae.size(); ++i) {
      n_kept += s.abscissae[i] >= fit_lo && s.abscissae[i] <= fit_hi && keep[i];
    }
    if (n_kept < 5) {
      ex.row() << s.q << std::nan("") << std::nan("") << corridor_lo(s.q) << corridor_hi(s.q)
               << false << n_kept << std::max(0.0, s.q - 0.2)
               << std::max(0.0, s.q / 2 - 2) << s.q / 2;
      continue;
    }
    const auto f = fit_transport_exponent(s, fit_lo, fit_hi, per_q, keep);
    ex.row() << s.q << f.slope << f.stderr_ << f.corridor_lo << f.corridor_hi << f.in_corridor
             << f.points << std::max(0.0, s.q - 0.2) << std::max(0.0, s.q / 2 - 2) << s.q / 2;
  }
  out.write_csv("exponents.csv", ex);
}

void cmd_moments_direct(RunContext& ctx, const Keys& k) {
  const auto t = k.grid("t");
  const double lo = k.cfg.has("fit_lo") ? k.num("fit_lo") : t.front();
  const double hi = k.cfg.has("fit_hi") ? k.num("fit_hi") : t.back();
  moments_direct_files(ctx.out, k.dist(), k.integer("N"), k.u64("seed"), k.grid("q"), t,
                       k.integer("cap"), k.str("window"), lo, hi, k.num("boundary_cut"),
                       k.flag("per_q"));
}

// --------------------------------------------------------------- moments-avg
void cmd_moments_avg(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const auto N = k.integer("N");
  const auto reps = k.integer("replicates");
  require_positive(N, "N");
  require_positive(reps, "replicates");
  QuadratureSpec spec;
  spec.uniform_cells = k.integer("uniform_cells");
  spec.doubling_check = k.flag("doubling_check");
  const auto form = k.str("form");
  if (form == "exact") {
    spec.form = ParsevalForm::exact;
  } else if (form == "paper") {
    spec.form = ParsevalForm::paper;
  } else {
    throw ParameterError("form must be 'exact' or 'paper', got '" + form + "'");
  }
  const auto q = k.grid("q");
  CsvTable csv({"T", "q", "Mq", "quadrature_nodes", "replicates", "doubling_change",
                "boundary_weight", "budget_exceeded"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("N", static_cast<double>(N));
  csv.add_meta("form", form);
  const auto seed = k.u64("seed");
  for (double T : k.grid("T")) {
    const auto r = moments_averaged(dist, N, T, q, reps, seed, spec);
    for (std::size_t i = 0; i < q.size(); ++i) {
      csv.row() << T << q[i] << r.values[i] << r.quadrature_nodes << r.replicates
                << r.doubling_change[i] << r.boundary_weight << r.budget_exceeded;
    }
  }
  ctx.out.write_csv("moments_avg.csv", csv);
}

// --------------------------------------------------------------------- green
void cmd_green(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const auto N = k.integer("N");
  const double E = k.num("E"), T = k.num("T");
  if (!(T > 0.0)) throw ParameterError("T must be > 0");
  const auto real = centered_realization(dist, k.u64("seed"), N);
  const auto op = centered_window(real, N);
  const cplx z(E, 1.0 / T);
  const auto g = green_column(op, z, 0);
  CsvTable csv({"n", "re_G", "im_G", "abs_G"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("z_re", E);
  csv.add_meta("z_im", 1.0 / T);
  csv.add_meta("residual", g.residual);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    csv.row() << g.first_site + static_cast<std::int64_t>(i) << g.values[i].real()
              << g.values[i].imag() << std::abs(g.values[i]);
  }
  ctx.out.write_csv("green.csv", csv);

  const auto rep = green_inequality_checks(real, N, E, T, k.integer("n_max"));
  CsvTable chk({"n", "tail", "log_max_T"});
  chk.add_meta("initial_sum", rep.initial_sum);
  chk.add_meta("initial_bound", rep.initial_bound);
  chk.add_meta("initial_ok", rep.initial_ok ? "true" : "false");
  chk.add_meta("c_min", rep.c_min);
  chk.add_meta("tails_monotone", rep.tails_monotone ? "true" : "false");
  for (std::size_t n = 0; n < rep.tails.size(); ++n) {
    chk.row() << n << rep.tails[n] << rep.log_max_T[n];
  }
  ctx.out.write_csv("green_checks.csv", chk);
}

// ---------------------------------------------------------------- prufer-ldt
void cmd_prufer_ldt(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const double T = k.num("T"), alpha = k.num("alpha"), C = k.num("C");
  const auto n = k.integer("n"), reps = k.integer("replicates");
  const auto seed = k.u64("seed");
  CsvTable csv({"E", "T", "n", "alpha", "replicates", "empirical_prob", "paper_bound", "C",
                "C_min"});
  csv.add_meta("dist", dist.to_string());
  const auto E = k.grid("E");
  for (std::size_t i = 0; i < E.size(); ++i) {
    const auto r = transfer_norm_ldt(dist, E[i], T, n, alpha, reps, rng::derive_seed(seed, i), C);
    csv.row() << E[i] << T << n << alpha << r.replicates << r.empirical_prob << r.paper_bound
              << r.C_used << r.C_min;
  }
  ctx.out.write_csv("ldt.csv", csv);
}

// ---------------------------------------------------------------- martingale
void cmd_martingale(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const double E = k.num("E"), alpha = k.num("alpha");
  const auto n = k.integer("n"), reps = k.integer("replicates");
  const auto rows = martingale_tail(dist, E, n, alpha, reps, k.u64("seed"));
  CsvTable csv({"E", "n", "alpha", "replicates", "m", "threshold", "empirical_prob",
                "empirical_prob_flipped", "empirical_prob_two_sided", "azuma_bound",
                "binomial_stderr", "pass"});
  csv.add_meta("dist", dist.to_string());
  for (const auto& r : rows) {
    csv.row() << E << n << alpha << reps << r.m << r.threshold << r.empirical_prob
              << r.empirical_prob_flipped << r.empirical_prob_two_sided << r.azuma_bound
              << r.binomial_stderr << r.pass;
  }
  ctx.out.write_csv("martingale.csv", csv);
}

// ------------------------------------------------------------------ thouless
void cmd_thouless(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const double im = k.num("im");
  const auto N = k.integer("N"), reps = k.integer("replicates"), tn = k.integer("transfer_n");
  const auto seed = k.u64("seed");
  CsvTable csv({"z_re", "z_im", "N", "replicates", "L_thouless", "stderr_thouless", "L_transfer",
                "stderr_transfer", "diff", "excluded"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("transfer_n", static_cast<double>(tn));
  const auto E = k.grid("E");
  for (std::size_t i = 0; i < E.size(); ++i) {
    const auto r = thouless_check(dist, cplx(E[i], im), N, reps, rng::derive_seed(seed, i), tn);
    csv.row() << E[i] << im << N << reps << r.L_thouless << r.stderr_thouless << r.L_transfer
              << r.stderr_transfer << r.diff << r.excluded;
  }
  ctx.out.write_csv("thouless.csv", csv);
}

// ---------------------------------------------------------------- hyperbolic
void cmd_hyperbolic(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const auto n = k.integer("n"), seeds = k.integer("seeds");
  require_positive(n, "n");
  require_positive(seeds, "seeds");
  const double delta = k.num("delta");
  const auto xs = k.grid("x");
  const auto master = k.u64("seed");
  CsvTable csv({"seed_index", "x", "delta", "n", "log_norm", "lower", "upper", "lower_ok",
                "upper_ok"});
  csv.add_meta("dist", dist.to_string());
  for (std::int64_t s = 0; s < seeds; ++s) {
    const auto real = sample_sequence(dist, rng::derive_seed(master, static_cast<std::uint64_t>(s)),
                                      {0, n - 1});
    std::vector<double> b(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) b[static_cast<std::size_t>(j)] = 1.0 / real[j];
    for (double x : xs) {
      const auto h = hyperbolic_bounds(b, x, delta, n);
      csv.row() << s << x << delta << n << h.log_norm << h.lower << h.upper << h.lower_ok
                << h.upper_ok;
    }
  }
  ctx.out.write_csv("hyperbolic.csv", csv);
}

// --------------------------------------------------------------------- borel
void cmd_borel(RunContext& ctx, const Keys& k) {
  const auto dist = k.dist();
  const auto N = k.integer("N"), reps = k.integer("replicates");
  double D = k.num("D");
  if (D <= 0.0) {
    // fit 𝒩(E) ≈ D√E through the origin on the small-E IDS curve
    const auto grid = geometric_grid(1e-3, 5e-2, 12);
    const auto c = ids_curve(dist, 3000, grid, 100, rng::derive_seed(k.u64("seed"), 0x1d5));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      num += std::sqrt(grid[i]) * c.mean_ids[i];
      den += grid[i];
    }
    D = num / den;
  }
  const auto T = k.grid("T");
  const auto deltas = k.grid("delta");
  const auto rep = borel_checks(dist, N, reps, k.u64("seed"), T, deltas, D, k.num("c_margin"));
  CsvTable csv({"E", "delta", "imB", "bound", "check", "ok"});
  csv.add_meta("dist", dist.to_string());
  csv.add_meta("D_fit", rep.D_fit);
  csv.add_meta("C_fit", rep.C_fit);
  csv.add_meta("herglotz_ok", rep.herglotz_ok ? "true" : "false");
  for (const auto& r : rep.upper) {
    csv.row() << r.E << r.delta << r.imB << r.bound << "upper" << r.ok;
  }
  for (const auto& r : rep.lower) {
    csv.row() << r.E << r.delta << r.imB << r.bound << "window_lower" << r.ok;
  }
  ctx.out.write_csv("borel.csv", csv);

  CsvTable w({"T", "window_integral", "bound", "ok"});
  w.add_meta("D_fit", rep.D_fit);
  for (const auto& r : rep.lower) w.row() << 1.0 / r.delta << r.imB << r.bound << r.ok;
  ctx.out.write_csv("borel_window.csv", w);
}

// -------------------------------------------------------------------- figure
void cmd_figure(RunContext& ctx, const Keys& k) {
  const auto id = k.integer("id");
  const auto seed = k.u64("seed");
  switch (id) {
    case 1: {
      // half-line restriction, n = 10000, t ∈ {100, 150, …, 10000}
      const std::int64_t N = k.cfg.has("N") ? k.integer("N") : 10000;
      const auto q = k.cfg.has("q") ? k.grid("q") : parse_grid("1,2,4,6,10,60");
      const auto t = parse_grid("step:100:50:10000");
      moments_direct_files(ctx.out, CoefficientDistribution::uniform(1.0, 2.0), N, seed, q, t, N,
                           "half", t.front(), t.back(), 1e-6, false);
      break;
    }
    case 2: {
      const std::int64_t N = k.cfg.has("N") ? k.integer("N") : 3000;
      const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
      const double kk = lyapunov_slope_constant(dist);
      const double n = static_cast<double>(N);
      const std::vector<double> targets = {0.0, 1.0 / (kk * n), 2.0 / (kk * n), 20.0 / (kk * n)};
      eigenfunctions(ctx.out, "", dist, N, seed, targets);
      break;
    }
    case 3: {
      const std::int64_t N = k.cfg.has("N") ? k.integer("N") : 2000;
      const auto dist = CoefficientDistribution::uniform(1.0, 2.0);
      const double kap = kappa(dist);
      const auto real = sample_sequence(dist, seed, {0, N});
      const auto op = assemble(real, N, 0, RightBoundary::neumann);
      CsvTable csv({"E", "N", "chi_N", "ids_phase", "ids_sturm", "mismatch"});
      csv.add_meta("dist", dist.to_string());
      csv.add_meta("boundary", "dirichlet-left,neumann-right");
      for (int i = 1; i <= 100; ++i) {
        const double E = 4.0 * kap * i / 101.0;
        const auto p = ids_via_phase(real, N, E);
        const auto c = count_eigenvalues_below(op, E);
        csv.row() << E << N << p.chi_N << p.ids_value << static_cast<double>(c) / N
                  << std::abs(p.chi_N / kPi - static_cast<double>(c));
      }
      ctx.out.write_csv("phase_ids.csv", csv);
      break;
    }
    case 4: {
      const std::int64_t N = k.cfg.has("N") ? k.integer("N") : 3000;
      const auto reps = k.cfg.has("replicates") ? k.integer("replicates") : 100;
      const auto E = parse_grid("lin:0.0005:0.05:100");
      ctx.out.write_csv("left/ids.csv", ids_table(CoefficientDistribution::uniform(0.1, 1.0), N, E,
                                                  reps, rng::derive_seed(seed, 0)));
      ctx.out.write_csv("right/ids.csv",
                        ids_table(CoefficientDistribution::two_point(0.1, 1.0, 0.5), N, E, reps,
                                  rng::derive_seed(seed, 1)));
      break;
    }
    case 5: {
      const std::int64_t n = k.cfg.has("n") ? k.integer("n") : 3000;
      const auto reps = k.cfg.has("replicates") ? k.integer("replicates") : 100;
      const double eps = k.num("epsilon");
      const auto E = parse_grid("geom:1e-3:1e-1:30");
      ctx.out.write_csv("top/lyapunov.csv",
                        lyapunov_table(CoefficientDistribution::uniform(0.1, 1.0), E, n, reps,
                                       rng::derive_seed(seed, 0), "matrix", 0.0));
      ctx.out.write_csv("bottom/lyapunov.csv",
                        lyapunov_table(CoefficientDistribution::uniform(eps, 1.0), E, n, reps,
                                       rng::derive_seed(seed, 1), "matrix", 0.0));
      break;
    }
    default:
      throw ParameterError("figure id must be 1..5, got " + std::to_string(id));
  }
}

// -------------------------------------------------------------------- verify
void cmd_verify(RunContext& ctx, const Keys& k) {
  SuiteOptions opt;
  const auto suite = k.str("suite");
  if (suite == "fast") {
    opt.suite = Suite::fast;
  } else if (suite == "full") {
    opt.suite = Suite::full;
  } else {
    throw ParameterError("suite must be 'fast' or 'full', got '" + suite + "'");
  }
  const auto only = k.str("only");
  std::stringstream ss(only);
  for (std::string id; std::getline(ss, id, ',');) {
    if (id.empty()) continue;
    const bool known = std::any_of(criteria().begin(), criteria().end(),
                                   [&](const Criterion& c) { return c.id == id; });
    if (!known) throw ParameterError("unknown criterion '" + id + "'");
    opt.only.push_back(id);
  }
  opt.determinism = k.flag("determinism");
  const auto results = run_suite(opt, ctx.log);
  for (const auto& r : results) {
    if (!r.csv.empty()) ctx.out.write_text("acceptance/" + r.id + ".csv", r.csv);
  }
  ctx.out.write_text(k.str("report"), report_json(results, suite));
  const bool all = std::all_of(results.begin(), results.end(),
                               [](const CriterionResult& r) { return r.pass; });
  ctx.status = all ? kOk : kAcceptanceFailed;
}

using Handler = void (*)(RunContext&, const Keys&);

CommandSpec make(std::string name, std::string help, std::vector<KeySpec> keys, Handler h) {
  CommandSpec c{std::move(name), std::move(help), std::move(keys), {}};
  c.run = [h, table = c.keys](RunContext& ctx) { h(ctx, Keys{ctx.cfg, table}); };
  return c;
}

const KeySpec kDist{"dist", "uniform:1:2", "coefficient law: uniform:LO:HI | twopoint:V1:V2:P"};
KeySpec seed_key(const char* v = "1") { return {"seed", v, "master seed"}; }

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> all = {
      make("lyapunov", "Lyapunov exponent estimates",
           {kDist,
            {"E", "geom:1e-3:1e-2:5", "energies (real part of z for the matrix estimator)"},
            {"n", "1000000", "chain length"},
            {"replicates", "100", "replicates per energy"},
            seed_key(),
            {"estimator", "prufer", "prufer (0 < E < 4κ) | matrix"},
            {"im", "0", "imaginary part of z (matrix estimator)"}},
           cmd_lyapunov),
      make("ids", "Disorder-averaged integrated density of states",
           {kDist,
            {"N", "3000", "system size"},
            {"E", "geom:1e-3:5e-2:12", "energies"},
            {"replicates", "100", "replicates"},
            seed_key()},
           cmd_ids),
      make("eigenfunction", "Eigenfunctions near target energies and their decay lengths",
           {kDist, {"N", "3000", "system size"}, {"target", "0", "target energies"}, seed_key()},
           cmd_eigenfunction),
      make("moments-direct", "Non-averaged moments M^q(t) by spectral synthesis",
           {kDist,
            {"N", "2000", "system size"},
            {"q", "4,6,10", "moment orders"},
            {"t", "geom:100:5000:41", "times"},
            {"cap", "8192", "largest N for the eigendecomposition"},
            {"window", "half", "half (sites 0..N−1) | centered"},
            {"fit_lo", "0", "fit range start (default: first t)"},
            {"fit_hi", "0", "fit range end (default: last t)"},
            {"boundary_cut", "1e-6", "drop times whose boundary mass reaches this"},
            {"per_q", "false", "report slopes divided by q"},
            seed_key()},
           cmd_moments_direct),
      make("moments-avg", "Time-averaged moments from the resolvent",
           {kDist,
            {"N", "256", "system size (centered window)"},
            {"T", "10,20,50", "averaging times"},
            {"q", "2", "moment orders"},
            {"replicates", "1", "replicates"},
            {"form", "exact", "exact | paper (Parseval normalization)"},
            {"uniform_cells", "4096", "uniform quadrature cells"},
            {"doubling_check", "false", "repeat with doubled grid"},
            seed_key()},
           cmd_moments_avg),
      make("green", "Green's function column and its inequality checks",
           {kDist,
            {"N", "512", "system size (centered window)"},
            {"E", "0.01", "real part of z"},
            {"T", "100", "z = E + i/T"},
            {"n_max", "-1", "largest tail index (default N/2 − 2)"},
            seed_key()},
           cmd_green),
      make("prufer-ldt", "Large-deviation check for transfer norms at z = E + i/T",
           {kDist,
            {"E", "1e-4", "energies"},
            {"T", "1e9", "imaginary part is 1/T"},
            {"n", "100", "chain length"},
            {"alpha", "0.1", "exponent α"},
            {"replicates", "1000", "replicates"},
            {"C", "10", "norm constant"},
            seed_key()},
           cmd_prufer_ldt),
      make("martingale", "Tail probabilities of the phase martingale",
           {kDist,
            {"E", "1e-2", "energy"},
            {"n", "10000", "chain length"},
            {"alpha", "0.3", "exponent α"},
            {"replicates", "1000", "replicates"},
            seed_key()},
           cmd_martingale),
      make("thouless", "Thouless formula vs transfer-matrix Lyapunov exponent",
           {kDist,
            {"E", "0.05", "real parts of z"},
            {"im", "1e-3", "imaginary part of z"},
            {"N", "3000", "system size"},
            {"replicates", "100", "replicates"},
            {"transfer_n", "100000", "chain length of the transfer estimate"},
            seed_key()},
           cmd_thouless),
      make("hyperbolic", "Entry bounds of the isotopic products below the spectrum",
           {kDist,
            {"x", "1e-4,1e-3,1e-2", "z = −x + iδ"},
            {"delta", "0", "imaginary part δ"},
            {"n", "1000", "chain length"},
            {"seeds", "50", "realizations"},
            seed_key()},
           cmd_hyperbolic),
      make("borel", "Borel transform lower and upper bounds",
           {kDist,
            {"N", "100000", "system size"},
            {"replicates", "20", "replicates"},
            {"T", "1e2,1e3,1e4", "window lengths"},
            {"delta", "1e-2,1e-3,1e-4,1e-5", "Im z for the upper bound"},
            {"D", "0", "IDS constant (≤ 0: fit from the IDS curve)"},
            {"c_margin", "1", "factor on the calibrated C"},
            seed_key()},
           cmd_borel),
      make("figure", "Data sets behind figures 1–5",
           {{"id", "1", "figure number"},
            {"N", "0", "override the preset size"},
            {"n", "0", "override the preset chain length (figure 5)"},
            {"q", "1,2,4,6,10,60", "moment orders (figure 1)"},
            {"replicates", "100", "override the preset replicate count"},
            {"epsilon", "1e-3", "lower support end for Uniform[0,1] (figure 5)"},
            seed_key()},
           cmd_figure),
      make("verify", "Acceptance suite",
           {{"suite", "fast", "fast | full"},
            {"only", "", "comma list of criterion ids"},
            {"determinism", "true", "append the A14 reruns"},
            {"report", "verify_report.json", "report file inside the output directory"}},
           cmd_verify),
  };
  return all;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

int run_command(const CommandSpec& cmd, const Config& cfg, std::ostream& log) {
  std::set<std::string> allowed;
  for (const auto& k : cmd.keys) allowed.insert(k.key);
  for (const auto& k : common_keys()) allowed.insert(k.key);
  allowed.insert("config");
  cfg.require_known(allowed);

  if (cfg.has("threads")) {
    const auto t = cfg.get_int("threads", 0);
    if (t < 1) throw ParameterError("threads must be >= 1");
    set_worker_count(static_cast<std::size_t>(t));
  }
  std::string seed = "-";
  for (const auto& k : cmd.keys) {
    if (k.key == "seed") seed = cfg.get("seed", k.fallback);
  }
  OutputSink sink(cfg.get("out", "."), cmd.name, cfg.hash(), seed);
  RunContext ctx{cfg, sink, log};
  cmd.run(ctx);
  sink.finish();
  return ctx.status;
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace divgrad::lab
