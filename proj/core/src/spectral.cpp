#include "divgrad/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "divgrad/errors.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/random.hpp"
#include "divgrad/transfer.hpp"
#include "divgrad/tridiag.hpp"

namespace divgrad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivmin(const FiniteJacobiOperator& op) {
  double m = 1.0;
  for (double v : op.offdiag_squared()) m = std::max(m, v);
  return std::numeric_limits<double>::min() * m;
}

std::int64_t sturm_count(const FiniteJacobiOperator& op, double E, double pmin) {
  const auto d = op.diag();
  const auto o2 = op.offdiag_squared();
  std::int64_t count = 0;
  double p = d[0] - E;
  if (std::abs(p) < pmin) p = -pmin;
  count += p < 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    p = (d[i] - E) - o2[i - 1] / p;
    if (std::abs(p) < pmin) p = -pmin;
    count += p < 0.0;
  }
  return count;
}

struct Bracket {
  double lo, hi;
};

Bracket gershgorin(const FiniteJacobiOperator& op) {
  const auto d = op.diag();
  const auto o = op.offdiag();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = (i > 0 ? std::abs(o[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(o[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  const double pad = 4.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  return {lo - pad, hi + pad};
}

// Smallest λ with count(λ) > k, bracketed by count(lo) <= k < count(hi).
double bisect_index(const FiniteJacobiOperator& op, std::int64_t k, double lo, double hi,
                    double pmin) {
  const double tol = 2.0 * kEps * op.norm_bound();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(op, mid, pmin) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double residual_norm(const FiniteJacobiOperator& op, std::span<const double> v, double lambda) {
  const auto hv = op.apply(v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = hv[i] - lambda * v[i];
    s += r * r;
  }
  return std::sqrt(s);
}

// Inverse iteration for eigenvalue `lambda`; `against` are already accepted
// vectors of the same cluster that the result is kept orthogonal to.
std::vector<double> inverse_iteration(const FiniteJacobiOperator& op, double lambda,
                                      std::uint64_t start_seed,
                                      const std::vector<const std::vector<double>*>& against) {
  const std::size_t n = static_cast<std::size_t>(op.size());
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * rng::uniform01_at(start_seed, static_cast<std::int64_t>(i)) - 1.0;
  if (n == 1) return {1.0};

  std::vector<double> d(op.diag().begin(), op.diag().end());
  for (double& v : d) v -= lambda;
  const auto off = op.offdiag();
  const double zero_pivot = kEps * op.norm_bound();
  const double target = 1e-13 * op.norm_bound();

  auto orthonormalize = [&](std::vector<double>& y) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto* q : against) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += (*q)[i] * y[i];
        for (std::size_t i = 0; i < n; ++i) y[i] -= dot * (*q)[i];
      }
      if (against.empty()) break;
    }
    const double nrm = norm2(y);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("inverse iteration breakdown");
    for (double& v : y) v /= nrm;
  };

  orthonormalize(x);
  constexpr int kMaxIterations = 8;
  for (int it = 0; it < kMaxIterations; ++it) {
    x = tridiagonal_solve<double>(off, d, off, x, zero_pivot);
    orthonormalize(x);
    if (it >= 1 && residual_norm(op, x, lambda) <= target) return x;
  }
  const double res = residual_norm(op, x, lambda);
  if (res > 1e-8 * op.norm_bound()) {
    throw NumericalError("inverse iteration did not converge at λ = " + std::to_string(lambda) +
                         " (residual " + std::to_string(res) + ")");
  }
  return x;
}

void fix_sign(std::vector<double>& v) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  }
  if (v[imax] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

std::int64_t count_eigenvalues_below(const FiniteJacobiOperator& op, double E) {
  return sturm_count(op, E, pivmin(op));
}

double eigenvalue_by_index(const FiniteJacobiOperator& op, std::int64_t k) {
  if (k < 0 || k >= op.size()) throw ParameterError("eigenvalue_by_index: index out of range");
  const Bracket b = gershgorin(op);
  return bisect_index(op, k, b.lo, b.hi, pivmin(op));
}

std::vector<double> full_spectrum(const FiniteJacobiOperator& op, std::int64_t cap) {
  if (op.size() > cap) {
    throw CapacityError("full_spectrum: N = " + std::to_string(op.size()) + " exceeds the cap " +
                        std::to_string(cap));
  }
  const Bracket b = gershgorin(op);
  const double pmin = pivmin(op);
  const std::int64_t n = op.size();
  constexpr std::int64_t kChunk = 64;
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  auto parts = parallel_map(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const std::int64_t k0 = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t k1 = std::min(n, k0 + kChunk);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k1 - k0));
    double lo = b.lo;
    for (std::int64_t k = k0; k < k1; ++k) {
      const double v = bisect_index(op, k, lo, b.hi, pmin);
      out.push_back(v);
      // the next eigenvalue is >= this one; keep the invariant count(lo) <= k+1
      const double below = std::nextafter(v, -std::numeric_limits<double>::infinity()) -
                           2.0 * kEps * op.norm_bound();
      if (below > lo && sturm_count(op, below, pmin) <= k + 1) lo = below;
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n));
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<double> eigenvalues_in(const FiniteJacobiOperator& op, double lo, double hi) {
  const double pmin = pivmin(op);
  const std::int64_t c0 = sturm_count(op, lo, pmin), c1 = sturm_count(op, hi, pmin);
  const Bracket b = gershgorin(op);
  std::vector<double> out;
  for (std::int64_t k = c0; k < c1; ++k) {
    out.push_back(bisect_index(op, k, std::max(b.lo, lo), std::min(b.hi, hi), pmin));
  }
  return out;
}

EigenPair eigenpair_near(const FiniteJacobiOperator& op, double target) {
  const std::int64_t n = op.size();
  const std::int64_t c = count_eigenvalues_below(op, target);
  std::int64_t k = std::clamp<std::int64_t>(c, 0, n - 1);
  double lambda = eigenvalue_by_index(op, k);
  if (c >= 1) {
    const double below = eigenvalue_by_index(op, c - 1);
    if (std::abs(below - target) <= std::abs(lambda - target)) {
      k = c - 1;
      lambda = below;
    }
  }
  EigenPair ep;
  ep.index = k;
  ep.eigenvalue = lambda;
  ep.eigenvector = inverse_iteration(op, lambda, rng::derive_seed(0x5eed, static_cast<std::uint64_t>(k)), {});
  fix_sign(ep.eigenvector);
  ep.residual = residual_norm(op, ep.eigenvector, lambda);
  return ep;
}

std::vector<std::pair<std::size_t, std::size_t>> eigenvalue_clusters(
    const FiniteJacobiOperator& op, std::span<const double> values) {
  const double gap_tol = 1e-6 * op.norm_bound();
  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] - values[j - 1] < gap_tol) ++j;
    clusters.emplace_back(i, j);
    i = j;
  }
  return clusters;
}

std::vector<std::vector<double>> eigenvectors_for(const FiniteJacobiOperator& op,
                                                  std::span<const double> values,
                                                  std::size_t begin, std::size_t end) {
  if (begin > end || end > values.size()) throw ParameterError("eigenvectors_for: bad range");
  const auto all = eigenvalue_clusters(op, values.subspan(begin, end - begin));
  auto blocks = parallel_map(all.size(), [&](std::size_t c) {
    const auto [b, e] = all[c];
    std::vector<std::vector<double>> vecs;
    vecs.reserve(e - b);
    for (std::size_t k = begin + b; k < begin + e; ++k) {
      std::vector<const std::vector<double>*> against;
      for (const auto& v : vecs) against.push_back(&v);
      vecs.push_back(inverse_iteration(op, values[k], rng::derive_seed(0x5eed, k), against));
    }
    for (auto& v : vecs) fix_sign(v);
    return vecs;
  });
  std::vector<std::vector<double>> out;
  out.reserve(end - begin);
  for (auto& b : blocks) {
    for (auto& v : b) out.push_back(std::move(v));
  }
  return out;
}

Eigensystem eigendecompose(const FiniteJacobiOperator& op, std::int64_t cap) {
  Eigensystem es;
  es.values = full_spectrum(op, cap);
  const std::size_t n = es.values.size();
  for (const auto& [b, e] : eigenvalue_clusters(op, es.values)) {
    if (e - b > 1) es.reorthogonalized += static_cast<std::int64_t>(e - b);
  }
  es.vectors = eigenvectors_for(op, es.values, 0, n);
  const auto res = parallel_map(n, [&](std::size_t k) {
    return residual_norm(op, es.vectors[k], es.values[k]);
  });
  for (double r : res) es.max_residual = std::max(es.max_residual, r);
  return es;
}

double log_abs_det(const FiniteJacobiOperator& op, cplx z) {
  const auto d = op.diag();
  const auto o2 = op.offdiag_squared();
  const double pmin = pivmin(op);
  cplx p = d[0] - z;
  if (std::abs(p) < pmin) p = -pmin;
  double s = std::log(std::abs(p));
  for (std::size_t i = 1; i < d.size(); ++i) {
    p = (d[i] - z) - o2[i - 1] / p;
    if (std::abs(p) < pmin) p = -pmin;
    s += std::log(std::abs(p));
  }
  return s;
}

cplx resolvent_trace(const FiniteJacobiOperator& op, cplx z) {
  if (z.imag() == 0.0) throw DomainError("resolvent_trace: Im z must be nonzero");
  const auto d = op.diag();
  const auto o2 = op.offdiag_squared();
  cplx p = d[0] - z, dp = -1.0;
  cplx s = dp / p;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const cplx prev = p;
    p = (d[i] - z) - o2[i - 1] / prev;
    dp = -1.0 + o2[i - 1] * dp / (prev * prev);
    s += dp / p;
  }
  return -s;
}

std::vector<double> geometric_grid(double lo, double hi, std::int64_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw ParameterError("geometric_grid: need 0 < lo < hi and points >= 2");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  const double r = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::int64_t i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(r * static_cast<double>(i));
  g.back() = hi;
  return g;
}

IdsCurve ids_curve(const CoefficientDistribution& dist, std::int64_t N,
                   std::span<const double> E_grid, std::int64_t replicates,
                   std::uint64_t master_seed) {
  if (N < 2) throw ParameterError("ids_curve: N must be >= 2");
  if (replicates < 1) throw ParameterError("ids_curve: replicates must be >= 1");
  const auto per = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    const auto real = sample_sequence(dist, rng::derive_seed(master_seed, r), {0, N});
    const auto op = assemble(real, N);
    std::vector<double> v(E_grid.size());
    for (std::size_t i = 0; i < E_grid.size(); ++i) {
      v[i] = static_cast<double>(count_eigenvalues_below(op, E_grid[i])) / static_cast<double>(N);
    }
    return v;
  });
  IdsCurve c;
  c.E_grid.assign(E_grid.begin(), E_grid.end());
  c.N = N;
  c.replicates = replicates;
  c.ensemble = dist.to_string();
  const double R = static_cast<double>(replicates);
  c.mean_ids.assign(E_grid.size(), 0.0);
  c.stderr_.assign(E_grid.size(), 0.0);
  for (const auto& v : per) {
    for (std::size_t i = 0; i < v.size(); ++i) c.mean_ids[i] += v[i];
  }
  for (double& m : c.mean_ids) m /= R;
  if (replicates > 1) {
    for (std::size_t i = 0; i < E_grid.size(); ++i) {
      double ss = 0.0;
      for (const auto& v : per) ss += (v[i] - c.mean_ids[i]) * (v[i] - c.mean_ids[i]);
      c.stderr_[i] = std::sqrt(ss / (R - 1.0) / R);
    }
  }
  return c;
}

ThoulessReport thouless_check(const CoefficientDistribution& dist, cplx z, std::int64_t N,
                              std::int64_t replicates, std::uint64_t master_seed,
                              std::int64_t transfer_n) {
  if (N < 1 || replicates < 1) throw ParameterError("thouless_check: N, replicates must be >= 1");
  const double mlog = dist.mean_log();
  struct Sample {
    double value;
    std::int64_t excluded;
  };
  const auto per = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    const auto real = sample_sequence(dist, rng::derive_seed(master_seed, r), {0, N});
    const auto op = assemble(real, N);
    if (z.imag() == 0.0) {
      const double E = z.real();
      if (count_eigenvalues_below(op, E + 1e-10) != count_eigenvalues_below(op, E - 1e-10)) {
        // the log singularity is integrable; drop the offending atoms only
        double s = 0.0;
        std::int64_t ex = 0;
        for (double l : full_spectrum(op, std::max<std::int64_t>(N, 8192))) {
          if (std::abs(l - E) <= 1e-10) {
            ++ex;
          } else {
            s += std::log(std::abs(l - E));
          }
        }
        return Sample{-mlog + s / static_cast<double>(N), ex};
      }
    }
    return Sample{-mlog + log_abs_det(op, z) / static_cast<double>(N), std::int64_t{0}};
  });
  ThoulessReport rep;
  rep.z = z;
  rep.N = N;
  rep.replicates = replicates;
  double sum = 0.0;
  for (const auto& s : per) {
    sum += s.value;
    rep.excluded += s.excluded;
  }
  const double R = static_cast<double>(replicates);
  rep.L_thouless = sum / R;
  if (replicates > 1) {
    double ss = 0.0;
    for (const auto& s : per) ss += (s.value - rep.L_thouless) * (s.value - rep.L_thouless);
    rep.stderr_thouless = std::sqrt(ss / (R - 1.0) / R);
  }
  const auto tr = lyapunov_estimate(dist, z, transfer_n, replicates,
                                    rng::derive_seed(master_seed, 0x7472616e73666572ULL));
  rep.L_transfer = tr.mean;
  rep.stderr_transfer = tr.stderr_;
  rep.diff = rep.L_thouless - rep.L_transfer;
  return rep;
}

DecayFit decay_length_fit(std::span<const double> psi, double floor) {
  if (psi.size() < 3) throw ParameterError("decay_length_fit: need at least 3 sites");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
  }
  const double cut = floor * std::abs(psi[peak]);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::int64_t m = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = std::abs(psi[i]);
    if (a <= cut || a == 0.0) continue;
    const double x = std::abs(static_cast<double>(i) - static_cast<double>(peak));
    const double y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  DecayFit f;
  f.peak = static_cast<std::int64_t>(peak);
  f.points = m;
  const double md = static_cast<double>(m);
  const double den = md * sxx - sx * sx;
  if (m < 3 || den <= 0.0) throw NumericalError("decay_length_fit: not enough points above floor");
  f.slope = (md * sxy - sx * sy) / den;
  f.length = f.slope < 0.0 ? -1.0 / f.slope : std::numeric_limits<double>::infinity();
  return f;
}

}  // namespace divgrad
