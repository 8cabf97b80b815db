#include "divgrad/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "divgrad/csv.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/parallel.hpp"
#include "divgrad/random.hpp"

namespace divgrad {

namespace {

constexpr double kMaxExp = 700.0;

// log √(e^{2x} + e^{2y}) without overflow.
double log_hypot(double x, double y) noexcept {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y), lo = std::min(x, y);
  return hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
}

double safe_log_abs(cplx v) noexcept {
  const double a = std::abs(v);
  return a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

double exp_clamped(double x) noexcept { return x < -kMaxExp ? 0.0 : std::exp(x); }

// Givens-type unitary with first column x/‖x‖ and determinant 1.
Mat2C unitary_from_column(cplx x1, cplx x2, double r) noexcept {
  return {x1 / r, -std::conj(x2) / r, x2 / r, std::conj(x1) / r};
}

template <class Coef>
LogNormProduct product_forward(Coef&& coef, std::int64_t n, cplx z) {
  LogNormProduct p;
  double a_j = coef(0);
  for (std::int64_t j = 0; j < n; ++j) {
    const double a_j1 = coef(j + 1);
    p.left_multiply(step_matrix(a_j, a_j1, z));
    a_j = a_j1;
  }
  return p;
}

}  // namespace

Mat2C step_matrix(double a_j, double a_j1, cplx z) {
  if (!(a_j > 0.0)) throw ParameterError("step_matrix: a_j must be > 0, got " + format_double(a_j));
  const double inv = 1.0 / a_j;
  return {(a_j1 + a_j - z) * inv, cplx(-a_j), cplx(inv), cplx(0.0)};
}

void LogNormProduct::Scaled::renormalize() noexcept {
  const double a = std::abs(m);
  if (a > 0.0 && std::abs(std::log(a)) > kRescaleLog) {
    e += std::log(a);
    m /= a;
  }
}

void LogNormProduct::left_multiply(const Mat2C& m) {
  const Mat2C x = m * q_;
  const double r = std::hypot(std::abs(x.a), std::abs(x.c));
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw NumericalError("LogNormProduct: singular or non-finite factor");
  }
  const cplx r12 = (std::conj(x.a) * x.b + std::conj(x.c) * x.d) / r;
  const cplx r22 = (x.a * x.d - x.c * x.b) / r;

  const double lratio = d2_.e - d1_.e;
  const cplx ratio = lratio < -kMaxExp ? cplx(0.0) : (d2_.m / d1_.m) * std::exp(lratio);
  u_ += (r12 / r) * ratio;

  d1_.m *= r;
  d2_.m *= r22;
  d1_.renormalize();
  d2_.renormalize();
  q_ = unitary_from_column(x.a, x.c, r);
  ++steps_;
}

double LogNormProduct::log_norm_du() const noexcept {
  const double l1 = d1_.log_abs(), l2 = d2_.log_abs();
  const double s = std::max(l1, l2);
  const cplx a = d1_.m / std::abs(d1_.m) * exp_clamped(l1 - s);
  const cplx d = d2_.m / std::abs(d2_.m) * exp_clamped(l2 - s);
  const Mat2C du{a, a * u_, cplx(0.0), d};
  return s + std::log(norm2(du));
}

double LogNormProduct::log_norm() const noexcept { return log_norm_du(); }

double LogNormProduct::log_scale() const noexcept { return d1_.log_abs(); }

Mat2C LogNormProduct::scaled_matrix(double shift) const noexcept {
  const cplx a = d1_.m / std::abs(d1_.m) * exp_clamped(d1_.log_abs() - shift);
  const cplx d = d2_.m / std::abs(d2_.m) * exp_clamped(d2_.log_abs() - shift);
  return q_ * Mat2C{a, a * u_, cplx(0.0), d};
}

Mat2C LogNormProduct::normalized() const noexcept { return scaled_matrix(log_scale()); }

double LogNormProduct::log_max_norm() const noexcept {
  const double s = log_norm();
  return s + std::log(max_norm(scaled_matrix(s)));
}

double LogNormProduct::log_norm_applied(const Vec2C& v) const noexcept {
  const cplx w1 = v[0] + u_ * v[1];
  return log_hypot(d1_.log_abs() + safe_log_abs(w1), d2_.log_abs() + safe_log_abs(v[1]));
}

Mat2C LogNormProduct::matrix() const {
  if (log_norm() > kMaxExp) {
    throw NumericalError("LogNormProduct::matrix: log-norm " + format_double(log_norm()) +
                         " overflows a double");
  }
  return scaled_matrix(0.0);
}

cplx LogNormProduct::determinant() const noexcept {
  return q_.det() * d1_.m * d2_.m * std::exp(d1_.e + d2_.e);
}

LogNormProduct LogNormProduct::inverse() const {
  // T⁻¹ = U⁻¹ D⁻¹ Qᴴ = e^{sc} · [[α, −uβ], [0, β]] · Qᴴ, with α = e^{−sc}/d1,
  // β = e^{−sc}/d2 and sc chosen so that max(|α|, |β|) = 1.
  const double la0 = -d1_.log_abs(), lb0 = -d2_.log_abs();
  const double sc = std::max(la0, lb0);
  const cplx p1 = std::conj(d1_.m) / std::abs(d1_.m);
  const cplx p2 = std::conj(d2_.m) / std::abs(d2_.m);
  const cplx alpha = p1 * exp_clamped(la0 - sc);
  const cplx beta = p2 * exp_clamped(lb0 - sc);
  const Mat2C qh{std::conj(q_.a), std::conj(q_.c), std::conj(q_.b), std::conj(q_.d)};
  const Mat2C y = Mat2C{alpha, -u_ * beta, cplx(0.0), beta} * qh;

  const double r = std::hypot(std::abs(y.a), std::abs(y.c));
  if (!(r > 0.0)) throw NumericalError("LogNormProduct::inverse: degenerate factorization");
  const cplx r12 = (std::conj(y.a) * y.b + std::conj(y.c) * y.d) / r;

  LogNormProduct out;
  out.q_ = unitary_from_column(y.a, y.c, r);
  out.u_ = r12 / r;
  out.d1_.m = cplx(r);
  out.d1_.e = sc;
  // det Y = p1 p2 e^{la0 + lb0 − 2sc} det Qᴴ, kept in log form; r22 = det Y / (r · det G).
  const cplx ph = p1 * p2 * qh.det() / out.q_.det();
  out.d2_.m = ph / r;
  out.d2_.e = la0 + lb0 - sc;
  out.d1_.renormalize();
  out.d2_.renormalize();
  out.steps_ = -steps_;
  return out;
}

LogNormProduct transfer_product(std::span<const double> a, std::int64_t n, cplx z) {
  if (n < 0) throw ParameterError("transfer_product(span): n must be >= 0");
  if (static_cast<std::int64_t>(a.size()) < n + 1) {
    throw CoverageError("transfer_product: need " + std::to_string(n + 1) + " coefficients, got " +
                        std::to_string(a.size()));
  }
  return product_forward([&](std::int64_t j) { return a[static_cast<std::size_t>(j)]; }, n, z);
}

LogNormProduct transfer_product(const DisorderRealization& r, std::int64_t n, cplx z) {
  if (n >= 0) {
    r.require(0, n, "transfer_product");
    return product_forward([&](std::int64_t j) { return r[j]; }, n, z);
  }
  r.require(n, 0, "transfer_product");
  // A_{−1} ⋯ A_{−|n|}: rightmost factor first.
  LogNormProduct p;
  for (std::int64_t j = n; j <= -1; ++j) p.left_multiply(step_matrix(r[j], r[j + 1], z));
  return p.inverse();
}

DeterministicBoundReport deterministic_bound_check(const DisorderRealization& r, std::int64_t n,
                                                   cplx z) {
  if (n == 0) throw ParameterError("deterministic_bound_check: n = 0");
  const auto& dist = r.distribution();
  const double am = dist.support_min(), ap = dist.support_max();
  const double c1 = 8.0 * ap * ap / am;
  const double c2 = 8.0 * ap * ap / (am * am);
  const double absn = std::abs(static_cast<double>(n));

  DeterministicBoundReport rep;
  rep.log_norm = transfer_product(r, n, z).log_norm();
  rep.norm = rep.log_norm > kMaxExp ? std::numeric_limits<double>::infinity() : std::exp(rep.log_norm);
  rep.bound_linear = c1 * absn;
  rep.log_bound_exp = std::log(c1 * absn) + c2 * absn * absn * std::abs(z);
  rep.pass = rep.log_norm <= rep.log_bound_exp && (z != cplx(0.0) || rep.norm <= rep.bound_linear);
  return rep;
}

namespace {

// Hot loop: plain rescaled product, coefficients streamed from the counter RNG.
template <class S>
double log_norm_rate_impl(const CoefficientDistribution& dist, std::uint64_t seed, S z,
                          std::int64_t n) {
  Mat2<S> t = Mat2<S>::identity();
  double log_acc = 0.0;
  double a_j = coefficient_at(dist, seed, 0);
  for (std::int64_t j = 0; j < n; ++j) {
    const double a_j1 = coefficient_at(dist, seed, j + 1);
    const double inv = 1.0 / a_j;
    const S s = (a_j1 + a_j - z) * inv;
    const S na = s * t.a - a_j * t.c;
    const S nb = s * t.b - a_j * t.d;
    t.c = t.a * inv;
    t.d = t.b * inv;
    t.a = na;
    t.b = nb;
    a_j = a_j1;
    if ((j & 15) == 15) {
      const double m = max_norm(t);
      if (m > 1e100 || m < 1e-100) {
        log_acc += std::log(m);
        t = (S(1) / m) * t;
      }
    }
  }
  // norm2 squares entries; scale first
  const double m = max_norm(t);
  return (log_acc + std::log(m) + std::log(norm2((S(1) / m) * t))) / static_cast<double>(n);
}

}  // namespace

double log_norm_rate(const CoefficientDistribution& dist, std::uint64_t seed, cplx z,
                     std::int64_t n) {
  if (n < 1) throw ParameterError("log_norm_rate: n must be >= 1");
  if (z.imag() == 0.0) return log_norm_rate_impl<double>(dist, seed, z.real(), n);
  return log_norm_rate_impl<cplx>(dist, seed, z, n);
}

LyapunovEstimate lyapunov_estimate(const CoefficientDistribution& dist, cplx z, std::int64_t n,
                                   std::int64_t replicates, std::uint64_t master_seed) {
  if (n < 1) throw ParameterError("lyapunov_estimate: n must be >= 1");
  if (replicates < 1) throw ParameterError("lyapunov_estimate: replicates must be >= 1");
  LyapunovEstimate est;
  est.z = z;
  est.n = n;
  est.replicates = replicates;
  est.samples = parallel_map(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    return log_norm_rate(dist, rng::derive_seed(master_seed, r), z, n);
  });
  double sum = 0.0;
  for (double v : est.samples) sum += v;
  est.mean = sum / static_cast<double>(replicates);
  if (replicates > 1) {
    double ss = 0.0;
    for (double v : est.samples) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates));
  }
  return est;
}

double HyperbolicEntry::log_max_norm() const noexcept {
  const double m = std::max(std::max(std::abs(p), std::abs(p_prev)), std::max(std::abs(q), std::abs(q_prev)));
  return log_scale + std::log(m);
}

std::vector<HyperbolicEntry> hyperbolic_recurrence(std::span<const double> b, double x,
                                                   double delta, std::int64_t n) {
  if (!(x > 0.0)) throw DomainError("hyperbolic_recurrence: x must be > 0 (E = −x < 0)");
  if (n < 0) throw ParameterError("hyperbolic_recurrence: n must be >= 0");
  if (static_cast<std::int64_t>(b.size()) < n) {
    throw CoverageError("hyperbolic_recurrence: need " + std::to_string(n) + " values of b");
  }
  for (std::int64_t k = 0; k < n; ++k) {
    if (!(b[static_cast<std::size_t>(k)] > 0.0)) {
      throw ParameterError("hyperbolic_recurrence: b_k must be > 0");
    }
  }
  std::vector<HyperbolicEntry> rows;
  rows.reserve(static_cast<std::size_t>(n) + 1);
  HyperbolicEntry cur{cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0), 0.0};
  rows.push_back(cur);
  const cplx w(x, -delta);
  for (std::int64_t k = 0; k < n; ++k) {
    const cplx c = 2.0 + w * b[static_cast<std::size_t>(k)];
    const cplx p = c * cur.p - cur.p_prev;
    const cplx q = c * cur.q - cur.q_prev;
    cur.p_prev = cur.p;
    cur.q_prev = cur.q;
    cur.p = p;
    cur.q = q;
    const double m = std::max(std::abs(cur.p), std::abs(cur.q));
    if (m > 1e150) {
      cur.p /= m;
      cur.q /= m;
      cur.p_prev /= m;
      cur.q_prev /= m;
      cur.log_scale += std::log(m);
    }
    rows.push_back(cur);
  }
  return rows;
}

HyperbolicBounds hyperbolic_bounds(std::span<const double> b, double x, double delta,
                                   std::int64_t n) {
  if (n < 1) throw ParameterError("hyperbolic_bounds: n must be >= 1");
  const auto rows = hyperbolic_recurrence(b, x, delta, n);
  const auto bs = b.first(static_cast<std::size_t>(n));
  const double bm = *std::min_element(bs.begin(), bs.end());
  const double bp = *std::max_element(bs.begin(), bs.end());
  HyperbolicBounds hb;
  const double nn = static_cast<double>(n);
  hb.log_norm = rows.back().log_max_norm();
  hb.lower = 0.5 * nn * std::sqrt(x * bm);
  hb.upper = 2.0 * nn * std::sqrt(x * bp) + std::log(3.0 / std::sqrt(x * bp));
  hb.lower_ok = hb.log_norm >= hb.lower;
  hb.upper_ok = hb.log_norm <= hb.upper;
  return hb;
}

}  // namespace divgrad
