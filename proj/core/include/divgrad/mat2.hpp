#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace divgrad {

using cplx = std::complex<double>;

/// 2×2 matrix, row-major: [[a, b], [c, d]].
template <class S>
struct Mat2 {
  S a{1}, b{0}, c{0}, d{1};

  static constexpr Mat2 identity() noexcept { return {S(1), S(0), S(0), S(1)}; }

  constexpr S det() const noexcept { return a * d - b * c; }

  /// Exact inverse; divides the adjugate by det().
  Mat2 inverse() const noexcept {
    const S k = S(1) / det();
    return {d * k, -b * k, -c * k, a * k};
  }

  /// Adjugate; equals the inverse when det = 1 without any division.
  constexpr Mat2 adjugate() const noexcept { return {d, -b, -c, a}; }

  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr Mat2 operator*(S s, const Mat2& m) noexcept {
    return {s * m.a, s * m.b, s * m.c, s * m.d};
  }
  friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) noexcept {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) noexcept {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

  template <class V>
  constexpr std::array<V, 2> operator()(const std::array<V, 2>& v) const noexcept {
    return {a * v[0] + b * v[1], c * v[0] + d * v[1]};
  }
};

using Mat2C = Mat2<cplx>;
using Mat2R = Mat2<double>;
using Vec2C = std::array<cplx, 2>;

inline Mat2C to_complex(const Mat2R& m) noexcept { return {m.a, m.b, m.c, m.d}; }

namespace detail {
inline double abs2(double x) noexcept { return x * x; }
inline double abs2(const cplx& x) noexcept { return std::norm(x); }
}  // namespace detail

/// Sum of squared moduli of the entries (squared Frobenius norm).
template <class S>
double frobenius2(const Mat2<S>& m) noexcept {
  using detail::abs2;
  return abs2(m.a) + abs2(m.b) + abs2(m.c) + abs2(m.d);
}

/// Operator 2-norm from the closed-form singular values of the 2×2 Gram
/// matrix: σ_max² = (s + √((s − 2|det|)(s + 2|det|))) / 2, s = ‖m‖_F².
template <class S>
double norm2(const Mat2<S>& m) noexcept {
  const double s = frobenius2(m);
  const double dt = std::abs(m.det());
  const double disc = std::max(0.0, (s - 2.0 * dt) * (s + 2.0 * dt));
  return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

/// Entrywise maximum modulus.
template <class S>
double max_norm(const Mat2<S>& m) noexcept {
  return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

inline double norm2(const Vec2C& v) noexcept { return std::hypot(std::abs(v[0]), std::abs(v[1])); }

}  // namespace divgrad
