#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace divgrad {

/// Uniform law on [a_minus, a_plus].
struct UniformLaw {
  double a_minus;
  double a_plus;
  friend bool operator==(const UniformLaw&, const UniformLaw&) = default;
};

/// Two-point law: value v1 with probability p, v2 with probability 1 - p.
struct TwoPointLaw {
  double v1;
  double v2;
  double p;
  friend bool operator==(const TwoPointLaw&, const TwoPointLaw&) = default;
};

/// Common law P_0 of the i.i.d. bond coefficients a_n. Support is bounded
/// away from 0 and infinity (uniform ellipticity); support_min() = a_-,
/// support_max() = a_+.
class CoefficientDistribution {
 public:
  using Law = std::variant<UniformLaw, TwoPointLaw>;

  static CoefficientDistribution uniform(double a_minus, double a_plus);
  static CoefficientDistribution two_point(double v1, double v2, double p);
  /// Point mass at a, represented as two_point(a, a, 1/2).
  static CoefficientDistribution constant(double a);

  /// Parses `uniform:LO:HI` or `twopoint:V1:V2:P`.
  static CoefficientDistribution parse(std::string_view text);

  /// Inverse of parse(); numbers use the shortest round-trip form.
  std::string to_string() const;

  const Law& law() const noexcept { return law_; }
  double support_min() const noexcept;
  double support_max() const noexcept;
  bool is_degenerate() const noexcept;

  /// Maps a uniform variate u in [0, 1) to a coefficient value.
  double from_uniform(double u) const noexcept;

  /// Closed-form moments.
  double mean_inverse() const noexcept;
  double variance_inverse() const noexcept;
  double mean_inverse_square() const noexcept;
  double mean_log() const noexcept;

  friend bool operator==(const CoefficientDistribution&, const CoefficientDistribution&) = default;

 private:
  explicit CoefficientDistribution(Law law) : law_(law) {}
  Law law_;
};

/// κ = 1 / E[1/a_0], the harmonic mean of the coefficients.
double kappa(const CoefficientDistribution& dist) noexcept;

/// Leading coefficient k of the low-energy Lyapunov exponent,
/// k = (κ/8) E[(1/a_0 - 1/κ)^2].
double lyapunov_slope_constant(const CoefficientDistribution& dist) noexcept;

/// Prefactor 1/(π√κ) of the low-energy IDS.
double ids_prefactor(const CoefficientDistribution& dist) noexcept;

/// Inclusive integer interval [lo, hi].
struct IndexWindow {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  std::int64_t size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
  bool empty() const noexcept { return hi < lo; }
  bool contains(std::int64_t n) const noexcept { return n >= lo && n <= hi; }
  bool contains(IndexWindow other) const noexcept {
    return other.empty() || (contains(other.lo) && contains(other.hi));
  }
  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

/// Coefficient a_n of the realization (dist, seed) at lattice index n. The
/// value depends on (seed, n) only, so windows can be extended freely.
double coefficient_at(const CoefficientDistribution& dist, std::uint64_t seed,
                      std::int64_t n) noexcept;

/// One seeded sample path {a_n : n in window}.
class DisorderRealization {
 public:
  DisorderRealization(CoefficientDistribution dist, std::uint64_t master_seed,
                      IndexWindow window, std::vector<double> values);

  /// Wraps explicit coefficients a_first, a_first+1, ... . The values must lie
  /// in the support of `dist`, which supplies a_- and a_+.
  static DisorderRealization from_values(CoefficientDistribution dist,
                                         std::int64_t first_index,
                                         std::vector<double> values);

  const CoefficientDistribution& distribution() const noexcept { return dist_; }
  std::uint64_t master_seed() const noexcept { return seed_; }
  IndexWindow window() const noexcept { return window_; }
  std::span<const double> values() const noexcept { return values_; }

  /// a_n; throws CoverageError outside the window.
  double at(std::int64_t n) const;
  double operator[](std::int64_t n) const noexcept { return values_[static_cast<std::size_t>(n - window_.lo)]; }

  /// Values a_lo..a_hi as a contiguous span; throws CoverageError if not covered.
  std::span<const double> slice(std::int64_t lo, std::int64_t hi) const;

  /// Throws CoverageError naming `what` unless [lo, hi] is inside the window.
  void require(std::int64_t lo, std::int64_t hi, std::string_view what) const;

 private:
  CoefficientDistribution dist_;
  std::uint64_t seed_;
  IndexWindow window_;
  std::vector<double> values_;
};

/// Samples {a_n : n in window}. Throws ParameterError on an empty window.
DisorderRealization sample_sequence(const CoefficientDistribution& dist,
                                    std::uint64_t master_seed, IndexWindow window);

}  // namespace divgrad
