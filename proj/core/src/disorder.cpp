#include "divgrad/disorder.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "divgrad/csv.hpp"
#include "divgrad/errors.hpp"
#include "divgrad/random.hpp"

namespace divgrad {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require_coefficient(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ParameterError(std::string("coefficient law: ") + name + " must be finite and > 0, got " +
                         format_double(v));
  }
}

double parse_number(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || s.empty()) {
    throw ParameterError("cannot parse number '" + std::string(s) + "' in distribution '" +
                         std::string(whole) + "'");
  }
  return v;
}

// ln(hi/lo) without cancellation when hi ≈ lo.
double log_ratio(double lo, double hi) { return std::log1p((hi - lo) / lo); }

}  // namespace

CoefficientDistribution CoefficientDistribution::uniform(double a_minus, double a_plus) {
  require_coefficient(a_minus, "a_minus");
  require_coefficient(a_plus, "a_plus");
  if (a_minus > a_plus) {
    throw ParameterError("uniform law: a_minus > a_plus (" + format_double(a_minus) + " > " +
                         format_double(a_plus) + ")");
  }
  return CoefficientDistribution(UniformLaw{a_minus, a_plus});
}

CoefficientDistribution CoefficientDistribution::two_point(double v1, double v2, double p) {
  require_coefficient(v1, "v1");
  require_coefficient(v2, "v2");
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("two-point law: p must lie in (0, 1), got " + format_double(p));
  }
  return CoefficientDistribution(TwoPointLaw{v1, v2, p});
}

CoefficientDistribution CoefficientDistribution::constant(double a) { return two_point(a, a, 0.5); }

CoefficientDistribution CoefficientDistribution::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts[0] == "uniform" && parts.size() == 3) {
    return uniform(parse_number(parts[1], text), parse_number(parts[2], text));
  }
  if ((parts[0] == "twopoint" || parts[0] == "two_point" || parts[0] == "bernoulli") &&
      parts.size() == 4) {
    return two_point(parse_number(parts[1], text), parse_number(parts[2], text),
                     parse_number(parts[3], text));
  }
  if (parts[0] == "constant" && parts.size() == 2) return constant(parse_number(parts[1], text));
  throw ParameterError("unrecognized distribution '" + std::string(text) +
                       "' (expected uniform:LO:HI or twopoint:V1:V2:P)");
}

std::string CoefficientDistribution::to_string() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) {
                          return "uniform:" + format_double(u.a_minus) + ":" +
                                 format_double(u.a_plus);
                        },
                        [](const TwoPointLaw& t) {
                          return "twopoint:" + format_double(t.v1) + ":" + format_double(t.v2) +
                                 ":" + format_double(t.p);
                        }},
                    law_);
}

double CoefficientDistribution::support_min() const noexcept {
  return std::visit(overloaded{[](const UniformLaw& u) { return u.a_minus; },
                               [](const TwoPointLaw& t) { return std::min(t.v1, t.v2); }},
                    law_);
}

double CoefficientDistribution::support_max() const noexcept {
  return std::visit(overloaded{[](const UniformLaw& u) { return u.a_plus; },
                               [](const TwoPointLaw& t) { return std::max(t.v1, t.v2); }},
                    law_);
}

bool CoefficientDistribution::is_degenerate() const noexcept {
  return support_min() == support_max();
}

double CoefficientDistribution::from_uniform(double u) const noexcept {
  return std::visit(overloaded{[u](const UniformLaw& l) {
                                 const double v = l.a_minus + (l.a_plus - l.a_minus) * u;
                                 return std::min(v, l.a_plus);
                               },
                               [u](const TwoPointLaw& t) { return u < t.p ? t.v1 : t.v2; }},
                    law_);
}

double CoefficientDistribution::mean_inverse() const noexcept {
  return std::visit(overloaded{[](const UniformLaw& u) {
                                 if (u.a_minus == u.a_plus) return 1.0 / u.a_minus;
                                 return log_ratio(u.a_minus, u.a_plus) / (u.a_plus - u.a_minus);
                               },
                               [](const TwoPointLaw& t) { return t.p / t.v1 + (1.0 - t.p) / t.v2; }},
                    law_);
}

double CoefficientDistribution::mean_inverse_square() const noexcept {
  return std::visit(
      overloaded{[](const UniformLaw& u) { return 1.0 / (u.a_minus * u.a_plus); },
                 [](const TwoPointLaw& t) {
                   return t.p / (t.v1 * t.v1) + (1.0 - t.p) / (t.v2 * t.v2);
                 }},
      law_);
}

double CoefficientDistribution::variance_inverse() const noexcept {
  return std::visit(overloaded{[this](const UniformLaw& u) {
                                 if (u.a_minus == u.a_plus) return 0.0;
                                 const double m = mean_inverse();
                                 return std::max(0.0, 1.0 / (u.a_minus * u.a_plus) - m * m);
                               },
                               [](const TwoPointLaw& t) {
                                 const double d = 1.0 / t.v1 - 1.0 / t.v2;
                                 return t.p * (1.0 - t.p) * d * d;
                               }},
                    law_);
}

double CoefficientDistribution::mean_log() const noexcept {
  return std::visit(overloaded{[](const UniformLaw& u) {
                                 const double lo = u.a_minus, hi = u.a_plus;
                                 if (lo == hi) return std::log(lo);
                                 // (hi ln hi − lo ln lo)/(hi − lo) − 1, rearranged for stability
                                 return std::log(lo) + hi * log_ratio(lo, hi) / (hi - lo) - 1.0;
                               },
                               [](const TwoPointLaw& t) {
                                 return t.p * std::log(t.v1) + (1.0 - t.p) * std::log(t.v2);
                               }},
                    law_);
}

double kappa(const CoefficientDistribution& dist) noexcept { return 1.0 / dist.mean_inverse(); }

double lyapunov_slope_constant(const CoefficientDistribution& dist) noexcept {
  return kappa(dist) / 8.0 * dist.variance_inverse();
}

double ids_prefactor(const CoefficientDistribution& dist) noexcept {
  return 1.0 / (std::numbers::pi * std::sqrt(kappa(dist)));
}

double coefficient_at(const CoefficientDistribution& dist, std::uint64_t seed,
                      std::int64_t n) noexcept {
  return dist.from_uniform(rng::uniform01_at(seed, n));
}

DisorderRealization::DisorderRealization(CoefficientDistribution dist, std::uint64_t master_seed,
                                         IndexWindow window, std::vector<double> values)
    : dist_(std::move(dist)), seed_(master_seed), window_(window), values_(std::move(values)) {
  if (window_.empty()) throw ParameterError("DisorderRealization: empty window");
  if (static_cast<std::int64_t>(values_.size()) != window_.size()) {
    throw ParameterError("DisorderRealization: " + std::to_string(values_.size()) +
                         " values for a window of size " + std::to_string(window_.size()));
  }
  const double lo = dist_.support_min(), hi = dist_.support_max();
  for (double v : values_) {
    if (!(v >= lo && v <= hi)) {
      throw ParameterError("DisorderRealization: value " + format_double(v) +
                           " outside the support [" + format_double(lo) + ", " +
                           format_double(hi) + "]");
    }
  }
}

DisorderRealization DisorderRealization::from_values(CoefficientDistribution dist,
                                                     std::int64_t first_index,
                                                     std::vector<double> values) {
  const IndexWindow w{first_index, first_index + static_cast<std::int64_t>(values.size()) - 1};
  return DisorderRealization(std::move(dist), 0, w, std::move(values));
}

double DisorderRealization::at(std::int64_t n) const {
  if (!window_.contains(n)) {
    throw CoverageError("realization window [" + std::to_string(window_.lo) + ", " +
                        std::to_string(window_.hi) + "] does not contain index " +
                        std::to_string(n));
  }
  return (*this)[n];
}

std::span<const double> DisorderRealization::slice(std::int64_t lo, std::int64_t hi) const {
  require(lo, hi, "slice");
  if (hi < lo) return {};
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(lo - window_.lo),
                                                  static_cast<std::size_t>(hi - lo + 1));
}

void DisorderRealization::require(std::int64_t lo, std::int64_t hi, std::string_view what) const {
  if (!window_.contains(IndexWindow{lo, hi})) {
    throw CoverageError(std::string(what) + " needs a_n for n in [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "], realization covers [" +
                        std::to_string(window_.lo) + ", " + std::to_string(window_.hi) + "]");
  }
}

DisorderRealization sample_sequence(const CoefficientDistribution& dist, std::uint64_t master_seed,
                                    IndexWindow window) {
  if (window.empty()) throw ParameterError("sample_sequence: empty window");
  std::vector<double> values(static_cast<std::size_t>(window.size()));
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    values[static_cast<std::size_t>(n - window.lo)] = coefficient_at(dist, master_seed, n);
  }
  return DisorderRealization(dist, master_seed, window, std::move(values));
}

}  // namespace divgrad
