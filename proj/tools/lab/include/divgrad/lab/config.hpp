#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace divgrad::lab {

/// Flat key = value experiment configuration. Files use one pair per line,
/// '#' starts a comment; flags given on the command line override the file.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& origin = "<text>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma list or grid expression, see parse_grid().
  std::vector<double> get_grid(const std::string& key, const std::string& fallback) const;

  /// Sorted "key=value" lines, excluding keys that cannot change results
  /// (output directory, worker count).
  std::string canonical() const;
  /// SHA-256 of canonical(), hex.
  std::string hash() const;

  /// Throws ParameterError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

/// "0.1,0.2,0.5" | "geom:LO:HI:POINTS" | "lin:LO:HI:POINTS" | "step:LO:STEP:HI".
std::vector<double> parse_grid(const std::string& text);

double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

}  // namespace divgrad::lab
