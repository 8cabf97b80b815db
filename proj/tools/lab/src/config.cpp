#include "divgrad/lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "divgrad/errors.hpp"
#include "divgrad/lab/output.hpp"

namespace divgrad::lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

const std::set<std::string> kNonSemantic = {"out", "threads", "config", "report"};

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ParameterError(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && p == t.data() + t.size() && !t.empty()) return v;
  // accept 1e6-style integers
  const double d = parse_double(t, what);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) {
    throw ParameterError(what + ": '" + text + "' is not an integer");
  }
  return static_cast<std::int64_t>(d);
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParameterError("grid: empty specification");
  const auto colon = t.find(':');
  if (colon != std::string::npos) {
    const auto parts = split(t, ':');
    const std::string kind = parts[0];
    if (parts.size() != 4) throw ParameterError("grid: '" + t + "' needs KIND:A:B:C");
    if (kind == "geom" || kind == "lin") {
      const double lo = parse_double(parts[1], "grid lo");
      const double hi = parse_double(parts[2], "grid hi");
      const std::int64_t n = parse_int(parts[3], "grid points");
      if (n < 2 || !(hi > lo)) throw ParameterError("grid: need hi > lo and >= 2 points");
      if (kind == "geom" && !(lo > 0.0)) throw ParameterError("grid: geometric grid needs lo > 0");
      std::vector<double> g(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        g[static_cast<std::size_t>(i)] =
            kind == "geom" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
      }
      g.front() = lo;
      g.back() = hi;
      return g;
    }
    if (kind == "step") {
      const double lo = parse_double(parts[1], "grid lo");
      const double step = parse_double(parts[2], "grid step");
      const double hi = parse_double(parts[3], "grid hi");
      if (!(step > 0.0) || hi < lo) throw ParameterError("grid: need step > 0 and hi >= lo");
      const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      if (n > 10'000'000) throw ParameterError("grid: too many points");
      std::vector<double> g;
      for (std::int64_t i = 0; i < n; ++i) g.push_back(lo + step * static_cast<double>(i));
      return g;
    }
    throw ParameterError("grid: unknown kind '" + kind + "'");
  }
  std::vector<double> g;
  for (const auto& p : split(t, ',')) g.push_back(parse_double(p, "grid value"));
  return g;
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError(origin + ":" + std::to_string(lineno) + ": empty key");
    c.set(key, trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(values_.at(key), key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_int(values_.at(key), key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = trim(values_.at(key));
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw ParameterError(key + ": '" + t + "' is not a nonnegative integer");
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = trim(values_.at(key));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError(key + ": '" + v + "' is not a boolean");
}

std::vector<double> Config::get_grid(const std::string& key, const std::string& fallback) const {
  return parse_grid(get(key, fallback));
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) {
    if (kNonSemantic.count(k)) continue;
    s += k + "=" + v + "\n";
  }
  return s;
}

std::string Config::hash() const { return sha256_hex(canonical()); }

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k) && !kNonSemantic.count(k)) {
      throw ParameterError("unknown configuration key '" + k + "'");
    }
  }
}

}  // namespace divgrad::lab
