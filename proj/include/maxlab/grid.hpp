#pragma once

// Compact grid syntax: "a:b:n" (n linear points), "geom:a:b:n" (n geometric
// points) or a comma-separated list of values.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "maxlab/errors.hpp"

namespace maxlab {

inline std::vector<double> linear_grid(double a, double b, int n) {
  if (n < 1) throw ValidationError("grid", "point count must be >= 1");
  if (n == 1) return {a};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  out.back() = b;
  return out;
}

inline std::vector<double> geometric_grid(double a, double b, int n) {
  if (n < 1) throw ValidationError("grid", "point count must be >= 1");
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("grid", "geometric endpoints must be positive");
  if (n == 1) return {a};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  out.back() = b;
  return out;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline double to_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ValidationError(field, "not a number: '" + s + "'");
  }
}

inline int to_count(const std::string& s, const std::string& field) {
  const double x = to_double(s, field);
  if (x != std::floor(x) || x < 1 || x > 1e7) throw ValidationError(field, "invalid point count '" + s + "'");
  return static_cast<int>(x);
}

}  // namespace detail

inline std::vector<double> parse_grid(std::string_view spec, const std::string& field = "grid") {
  if (spec.empty()) throw ValidationError(field, "empty grid");
  const auto parts = detail::split(spec, ':');
  if (parts.size() == 4 && parts[0] == "geom") {
    return geometric_grid(detail::to_double(parts[1], field), detail::to_double(parts[2], field),
                          detail::to_count(parts[3], field));
  }
  if (parts.size() == 3) {
    return linear_grid(detail::to_double(parts[0], field), detail::to_double(parts[1], field),
                       detail::to_count(parts[2], field));
  }
  if (parts.size() != 1) throw ValidationError(field, "expected a:b:n, geom:a:b:n or a comma list");
  std::vector<double> out;
  for (const auto& item : detail::split(spec, ',')) out.push_back(detail::to_double(item, field));
  return out;
}

}  // namespace maxlab
