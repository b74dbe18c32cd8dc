#pragma once

// Radial nonincreasing step functions g(x) = v_k for |x| in [r_{k-1}, r_k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maxlab/errors.hpp"
#include "maxlab/geometry.hpp"

namespace maxlab {

struct Level {
  double radius = 0.0;  // outer radius r_k of the annulus
  double value = 0.0;   // level v_k on [r_{k-1}, r_k)

  bool operator==(const Level&) const = default;
};

/// Positive coefficient on the indicator of B(0, radius).
struct IndicatorTerm {
  double radius = 0.0;
  double weight = 0.0;

  bool operator==(const IndicatorTerm&) const = default;
};

class StepProfile {
 public:
  /// Throws ValidationError unless radii strictly increase and levels are positive and nonincreasing.
  explicit StepProfile(std::vector<Level> levels) : levels_(std::move(levels)) { validate(); }

  std::span<const Level> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  double peak() const noexcept { return levels_.front().value; }
  double outer_radius() const noexcept { return levels_.back().radius; }

  bool operator==(const StepProfile&) const = default;

 private:
  void validate() const {
    if (levels_.empty()) throw ValidationError("levels", "at least one level is required");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      const std::string at = "levels[" + std::to_string(k) + "]";
      const auto& [r, v] = levels_[k];
      if (!std::isfinite(r) || !(r > 0.0)) throw ValidationError(at + ".r", "radius must be positive and finite");
      if (!std::isfinite(v) || !(v > 0.0)) throw ValidationError(at + ".v", "level must be positive and finite");
      if (k > 0 && !(r > levels_[k - 1].radius)) throw ValidationError(at + ".r", "radii must be strictly increasing");
      if (k > 0 && v > levels_[k - 1].value) throw ValidationError(at + ".v", "levels must be nonincreasing");
    }
  }

  std::vector<Level> levels_;
};

struct OperatorConfig {
  int d = 1;
  double lambda = 0.0;
};

inline void validate(const OperatorConfig& cfg) {
  if (cfg.d < 1 || cfg.d > kMaxDimension) throw ValidationError("d", "dimension must be in [1, 30]");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw ValidationError("lambda", "lambda must be in [0, 1]");
}

/// g = sum_k a_k chi_{B(0, r_k)} with a_k = v_k - v_{k+1}; flat runs drop out.
inline std::vector<IndicatorTerm> indicator_decomposition(const StepProfile& g) {
  std::vector<IndicatorTerm> terms;
  const auto levels = g.levels();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double next = k + 1 < levels.size() ? levels[k + 1].value : 0.0;
    const double weight = levels[k].value - next;
    if (weight > 0.0) terms.push_back({levels[k].radius, weight});
  }
  return terms;
}

inline double l1_norm(const StepProfile& g, int d) {
  const double omega = unit_ball_volume(d);
  double sum = 0.0;
  double inner = 0.0;
  for (const auto& [r, v] : g.levels()) {
    sum += v * omega * (std::pow(r, d) - std::pow(inner, d));
    inner = r;
  }
  return sum;
}

inline double evaluate(const StepProfile& g, double radius) {
  const auto levels = g.levels();
  const auto it = std::upper_bound(levels.begin(), levels.end(), radius,
                                   [](double x, const Level& l) { return x < l.radius; });
  return it == levels.end() ? 0.0 : it->value;
}

/// chi_{B(0,r)} / |B(0,r)|.
inline StepProfile normalized_indicator(double r, int d) {
  if (!(r > 0.0)) throw DomainError("normalized_indicator: r must be positive");
  return StepProfile({{r, 1.0 / ball_volume(d, r)}});
}

inline StepProfile unit_indicator() { return StepProfile({{1.0, 1.0}}); }

/// Deterministic random profile with 1..k_max levels, normalized to unit L1 norm in R^d.
inline StepProfile random_profile(std::uint64_t seed, int k_max, int d) {
  if (k_max < 1) throw DomainError("random_profile: k_max must be >= 1");
  require_dimension(d);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, k_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = count(rng);

  std::vector<Level> levels(static_cast<std::size_t>(k));
  double r = 0.0;
  for (auto& level : levels) {
    r += 0.05 + 2.0 * unit(rng);
    level.radius = r;
  }
  // Build levels outward-in so that v_1 >= ... >= v_K > 0; about one step in
  // five repeats the previous level to exercise flat runs.
  double v = 0.05 + unit(rng);
  for (int i = k - 1; i >= 0; --i) {
    levels[static_cast<std::size_t>(i)].value = v;
    if (unit(rng) >= 0.2) v += 3.0 * unit(rng) * unit(rng);
  }
  const double norm = l1_norm(StepProfile(levels), d);
  for (auto& level : levels) level.value /= norm;
  return StepProfile(std::move(levels));
}

inline std::string serialize_profile(const StepProfile& g) {
  nlohmann::ordered_json doc;
  auto& levels = doc["levels"] = nlohmann::ordered_json::array();
  for (const auto& [r, v] : g.levels()) levels.push_back({{"r", r}, {"v", v}});
  return doc.dump();
}

inline StepProfile parse_profile(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("document", "expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "levels") throw ValidationError(key, "unknown field");
  }
  if (!doc.contains("levels")) throw ValidationError("levels", "missing field");
  const auto& arr = doc["levels"];
  if (!arr.is_array()) throw ValidationError("levels", "expected an array");

  std::vector<Level> levels;
  levels.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = "levels[" + std::to_string(k) + "]";
    const auto& item = arr[k];
    if (!item.is_object()) throw ValidationError(at, "expected an object");
    for (const auto& [key, _] : item.items()) {
      if (key != "r" && key != "v") throw ValidationError(at + "." + key, "unknown field");
    }
    for (const char* key : {"r", "v"}) {
      if (!item.contains(key)) throw ValidationError(at + "." + key, "missing field");
      if (!item[key].is_number()) throw ValidationError(at + "." + key, "expected a number");
    }
    levels.push_back({item["r"].get<double>(), item["v"].get<double>()});
  }
  return StepProfile(std::move(levels));
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string profile_digest(const StepProfile& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize_profile(g)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace maxlab
