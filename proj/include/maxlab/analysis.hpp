#pragma once

// Radial scans, superlevel-set measures and weak-type ratio estimates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maxlab/errors.hpp"
#include "maxlab/geometry.hpp"
#include "maxlab/grid.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/profile.hpp"
#include "maxlab/table.hpp"

namespace maxlab {

inline constexpr double kBoundSlack = 1e-9;

/// (1 + lambda)^d.
inline double weak_bound(const OperatorConfig& cfg) { return std::pow(1.0 + cfg.lambda, cfg.d); }

struct ScanEntry {
  double radius = 0.0;
  double value = 0.0;
  bool converged = true;
  bool empty_region = false;
};

struct RadialScan {
  std::vector<ScanEntry> entries;
  OperatorConfig config;
  RegionKind region = RegionKind::Full;
  OptimizerSettings settings;
};

namespace detail {

inline void require_increasing(const std::vector<double>& xs, const std::string& field) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) throw ValidationError(field, "values must be positive");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError(field, "values must be strictly increasing");
  }
}

}  // namespace detail

inline RadialScan radial_scan(const StepProfile& g, const OperatorConfig& cfg, const std::vector<double>& radii,
                              RegionKind region = RegionKind::Full, const OptimizerSettings& opt = {}) {
  detail::require_increasing(radii, "R_grid");
  const MaximalOperator op(g, cfg, region, opt);
  RadialScan scan{{}, cfg, region, opt};
  scan.entries.reserve(radii.size());
  for (double R : radii) {
    const auto m = op.at(R);
    scan.entries.push_back({R, m.value, m.converged, m.empty_region});
  }
  return scan;
}

struct LevelSetSettings {
  int scan_points = 96;
  double crossing_rel_width = 1e-6;
  double margin = 0.1;  // search out to (1 + margin) times the minimal-ball radius
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct LevelSetMeasure {
  double t = 0.0;
  double measure = 0.0;
  std::vector<Interval> intervals;  // radial extent of {M g > t}
  std::vector<std::string> warnings;
};

/// Radius beyond which the minimal admissible ball already has average <= t.
inline double level_set_radius(const OperatorConfig& cfg, double norm, double t) {
  return std::pow(weak_bound(cfg) * norm / (unit_ball_volume(cfg.d) * t), 1.0 / cfg.d);
}

/// Measures {x : M g(x) > t} for many thresholds from one shared radial scan.
class SuperlevelScanner {
 public:
  SuperlevelScanner(const StepProfile& g, const OperatorConfig& cfg, double t_min, const OptimizerSettings& opt = {},
                    LevelSetSettings settings = {})
      : op_(g, cfg, RegionKind::Full, opt), settings_(settings) {
    if (!(t_min > 0.0)) throw DomainError("threshold must be positive");
    if (settings_.scan_points < 8) throw ValidationError("scan_points", "must be >= 8");
    if (!(settings_.crossing_rel_width > 0.0)) throw ValidationError("crossing_rel_width", "must be positive");
    const double r_end = (1.0 + settings_.margin) * level_set_radius(cfg, op_.norm(), t_min);
    const double r_start = std::min(g.levels().front().radius, r_end) * 1e-3;
    radii_ = geometric_grid(r_start, r_end, settings_.scan_points);
    for (const auto& level : g.levels()) {
      if (level.radius < r_end) radii_.push_back(level.radius);
    }
    std::sort(radii_.begin(), radii_.end());
    radii_.erase(std::unique(radii_.begin(), radii_.end()), radii_.end());
    values_.reserve(radii_.size());
    for (double R : radii_) values_.push_back(op_.at(R).value);
  }

  double norm() const noexcept { return op_.norm(); }
  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& values() const noexcept { return values_; }

  LevelSetMeasure measure(double t) const {
    if (!(t > 0.0)) throw DomainError("threshold must be positive");
    LevelSetMeasure out;
    out.t = t;
    const auto& g = op_.profile();
    if (t >= g.peak()) return out;

    const auto& cfg = op_.config();
    const double r_end = (1.0 + settings_.margin) * level_set_radius(cfg, op_.norm(), t);

    // Virtual sample at R = 0 where M g = v_1 > t.
    std::vector<std::pair<double, bool>> pts{{0.0, true}};
    for (std::size_t i = 0; i < radii_.size() && radii_[i] < r_end; ++i) pts.emplace_back(radii_[i], values_[i] > t);
    pts.emplace_back(r_end, op_.exceeds(r_end, t));

    double open_at = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const auto [r0, in0] = pts[i - 1];
      const auto [r1, in1] = pts[i];
      if (in0 == in1) continue;
      const double crossing = bisect(r0, r1, in0, t);
      if (in0) {
        out.intervals.push_back({open_at, crossing});
      } else {
        open_at = crossing;
      }
    }
    if (pts.back().second) {
      out.intervals.push_back({open_at, r_end});
      out.warnings.push_back("t=" + format_number(t) + ": M g > t at the search margin R=" + format_number(r_end) +
                             "; measure truncated");
    }
    if (out.intervals.size() > 1) {
      out.warnings.push_back("t=" + format_number(t) + ": superlevel set has " +
                             std::to_string(out.intervals.size()) +
                             " radial components; result depends on scan resolution");
    }
    const double omega = unit_ball_volume(cfg.d);
    for (const auto& [lo, hi] : out.intervals) out.measure += omega * (std::pow(hi, cfg.d) - std::pow(lo, cfg.d));
    return out;
  }

 private:
  // Shrinks [a, b] around the crossing and returns the endpoint known to lie in the set.
  double bisect(double a, double b, bool a_inside, double t) const {
    double in = a_inside ? a : b;
    double out = a_inside ? b : a;
    while (std::fabs(out - in) > settings_.crossing_rel_width * std::max(in, out)) {
      const double mid = 0.5 * (in + out);
      if (op_.exceeds(mid, t)) {
        in = mid;
      } else {
        out = mid;
      }
    }
    return in;
  }

  MaximalOperator op_;
  LevelSetSettings settings_;
  std::vector<double> radii_;
  std::vector<double> values_;
};

inline LevelSetMeasure superlevel_measure(const StepProfile& g, const OperatorConfig& cfg, double t,
                                          const OptimizerSettings& opt = {}, const LevelSetSettings& settings = {}) {
  if (!(t > 0.0)) throw DomainError("threshold must be positive");
  if (t >= g.peak()) return {t, 0.0, {}, {}};
  return SuperlevelScanner(g, cfg, t, opt, settings).measure(t);
}

struct ThresholdRatio {
  double t = 0.0;
  double mu = 0.0;
  double ratio = 0.0;  // t * mu / ||g||_1
};

struct ConstantEstimate {
  double ratio_sup = 0.0;
  double argmax_t = 0.0;
  std::vector<ThresholdRatio> per_t;
  std::string profile_digest;
  std::vector<std::string> warnings;
};

/// Geometric thresholds from v_1 * 1e-4 up to v_1 * (1 - 1e-3).
inline std::vector<double> default_thresholds(const StepProfile& g, int n = 24) {
  return geometric_grid(g.peak() * 1e-4, g.peak() * (1.0 - 1e-3), n);
}

inline ConstantEstimate weak_constant_estimate(const StepProfile& g, const OperatorConfig& cfg,
                                               const std::vector<double>& thresholds,
                                               const OptimizerSettings& opt = {},
                                               const LevelSetSettings& settings = {}) {
  validate(cfg);
  ConstantEstimate est;
  est.profile_digest = profile_digest(g);
  if (thresholds.empty()) return est;
  for (double t : thresholds) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("t_grid", "thresholds must be positive");
  }
  const double t_min = *std::min_element(thresholds.begin(), thresholds.end());
  const double norm = l1_norm(g, cfg.d);

  std::optional<SuperlevelScanner> scanner;
  if (t_min < g.peak()) scanner.emplace(g, cfg, t_min, opt, settings);
  for (double t : thresholds) {
    LevelSetMeasure m{t, 0.0, {}, {}};
    if (scanner) m = scanner->measure(t);
    const double ratio = t * m.measure / norm;
    est.per_t.push_back({t, m.measure, ratio});
    est.warnings.insert(est.warnings.end(), m.warnings.begin(), m.warnings.end());
    if (ratio > est.ratio_sup || est.per_t.size() == 1) {
      est.ratio_sup = ratio;
      est.argmax_t = t;
    }
  }

  auto sorted = est.per_t;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].mu > sorted[i - 1].mu * (1.0 + 1e-9)) {
      est.warnings.push_back("distribution function increases between t=" + format_number(sorted[i - 1].t) +
                             " and t=" + format_number(sorted[i].t));
    }
  }
  return est;
}

struct SharpnessRow {
  double r = 0.0;
  double t = 0.0;
  double mu = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
};

/// Weak-type ratios of the normalized indicators chi_{B(0,r)} / |B(0,r)|.
inline std::vector<SharpnessRow> sharpness_experiment(const OperatorConfig& cfg, const std::vector<double>& radii,
                                                      const std::vector<double>& thresholds,
                                                      const OptimizerSettings& opt = {},
                                                      const LevelSetSettings& settings = {}) {
  validate(cfg);
  std::vector<SharpnessRow> rows;
  for (double r : radii) {
    if (!(r > 0.0)) throw ValidationError("r_seq", "radii must be positive");
    const auto g = normalized_indicator(r, cfg.d);
    const auto est = weak_constant_estimate(g, cfg, thresholds, opt, settings);
    for (const auto& p : est.per_t) rows.push_back({r, p.t, p.mu, p.ratio, weak_bound(cfg)});
  }
  return rows;
}

using ProfileSource = std::function<std::vector<StepProfile>(int d)>;

inline ProfileSource fixed_suite(std::vector<StepProfile> profiles) {
  return [profiles = std::move(profiles)](int) { return profiles; };
}

/// `count` random profiles (seeds seed, seed + 1, ...) normalized in each dimension.
inline ProfileSource random_suite(std::uint64_t seed, int count, int k_max) {
  return [=](int d) {
    std::vector<StepProfile> out;
    for (int i = 0; i < count; ++i) out.push_back(random_profile(seed + static_cast<std::uint64_t>(i), k_max, d));
    return out;
  };
}

struct SweepSettings {
  int t_points = 24;
  LevelSetSettings level_set;
};

struct SweepResult {
  Table rows{{"d", "lambda", "profile_digest", "t", "mu", "ratio", "bound", "margin"}, {}};
  Table cells{{"d", "lambda", "profile_digest", "ratio_sup", "argmax_t", "bound", "margin", "status"}, {}};
  int violations = 0;
  int errors = 0;
  std::vector<std::string> warnings;
};

/// Weak-type ratio estimates over every (d, lambda, profile) cell. Failing
/// cells are recorded and the sweep continues.
inline SweepResult sweep(const std::vector<int>& dims, const std::vector<double>& lambdas, const ProfileSource& suite,
                         const OptimizerSettings& opt = {}, const SweepSettings& settings = {}) {
  SweepResult result;
  for (int d : dims) {
    std::vector<StepProfile> profiles;
    try {
      profiles = suite(d);
    } catch (const std::exception& e) {
      ++result.errors;
      result.warnings.push_back("d=" + std::to_string(d) + ": profile source failed: " + e.what());
      continue;
    }
    for (double lambda : lambdas) {
      const OperatorConfig cfg{d, lambda};
      for (const auto& g : profiles) {
        const std::string digest = profile_digest(g);
        try {
          validate(cfg);
          const double bound = weak_bound(cfg);
          const auto est = weak_constant_estimate(g, cfg, default_thresholds(g, settings.t_points), opt,
                                                  settings.level_set);
          for (const auto& p : est.per_t) {
            result.rows.add_row({std::int64_t{d}, lambda, digest, p.t, p.mu, p.ratio, bound, bound - p.ratio});
          }
          const bool ok = est.ratio_sup <= bound + kBoundSlack;
          if (!ok) ++result.violations;
          result.cells.add_row({std::int64_t{d}, lambda, digest, est.ratio_sup, est.argmax_t, bound,
                                bound - est.ratio_sup, std::string(ok ? "ok" : "violation")});
          for (const auto& w : est.warnings) result.warnings.push_back(digest + ": " + w);
        } catch (const std::exception& e) {
          ++result.errors;
          result.cells.add_row({std::int64_t{d}, lambda, digest, std::nan(""), std::nan(""), std::nan(""),
                                std::nan(""), std::string("error: ") + e.what()});
        }
      }
    }
  }
  return result;
}

}  // namespace maxlab
