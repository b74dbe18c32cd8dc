#pragma once

// Independent oracles and audits of the geometric facts the operator
// reduction relies on. Every check returns a CheckReport; none of them throw
// on a failed assertion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "maxlab/errors.hpp"
#include "maxlab/geometry.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/profile.hpp"
#include "maxlab/table.hpp"

namespace maxlab {

struct McConfig {
  std::uint64_t seed = 20240607;
  std::int64_t n_samples = 100000;
};

inline void validate(const McConfig& mc) {
  if (mc.n_samples < 1000) throw ValidationError("n_samples", "must be >= 1000");
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

struct CheckReport {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> witness;
  std::string samples_or_grid;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> notes;
  Table rows;
};

inline nlohmann::ordered_json to_json(const CheckReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["passed"] = report.passed;
  j["worst_violation"] = detail::cell_json(report.worst_violation);
  j["tolerance"] = detail::cell_json(report.tolerance);
  auto witness = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.witness) witness[k] = detail::cell_json(v);
  j["witness"] = witness;
  j["samples_or_grid"] = report.samples_or_grid;
  j["config"] = report.config;
  j["notes"] = report.notes;
  j["rows"] = to_json(report.rows);
  return j;
}

namespace detail {

// Uniform point in B(0, 1) ⊂ R^d: isotropic direction times U^{1/d}.
template <class Rng>
void sample_unit_ball(Rng& rng, int d, std::vector<double>& out) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.resize(static_cast<std::size_t>(d));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : out) {
      x = normal(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double scale = std::pow(unit(rng), 1.0 / d) / std::sqrt(norm2);
  for (auto& x : out) x *= scale;
}

inline double distance_to_axis_point(const std::vector<double>& y, double offset) {
  double s = (y[0] - offset) * (y[0] - offset);
  for (std::size_t i = 1; i < y.size(); ++i) s += y[i] * y[i];
  return std::sqrt(s);
}

inline double norm(const std::vector<double>& y) { return distance_to_axis_point(y, 0.0); }

inline std::string grid_text(const std::vector<double>& xs) {
  if (xs.empty()) return "{}";
  return "{" + format_number(xs.front()) + ".." + format_number(xs.back()) + "} (" + std::to_string(xs.size()) +
         " points)";
}

inline nlohmann::ordered_json point_json(const std::vector<double>& y) {
  auto arr = nlohmann::ordered_json::array();
  for (double x : y) arr.push_back(cell_json(x));
  return arr;
}

}  // namespace detail

/// Monte Carlo estimate of |B(0, rho1) ∩ B(c e_1, rho2)| by sampling B(0, rho1).
inline McEstimate mc_intersection_volume(int d, double c, double rho1, double rho2, const McConfig& mc) {
  require_dimension(d);
  validate(mc);
  if (!(c >= 0.0) || !(rho1 > 0.0) || !(rho2 > 0.0)) throw DomainError("mc_intersection_volume: bad arguments");
  if (c >= rho1 + rho2) return {0.0, 0.0};
  std::mt19937_64 rng(mc.seed);
  std::vector<double> y;
  std::int64_t hits = 0;
  const double limit = rho2 * (1.0 + 1e-12);
  for (std::int64_t i = 0; i < mc.n_samples; ++i) {
    detail::sample_unit_ball(rng, d, y);
    for (auto& x : y) x *= rho1;
    if (detail::distance_to_axis_point(y, c) <= limit) ++hits;
  }
  const double n = static_cast<double>(mc.n_samples);
  const double p = static_cast<double>(hits) / n;
  const double vol = ball_volume(d, rho1);
  // All-miss and all-hit runs would report a zero error; a half-count
  // continuity correction keeps the error honest for very thin lenses.
  const double q = hits == 0 || hits == mc.n_samples ? (static_cast<double>(hits) + 0.5) / (n + 1.0) : p;
  return {vol * p, vol * std::sqrt(q * (1.0 - q) / n)};
}

inline constexpr double kGeometryTol = 1e-12;

/// Which (r, t) pairs a lens-inequality audit asserts on.
enum class AssertedRegion {
  Conservative,  // 0 < r <= 1, 1 - r < t <= 1
  Stated,        // 0 < r <= 1, t + r > 1
};

/// r^d |B(e_1, 1) ∩ B(0, t)| >= |B(e_1, r) ∩ B(0, t)| on a grid, both sides exact.
inline CheckReport check_lens_scaling_inequality(int d, const std::vector<double>& r_grid,
                                                 const std::vector<double>& t_grid,
                                                 AssertedRegion asserted = AssertedRegion::Conservative) {
  require_dimension(d);
  CheckReport rep;
  rep.name = "lens-scaling-inequality";
  rep.tolerance = kGeometryTol;
  rep.samples_or_grid = "r " + detail::grid_text(r_grid) + " x t " + detail::grid_text(t_grid);
  rep.config = {{"d", d}, {"asserted_region", asserted == AssertedRegion::Stated ? "stated" : "conservative"}};
  rep.rows.columns = {"d", "r", "t", "lhs", "rhs", "violation", "asserted"};

  double worst_any = 0.0;
  for (double r : r_grid) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("r_grid", "r must lie in (0, 1]");
    double first_failure = std::nan("");
    for (double t : t_grid) {
      if (!(t > 0.0)) throw ValidationError("t_grid", "t must be positive");
      if (t + r <= 1.0) continue;
      const double lhs = std::pow(r, d) * intersection_volume(d, 1.0, 1.0, t);
      const double rhs = intersection_volume(d, 1.0, r, t);
      const double violation = rhs - lhs;
      const bool in_asserted = asserted == AssertedRegion::Stated || t <= 1.0;
      rep.rows.add_row({std::int64_t{d}, r, t, lhs, rhs, violation, in_asserted});
      if (in_asserted) rep.worst_violation = std::max(rep.worst_violation, violation);
      if (violation > kGeometryTol && std::isnan(first_failure)) first_failure = t;
      if (violation > worst_any) {
        worst_any = violation;
        rep.witness = {{"d", d}, {"r", r}, {"t", t}, {"lhs", lhs}, {"rhs", rhs}};
      }
    }
    if (!std::isnan(first_failure)) {
      rep.notes.push_back("r=" + format_number(r) + ": first failure on the t grid at t=" +
                          format_number(first_failure));
    }
  }
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

/// r^d |B(e_1, 1) ∩ B(0, t)| = |B(e_1, r) ∩ B((1 - r) e_1, r t)|: the homothety
/// about e_1 with ratio r.
inline CheckReport check_homothety_identity(int d, const std::vector<double>& r_grid,
                                            const std::vector<double>& t_grid) {
  require_dimension(d);
  CheckReport rep;
  rep.name = "homothety-identity";
  rep.tolerance = 1e-10;
  rep.samples_or_grid = "r " + detail::grid_text(r_grid) + " x t " + detail::grid_text(t_grid);
  rep.config = {{"d", d}};
  rep.rows.columns = {"d", "r", "t", "scaled", "image", "abs_error"};
  for (double r : r_grid) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("r_grid", "r must lie in (0, 1]");
    for (double t : t_grid) {
      if (!(t > 0.0)) throw ValidationError("t_grid", "t must be positive");
      const double scaled = std::pow(r, d) * intersection_volume(d, AxisBall{1.0, 1.0}, AxisBall{0.0, t});
      const double image = intersection_volume(d, AxisBall{1.0, r}, AxisBall{1.0 - r, r * t});
      const double err = std::fabs(scaled - image);
      rep.rows.add_row({std::int64_t{d}, r, t, scaled, image, err});
      if (err > rep.worst_violation || rep.witness.empty()) {
        rep.worst_violation = std::max(rep.worst_violation, err);
        rep.witness = {{"d", d}, {"r", r}, {"t", t}, {"scaled", scaled}, {"image", image}};
      }
    }
  }
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

/// Samples B(e_1, r) ∩ B(0, t) and tests membership in
///   (i)  B((1 + t^2 - r^2)/2 e_1, r t)  (asserted), and
///   (ii) B((1 - r) e_1, r t)             (reported).
/// The on-axis extreme points and a rim point of the lens are always tested.
inline CheckReport check_lens_inclusion(int d, double r, double t, const McConfig& mc) {
  require_dimension(d);
  validate(mc);
  if (!(r > 0.0 && r <= 1.0)) throw UsageError("lens inclusion: r must lie in (0, 1]");
  if (!(t > 0.0) || !(t + r > 1.0)) throw UsageError("lens inclusion: need t > 0 and t + r > 1");

  const double shifted = 0.5 * (1.0 + t * t - r * r);
  const double radius = r * t;

  CheckReport rep;
  rep.name = "lens-inclusion";
  rep.tolerance = kGeometryTol;
  rep.samples_or_grid = std::to_string(mc.n_samples) + " samples in B(e_1, r) plus lens extreme points";
  rep.config = {{"d", d}, {"r", r}, {"t", t}, {"seed", mc.seed}, {"n_samples", mc.n_samples}};
  rep.rows.columns = {"target", "center", "radius", "tested", "violations", "worst_excess"};

  struct Tally {
    std::int64_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> witness;
  };
  Tally radical, homothetic;
  std::int64_t tested = 0;
  auto test = [&](const std::vector<double>& y) {
    if (detail::norm(y) > t * (1.0 + 1e-15)) return;
    ++tested;
    const double e1 = detail::distance_to_axis_point(y, shifted) - radius;
    const double e2 = detail::distance_to_axis_point(y, 1.0 - r) - radius;
    if (e1 > rep.tolerance) ++radical.violations;
    if (e2 > rep.tolerance) ++homothetic.violations;
    if (e1 > radical.worst) radical = {radical.violations, e1, y};
    if (e2 > homothetic.worst) homothetic = {homothetic.violations, e2, y};
  };

  std::vector<double> y(static_cast<std::size_t>(d), 0.0);
  y[0] = std::max(1.0 - r, -t);
  test(y);
  y[0] = std::min(1.0 + r, t);
  test(y);
  if (d >= 2 && t * t >= shifted * shifted) {
    y[0] = shifted;
    y[1] = std::sqrt(t * t - shifted * shifted);
    test(y);
    y[1] = 0.0;
  }
  std::mt19937_64 rng(mc.seed);
  for (std::int64_t i = 0; i < mc.n_samples; ++i) {
    detail::sample_unit_ball(rng, d, y);
    for (auto& x : y) x *= r;
    y[0] += 1.0;
    test(y);
  }

  rep.rows.add_row({std::string("radical"), shifted, radius, tested, radical.violations, radical.worst});
  rep.rows.add_row({std::string("homothetic"), 1.0 - r, radius, tested, homothetic.violations, homothetic.worst});
  rep.worst_violation = std::max(0.0, radical.worst);
  rep.passed = radical.violations == 0;
  if (!radical.witness.empty() && radical.violations > 0) {
    rep.witness = {{"x1", radical.witness[0]},
                   {"distance", radical.worst + radius},
                   {"radius", radius},
                   {"center", shifted}};
  }
  rep.config["homothetic_violations"] = homothetic.violations;
  if (homothetic.violations > 0) {
    rep.notes.push_back("B((1-r)e_1, rt) misses " + std::to_string(homothetic.violations) +
                        " lens points; farthest at " + detail::point_json(homothetic.witness).dump());
  }
  if (radical.violations > 0) {
    rep.notes.push_back("farthest violating point " + detail::point_json(radical.witness).dump());
  }
  return rep;
}

namespace detail {

inline double relative_gap(double full, double restricted) {
  return full > 0.0 ? (full - restricted) / full : full - restricted;
}

}  // namespace detail

/// Centered balls with radius in [R, 2R] against the full supremum at lambda = 0.
inline CheckReport check_centered_band(const StepProfile& g, int d, const std::vector<double>& radii,
                                       const OptimizerSettings& opt = {}) {
  const OperatorConfig cfg{d, 0.0};
  const MaximalOperator full(g, cfg, RegionKind::Full, opt);
  const MaximalOperator band(g, cfg, RegionKind::CenteredBand, opt);
  CheckReport rep;
  rep.name = "centered-band";
  rep.tolerance = 2.0 * opt.rel_tol;
  rep.samples_or_grid = "R " + detail::grid_text(radii);
  rep.config = {{"d", d}, {"lambda", 0.0}, {"profile", profile_digest(g)}};
  rep.rows.columns = {"R", "full", "centered_band", "shortfall", "agrees"};
  for (double R : radii) {
    const double m_full = full.at(R).value;
    const double m_band = band.at(R).value;
    const double gap = detail::relative_gap(m_full, m_band);
    const bool agrees = gap <= rep.tolerance;
    rep.rows.add_row({R, m_full, m_band, m_full - m_band, agrees});
    if (gap > rep.worst_violation) {
      rep.worst_violation = gap;
      rep.witness = {{"R", R}, {"full", m_full}, {"centered_band", m_band}};
    }
  }
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

/// Full, outward-band and inward-band suprema side by side. Asserts only that
/// the restricted regions never beat the full one; shortfalls are recorded.
inline CheckReport check_band_regions(const StepProfile& g, const OperatorConfig& cfg,
                                      const std::vector<double>& radii, const OptimizerSettings& opt = {}) {
  const MaximalOperator full(g, cfg, RegionKind::Full, opt);
  const MaximalOperator outward(g, cfg, RegionKind::OutwardBand, opt);
  const MaximalOperator inward(g, cfg, RegionKind::InwardBand, opt);
  CheckReport rep;
  rep.name = "band-regions";
  rep.tolerance = 2.0 * opt.rel_tol;
  rep.samples_or_grid = "R " + detail::grid_text(radii);
  rep.config = {{"d", cfg.d}, {"lambda", cfg.lambda}, {"profile", profile_digest(g)}};
  rep.rows.columns = {"R", "full", "outward_band", "inward_band", "outward_shortfall", "inward_shortfall",
                      "dominated"};
  int outward_short = 0;
  int inward_short = 0;
  double worst_gap = 0.0;
  for (double R : radii) {
    const double m_full = full.at(R).value;
    const double m_out = outward.at(R).value;
    const double m_in = inward.at(R).value;
    const double excess = -std::min(detail::relative_gap(m_full, m_out), detail::relative_gap(m_full, m_in));
    rep.worst_violation = std::max(rep.worst_violation, excess);
    const bool dominated = excess <= rep.tolerance;
    rep.rows.add_row({R, m_full, m_out, m_in, m_full - m_out, m_full - m_in, dominated});
    if (detail::relative_gap(m_full, m_out) > rep.tolerance) ++outward_short;
    if (detail::relative_gap(m_full, m_in) > rep.tolerance) ++inward_short;
    for (const auto& [region, value] : {std::pair{0.0, m_out}, std::pair{1.0, m_in}}) {
      const double gap = detail::relative_gap(m_full, value);
      if (gap > worst_gap) {
        worst_gap = gap;
        rep.witness = {{"R", R}, {"region", region}, {"full", m_full}, {"restricted", value}};
      }
    }
  }
  rep.notes.push_back("outward band falls short at " + std::to_string(outward_short) + " of " +
                      std::to_string(radii.size()) + " radii");
  rep.notes.push_back("inward band falls short at " + std::to_string(inward_short) + " of " +
                      std::to_string(radii.size()) + " radii");
  rep.notes.push_back("witness region: 0 = outward band, 1 = inward band");
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

/// Arbitrary balls B(z, rho) with |x - z| <= lambda rho, x = R e_1, never beat
/// the axis-reduced supremum.
inline CheckReport check_random_ball_domination(const StepProfile& g, const OperatorConfig& cfg, double R,
                                                const McConfig& mc, const OptimizerSettings& opt = {}) {
  validate(mc);
  if (!(R > 0.0)) throw DomainError("random ball domination: R must be positive");
  const MaximalOperator op(g, cfg, RegionKind::Full, opt);
  const BallAverager averager(g, cfg.d);
  const double sup = op.at(R).value;

  CheckReport rep;
  rep.name = "random-ball-domination";
  rep.tolerance = 2.0 * opt.rel_tol * sup;
  rep.samples_or_grid = std::to_string(mc.n_samples) + " balls, radius log-uniform in R*[1e-3, 1e1]";
  rep.config = {{"d", cfg.d}, {"lambda", cfg.lambda}, {"R", R}, {"seed", mc.seed}, {"n_samples", mc.n_samples},
                {"profile", profile_digest(g)}};
  rep.rows.columns = {"R", "supremum", "largest_sample", "excess", "samples"};

  std::mt19937_64 rng(mc.seed);
  std::uniform_real_distribution<double> exponent(-3.0, 1.0);
  std::vector<double> u;
  double largest = 0.0;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < mc.n_samples; ++i) {
    const double rho = std::max(1e-9, R * std::pow(10.0, exponent(rng)));
    detail::sample_unit_ball(rng, cfg.d, u);
    for (auto& x : u) x *= cfg.lambda * rho;
    u[0] += R;
    const double avg = averager.average(detail::norm(u), rho);
    if (avg > largest) largest = avg;
    const double excess = avg - sup;
    if (excess > rep.worst_violation) {
      rep.worst_violation = excess;
      rep.witness = {{"center_distance", detail::norm(u)}, {"rho", rho}, {"average", avg}};
    }
  }
  rep.worst_violation = std::max(0.0, rep.worst_violation);
  rep.rows.add_row({R, sup, largest, largest - sup, mc.n_samples});
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

}  // namespace maxlab
