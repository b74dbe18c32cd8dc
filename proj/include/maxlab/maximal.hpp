#pragma once

// The almost-uncentered maximal operator on radial step profiles.
//
// For a radial g and x = R e_1 every admissible ball can be rotated about the
// origin until its center lies on the segment [0, x]; the supremum then runs
// over balls B(alpha R e_1, beta R) with (alpha, beta) in a feasible region.
// The full region is 0 <= alpha <= 1, lambda beta + alpha >= 1; the three
// banded regions are restricted variants kept for auditing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxlab/errors.hpp"
#include "maxlab/geometry.hpp"
#include "maxlab/profile.hpp"

namespace maxlab {

/// Ball B(alpha * R e_1, beta * R) relative to the evaluation radius R.
struct BallParams {
  double alpha = 1.0;
  double beta = 1.0;
};

enum class RegionKind {
  Full,          // 0 <= alpha <= 1, lambda beta + alpha >= 1
  CenteredBand,  // alpha = 1, 1 <= beta <= 2 (lambda = 0 only)
  OutwardBand,   // beta <= alpha <= beta + 1, lambda beta + alpha >= 1, 0 <= alpha <= 1
  InwardBand,    // max(0, beta - 1) <= alpha <= min(beta, 1), lambda beta + alpha >= 1
};

inline std::string_view to_string(RegionKind region) {
  switch (region) {
    case RegionKind::Full: return "full";
    case RegionKind::CenteredBand: return "centered-band";
    case RegionKind::OutwardBand: return "outward-band";
    case RegionKind::InwardBand: return "inward-band";
  }
  return "unknown";
}

inline RegionKind parse_region(std::string_view name) {
  for (auto r : {RegionKind::Full, RegionKind::CenteredBand, RegionKind::OutwardBand, RegionKind::InwardBand}) {
    if (name == to_string(r)) return r;
  }
  throw ValidationError("region", "unknown region '" + std::string(name) + "'");
}

struct OptimizerSettings {
  int alpha_grid = 9;
  int beta_grid = 48;
  int refine_rounds = 60;  // upper bound; refinement stops once converged
  double rel_tol = 1e-9;
  double beta_floor = 1e-6;
  // Averages of radially nonincreasing profiles do not increase as the center
  // moves away from the origin, so for fixed beta the best alpha is the lower
  // edge of the feasible interval. Disable to search the full (alpha, beta) grid.
  bool lower_edge_only = true;
};

inline void validate(const OptimizerSettings& opt) {
  if (opt.alpha_grid < 8) throw ValidationError("alpha_grid", "must be >= 8");
  if (opt.beta_grid < 8) throw ValidationError("beta_grid", "must be >= 8");
  if (opt.refine_rounds < 1) throw ValidationError("refine_rounds", "must be >= 1");
  if (!(opt.rel_tol > 0.0 && opt.rel_tol <= 1e-2)) throw ValidationError("rel_tol", "must lie in (0, 1e-2]");
  if (!(opt.beta_floor > 0.0)) throw ValidationError("beta_floor", "must be positive");
}

inline constexpr double kFeasibilityTol = 1e-12;

struct AlphaRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Feasible alpha interval for a given beta, or nullopt when the slice is empty.
inline std::optional<AlphaRange> alpha_range(RegionKind region, double lambda, double beta) {
  if (!(beta > 0.0)) return std::nullopt;
  AlphaRange range;
  switch (region) {
    case RegionKind::Full:
      range = {std::max(0.0, 1.0 - lambda * beta), 1.0};
      break;
    case RegionKind::CenteredBand:
      if (beta < 1.0 - kFeasibilityTol || beta > 2.0 + kFeasibilityTol) return std::nullopt;
      range = {1.0, 1.0};
      break;
    case RegionKind::OutwardBand:
      range = {std::max({0.0, beta, 1.0 - lambda * beta}), std::min(1.0, beta + 1.0)};
      break;
    case RegionKind::InwardBand:
      range = {std::max({0.0, beta - 1.0, 1.0 - lambda * beta}), std::min(1.0, beta)};
      break;
  }
  if (range.lo > range.hi + kFeasibilityTol) return std::nullopt;
  range.lo = std::min(range.lo, range.hi);
  return range;
}

inline bool feasible(RegionKind region, double lambda, BallParams p) {
  if (region == RegionKind::CenteredBand && lambda != 0.0) {
    throw UsageError("centered-band region is only defined for lambda = 0");
  }
  const auto range = alpha_range(region, lambda, p.beta);
  return range && p.alpha >= range->lo - kFeasibilityTol && p.alpha <= range->hi + kFeasibilityTol;
}

/// Ball averages of a fixed profile in a fixed dimension, via its indicator decomposition.
class BallAverager {
 public:
  BallAverager(const StepProfile& g, int d)
      : d_(d), omega_(unit_ball_volume(d)), norm_(l1_norm(g, d)), terms_(indicator_decomposition(g)) {}

  int dimension() const noexcept { return d_; }
  double norm() const noexcept { return norm_; }
  const std::vector<IndicatorTerm>& terms() const noexcept { return terms_; }

  /// Average of g over B(center e_1, radius).
  double average(double center, double radius) const {
    double sum = 0.0;
    for (const auto& [r, a] : terms_) {
      if (center >= r + radius) continue;
      if (center + radius <= r) {
        sum += a;
      } else if (center + r <= radius) {
        sum += a * std::pow(r / radius, d_);
      } else {
        const double split = (center * center + r * r - radius * radius) / (2.0 * center);
        const double lens = detail::cap_volume_unchecked(d_, r, r - split) +
                            detail::cap_volume_unchecked(d_, radius, radius - (center - split));
        sum += a * lens / (omega_ * std::pow(radius, d_));
      }
    }
    return sum;
  }

 private:
  int d_;
  double omega_;
  double norm_;
  std::vector<IndicatorTerm> terms_;
};

/// Average of g over B(alpha R e_1, beta R).
inline double average_over_ball(const StepProfile& g, int d, double R, BallParams p) {
  if (!(R > 0.0)) throw DomainError("average_over_ball: R must be positive");
  if (!(p.beta > 0.0) || !(p.alpha >= 0.0)) throw DomainError("average_over_ball: need alpha >= 0, beta > 0");
  return BallAverager(g, d).average(p.alpha * R, p.beta * R);
}

/// Largest beta worth searching: averages never exceed norm / |B(beta R)|.
inline double beta_cutoff(double norm, int d, double R, double best_so_far) {
  if (!(norm > 0.0) || !(R > 0.0) || !(best_so_far > 0.0)) throw DomainError("beta_cutoff: inputs must be positive");
  return std::pow(norm / (unit_ball_volume(d) * std::pow(R, d) * best_so_far), 1.0 / d);
}

/// (1 + lambda)^d norm / (omega_d R^d): the reciprocal volume of the smallest admissible ball.
inline double pointwise_reference(const OperatorConfig& cfg, double R, double norm) {
  validate(cfg);
  if (!(R > 0.0) || !(norm > 0.0)) throw DomainError("pointwise_reference: inputs must be positive");
  return std::pow(1.0 + cfg.lambda, cfg.d) * norm / (unit_ball_volume(cfg.d) * std::pow(R, cfg.d));
}

/// M g(0) for a step profile: tiny centered balls see the innermost level.
inline double value_at_origin(const StepProfile& g) { return g.peak(); }

struct MaximalValue {
  double value = 0.0;
  BallParams argmax{};
  bool shrinking_limit = false;  // argmax is the beta -> 0 limit at alpha = 1
  bool empty_region = false;
  bool converged = true;
  int evaluations = 0;
};

/// Supremum search for one profile, configuration and region; reusable across radii.
class MaximalOperator {
 public:
  MaximalOperator(const StepProfile& g, OperatorConfig cfg, RegionKind region = RegionKind::Full,
                  OptimizerSettings opt = {})
      : profile_(g), cfg_(checked(cfg)), region_(region), opt_(opt), averager_(g, cfg.d) {
    validate(opt_);
    if (region_ == RegionKind::CenteredBand && cfg_.lambda != 0.0) {
      throw UsageError("centered-band region is only defined for lambda = 0");
    }
  }

  const StepProfile& profile() const noexcept { return profile_; }
  const OperatorConfig& config() const noexcept { return cfg_; }
  RegionKind region() const noexcept { return region_; }
  const OptimizerSettings& settings() const noexcept { return opt_; }
  double norm() const noexcept { return averager_.norm(); }

  /// Lower-bounding estimate of the supremum at radius R. The search returns
  /// early once the incumbent exceeds `stop_above`.
  MaximalValue at(double R, double stop_above = std::numeric_limits<double>::infinity()) const {
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("maximal_value: R must be positive");
    Search s{*this, R, stop_above};
    s.run();
    return s.result;
  }

  bool exceeds(double R, double t) const { return at(R, t).value > t; }

 private:
  static OperatorConfig checked(const OperatorConfig& cfg) {
    validate(cfg);
    return cfg;
  }

  struct Sample {
    double beta;
    double alpha;
    double value;
  };

  struct Search {
    const MaximalOperator& op;
    double R;
    double stop_above;
    MaximalValue result{};
    bool any_feasible = false;

    bool done() const { return result.value > stop_above; }

    double lambda() const { return op.cfg_.lambda; }

    // Evaluates a feasible point and updates the incumbent.
    double eval(double alpha, double beta) {
      ++result.evaluations;
      any_feasible = true;
      const double v = op.averager_.average(alpha * R, beta * R);
      if (v > result.value) {
        result.value = v;
        result.argmax = {alpha, beta};
        result.shrinking_limit = false;
      }
      return v;
    }

    std::optional<Sample> eval_edge(double beta) {
      const auto range = alpha_range(op.region_, lambda(), beta);
      if (!range) return std::nullopt;
      return Sample{beta, range->lo, eval(range->lo, beta)};
    }

    // Lower alpha edge as a max of affine pieces p + q beta.
    std::vector<std::pair<double, double>> edge_pieces() const {
      const double l = lambda();
      switch (op.region_) {
        case RegionKind::Full: return {{1.0, -l}, {0.0, 0.0}};
        case RegionKind::CenteredBand: return {{1.0, 0.0}};
        case RegionKind::OutwardBand: return {{0.0, 1.0}, {1.0, -l}, {0.0, 0.0}};
        case RegionKind::InwardBand: return {{0.0, 0.0}, {-1.0, 1.0}, {1.0, -l}};
      }
      return {};
    }

    // Betas where the edge switches piece or a ball boundary crosses a level radius.
    std::vector<double> kinks(double lo, double hi) const {
      std::vector<double> out;
      auto push = [&](double b) {
        if (std::isfinite(b) && b >= lo && b <= hi) out.push_back(b);
      };
      const auto pieces = edge_pieces();
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
          const auto [p1, q1] = pieces[i];
          const auto [p2, q2] = pieces[j];
          if (q1 != q2) push((p1 - p2) / (q2 - q1));
        }
      }
      for (const auto& term : op.averager_.terms()) {
        const double rr = term.radius / R;
        for (const auto& [p, q] : pieces) {
          if (q != 1.0) {
            push((rr - p) / (q - 1.0));
            push((-rr - p) / (q - 1.0));
          }
          if (q != -1.0) push((rr - p) / (q + 1.0));
        }
      }
      return out;
    }

    std::pair<double, double> beta_domain() const {
      const double floor = op.opt_.beta_floor;
      switch (op.region_) {
        case RegionKind::Full: return {floor, std::numeric_limits<double>::infinity()};
        case RegionKind::CenteredBand: return {1.0, 2.0};
        case RegionKind::OutwardBand: return {floor, 1.0};
        case RegionKind::InwardBand: return {1.0 / (1.0 + lambda()), 2.0};
      }
      return {floor, floor};
    }

    void run() {
      const auto& g = op.profile_;
      const bool has_shrinking = op.region_ == RegionKind::Full || op.region_ == RegionKind::OutwardBand;
      if (has_shrinking) {
        any_feasible = true;
        const double v = evaluate(g, R);
        if (v > result.value) {
          result.value = v;
          result.argmax = {1.0, 0.0};
          result.shrinking_limit = true;
        }
        if (done()) return;
      }

      auto [blo, bhi] = beta_domain();
      if (op.region_ == RegionKind::Full) {
        // Smallest admissible ball containing the support of g.
        const double beta = (R + g.outer_radius()) / ((1.0 + lambda()) * R);
        eval_edge(beta);
        if (done()) return;
        bhi = beta_cutoff(op.averager_.norm(), op.cfg_.d, R, result.value);
      }
      if (!(bhi >= blo)) {
        result.empty_region = !any_feasible;
        return;
      }

      std::vector<double> betas = kinks(blo, bhi);
      const int n = op.opt_.beta_grid;
      for (int i = 0; i < n; ++i) {
        betas.push_back(blo == bhi ? blo : blo * std::pow(bhi / blo, static_cast<double>(i) / (n - 1)));
      }
      std::sort(betas.begin(), betas.end());
      // Kinks from different pieces can differ by an ulp; such a pair would
      // hand the refinement an empty bracket.
      betas.erase(std::unique(betas.begin(), betas.end(), [](double a, double b) { return b - a <= 1e-13 * b; }),
                  betas.end());

      if (op.opt_.lower_edge_only) {
        search_edge(betas);
      } else {
        search_grid(betas);
      }
      if (!any_feasible) result.empty_region = true;
    }

    // Indices of the (up to) two best local maxima of a sampled curve.
    static std::vector<std::size_t> best_peaks(const std::vector<Sample>& s) {
      std::vector<std::size_t> peaks;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const bool left = i == 0 || s[i].value >= s[i - 1].value;
        const bool right = i + 1 == s.size() || s[i].value >= s[i + 1].value;
        if (left && right) peaks.push_back(i);
      }
      std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return s[a].value > s[b].value; });
      if (peaks.size() > 2) peaks.resize(2);
      return peaks;
    }

    void search_edge(const std::vector<double>& betas) {
      std::vector<Sample> samples;
      for (double b : betas) {
        if (auto s = eval_edge(b)) samples.push_back(*s);
        if (done()) return;
      }
      if (samples.empty()) return;
      bool converged = true;
      for (std::size_t peak : best_peaks(samples)) {
        converged = refine_edge(samples, peak) && converged;
        if (done()) return;
      }
      result.converged = converged;
    }

    // Shrinks a bracket around a local maximum of beta -> average(lower edge).
    bool refine_edge(const std::vector<Sample>& coarse, std::size_t peak) {
      constexpr int kInterior = 8;
      Sample best = coarse[peak];
      Sample left = peak > 0 ? coarse[peak - 1] : best;
      Sample right = peak + 1 < coarse.size() ? coarse[peak + 1] : best;
      for (int round = 0; round < op.opt_.refine_rounds; ++round) {
        // A stalled incumbent is not enough: the peak may sit next to a kink
        // sample, closer than the current spacing.
        if (right.beta - left.beta <= op.opt_.rel_tol * best.beta) return true;
        std::vector<Sample> pts{left};
        for (int i = 1; i <= kInterior; ++i) {
          const double b = left.beta + (right.beta - left.beta) * i / (kInterior + 1);
          if (auto s = eval_edge(b)) pts.push_back(*s);
          if (done()) return true;
        }
        pts.push_back(right);
        pts.push_back(best);
        std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.beta < b.beta; });
        // An interior point can coincide with the incumbent; a duplicate
        // neighbour would collapse one side of the bracket.
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](const Sample& a, const Sample& b) { return b.beta - a.beta <= 1e-13 * b.beta; }),
                  pts.end());
        std::size_t k = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
          if (pts[i].value > pts[k].value) k = i;
        }
        best = pts[k];
        left = k > 0 ? pts[k - 1] : pts[k];
        right = k + 1 < pts.size() ? pts[k + 1] : pts[k];
      }
      return right.beta - left.beta <= op.opt_.rel_tol * best.beta;
    }

    void search_grid(const std::vector<double>& betas) {
      const int na = op.opt_.alpha_grid;
      Sample best{0.0, 0.0, -1.0};
      double best_da = 0.0;
      double best_lo = 0.0;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < betas.size(); ++j) {
        const auto range = alpha_range(op.region_, lambda(), betas[j]);
        if (!range) continue;
        const double da = (range->hi - range->lo) / (na - 1);
        for (int i = 0; i < na; ++i) {
          const double a = range->lo + da * i;
          const double v = eval(a, betas[j]);
          if (v > best.value) {
            best = {betas[j], a, v};
            best_da = da;
            best_lo = range->lo;
            best_j = j;
          }
          if (done()) return;
          if (da == 0.0) break;
        }
      }
      if (best.value < 0.0) return;

      double blo = best_j > 0 ? betas[best_j - 1] : best.beta;
      double bhi = best_j + 1 < betas.size() ? betas[best_j + 1] : best.beta;
      result.converged = false;
      for (int round = 0; round < op.opt_.refine_rounds; ++round) {
        constexpr int kBetaSteps = 8;
        Sample next = best;
        double next_lo = best_lo;
        double next_db = (bhi - blo) / kBetaSteps;
        for (int j = 0; j <= kBetaSteps; ++j) {
          const double b = blo + (bhi - blo) * j / kBetaSteps;
          const auto range = alpha_range(op.region_, lambda(), b);
          if (!range) continue;
          // The window is measured from the lower edge, which moves with beta.
          const double offset = best.alpha - best_lo;
          const double alo = std::max(range->lo, range->lo + offset - best_da);
          const double ahi = std::min(range->hi, range->lo + offset + best_da);
          if (alo > ahi) continue;
          for (int i = 0; i < na; ++i) {
            const double a = alo + (ahi - alo) * i / (na - 1);
            const double v = eval(a, b);
            if (v > next.value) {
              next = {b, a, v};
              next_lo = range->lo;
            }
            if (done()) return;
          }
        }
        best_da = std::max(2.0 * best_da / (na - 1), 1e-300);
        best = next;
        best_lo = next_lo;
        blo = std::max(blo, best.beta - next_db);
        bhi = std::min(bhi, best.beta + next_db);
        if (bhi - blo <= op.opt_.rel_tol * bhi) {
          result.converged = true;
          break;
        }
      }
    }
  };

  StepProfile profile_;
  OperatorConfig cfg_;
  RegionKind region_;
  OptimizerSettings opt_;
  BallAverager averager_;
};

inline MaximalValue maximal_value(const StepProfile& g, const OperatorConfig& cfg, double R,
                                  RegionKind region = RegionKind::Full, const OptimizerSettings& opt = {}) {
  return MaximalOperator(g, cfg, region, opt).at(R);
}

}  // namespace maxlab
