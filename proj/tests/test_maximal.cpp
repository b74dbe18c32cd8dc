#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "maxlab/maximal.hpp"

using namespace maxlab;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of g(|x|) over [a, b] by walking the level breakpoints.
double integrate_1d(const StepProfile& g, double a, double b) {
  std::vector<double> cuts{a, b};
  for (const auto& l : g.levels()) {
    for (double x : {-l.radius, l.radius}) {
      if (x > a && x < b) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    sum += evaluate(g, std::fabs(mid)) * (cuts[i + 1] - cuts[i]);
  }
  return sum;
}

// Best interval average over a grid of radii and admissible centers on both sides of R.
double brute_force_1d(const StepProfile& g, double lambda, double R) {
  double best = evaluate(g, R);
  const double rho_max = 4.0 * (R + g.outer_radius());
  constexpr int kRadii = 3000;
  constexpr int kCenters = 41;
  for (int i = 0; i < kRadii; ++i) {
    const double rho = 1e-4 * std::pow(rho_max / 1e-4, static_cast<double>(i) / (kRadii - 1));
    for (int j = 0; j < kCenters; ++j) {
      const double z = R - lambda * rho + 2.0 * lambda * rho * j / (kCenters - 1);
      best = std::max(best, integrate_1d(g, z - rho, z + rho) / (2.0 * rho));
      if (lambda == 0.0) break;
    }
  }
  return best;
}

double mc_ball_average(const StepProfile& g, double center, double radius, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double sum = 0.0;
  int kept = 0;
  while (kept < n) {
    const double x = unit(rng);
    const double y = unit(rng);
    if (x * x + y * y >= 1.0) continue;
    ++kept;
    sum += evaluate(g, std::hypot(center + radius * x, radius * y));
  }
  return sum / n;
}

}  // namespace

TEST_CASE("region names round-trip", "[maximal]") {
  for (auto r : {RegionKind::Full, RegionKind::CenteredBand, RegionKind::OutwardBand, RegionKind::InwardBand}) {
    CHECK(parse_region(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_region("everything"), ValidationError);
}

TEST_CASE("feasibility predicates", "[maximal]") {
  CHECK(feasible(RegionKind::Full, 0.0, {1.0, 5.0}));
  CHECK_FALSE(feasible(RegionKind::Full, 0.0, {0.9, 5.0}));
  CHECK(feasible(RegionKind::InwardBand, 1.0, {0.5, 0.5}));
  CHECK_FALSE(feasible(RegionKind::OutwardBand, 0.0, {1.0, 1.5}));
  CHECK(feasible(RegionKind::CenteredBand, 0.0, {1.0, 1.5}));
  CHECK_FALSE(feasible(RegionKind::CenteredBand, 0.0, {1.0, 2.5}));
  CHECK_FALSE(feasible(RegionKind::Full, 0.5, {1.0, 0.0}));
  CHECK_THROWS_AS(feasible(RegionKind::CenteredBand, 0.5, {1.0, 1.5}), UsageError);
}

TEST_CASE("restricted regions lie inside the full region", "[maximal][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double lambda = unit(rng);
    const BallParams p{1.2 * unit(rng), 3.0 * unit(rng) + 1e-9};
    if (feasible(RegionKind::OutwardBand, lambda, p) || feasible(RegionKind::InwardBand, lambda, p)) {
      CHECK(feasible(RegionKind::Full, lambda, p));
    }
    if (feasible(RegionKind::CenteredBand, 0.0, p)) CHECK(feasible(RegionKind::Full, 0.0, p));
  }
}

TEST_CASE("ball averages", "[maximal][average]") {
  CHECK(average_over_ball(unit_indicator(), 3, 0.5, {1.0, 0.5}) == Approx(1.0));
  CHECK(std::fabs(average_over_ball(unit_indicator(), 2, 1.0, {1.0, 1.0}) -
                  (2.0 * kPi / 3.0 - std::sqrt(3.0) / 2.0) / kPi) <= 1e-12);
  CHECK(average_over_ball(unit_indicator(), 1, 2.0, {0.25, 0.75}) == Approx(2.0 / 3.0).epsilon(1e-14));
  // Disjoint ball and a ball swallowing the support.
  CHECK(average_over_ball(unit_indicator(), 2, 3.0, {1.0, 0.5}) == 0.0);
  CHECK(average_over_ball(unit_indicator(), 2, 1.0, {0.0, 2.0}) == Approx(0.25));
  CHECK_THROWS_AS(average_over_ball(unit_indicator(), 2, 0.0, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(average_over_ball(unit_indicator(), 2, 1.0, {1.0, 0.0}), DomainError);
}

TEST_CASE("ball averages match direct 1-D integration", "[maximal][average][oracle]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_profile(seed, 6, 1);
    for (int i = 0; i < 20; ++i) {
      const double c = 6.0 * unit(rng);
      const double rho = 0.01 + 6.0 * unit(rng);
      const double expected = integrate_1d(g, c - rho, c + rho) / (2.0 * rho);
      CHECK(BallAverager(g, 1).average(c, rho) == Approx(expected).epsilon(1e-12).margin(1e-15));
    }
  }
}

TEST_CASE("ball averages match 2-D Monte Carlo", "[maximal][average][oracle]") {
  const auto g = random_profile(9, 5, 2);
  const BallAverager avg(g, 2);
  for (const auto& [c, rho] : {std::pair{0.3, 0.4}, std::pair{1.0, 1.5}, std::pair{2.5, 2.0}, std::pair{0.0, 3.0}}) {
    const double mc = mc_ball_average(g, c, rho, 400000, 13);
    CHECK(avg.average(c, rho) == Approx(mc).epsilon(5e-3));
  }
}

TEST_CASE("beta cutoff", "[maximal]") {
  CHECK(beta_cutoff(2.0, 1, 2.0, 2.0 / 3.0) == Approx(0.75));
  CHECK(beta_cutoff(kPi, 2, 1.0, 1.0) <= 1.0 + 1e-15);
  CHECK_THROWS_AS(beta_cutoff(1.0, 2, 1.0, 0.0), DomainError);
}

TEST_CASE("maximal values on the unit indicator", "[maximal]") {
  const auto g = unit_indicator();
  CHECK(maximal_value(g, {1, 1.0}, 2.0).value == Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(maximal_value(g, {1, 0.0}, 2.0).value == Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(maximal_value(g, {1, 0.0}, 0.9).value == Approx(1.0).epsilon(1e-12));
  CHECK(maximal_value(g, {1, 0.0}, 0.9, RegionKind::CenteredBand).value == Approx(5.0 / 9.0).epsilon(1e-9));
  const auto half = maximal_value(g, {1, 0.5}, 2.0);
  CHECK(half.value == Approx(0.5).epsilon(1e-9));
  CHECK(half.argmax.alpha == Approx(0.5).epsilon(1e-6));
  CHECK(half.argmax.beta == Approx(1.0).epsilon(1e-6));
  CHECK(half.converged);
  CHECK_THROWS_AS(maximal_value(g, {1, 0.5}, 2.0, RegionKind::CenteredBand), UsageError);
  CHECK_THROWS_AS(maximal_value(g, {0, 0.5}, 2.0), ValidationError);
  CHECK_THROWS_AS(maximal_value(g, {1, 0.5}, 0.0), DomainError);
}

TEST_CASE("shrinking-ball limit is reported", "[maximal]") {
  const auto m = maximal_value(unit_indicator(), {2, 0.3}, 0.5);
  CHECK(m.value == 1.0);
  CHECK(m.shrinking_limit);
  CHECK(value_at_origin(StepProfile({{1.0, 3.0}, {2.0, 1.0}})) == 3.0);
}

TEST_CASE("maximal values in 1-D agree with interval brute force", "[maximal][oracle]") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    const auto g = random_profile(seed, 5, 1);
    for (double lambda : {0.0, 0.3, 1.0}) {
      for (double R : {0.3 * g.outer_radius(), g.outer_radius() * 1.01, 3.0 * g.outer_radius()}) {
        const double op = maximal_value(g, {1, lambda}, R).value;
        const double brute = brute_force_1d(g, lambda, R);
        INFO("seed=" << seed << " lambda=" << lambda << " R=" << R);
        CHECK(brute <= op * (1.0 + 2e-9));
        CHECK(op <= brute * (1.0 + 2e-3));
      }
    }
  }
}

TEST_CASE("lower-edge search agrees with the full grid", "[maximal][property]") {
  OptimizerSettings grid;
  grid.lower_edge_only = false;
  grid.alpha_grid = 17;
  grid.beta_grid = 96;
  for (std::uint64_t seed = 200; seed < 206; ++seed) {
    for (int d : {1, 2, 3}) {
      const auto g = random_profile(seed, 5, d);
      for (double lambda : {0.25, 1.0}) {
        for (double R : {0.5, 2.0, 6.0}) {
          const double edge = maximal_value(g, {d, lambda}, R).value;
          const double full = maximal_value(g, {d, lambda}, R, RegionKind::Full, grid).value;
          INFO("seed=" << seed << " d=" << d << " lambda=" << lambda << " R=" << R);
          CHECK(full <= edge * (1.0 + 1e-8));
          CHECK(edge <= full * (1.0 + 1e-3));
        }
      }
    }
  }
}

TEST_CASE("maximal value properties", "[maximal][property]") {
  for (std::uint64_t seed = 300; seed < 310; ++seed) {
    for (int d : {1, 2, 4}) {
      const auto g = random_profile(seed, 6, d);
      for (double R : {0.2, 1.0, 3.0, 10.0}) {
        double prev = 0.0;
        for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const OperatorConfig cfg{d, lambda};
          const double m = maximal_value(g, cfg, R).value;
          // Enlarging lambda enlarges the family of balls.
          CHECK(m >= prev * (1.0 - 1e-9));
          prev = m;
          CHECK(m >= evaluate(g, R));
          CHECK(m <= g.peak() * (1.0 + 1e-12));
          CHECK(maximal_value(g, cfg, R, RegionKind::OutwardBand).value <= m * (1.0 + 2e-9));
          CHECK(maximal_value(g, cfg, R, RegionKind::InwardBand).value <= m * (1.0 + 2e-9));
        }
      }
    }
  }
}

TEST_CASE("maximal value is invariant under dilation", "[maximal][property]") {
  // g_s(x) = g(x / s) gives M g_s(s R) = M g(R).
  for (std::uint64_t seed = 400; seed < 406; ++seed) {
    const auto g = random_profile(seed, 5, 2);
    std::vector<Level> scaled;
    for (const auto& l : g.levels()) scaled.push_back({2.5 * l.radius, l.value});
    const StepProfile gs(scaled);
    for (double R : {0.4, 1.7, 5.0}) {
      const double a = maximal_value(g, {2, 0.6}, R).value;
      const double b = maximal_value(gs, {2, 0.6}, 2.5 * R).value;
      CHECK(b == Approx(a).epsilon(1e-7));
    }
  }
}

TEST_CASE("early exit honours the threshold", "[maximal]") {
  const MaximalOperator op(unit_indicator(), {1, 1.0});
  CHECK(op.exceeds(2.0, 0.6));
  CHECK_FALSE(op.exceeds(2.0, 0.7));
  CHECK(op.at(2.0, 0.1).value > 0.1);
}

TEST_CASE("pointwise reference", "[maximal]") {
  CHECK(pointwise_reference({1, 1.0}, 2.0, 2.0) == Approx(1.0));
  CHECK(pointwise_reference({3, 0.0}, 2.0, 1.0) == Approx(1.0 / (unit_ball_volume(3) * 8.0)));
  CHECK(pointwise_reference({2, 0.5}, 3.0, 1.0) == Approx(2.25 / (9.0 * kPi)));
}

TEST_CASE("optimizer settings validation", "[maximal]") {
  OptimizerSettings s;
  s.beta_grid = 4;
  CHECK_THROWS_AS(MaximalOperator(unit_indicator(), {1, 0.5}, RegionKind::Full, s), ValidationError);
  s = {};
  s.rel_tol = 0.0;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s = {};
  s.beta_floor = -1.0;
  CHECK_THROWS_AS(validate(s), ValidationError);
}

TEST_CASE("maximal values dominate a dense scan of the lower edge", "[maximal][oracle]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < 60; ++c) {
    const int d = 1 + c % 4;
    const auto g = random_profile(5000 + static_cast<std::uint64_t>(c), 6, d);
    const double lambda = std::floor(unit(rng) * 5.0) / 4.0;
    const double R = g.outer_radius() * std::pow(10.0, -1.5 + 2.5 * unit(rng));
    const BallAverager avg(g, d);
    double scan = evaluate(g, R);
    constexpr int kPoints = 20000;
    for (int i = 0; i < kPoints; ++i) {
      const double beta = 1e-4 * std::pow(1e5, static_cast<double>(i) / (kPoints - 1));
      scan = std::max(scan, avg.average(std::max(0.0, 1.0 - lambda * beta) * R, beta * R));
    }
    INFO("c=" << c << " d=" << d << " lambda=" << lambda << " R=" << R);
    CHECK(maximal_value(g, {d, lambda}, R).value >= scan * (1.0 - 1e-12));
  }
}

TEST_CASE("refinement does not stall next to its incumbent", "[maximal]") {
  // Regressions: the full search once stopped short of the optimum here, below
  // the centered-band search of a subset of the same balls.
  const MaximalOperator full(unit_indicator(), {2, 0.0});
  const MaximalOperator band(unit_indicator(), {2, 0.0}, RegionKind::CenteredBand);
  for (double R : {2.1147425268811282, 9.4574160900317583, 15.581556161088887}) {
    CHECK(full.at(R).value >= band.at(R).value * (1.0 - 1e-12));
  }
  const auto g = random_profile(1, 5, 2);
  const double R = 7.63239618074;
  CHECK(maximal_value(g, {2, 0.6}, R).value >=
        maximal_value(g, {2, 0.6}, R, RegionKind::InwardBand).value * (1.0 - 1e-12));
}
