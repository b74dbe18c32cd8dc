#pragma once

// Exact volumes of d-dimensional balls, hyperspherical caps and lenses
// (two-ball intersections). All off-origin centers live on the positive
// first coordinate axis; callers fold arbitrary centers onto it by rotation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "maxlab/errors.hpp"

namespace maxlab {

inline constexpr int kMaxDimension = 30;

/// Ball whose center sits at `center_offset * e_1`.
struct AxisBall {
  double center_offset = 0.0;
  double radius = 1.0;
};

inline void require_dimension(int d) {
  if (d < 1 || d > kMaxDimension) {
    throw DomainError("dimension must be in [1, " + std::to_string(kMaxDimension) +
                      "], got " + std::to_string(d));
  }
}

/// Volume of the unit ball in R^d, pi^{d/2} / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
  require_dimension(d);
  // omega_d = omega_{d-2} * 2 pi / d keeps the relative error at a few ulp.
  double omega = (d % 2 == 0) ? 1.0 : 2.0;
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) omega *= 2.0 * std::numbers::pi / k;
  return omega;
}

namespace detail {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
// Converges quickly for x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 20000;
  constexpr double kEps = 2.0 * std::numeric_limits<double>::epsilon();
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double dd = 1.0 - qab * x / qap;
  if (std::fabs(dd) < kTiny) dd = kTiny;
  dd = 1.0 / dd;
  double h = dd;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    dd = 1.0 + aa * dd;
    if (std::fabs(dd) < kTiny) dd = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    dd = 1.0 / dd;
    h *= dd * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    dd = 1.0 + aa * dd;
    if (std::fabs(dd) < kTiny) dd = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    dd = 1.0 / dd;
    const double del = dd * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// I_x(a, b) with log B(a, b) supplied by the caller.
inline double reg_inc_beta_unchecked(double x, double a, double b, double lbeta) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - lbeta;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

// log B((d + 1) / 2, 1 / 2), the only beta normalization the cap kernel needs.
inline double cap_log_beta(int d) {
  static const std::array<double, kMaxDimension + 1> table = [] {
    std::array<double, kMaxDimension + 1> t{};
    for (int k = 1; k <= kMaxDimension; ++k) t[k] = log_beta(0.5 * (k + 1), 0.5);
    return t;
  }();
  return table[d];
}

// Cap volume without argument checks; h is clamped into [0, 2 rho].
inline double cap_volume_unchecked(int d, double rho, double h) {
  h = std::clamp(h, 0.0, 2.0 * rho);
  const double full = unit_ball_volume(d) * std::pow(rho, d);
  const bool upper = h > rho;
  const double hh = upper ? 2.0 * rho - h : h;
  const double x = std::min(1.0, hh * (2.0 * rho - hh) / (rho * rho));
  const double cap = 0.5 * full * reg_inc_beta_unchecked(x, 0.5 * (d + 1), 0.5, cap_log_beta(d));
  return upper ? full - cap : cap;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("reg_inc_beta: a and b must be positive and finite");
  }
  return detail::reg_inc_beta_unchecked(x, a, b, detail::log_beta(a, b));
}

/// Volume of the cap of height h cut from a d-ball of radius rho.
inline double cap_volume(int d, double rho, double h) {
  require_dimension(d);
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("cap_volume: rho must be positive");
  if (!(h >= 0.0 && h <= 2.0 * rho)) throw DomainError("cap_volume: h must lie in [0, 2 rho]");
  return detail::cap_volume_unchecked(d, rho, h);
}

/// |B(0, rho1) ∩ B(c e_1, rho2)|.
inline double intersection_volume(int d, double c, double rho1, double rho2) {
  require_dimension(d);
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("intersection_volume: c must be >= 0");
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || !std::isfinite(rho1) || !std::isfinite(rho2)) {
    throw DomainError("intersection_volume: radii must be positive");
  }
  if (c >= rho1 + rho2) return 0.0;
  if (c <= std::fabs(rho1 - rho2)) return unit_ball_volume(d) * std::pow(std::min(rho1, rho2), d);
  // Radical hyperplane x_1 = split separates the lens into one cap of each ball.
  const double split = (c * c + rho1 * rho1 - rho2 * rho2) / (2.0 * c);
  return detail::cap_volume_unchecked(d, rho1, rho1 - split) +
         detail::cap_volume_unchecked(d, rho2, rho2 - (c - split));
}

inline double intersection_volume(int d, const AxisBall& a, const AxisBall& b) {
  return intersection_volume(d, std::fabs(a.center_offset - b.center_offset), a.radius, b.radius);
}

inline double ball_volume(int d, double radius) { return unit_ball_volume(d) * std::pow(radius, d); }

}  // namespace maxlab
