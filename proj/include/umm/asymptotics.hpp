// SPDX-License-Identifier: Apache-2.0
//
// High-dimension and high-training asymptotics: the effective hardness E,
// its limiting tradeoff curve, the two leading-order approximations and the
// train/test budget allocation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "umm/detection.hpp"
#include "umm/errors.hpp"
#include "umm/nlp_detect.hpp"
#include "umm/specfun.hpp"

namespace umm::asym {

/// delta is either the per-observation hardness or the blocklength form sqrt(n) delta;
/// callers pick which one they pass.
struct HardnessParams {
  double delta = 1.0;
  double rho = 0.0;
  int k = 1;
};

inline void validate(const HardnessParams& p) {
  if (!(p.delta > 0.0) || !std::isfinite(p.delta)) throw domain_error("delta must be finite and > 0");
  if (!(p.rho >= 0.0) || !std::isfinite(p.rho)) throw domain_error("rho must be finite and >= 0");
  if (p.k < 1) throw domain_error("dimension k must be >= 1");
}

/// E = delta^2 (1+2 rho) / sqrt(2k(1+2 rho) + 4(1+rho)^2 delta^2)
inline double hardness_param(const HardnessParams& p) {
  validate(p);
  const double d2 = p.delta * p.delta;
  const double g = 1.0 + 2.0 * p.rho;
  const double r = 1.0 + p.rho;
  return d2 * g / std::sqrt(2.0 * p.k * g + 4.0 * r * r * d2);
}

inline double hardness_param(double delta, double rho, int k) { return hardness_param({delta, rho, k}); }

/// Leading term when k is small relative to rho.
inline double hardness_high_rho(const HardnessParams& p) {
  validate(p);
  return p.delta * (1.0 - 1.0 / (2.0 * (1.0 + p.rho)));
}

/// Leading term when k is of order delta^4 (1 + rho).
inline double hardness_high_k(const HardnessParams& p) {
  validate(p);
  return p.delta * p.delta * std::sqrt(1.0 + 2.0 * p.rho) / std::sqrt(2.0 * p.k);
}

/// Q^{-1}(p_fa) + Q^{-1}(p_md) = E; the same closed form as the LRT curve.
inline TradeoffCurve asymptotic_curve(double hardness, std::span<const double> p_fa_grid) {
  if (!(hardness > 0.0) || !std::isfinite(hardness)) throw domain_error("hardness E must be finite and > 0");
  TradeoffCurve c = nlp::lrt_curve(hardness, p_fa_grid);
  c.descriptor = "asymptotic";
  return c;
}

/// Budget-form hardness with n_x + n = n_T and a = n_T delta^2:
/// a(1+2 rho) / ((1+rho) sqrt(2k(1+2 rho) + 4(1+rho) a)).
inline double allocation_hardness(double a, int k, double rho) {
  if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("budget a must be finite and > 0");
  if (k < 1) throw domain_error("dimension k must be >= 1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw domain_error("rho must be finite and >= 0");
  const double g = 1.0 + 2.0 * rho;
  const double r = 1.0 + rho;
  return a * g / (r * std::sqrt(2.0 * k * g + 4.0 * r * a));
}

struct AllocationProblem {
  double budget = 1.0;  // a
  int k = 1;
};

struct AllocationResult {
  double rho_star = 0.0;
  double hardness_star = 0.0;
  std::vector<std::pair<double, double>> grid;  // (rho, E(rho)) in ascending rho
};

/// 0 followed by `count` log-spaced points on [lo, hi].
inline std::vector<double> default_rho_grid(double lo = 1e-3, double hi = 1e3, int count = 61) {
  std::vector<double> g{0.0};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) g.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  return g;
}

/// Grid argmax (first wins on ties) refined by golden-section search between
/// its neighbours. The refinement only replaces the grid optimum when strictly better.
inline AllocationResult allocate(const AllocationProblem& problem, std::span<const double> rho_grid) {
  if (rho_grid.empty()) throw domain_error("rho grid is empty");
  std::vector<double> grid(rho_grid.begin(), rho_grid.end());
  for (double r : grid)
    if (!(r >= 0.0) || !std::isfinite(r)) throw domain_error("rho grid values must be finite and >= 0");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  AllocationResult out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = allocation_hardness(problem.budget, problem.k, grid[i]);
    out.grid.emplace_back(grid[i], e);
    if (e > out.grid[best].second) best = i;
  }
  out.rho_star = grid[best];
  out.hardness_star = out.grid[best].second;
  if (grid.size() < 2) return out;

  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  const auto f = [&](double r) { return allocation_hardness(problem.budget, problem.k, r); };
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    if (f1 >= f2) {  // keep the left part on ties
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double refined = 0.5 * (lo + hi);
  const double fr = f(refined);
  if (fr > out.hardness_star) {
    out.rho_star = refined;
    out.hardness_star = fr;
  }
  return out;
}

/// Smallest n >= 1 with hardness_param(sqrt(n) delta, rho, k) >= target.
inline std::uint64_t blocklength_for_dimension(int k, double rho, double delta, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) throw domain_error("target hardness must be finite and > 0");
  const auto ok = [&](std::uint64_t n) {
    return hardness_param(std::sqrt(static_cast<double>(n)) * delta, rho, k) >= target;
  };
  if (ok(1)) return 1;
  std::uint64_t lo = 1, hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) throw range_error("blocklength overflow");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// L-infinity distance from (p_fa, p_md) to the curve Q^{-1}(x) + Q^{-1}(y) = E.
/// The curve is decreasing, so the growing square first touches it at a corner
/// on the diagonal through the point: solve curve(p_fa + s) = p_md + s.
inline double curve_gap(double hardness, double p_fa, double p_md) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw domain_error("p_fa must lie in (0,1)");
  const auto curve = [&](double x) { return specfun::normal_tail(hardness - specfun::normal_tail_inv(x)); };
  const auto g = [&](double s) { return curve(p_fa + s) - (p_md + s); };  // strictly decreasing
  double lo = -p_fa * (1.0 - 1e-15), hi = (1.0 - p_fa) * (1.0 - 1e-15);
  double glo = g(lo);
  if (glo == 0.0) return std::fabs(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return std::fabs(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return std::fabs(0.5 * (lo + hi));
}

/// Exact GLRT point at p_fa against the E-curve, at rho = 0 with d^2 = sqrt(2k).
struct HighDimGap {
  double hardness = 0.0;
  double exact_p_md = 0.0;
  double asymptotic_p_md = 0.0;
  double gap = 0.0;  // L-infinity distance to the E-curve
};

inline HighDimGap high_dimension_gap(int k, double p_fa) {
  const double d = std::pow(2.0 * k, 0.25);
  HighDimGap out;
  out.hardness = hardness_param(d, 0.0, k);
  out.exact_p_md = nlp::glrt_pmd(k, d, p_fa);
  out.asymptotic_p_md = specfun::normal_tail(out.hardness - specfun::normal_tail_inv(p_fa));
  out.gap = curve_gap(out.hardness, p_fa, out.exact_p_md);
  return out;
}

}  // namespace umm::asym
