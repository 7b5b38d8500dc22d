// SPDX-License-Identifier: Apache-2.0
//
// Detectors for the Gaussian location problem: the likelihood-ratio test with
// known alternative, the GLRT (universal minimax without training data) and
// the universal minimax rule with a training observation. Analytic tradeoff
// curves, the Bayes-LRT sphere radius and acceptance-region geometry live here
// as well.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "umm/detection.hpp"
#include "umm/errors.hpp"
#include "umm/linalg.hpp"
#include "umm/montecarlo.hpp"
#include "umm/specfun.hpp"

namespace umm::nlp {

using linalg::SymMatrix;
using linalg::Vector;

/// Alternative specified only through its Mahalanobis radius.
struct Radius {
  double value = 0.0;
};

/// Y ~ N_k(mu, Sigma) with known null mean and covariance. The alternative is
/// either an explicit mean or a radius Delta; training data X ~ N_k(mu_1, Sigma / rho).
class NlpProblem {
 public:
  NlpProblem(Vector null_mean, SymMatrix covariance, std::variant<Vector, Radius> alternative, double rho = 0.0)
      : null_mean_(std::move(null_mean)),
        covariance_(std::move(covariance)),
        root_(covariance_),
        rho_(rho) {
    if (null_mean_.empty()) throw config_error("dimension k must be >= 1");
    if (null_mean_.size() != covariance_.dim()) throw config_error("null mean and covariance dimensions disagree");
    if (!std::isfinite(rho_) || rho_ < 0.0) throw config_error("training quality rho must be finite and >= 0");
    if (const auto* mu1 = std::get_if<Vector>(&alternative)) {
      if (mu1->size() != dim()) throw config_error("alternative mean has the wrong dimension");
      alt_mean_ = *mu1;
      alt_std_ = standardize(*mu1);
      delta_ = linalg::norm(alt_std_);
      if (!(delta_ > 0.0)) throw config_error("alternative mean must differ from the null mean");
      explicit_ = true;
    } else {
      delta_ = std::get<Radius>(alternative).value;
      if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw config_error("radius Delta must be finite and > 0");
      // rotation invariance lets the radius-only alternative sit on the first axis
      alt_std_.assign(dim(), 0.0);
      alt_std_[0] = delta_;
      alt_mean_ = destandardize(alt_std_);
    }
  }

  /// mu_0 = 0, Sigma = I, alternative at radius delta.
  static NlpProblem standard(std::size_t k, double delta, double rho = 0.0) {
    return NlpProblem(Vector(k, 0.0), SymMatrix::identity(k), Radius{delta}, rho);
  }
  /// mu_0 = 0, Sigma = I, explicit alternative mean.
  static NlpProblem standard(Vector mu1, double rho = 0.0) {
    const std::size_t k = mu1.size();
    return NlpProblem(Vector(k, 0.0), SymMatrix::identity(k), std::move(mu1), rho);
  }

  std::size_t dim() const noexcept { return null_mean_.size(); }
  double delta() const noexcept { return delta_; }
  double rho() const noexcept { return rho_; }
  bool has_explicit_alternative() const noexcept { return explicit_; }
  const Vector& null_mean() const noexcept { return null_mean_; }
  const SymMatrix& covariance() const noexcept { return covariance_; }
  const linalg::SqrtFactor& root() const noexcept { return root_; }
  /// Alternative mean in original coordinates.
  const Vector& alternative_mean() const noexcept { return alt_mean_; }
  /// Sigma^{-1/2}(mu_1 - mu_0).
  const Vector& standardized_alternative() const noexcept { return alt_std_; }

  /// Sigma^{-1/2}(v - mu_0)
  Vector standardize(std::span<const double> v) const {
    if (v.size() != dim()) throw config_error("observation has the wrong dimension");
    return linalg::multiply(root_.inverse(), linalg::subtract(v, null_mean_));
  }
  /// mu_0 + Sigma^{1/2} v
  Vector destandardize(std::span<const double> v) const {
    Vector out = linalg::multiply(root_.factor(), v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += null_mean_[i];
    return out;
  }

 private:
  Vector null_mean_;
  SymMatrix covariance_;
  linalg::SqrtFactor root_;
  Vector alt_mean_;
  Vector alt_std_;
  double delta_ = 0.0;
  double rho_ = 0.0;
  bool explicit_ = false;
};

namespace detail {

inline void validate_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) throw domain_error("p_fa grid values must lie in (0,1)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw domain_error("p_fa grid must be strictly increasing");
  }
}

inline void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw domain_error("Delta must be finite and > 0");
}

inline void require_prob(double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("p_fa must lie in (0,1)");
}

inline void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw config_error("training and test observations differ in dimension");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Likelihood-ratio test, known alternative

/// Accepts the null iff mu_1^t y < T in standardized coordinates.
inline DetectorVerdict lrt_decide(std::span<const double> y, const NlpProblem& problem, double threshold) {
  if (!problem.has_explicit_alternative()) throw config_error("the LRT needs an explicit alternative mean");
  const Vector ys = problem.standardize(y);
  return DetectorVerdict::from(linalg::dot(problem.standardized_alternative(), ys), threshold);
}

/// T = Delta Q^{-1}(p_fa), the LRT threshold with false-alarm probability p_fa.
inline double lrt_threshold(double delta, double p_fa) {
  detail::require_delta(delta);
  detail::require_prob(p_fa);
  return delta * specfun::normal_tail_inv(p_fa);
}

/// Q^{-1}(p_fa) + Q^{-1}(p_md) = Delta.
inline TradeoffCurve lrt_curve(double delta, std::span<const double> p_fa_grid) {
  detail::require_delta(delta);
  detail::validate_grid(p_fa_grid);
  TradeoffCurve curve;
  curve.descriptor = "lrt delta=" + std::to_string(delta);
  for (double p : p_fa_grid) {
    curve.points.push_back(make_point(p, specfun::normal_tail(delta - specfun::normal_tail_inv(p))));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// GLRT

inline double glrt_threshold(std::size_t k, double p_fa) {
  detail::require_prob(p_fa);
  return specfun::chisq_tail_inv({static_cast<int>(k), 0.0}, p_fa);
}

/// Accepts the null iff ||y||^2 < Q_(k)^{-1}(p_fa) in standardized coordinates.
inline DetectorVerdict glrt_decide(std::span<const double> y, const NlpProblem& problem, double p_fa) {
  const double threshold = glrt_threshold(problem.dim(), p_fa);
  return DetectorVerdict::from(linalg::squared_norm(problem.standardize(y)), threshold);
}

/// Missed-detection probability of the GLRT against any alternative of norm delta.
inline double glrt_pmd(std::size_t k, double delta, double p_fa) {
  detail::require_delta(delta);
  const double t = glrt_threshold(k, p_fa);
  return 1.0 - specfun::chisq_tail({static_cast<int>(k), delta * delta}, t);
}

/// Q_(k)^{-1}(p_fa) = Q_(k),Delta^2^{-1}(1 - p_md).
inline TradeoffCurve glrt_curve(std::size_t k, double delta, std::span<const double> p_fa_grid) {
  if (k < 1) throw domain_error("k must be >= 1");
  detail::require_delta(delta);
  detail::validate_grid(p_fa_grid);
  TradeoffCurve curve;
  curve.descriptor = "glrt k=" + std::to_string(k) + " delta=" + std::to_string(delta);
  for (double p : p_fa_grid) curve.points.push_back(make_point(p, glrt_pmd(k, delta, p)));
  return curve;
}

// ---------------------------------------------------------------------------
// Universal minimax rule with training data and guaranteed significance

/// ||rho x + y||^2 < Q_(k),theta0^{-1}(p_fa), theta0 = ||rho x||^2, on standardized x and y.
inline DetectorVerdict umm_train_verdict(std::span<const double> x, std::span<const double> y, double rho,
                                         double p_fa) {
  detail::require_same_dim(x, y);
  detail::require_prob(p_fa);
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw domain_error("rho must be finite and >= 0");
  double stat = 0.0;
  double theta0 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double rx = rho * x[i];
    const double s = rx + y[i];
    stat += s * s;
    theta0 += rx * rx;
  }
  const double threshold = specfun::chisq_tail_inv({static_cast<int>(y.size()), theta0}, p_fa);
  return DetectorVerdict::from(stat, threshold);
}

inline DetectorVerdict umm_train_decide(std::span<const double> x, std::span<const double> y,
                                        const NlpProblem& problem, double p_fa) {
  return umm_train_verdict(problem.standardize(x), problem.standardize(y), problem.rho(), p_fa);
}

/// Missed-detection probability of the training rule against ||mu_1|| = delta:
///   1 - E[ Q_(k),theta1( Q_(k),theta0^{-1}(p_fa) ) ],
/// X ~ N_k(mu_1, I/rho), theta0 = ||rho X||^2, theta1 = ||rho X + mu_1||^2.
/// rho == 0 returns the GLRT value with a zero-width interval.
inline mc::McEstimate umm_pmd(double p_fa, double delta, double rho, std::size_t k, const mc::McConfig& config) {
  detail::require_prob(p_fa);
  detail::require_delta(delta);
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw domain_error("rho must be finite and >= 0");
  if (k < 1) throw domain_error("k must be >= 1");
  mc::validate(config);
  if (rho == 0.0) return mc::exact_estimate(glrt_pmd(k, delta, p_fa), config.seed);

  const double scale = 1.0 / std::sqrt(rho);
  const int dof = static_cast<int>(k);
  return mc::estimate_mean(
      [&](mc::TrialRng& rng) {
        double theta0 = 0.0;
        double theta1 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          const double mean = i == 0 ? delta : 0.0;
          const double rx = rho * (mean + scale * rng.normal());
          theta0 += rx * rx;
          theta1 += (rx + mean) * (rx + mean);
        }
        const double t = specfun::chisq_tail_inv({dof, theta0}, p_fa);
        return 1.0 - specfun::chisq_tail({dof, theta1}, t);
      },
      config);
}

/// Pointwise umm_pmd over the grid; every point reuses the configured seed.
inline TradeoffCurve umm_curve(double delta, double rho, std::size_t k, std::span<const double> p_fa_grid,
                               const mc::McConfig& config) {
  detail::validate_grid(p_fa_grid);
  TradeoffCurve curve;
  curve.provenance = rho > 0.0 ? Provenance::simulated : Provenance::analytic;
  curve.descriptor = "umm-train k=" + std::to_string(k) + " delta=" + std::to_string(delta) +
                     " rho=" + std::to_string(rho);
  for (double p : p_fa_grid) {
    const mc::McEstimate e = umm_pmd(p, delta, rho, k, config);
    TradeoffPoint pt = make_point(p, e.p_hat);
    if (rho > 0.0) {
      pt.md_ci = Interval{e.ci_low, e.ci_high};
      pt.md_std_error = e.std_error;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Bayes LRT under a uniform prior on the Delta-sphere

/// Which way the Bayes-LRT acceptance region degenerates.
enum class RegionDegeneracy { empty, full };

class region_range_error : public range_error {
 public:
  region_range_error(const std::string& what, RegionDegeneracy kind) : range_error(what), kind_(kind) {}
  RegionDegeneracy kind() const noexcept { return kind_; }

 private:
  RegionDegeneracy kind_;
};

/// Radius Psi of the sphere ||rho x + y|| < Psi equivalent to the region
/// c_k(Delta ||rho x + y||) > T c_k(Delta ||rho x||):
///   Psi = c_k^{-1}(T c_k(Delta sqrt(theta0))) / Delta, theta0 = (rho ||x||)^2.
inline double bayes_lrt_radius(double delta, double rho, std::size_t k, double x_norm, double threshold) {
  detail::require_delta(delta);
  if (k < 2) throw domain_error("the von Mises-Fisher rewrite needs k >= 2");
  if (!(rho >= 0.0) || !(x_norm >= 0.0)) throw domain_error("rho and ||x|| must be >= 0");
  if (std::isnan(threshold) || threshold < 0.0) throw domain_error("threshold T must be > 0");
  const int ki = static_cast<int>(k);
  if (threshold == 0.0) throw region_range_error("T = 0: every observation is accepted", RegionDegeneracy::full);
  const double log_target = std::log(threshold) + specfun::log_vmf_const({ki, delta * rho * x_norm});
  if (log_target >= specfun::log_vmf_const({ki, 0.0})) {
    throw region_range_error("T c_k(Delta ||rho x||) >= c_k(0): the acceptance region is empty",
                             RegionDegeneracy::empty);
  }
  return specfun::vmf_const_inv(ki, log_target) / delta;
}

/// Direct log-scale evaluation of the Bayes-LRT acceptance test on standardized x, y.
inline bool bayes_lrt_accepts(std::span<const double> x, std::span<const double> y, double delta, double rho,
                              double threshold) {
  detail::require_same_dim(x, y);
  const int k = static_cast<int>(y.size());
  double sum_norm = 0.0;
  double x_norm = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = rho * x[i] + y[i];
    sum_norm += s * s;
    x_norm += rho * x[i] * rho * x[i];
  }
  const double lhs = specfun::log_vmf_const({k, delta * std::sqrt(sum_norm)});
  const double rhs = std::log(threshold) + specfun::log_vmf_const({k, delta * std::sqrt(x_norm)});
  return lhs > rhs;
}

// ---------------------------------------------------------------------------
// Acceptance-region geometry (standardized coordinates)

enum class DetectorKind { lrt, glrt, umm_train };

struct RegionBoundary {
  enum class Shape { hyperplane, sphere };
  Shape shape = Shape::sphere;
  Vector center;    // sphere
  double radius = 0.0;
  Vector normal;    // hyperplane normal^t y = offset
  double offset = 0.0;
};

inline RegionBoundary region_boundary(const NlpProblem& problem, DetectorKind detector, double p_fa,
                                      std::optional<std::span<const double>> x = std::nullopt) {
  detail::require_prob(p_fa);
  const std::size_t k = problem.dim();
  RegionBoundary out;
  switch (detector) {
    case DetectorKind::lrt:
      if (x) throw config_error("training data applies only to the umm-train detector");
      out.shape = RegionBoundary::Shape::hyperplane;
      out.normal = problem.standardized_alternative();
      out.offset = lrt_threshold(problem.delta(), p_fa);
      return out;
    case DetectorKind::glrt:
      if (x) throw config_error("training data applies only to the umm-train detector");
      out.center.assign(k, 0.0);
      out.radius = std::sqrt(glrt_threshold(k, p_fa));
      return out;
    case DetectorKind::umm_train: {
      if (!x) throw config_error("the umm-train region needs a training vector x");
      const Vector xs = problem.standardize(*x);
      out.center.resize(k);
      double theta0 = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        out.center[i] = -problem.rho() * xs[i];
        theta0 += out.center[i] * out.center[i];
      }
      out.radius = std::sqrt(specfun::chisq_tail_inv({static_cast<int>(k), theta0}, p_fa));
      return out;
    }
  }
  throw config_error("unknown detector");
}

// ---------------------------------------------------------------------------
// Simulation bindings: each draws in the problem's original coordinates.

namespace detail {

inline Vector draw(const NlpProblem& problem, mc::TrialRng& rng, bool shifted, double noise_scale) {
  Vector z(problem.dim());
  for (auto& v : z) v = noise_scale * rng.normal();
  if (shifted) {
    const auto& a = problem.standardized_alternative();
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += a[i];
  }
  return problem.destandardize(z);
}

}  // namespace detail

struct LrtTrial {
  const NlpProblem* problem;
  double threshold;

  static LrtTrial at_false_alarm(const NlpProblem& p, double p_fa) {
    return {&p, lrt_threshold(p.delta(), p_fa)};
  }
  DetectorVerdict trial(mc::TrialRng& rng, Hypothesis h) const {
    const Vector y = detail::draw(*problem, rng, h == Hypothesis::alternative, 1.0);
    if (problem->has_explicit_alternative()) return lrt_decide(y, *problem, threshold);
    return DetectorVerdict::from(linalg::dot(problem->standardized_alternative(), problem->standardize(y)),
                                 threshold);
  }
};

struct GlrtTrial {
  const NlpProblem* problem;
  double threshold;

  static GlrtTrial at_false_alarm(const NlpProblem& p, double p_fa) { return {&p, glrt_threshold(p.dim(), p_fa)}; }
  DetectorVerdict trial(mc::TrialRng& rng, Hypothesis h) const {
    const Vector y = detail::draw(*problem, rng, h == Hypothesis::alternative, 1.0);
    return DetectorVerdict::from(linalg::squared_norm(problem->standardize(y)), threshold);
  }
};

/// Training rule; X ~ N(mu_1, Sigma/rho) is drawn fresh each trial unless a fixed x is given.
struct UmmTrainTrial {
  const NlpProblem* problem;
  double p_fa;
  std::optional<Vector> fixed_x;

  DetectorVerdict trial(mc::TrialRng& rng, Hypothesis h) const {
    const Vector y = detail::draw(*problem, rng, h == Hypothesis::alternative, 1.0);
    if (fixed_x) return umm_train_decide(*fixed_x, y, *problem, p_fa);
    if (problem->rho() == 0.0) return umm_train_decide(problem->null_mean(), y, *problem, p_fa);
    const Vector x = detail::draw(*problem, rng, true, 1.0 / std::sqrt(problem->rho()));
    return umm_train_decide(x, y, *problem, p_fa);
  }
};

}  // namespace umm::nlp
