// SPDX-License-Identifier: Apache-2.0
//
// Locally asymptotically normal models and the plug-in universal minimax rule.
//
// A model exposes sampling, an efficient estimator, the Fisher information at
// theta_0 and its norming matrices r_n. Local coordinates are
//   mu = G r_n (theta - theta_0),   G = Lambda^{1/2} A^t,   J = A Lambda A^t,
// so that ||mu||^2 = (r_n (theta - theta_0))^t J (r_n (theta - theta_0)).
#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umm/detection.hpp"
#include "umm/errors.hpp"
#include "umm/linalg.hpp"
#include "umm/montecarlo.hpp"
#include "umm/nlp_detect.hpp"
#include "umm/specfun.hpp"

namespace umm::lan {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

/// n observations of dimension `cols` stored row-major.
struct DataBlock {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

class LanModel {
 public:
  virtual ~LanModel() = default;

  /// Parameter dimension k.
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual DataBlock sample(std::span<const double> theta, std::size_t n, mc::TrialRng& rng) const = 0;
  virtual Vector estimate(const DataBlock& data) const = 0;
  virtual SymMatrix fisher_info(std::span<const double> theta0) const = 0;
  /// r_n; sqrt(n) I unless overridden.
  virtual Matrix norming(std::size_t n) const {
    return linalg::scaled(Matrix::identity(dim()), std::sqrt(static_cast<double>(n)));
  }
};

// ---------------------------------------------------------------------------
// Fisher information helpers

/// Pearson statistic n sum_i (p_emp_i - p_null_i)^2 / p_null_i.
inline double pearson_stat(std::span<const double> p_emp, std::span<const double> p_null, std::size_t n) {
  if (p_emp.size() != p_null.size()) throw config_error("distributions have different alphabet sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < p_null.size(); ++i) {
    if (!(p_null[i] > 0.0)) throw domain_error("null distribution has a zero-probability symbol");
    const double d = p_emp[i] - p_null[i];
    acc += d * d / p_null[i];
  }
  return static_cast<double>(n) * acc;
}

/// Fisher information of the categorical family in its first m-1 probabilities:
/// 1/p_i + 1/p_m on the diagonal, 1/p_m off it.
inline SymMatrix discrete_fisher(std::span<const double> p_null) {
  const std::size_t m = p_null.size();
  if (m < 2) throw domain_error("alphabet must have at least two symbols");
  for (double p : p_null)
    if (!(p > 0.0)) throw domain_error("null distribution has a zero-probability symbol");
  const std::size_t k = m - 1;
  const double last = 1.0 / p_null[k];
  Matrix j(k, k, last);
  for (std::size_t i = 0; i < k; ++i) j(i, i) += 1.0 / p_null[i];
  return SymMatrix(std::move(j));
}

/// grad_eta Cov(T) grad_eta^t for an exponential family; grad_eta is k x s.
inline SymMatrix expfam_fisher(const Matrix& grad_eta, const SymMatrix& cov_t) {
  if (grad_eta.cols() != cov_t.dim()) throw config_error("gradient columns must match Cov(T) dimension");
  [[maybe_unused]] const linalg::SqrtFactor pd_check(cov_t);  // throws unless PD
  Matrix j = grad_eta * cov_t.matrix() * grad_eta.transpose();
  for (std::size_t r = 0; r < j.rows(); ++r)
    for (std::size_t c = r + 1; c < j.cols(); ++c) j(r, c) = j(c, r) = 0.5 * (j(r, c) + j(c, r));
  return SymMatrix(std::move(j));
}

/// True iff all roots of 1 - sum_j coeffs_j z^j lie outside the unit circle
/// (every reflection coefficient of the step-down recursion has modulus < 1).
inline bool ar_is_stable(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  for (std::size_t order = a.size(); order > 0; --order) {
    const double kappa = a[order - 1];
    if (!(std::fabs(kappa) < 1.0)) return false;
    const double denom = 1.0 - kappa * kappa;
    std::vector<double> next(order - 1);
    for (std::size_t j = 0; j + 1 < order; ++j) next[j] = (a[j] + kappa * a[order - 2 - j]) / denom;
    a = std::move(next);
  }
  return true;
}

/// Autocovariances gamma_0..gamma_max_lag of a stable AR(K) process with noise sd sigma.
inline Vector ar_autocovariances(std::span<const double> coeffs, double sigma, std::size_t max_lag) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw domain_error("noise sd sigma must be > 0");
  if (!ar_is_stable(coeffs)) throw stability_error("AR coefficients are not stable (characteristic root inside the unit circle)");
  const std::size_t order = coeffs.size();
  // Yule-Walker: gamma_h - sum_j phi_j gamma_|h-j| = sigma^2 [h == 0], h = 0..K
  Matrix a(order + 1, order + 1);
  Vector b(order + 1, 0.0);
  b[0] = sigma * sigma;
  for (std::size_t h = 0; h <= order; ++h) {
    a(h, h) += 1.0;
    for (std::size_t j = 1; j <= order; ++j) {
      const std::size_t lag = h > j ? h - j : j - h;
      a(h, lag) -= coeffs[j - 1];
    }
  }
  Vector gamma = linalg::solve(std::move(a), std::move(b));
  gamma.resize(std::max(max_lag, order) + 1);
  for (std::size_t h = order + 1; h <= max_lag; ++h) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= order; ++j) acc += coeffs[j - 1] * gamma[h - j];
    gamma[h] = acc;
  }
  gamma.resize(max_lag + 1);
  return gamma;
}

/// Toeplitz autocovariance matrix of `lags` successive samples.
inline SymMatrix ar_autocov(std::span<const double> coeffs, double sigma, std::size_t lags) {
  if (lags < 1) throw domain_error("lags must be >= 1");
  const Vector gamma = ar_autocovariances(coeffs, sigma, lags - 1);
  Matrix m(lags, lags);
  for (std::size_t i = 0; i < lags; ++i)
    for (std::size_t j = 0; j < lags; ++j) m(i, j) = gamma[i > j ? i - j : j - i];
  return SymMatrix(std::move(m));
}

/// Sigma_K(theta) / sigma^2.
inline SymMatrix ar_fisher(std::span<const double> coeffs, double sigma) {
  if (coeffs.empty()) throw domain_error("AR order must be >= 1");
  const SymMatrix cov = ar_autocov(coeffs, sigma, coeffs.size());
  return SymMatrix(linalg::scaled(cov.matrix(), 1.0 / (sigma * sigma)));
}

// ---------------------------------------------------------------------------
// Concrete models

/// n i.i.d. N_k(theta, I) observations; estimator is the sample mean.
class GaussianIidModel final : public LanModel {
 public:
  explicit GaussianIidModel(std::size_t k) : k_(k) {
    if (k < 1) throw config_error("dimension k must be >= 1");
  }
  std::size_t dim() const override { return k_; }
  std::string name() const override { return "gaussian"; }

  DataBlock sample(std::span<const double> theta, std::size_t n, mc::TrialRng& rng) const override {
    check(theta);
    DataBlock d{std::vector<double>(n * k_), n, k_};
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t i = 0; i < k_; ++i) d.values[t * k_ + i] = theta[i] + rng.normal();
    return d;
  }
  Vector estimate(const DataBlock& data) const override {
    if (data.cols != k_ || data.rows == 0) throw config_error("gaussian data block has the wrong shape");
    Vector mean(k_, 0.0);
    for (std::size_t t = 0; t < data.rows; ++t)
      for (std::size_t i = 0; i < k_; ++i) mean[i] += data.values[t * k_ + i];
    for (auto& v : mean) v /= static_cast<double>(data.rows);
    return mean;
  }
  SymMatrix fisher_info(std::span<const double> theta0) const override {
    check(theta0);
    return SymMatrix::identity(k_);
  }

 private:
  void check(std::span<const double> theta) const {
    if (theta.size() != k_) throw config_error("parameter has the wrong dimension");
  }
  std::size_t k_;
};

/// n i.i.d. draws from a distribution on m symbols; theta holds the first m-1
/// probabilities and the estimator is the empirical type.
class DiscreteModel final : public LanModel {
 public:
  explicit DiscreteModel(std::size_t m) : m_(m) {
    if (m < 2) throw config_error("alphabet size m must be >= 2");
  }
  std::size_t dim() const override { return m_ - 1; }
  std::string name() const override { return "discrete"; }
  std::size_t alphabet() const { return m_; }

  /// (theta, 1 - sum theta)
  Vector probabilities(std::span<const double> theta) const {
    if (theta.size() != m_ - 1) throw config_error("parameter has the wrong dimension");
    Vector p(theta.begin(), theta.end());
    p.push_back(1.0 - std::accumulate(theta.begin(), theta.end(), 0.0));
    for (double v : p)
      if (!(v >= -1e-15) || !(v <= 1.0 + 1e-15)) throw domain_error("parameter is not a probability vector");
    return p;
  }

  DataBlock sample(std::span<const double> theta, std::size_t n, mc::TrialRng& rng) const override {
    const Vector p = probabilities(theta);
    std::vector<double> cumulative(m_);
    std::partial_sum(p.begin(), p.end(), cumulative.begin());
    cumulative.back() = 1.0;
    DataBlock d{std::vector<double>(n), n, 1};
    for (std::size_t t = 0; t < n; ++t) d.values[t] = static_cast<double>(rng.categorical(cumulative));
    return d;
  }
  /// Empirical type of all m symbols.
  Vector empirical_type(const DataBlock& data) const {
    if (data.cols != 1 || data.rows == 0) throw config_error("discrete data block has the wrong shape");
    Vector counts(m_, 0.0);
    for (double s : data.values) {
      const auto idx = static_cast<std::size_t>(s);
      if (idx >= m_ || static_cast<double>(idx) != s) throw config_error("symbol outside the alphabet");
      counts[idx] += 1.0;
    }
    for (auto& c : counts) c /= static_cast<double>(data.rows);
    return counts;
  }
  Vector estimate(const DataBlock& data) const override {
    Vector type = empirical_type(data);
    type.pop_back();
    return type;
  }
  SymMatrix fisher_info(std::span<const double> theta0) const override {
    return discrete_fisher(probabilities(theta0));
  }

 private:
  std::size_t m_;
};

/// Stable AR(K) with known noise sd; initial K samples drawn from the stationary
/// law, estimator is conditional least squares.
class AutoregressiveModel final : public LanModel {
 public:
  AutoregressiveModel(std::size_t order, double sigma) : order_(order), sigma_(sigma) {
    if (order < 1) throw config_error("AR order must be >= 1");
    if (!(sigma > 0.0)) throw config_error("noise sd sigma must be > 0");
  }
  std::size_t dim() const override { return order_; }
  std::string name() const override { return "ar"; }
  double sigma() const { return sigma_; }

  DataBlock sample(std::span<const double> theta, std::size_t n, mc::TrialRng& rng) const override {
    if (theta.size() != order_) throw config_error("parameter has the wrong dimension");
    if (n <= order_) throw config_error("AR blocklength must exceed the order");
    const linalg::SqrtFactor init(ar_autocov(theta, sigma_, order_));
    Vector z(order_);
    for (auto& v : z) v = rng.normal();
    const Vector start = linalg::multiply(init.factor(), z);
    DataBlock d{std::vector<double>(n), n, 1};
    for (std::size_t t = 0; t < order_; ++t) d.values[t] = start[t];
    for (std::size_t t = order_; t < n; ++t) {
      double acc = sigma_ * rng.normal();
      for (std::size_t j = 1; j <= order_; ++j) acc += theta[j - 1] * d.values[t - j];
      d.values[t] = acc;
    }
    return d;
  }
  Vector estimate(const DataBlock& data) const override {
    if (data.cols != 1 || data.rows <= 2 * order_) throw config_error("AR data block too short to estimate");
    Matrix xtx(order_, order_);
    Vector xty(order_, 0.0);
    const auto& y = data.values;
    for (std::size_t t = order_; t < data.rows; ++t) {
      for (std::size_t i = 0; i < order_; ++i) {
        xty[i] += y[t - 1 - i] * y[t];
        for (std::size_t j = 0; j < order_; ++j) xtx(i, j) += y[t - 1 - i] * y[t - 1 - j];
      }
    }
    return linalg::solve(std::move(xtx), std::move(xty));
  }
  SymMatrix fisher_info(std::span<const double> theta0) const override {
    if (theta0.size() != order_) throw config_error("parameter has the wrong dimension");
    return ar_fisher(theta0, sigma_);
  }

 private:
  std::size_t order_;
  double sigma_;
};

// ---------------------------------------------------------------------------
// Local reparametrization

struct LocalCoord {
  Vector mu;
  double hardness = 0.0;
};

/// mu = G r_n (theta - theta0), hardness d = ||mu||.
inline LocalCoord local_coord(std::span<const double> theta, std::span<const double> theta0, const LanModel& model,
                              std::size_t n) {
  if (theta.size() != model.dim() || theta0.size() != model.dim()) throw config_error("parameter has the wrong dimension");
  const linalg::SqrtFactor root(model.fisher_info(theta0));
  const Vector scaled = linalg::multiply(model.norming(n), linalg::subtract(theta, theta0));
  LocalCoord out;
  out.mu = linalg::multiply(root.transposed(), scaled);
  out.hardness = linalg::norm(out.mu);
  return out;
}

/// Inverse of local_coord: theta = theta0 + r_n^{-1} G^{-1} mu.
inline Vector theta_from_local(std::span<const double> mu, std::span<const double> theta0, const LanModel& model,
                               std::size_t n) {
  if (mu.size() != model.dim() || theta0.size() != model.dim()) throw config_error("parameter has the wrong dimension");
  const linalg::SqrtFactor root(model.fisher_info(theta0));
  // G^{-1} = A Lambda^{-1/2} = (F^{-1})^t
  const Vector offset = linalg::multiply(root.inverse().transpose(), mu);
  const Vector delta = linalg::solve(model.norming(n), offset);
  Vector theta(theta0.begin(), theta0.end());
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += delta[i];
  return theta;
}

/// Test and training blocklengths with the limiting norming ratio rho.
struct TrainingSetup {
  std::size_t n = 1;
  std::size_t n_x = 0;
  double rho = 0.0;
};

/// rho from r_{n_x} r_n^{-1} = sqrt(rho) I; a non-scalar ratio is a configuration error.
inline TrainingSetup make_setup(const LanModel& model, std::size_t n, std::size_t n_x) {
  if (n < 1) throw config_error("test blocklength n must be >= 1");
  TrainingSetup s{n, n_x, 0.0};
  if (n_x == 0) return s;
  const Matrix rn = model.norming(n);
  const Matrix rx = model.norming(n_x);
  // ratio = r_{n_x} r_n^{-1}, column by column
  const std::size_t k = model.dim();
  Matrix ratio(k, k);
  const Matrix rn_t = rn.transpose();
  for (std::size_t r = 0; r < k; ++r) {
    Vector row(rx.row(r).begin(), rx.row(r).end());
    const Vector sol = linalg::solve(rn_t, row);  // row of rx rn^{-1}
    for (std::size_t c = 0; c < k; ++c) ratio(r, c) = sol[c];
  }
  const double diag = ratio(0, 0);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      const double expected = r == c ? diag : 0.0;
      if (std::fabs(ratio(r, c) - expected) > 1e-9 * std::max(1.0, std::fabs(diag))) {
        throw config_error("norming ratio r_{n_x} r_n^{-1} is not a multiple of the identity; no rho exists");
      }
    }
  s.rho = diag * diag;
  return s;
}

// ---------------------------------------------------------------------------
// Plug-in detector

/// The training rule with x, y replaced by estimated local parameters
///   mu_y = G r_n (theta_y - theta0),  mu_x = G r_n (theta_x - theta0).
/// With n_x == 0 (rho == 0) the training data is ignored.
class AummDetector {
 public:
  AummDetector(const LanModel& model, Vector theta0, TrainingSetup setup)
      : model_(&model),
        theta0_(std::move(theta0)),
        setup_(setup),
        root_(model.fisher_info(theta0_)),
        map_(root_.transposed() * model.norming(setup.n)) {
    if (theta0_.size() != model.dim()) throw config_error("theta0 has the wrong dimension");
  }

  const TrainingSetup& setup() const noexcept { return setup_; }
  const Vector& theta0() const noexcept { return theta0_; }
  const LanModel& model() const noexcept { return *model_; }

  Vector local_estimate(std::span<const double> theta_hat) const {
    return linalg::multiply(map_, linalg::subtract(theta_hat, theta0_));
  }

  DetectorVerdict decide(const DataBlock* x_data, const DataBlock& y_data, double p_fa) const {
    const Vector mu_y = local_estimate(model_->estimate(y_data));
    Vector mu_x(mu_y.size(), 0.0);
    if (setup_.n_x > 0 && setup_.rho > 0.0) {
      if (x_data == nullptr) throw config_error("training data required when n_x > 0");
      mu_x = local_estimate(model_->estimate(*x_data));
    }
    return nlp::umm_train_verdict(mu_x, mu_y, setup_.rho, p_fa);
  }

 private:
  const LanModel* model_;
  Vector theta0_;
  TrainingSetup setup_;
  linalg::SqrtFactor root_;
  Matrix map_;
};

inline DetectorVerdict aumm_decide(const DataBlock* x_data, const DataBlock& y_data, const LanModel& model,
                                   std::span<const double> theta0, const TrainingSetup& setup, double p_fa) {
  return AummDetector(model, Vector(theta0.begin(), theta0.end()), setup).decide(x_data, y_data, p_fa);
}

/// Simulation binding: training block from theta_alt, test block from theta0 (null) or theta_alt.
struct AummTrial {
  const AummDetector* detector;
  Vector theta_alt;
  double p_fa;

  DetectorVerdict trial(mc::TrialRng& rng, Hypothesis h) const {
    const LanModel& model = detector->model();
    const auto& setup = detector->setup();
    std::optional<DataBlock> x;
    if (setup.n_x > 0 && setup.rho > 0.0) x = model.sample(theta_alt, setup.n_x, rng);
    const DataBlock y = model.sample(h == Hypothesis::null ? detector->theta0() : theta_alt, setup.n, rng);
    return detector->decide(x ? &*x : nullptr, y, p_fa);
  }
};

}  // namespace umm::lan
