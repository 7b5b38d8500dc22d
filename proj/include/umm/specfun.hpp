// SPDX-License-Identifier: Apache-2.0
//
// Scalar special functions behind the analytic tradeoff curves: the normal
// tail and its inverse, the (non)central chi-square tail and its inverse,
// log I_nu and the log von Mises-Fisher normalizing constant.
//
// Everything here is a pure function of its arguments.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "umm/errors.hpp"

namespace umm::specfun {

/// Degrees of freedom and noncentrality of a chi-square law.
struct ChiSqParams {
  int dof = 1;
  double noncentrality = 0.0;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw domain_error(std::string(what) + " must be finite");
}

inline void require_open_prob(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw domain_error(std::string(what) + " must lie in the open interval (0,1)");
  }
}

inline void validate(const ChiSqParams& params) {
  if (params.dof < 1) throw domain_error("chi-square dof must be >= 1");
  if (!std::isfinite(params.noncentrality) || params.noncentrality < 0.0) {
    throw domain_error("chi-square noncentrality must be finite and >= 0");
  }
}

// std::lgamma writes the global signgam; lgamma_r keeps this reentrant.
inline double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Regularized lower incomplete gamma P(a, x) by its power series; accurate in
// relative terms and fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
  if (x <= 0.0) return 0.0;
  constexpr double eps = 1e-16;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * eps) break;
  }
  return std::min(1.0, std::exp(a * std::log(x) - x - log_gamma(a)) * sum);
}

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
// Series for x < a, Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  const double log_prefix = a * std::log(x) - x - log_gamma(a);
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

struct TailAndDensity {
  double tail;
  double density;
};

// Poisson(lambda/2) mixture of central chi-square(k + 2j) laws, summed outward
// from the Poisson mode. Neighbouring central tails are linked by
//   Q(a+1, x) = Q(a, x) + g(a),  g(a) = x^a e^{-x} / Gamma(a+1),
// and the central density at t = 2x is g(a-1)/2.
inline TailAndDensity noncentral_tail_density(int dof, double lambda, double t) {
  constexpr double kTruncation = 1e-14;
  const double x = 0.5 * t;
  const double mu = 0.5 * lambda;
  const double a0 = 0.5 * dof;

  if (t <= 0.0) {
    // density at 0 is infinite for dof == 1, finite otherwise; callers never rely on it there.
    return {1.0, dof == 2 ? 0.5 * std::exp(-mu) : (dof == 1 ? kInf : 0.0)};
  }
  const double log_x = std::log(x);
  auto log_g = [&](double a) { return a * log_x - x - log_gamma(a + 1.0); };

  if (mu == 0.0) {
    return {gamma_q(a0, x), 0.5 * std::exp(log_g(a0 - 1.0))};
  }

  const double j0 = std::floor(mu);
  const double log_w0 = -mu + j0 * std::log(mu) - log_gamma(j0 + 1.0);
  const double w0 = std::exp(log_w0);

  if (x < a0 + j0) {
    // Most of the mass lies below t: sum the lower tails, which keep full
    // relative accuracy, so the tail near 1 stays monotone after rounding.
    const double p0 = gamma_p_series(a0 + j0, x);
    double lower = w0 * p0;
    double density = 0.5 * w0 * std::exp(log_g(a0 + j0 - 1.0));
    {
      double w = w0;
      for (double j = j0 + 1.0;; j += 1.0) {
        w *= mu / j;
        lower += w * gamma_p_series(a0 + j, x);
        density += 0.5 * w * std::exp(log_g(a0 + j - 1.0));
        const double ratio = mu / (j + 1.0);
        if (ratio < 1.0 && w * ratio / (1.0 - ratio) < kTruncation) break;
        if (w == 0.0) break;
      }
    }
    {
      double w = w0, pj = p0, g = std::exp(log_g(a0 + j0 - 1.0));
      for (double j = j0 - 1.0; j >= 0.0; j -= 1.0) {
        const double a_j = a0 + j;
        w *= (j + 1.0) / mu;
        pj = std::min(1.0, pj + g);  // P(a_j) = P(a_j + 1) + g(a_j)
        g *= a_j / x;                // g(a_j - 1)
        lower += w * pj;
        density += 0.5 * w * g;
        const double ratio = j / mu;
        if (w * ratio / (1.0 - ratio) < kTruncation) break;
      }
    }
    return {std::clamp(1.0 - lower, 0.0, 1.0), density};
  }
  const double q0 = gamma_q(a0 + j0, x);
  const double g0 = std::exp(log_g(a0 + j0));          // g(a_j0)
  const double gm0 = std::exp(log_g(a0 + j0 - 1.0));   // g(a_j0 - 1)

  double tail = w0 * q0;
  double density = 0.5 * w0 * gm0;

  // upward: j = j0 + 1, j0 + 2, ...
  {
    double w = w0, q = q0, g = g0, gm = gm0;
    for (double j = j0 + 1.0;; j += 1.0) {
      const double a_prev = a0 + j - 1.0;
      w *= mu / j;
      q = std::min(1.0, q + g);    // Q(a_prev + 1)
      gm = g;                      // g(a_j - 1) = g(a_prev)
      g *= x / (a_prev + 1.0);     // g(a_j)
      tail += w * q;
      density += 0.5 * w * gm;
      const double ratio = mu / (j + 1.0);
      if (ratio < 1.0 && w * ratio / (1.0 - ratio) < kTruncation) break;
      if (w == 0.0) break;
    }
  }
  // downward: j = j0 - 1, ..., 0
  {
    double w = w0, q = q0, gm = gm0;
    for (double j = j0 - 1.0; j >= 0.0; j -= 1.0) {
      const double a_j = a0 + j;
      w *= (j + 1.0) / mu;
      q = std::max(0.0, q - gm);   // Q(a_j) = Q(a_j + 1) - g(a_j)
      const double g_here = gm;    // g(a_j)
      gm = g_here * a_j / x;       // g(a_j - 1)
      tail += w * q;
      density += 0.5 * w * gm;
      const double ratio = j / mu;
      if (w * ratio / (1.0 - ratio) < kTruncation) break;
    }
  }
  return {std::clamp(tail, 0.0, 1.0), density};
}

// Wichura's AS241 (PPND16): lower-tail standard normal quantile, ~1e-16 relative.
inline double normal_quantile_lower(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

// Debye polynomials u_1..u_6 of the uniform asymptotic expansion of I_nu,
// as (power, coefficient) pairs in p = nu / sqrt(nu^2 + tau^2).
struct Monomial {
  int power;
  double coeff;
};
inline constexpr std::array<Monomial, 2> kU1{{{1, 1.0 / 8}, {3, -5.0 / 24}}};
inline constexpr std::array<Monomial, 3> kU2{{{2, 9.0 / 128}, {4, -77.0 / 192}, {6, 385.0 / 1152}}};
inline constexpr std::array<Monomial, 4> kU3{
    {{3, 75.0 / 1024}, {5, -4563.0 / 5120}, {7, 17017.0 / 9216}, {9, -85085.0 / 82944}}};
inline constexpr std::array<Monomial, 5> kU4{{{4, 3675.0 / 32768},
                                              {6, -96833.0 / 40960},
                                              {8, 144001.0 / 16384},
                                              {10, -7436429.0 / 663552},
                                              {12, 37182145.0 / 7962624}}};
inline constexpr std::array<Monomial, 6> kU5{{{5, 59535.0 / 262144},
                                              {7, -67608983.0 / 9175040},
                                              {9, 250881631.0 / 5898240},
                                              {11, -108313205.0 / 1179648},
                                              {13, 5391411025.0 / 63700992},
                                              {15, -5391411025.0 / 191102976}}};
inline constexpr std::array<Monomial, 7> kU6{{{6, 2401245.0 / 4194304},
                                              {8, -388895895.0 / 14680064},
                                              {10, 1441372804469.0 / 6606028800},
                                              {12, -33010308331.0 / 47185920},
                                              {14, 4445922195.0 / 4194304},
                                              {16, -1169936192425.0 / 1528823808},
                                              {18, 5849680962125.0 / 27518828544}}};

// sum_j c_j p^j / nu^k written as sum_j c_j p^(j-k) s^-k so that nu = 0 is regular.
template <std::size_t N>
double debye_term(const std::array<Monomial, N>& poly, int k, double p, double inv_s) {
  double acc = 0.0;
  for (const auto& m : poly) acc += m.coeff * std::pow(p, m.power - k);
  return acc * std::pow(inv_s, k);
}

inline constexpr double kSeriesLimit = 50.0;

// log of sum_m (tau^2/4)^m / (m! (nu+1)_m), the normalized power series of I_nu.
inline double log_bessel_series_sum(double order, double tau) {
  const double z = 0.25 * tau * tau;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 100000; ++m) {
    term *= z / (m * (m + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::log(sum);
}

}  // namespace detail

/// P(Z > z) for a standard normal Z.
inline double normal_tail(double z) {
  detail::require_finite(z, "normal_tail argument");
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Q^{-1}(p): the z with P(Z > z) = p.
inline double normal_tail_inv(double p) {
  detail::require_open_prob(p, "normal_tail_inv probability");
  return -detail::normal_quantile_lower(p);
}

/// P(X > t) for X ~ noncentral chi-square(dof, noncentrality).
/// Absolute error below 1e-11; the Poisson mixture is truncated at a 1e-14 weight bound.
inline double chisq_tail(const ChiSqParams& params, double t) {
  detail::validate(params);
  if (std::isnan(t) || t < 0.0) throw domain_error("chisq_tail threshold must be >= 0");
  if (std::isinf(t)) return 0.0;
  return detail::noncentral_tail_density(params.dof, params.noncentrality, t).tail;
}

/// Density of the noncentral chi-square law at t > 0.
inline double chisq_density(const ChiSqParams& params, double t) {
  detail::validate(params);
  if (!(t > 0.0) || std::isinf(t)) throw domain_error("chisq_density argument must be positive and finite");
  return detail::noncentral_tail_density(params.dof, params.noncentrality, t).density;
}

/// Threshold t with chisq_tail(params, t) = p.
///
/// Bracketing bisection with safeguarded Newton steps. The residual on the
/// probability scale is driven below 1e-13 (or to the resolution of t).
inline double chisq_tail_inv(const ChiSqParams& params, double p) {
  detail::validate(params);
  detail::require_open_prob(p, "chisq_tail_inv probability");
  const double k = params.dof;
  const double lambda = params.noncentrality;

  auto eval = [&](double t) { return detail::noncentral_tail_density(params.dof, lambda, t); };

  // Starting point: normal approximation, kept inside (0, inf).
  const double mean = k + lambda;
  const double sd = std::sqrt(2.0 * (k + 2.0 * lambda));
  double t = std::max(mean + sd * normal_tail_inv(p), 0.05 * mean);

  double lo = 0.0;
  double hi = detail::kInf;
  constexpr double kResidual = 1e-13;
  for (int iter = 0; iter < 400; ++iter) {
    const auto [tail, dens] = eval(t);
    const double f = tail - p;  // decreasing in t
    if (std::fabs(f) <= kResidual) return t;
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return t;

    double next = (dens > 0.0 && std::isfinite(dens)) ? t + f / dens : std::numeric_limits<double>::quiet_NaN();
    const bool inside = std::isfinite(next) && next > lo && (std::isinf(hi) ? true : next < hi);
    if (!inside) {
      next = std::isinf(hi) ? std::max(2.0 * t, t + sd) : 0.5 * (lo + hi);
    }
    t = next;
  }
  return t;
}

/// Normal approximation sqrt(2(k + 2 lambda)) Q^{-1}(p) + k + lambda to the chi-square inverse tail.
inline double chisq_tail_inv_approx(const ChiSqParams& params, double p) {
  detail::validate(params);
  detail::require_open_prob(p, "chisq_tail_inv_approx probability");
  const double k = params.dof;
  const double lambda = params.noncentrality;
  return std::sqrt(2.0 * (k + 2.0 * lambda)) * normal_tail_inv(p) + k + lambda;
}

/// log I_order(tau), the modified Bessel function of the first kind.
///
/// Power series for tau <= 50, Debye uniform asymptotic expansion (six
/// correction terms) above. Returns -inf for tau == 0 with order > 0.
inline double log_bessel_i(double order, double tau) {
  detail::require_finite(order, "Bessel order");
  detail::require_finite(tau, "Bessel argument");
  if (order < 0.0) throw domain_error("Bessel order must be >= 0");
  if (tau < 0.0) throw domain_error("Bessel argument must be >= 0");
  if (tau == 0.0) return order == 0.0 ? 0.0 : -detail::kInf;

  if (tau <= detail::kSeriesLimit) {
    return order * std::log(0.5 * tau) - detail::log_gamma(order + 1.0) +
           detail::log_bessel_series_sum(order, tau);
  }
  const double s = std::hypot(order, tau);
  const double inv_s = 1.0 / s;
  const double p = order * inv_s;
  const double corr = 1.0 + detail::debye_term(detail::kU1, 1, p, inv_s) +
                      detail::debye_term(detail::kU2, 2, p, inv_s) +
                      detail::debye_term(detail::kU3, 3, p, inv_s) +
                      detail::debye_term(detail::kU4, 4, p, inv_s) +
                      detail::debye_term(detail::kU5, 5, p, inv_s) +
                      detail::debye_term(detail::kU6, 6, p, inv_s);
  const double eta = order == 0.0 ? s : s + order * std::log(tau / (order + s));
  return eta - 0.5 * std::log(2.0 * std::numbers::pi * s) + std::log(corr);
}

/// Sphere dimension and concentration for the von Mises-Fisher constant c_k(tau).
struct VmfArg {
  int k = 2;
  double tau = 0.0;
};

/// log c_k(tau) = (k/2-1) log tau - (k/2) log(2 pi) - log I_{k/2-1}(tau).
/// tau == 0 gives the uniform-on-sphere limit Gamma(k/2) / (2 pi^{k/2}).
inline double log_vmf_const(const VmfArg& arg) {
  if (arg.k < 2) throw domain_error("von Mises-Fisher dimension must be >= 2");
  detail::require_finite(arg.tau, "von Mises-Fisher concentration");
  if (arg.tau < 0.0) throw domain_error("von Mises-Fisher concentration must be >= 0");
  const double nu = 0.5 * arg.k - 1.0;
  const double half_k = 0.5 * arg.k;
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  if (arg.tau <= detail::kSeriesLimit) {
    // nu log tau - log I_nu(tau) = nu log 2 + log Gamma(nu+1) - log(series sum)
    const double series = arg.tau == 0.0 ? 0.0 : detail::log_bessel_series_sum(nu, arg.tau);
    return nu * std::numbers::ln2 + detail::log_gamma(nu + 1.0) - half_k * log_two_pi - series;
  }
  return nu * std::log(arg.tau) - half_k * log_two_pi - log_bessel_i(nu, arg.tau);
}

/// d/dtau log c_k(tau) = -I_{k/2}(tau) / I_{k/2-1}(tau).
inline double log_vmf_const_slope(const VmfArg& arg) {
  if (arg.k < 2) throw domain_error("von Mises-Fisher dimension must be >= 2");
  if (arg.tau < 0.0) throw domain_error("von Mises-Fisher concentration must be >= 0");
  if (arg.tau == 0.0) return 0.0;
  const double nu = 0.5 * arg.k - 1.0;
  return -std::exp(log_bessel_i(nu + 1.0, arg.tau) - log_bessel_i(nu, arg.tau));
}

/// tau >= 0 with log_vmf_const({k, tau}) == log_target.
/// Throws range_error when log_target exceeds log c_k(0) (the maximum).
inline double vmf_const_inv(int k, double log_target) {
  if (k < 2) throw domain_error("von Mises-Fisher dimension must be >= 2");
  if (std::isnan(log_target)) throw domain_error("log target must not be NaN");
  const double top = log_vmf_const({k, 0.0});
  if (log_target > top) throw range_error("log target above log c_k(0); no concentration attains it");
  if (log_target == top) return 0.0;
  if (std::isinf(log_target)) throw range_error("log target is -inf; attained only as tau -> inf");

  auto f = [&](double tau) { return log_vmf_const({k, tau}) - log_target; };  // decreasing
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  double tau = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double val = f(tau);
    if (val == 0.0) return tau;
    if (val > 0.0) {
      lo = tau;
    } else {
      hi = tau;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return tau;
    const double slope = log_vmf_const_slope({k, tau});
    double next = slope < 0.0 ? tau - val / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // the slope vanishes near tau = 0, so converge on the step rather than the residual
    if (std::fabs(next - tau) <= 1e-15 * tau) return next;
    tau = next;
  }
  return tau;
}

}  // namespace umm::specfun
