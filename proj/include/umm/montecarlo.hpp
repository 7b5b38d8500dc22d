// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo harness. Every trial draws from its own counter-based
// stream keyed by (seed, trial index), so estimates do not depend on how
// trials are split across worker threads. Per-block partial results are
// reduced in block order, which keeps floating-point sums reproducible too.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <concepts>
#include <initializer_list>
#include <span>
#include <limits>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "umm/detection.hpp"
#include "umm/errors.hpp"
#include "umm/specfun.hpp"

namespace umm::mc {

struct McConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0x5eed'2015'0001ULL;
  unsigned workers = 1;
};

inline void validate(const McConfig& c) {
  if (c.trials < 100) throw config_error("trials must be >= 100");
  if (c.workers < 1) throw config_error("workers must be >= 1");
}

/// Probability estimate with a two-sided 95% interval.
struct McEstimate {
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  double std_error = 0.0;  // sqrt(p(1-p)/n) for proportions; sample SE for means

  bool covers(double p) const { return ci_low <= p && p <= ci_high; }
};

inline constexpr double kZ95 = 1.959963984540054;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a list of labels.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (auto l : labels) s = mix64(s ^ mix64(l + 0x9e3779b97f4a7c15ULL));
  return s;
}

/// Counter-based generator: output i is mix64(key + (i+1) * golden).
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : key_(mix64(seed ^ mix64(trial ^ 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }
  /// Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  /// Standard normal by inversion of the normal tail.
  double normal() { return specfun::normal_tail_inv(uniform()); }
  /// Categorical draw from cumulative probabilities (last entry == 1).
  std::size_t categorical(const std::vector<double>& cumulative) {
    const double u = uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Wilson score interval for `hits` successes out of `n`.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ95) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // rounding must not push the interval off p itself (exact 0 and 1 at the ends)
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

namespace detail {

inline constexpr std::uint64_t kBlock = 2048;

// Runs body(block_index, first_trial, last_trial) for every block, fanned out
// across `workers` threads with a static block-cyclic assignment.
template <class Body>
void for_each_block(std::uint64_t trials, unsigned workers, Body&& body) {
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  const unsigned used = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
  if (used <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) body(b, b * kBlock, std::min(trials, (b + 1) * kBlock));
    return;
  }
  std::vector<std::exception_ptr> errors(used);
  {
    std::vector<std::jthread> pool;
    pool.reserve(used);
    for (unsigned w = 0; w < used; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t b = w; b < blocks; b += used) body(b, b * kBlock, std::min(trials, (b + 1) * kBlock));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Frequency of `event(rng)` returning true, with a Wilson 95% interval.
template <class Event>
McEstimate estimate_probability(Event&& event, const McConfig& config) {
  validate(config);
  const std::uint64_t blocks = (config.trials + detail::kBlock - 1) / detail::kBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  detail::for_each_block(config.trials, config.workers, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t h = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      TrialRng rng(config.seed, i);
      if (event(rng)) ++h;
    }
    hits[b] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  McEstimate est;
  est.trials = config.trials;
  est.seed = config.seed;
  est.p_hat = static_cast<double>(total) / static_cast<double>(config.trials);
  std::tie(est.ci_low, est.ci_high) = wilson_interval(total, config.trials);
  est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(config.trials));
  return est;
}

/// Sample mean of `value(rng)` (values in [0,1]) with a normal-theory 95% interval.
template <class Value>
McEstimate estimate_mean(Value&& value, const McConfig& config) {
  validate(config);
  const std::uint64_t blocks = (config.trials + detail::kBlock - 1) / detail::kBlock;
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> squares(blocks, 0.0);
  detail::for_each_block(config.trials, config.workers, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      TrialRng rng(config.seed, i);
      const double v = value(rng);
      s += v;
      s2 += v * v;
    }
    sums[b] = s;
    squares[b] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    s += sums[b];
    s2 += squares[b];
  }
  const double n = static_cast<double>(config.trials);
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
  McEstimate est;
  est.trials = config.trials;
  est.seed = config.seed;
  est.p_hat = mean;
  est.std_error = std::sqrt(var / n);
  est.ci_low = std::max(0.0, mean - kZ95 * est.std_error);
  est.ci_high = std::min(1.0, mean + kZ95 * est.std_error);
  return est;
}

/// A deterministic value reported in McEstimate form (zero-width interval).
inline McEstimate exact_estimate(double p, std::uint64_t seed = 0) {
  McEstimate est;
  est.p_hat = p;
  est.ci_low = p;
  est.ci_high = p;
  est.seed = seed;
  return est;
}

/// A detector bound to a problem: draws one observation under `h` from `rng` and decides.
template <class D>
concept TrialDetector = requires(const D& d, TrialRng& rng, Hypothesis h) {
  { d.trial(rng, h) } -> std::convertible_to<DetectorVerdict>;
};

/// Frequency of the error event (false alarm under the null, miss under the alternative).
template <TrialDetector D>
McEstimate estimate_error_probs(const D& detector, Hypothesis hypothesis, const McConfig& config) {
  return estimate_probability([&](TrialRng& rng) { return is_error(detector.trial(rng, hypothesis), hypothesis); },
                              config);
}

/// Detector that never rejects; its error rates are exactly 0 (null) and 1 (alternative).
struct AlwaysAccept {
  DetectorVerdict trial(TrialRng&, Hypothesis) const { return {Decision::accept_null, 0.0, 1.0}; }
};

/// Simulated tradeoff curve: for each grid point, `family(p_fa)` yields a
/// TrialDetector whose false-alarm and missed-detection rates are estimated.
/// Each (point, hypothesis) pair draws from its own derived seed.
template <class Family>
TradeoffCurve roc_sweep(Family&& family, std::span<const double> p_fa_grid, const McConfig& config,
                        std::string descriptor = {}) {
  validate(config);
  TradeoffCurve curve;
  curve.provenance = Provenance::simulated;
  curve.descriptor = std::move(descriptor);
  for (std::size_t i = 0; i < p_fa_grid.size(); ++i) {
    const double p = p_fa_grid[i];
    if (!(p > 0.0 && p < 1.0)) throw domain_error("p_fa grid values must lie in (0,1)");
    if (i > 0 && !(p > p_fa_grid[i - 1])) throw domain_error("p_fa grid must be strictly increasing");
    const auto detector = family(p);
    McConfig fa_cfg = config;
    fa_cfg.seed = derive_seed(config.seed, {i, 0});
    McConfig md_cfg = config;
    md_cfg.seed = derive_seed(config.seed, {i, 1});
    const McEstimate fa = estimate_error_probs(detector, Hypothesis::null, fa_cfg);
    const McEstimate md = estimate_error_probs(detector, Hypothesis::alternative, md_cfg);
    TradeoffPoint pt;
    pt.p_fa = p;
    pt.p_md = md.p_hat;
    pt.md_ci = Interval{md.ci_low, md.ci_high};
    pt.md_std_error = md.std_error;
    pt.p_fa_hat = fa.p_hat;
    pt.fa_ci = Interval{fa.ci_low, fa.ci_high};
    pt.fa_std_error = fa.std_error;
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace umm::mc
