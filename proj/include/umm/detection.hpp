// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace umm {

enum class Decision { accept_null, reject_null };
enum class Hypothesis { null, alternative };
enum class Provenance { analytic, simulated };

inline const char* to_string(Provenance p) { return p == Provenance::analytic ? "analytic" : "simulated"; }

/// Binary decision together with the statistic and threshold that produced it.
/// The null is accepted iff statistic < threshold; ties reject.
struct DetectorVerdict {
  Decision decision = Decision::accept_null;
  double statistic = 0.0;
  double threshold = 0.0;

  static DetectorVerdict from(double statistic, double threshold) {
    return {statistic < threshold ? Decision::accept_null : Decision::reject_null, statistic, threshold};
  }
  bool accepts_null() const { return decision == Decision::accept_null; }
  friend bool operator==(const DetectorVerdict&, const DetectorVerdict&) = default;
};

/// True when the verdict is an error under the stated hypothesis
/// (false alarm under the null, missed detection under the alternative).
inline bool is_error(const DetectorVerdict& v, Hypothesis h) {
  return h == Hypothesis::null ? !v.accepts_null() : v.accepts_null();
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct TradeoffPoint {
  double p_fa = 0.0;
  double p_md = 0.0;
  std::optional<Interval> md_ci;     // simulated rows only
  std::optional<double> p_fa_hat;    // simulated false-alarm rate at this threshold
  std::optional<Interval> fa_ci;
  std::optional<double> md_std_error;
  std::optional<double> fa_std_error;
};

/// A point without simulation metadata.
inline TradeoffPoint make_point(double p_fa, double p_md) {
  TradeoffPoint pt;
  pt.p_fa = p_fa;
  pt.p_md = p_md;
  return pt;
}

/// Ordered (p_fa, p_md) pairs, p_fa strictly increasing.
struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  Provenance provenance = Provenance::analytic;
  std::string descriptor;
};

}  // namespace umm
