// SPDX-License-Identifier: Apache-2.0
// Reference values come from tests/oracles/compute_oracles.py.
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "umm/errors.hpp"
#include "umm/specfun.hpp"

namespace sf = umm::specfun;

namespace {

constexpr double kLn10 = 2.302585092994045684;
const double kT10 = 2.0 * kLn10;  // -2 ln 0.1

}  // namespace

// ---------------------------------------------------------------- normal tail

TEST(NormalTail, CentreIsHalf) { EXPECT_DOUBLE_EQ(sf::normal_tail(0.0), 0.5); }

TEST(NormalTail, SymmetricPairsSumToOne) {
  EXPECT_NEAR(sf::normal_tail(1.7) + sf::normal_tail(-1.7), 1.0, 1e-15);
  for (double z = -8.0; z <= 8.0; z += 0.05) EXPECT_NEAR(sf::normal_tail(z) + sf::normal_tail(-z), 1.0, 1e-12) << z;
}

TEST(NormalTail, MatchesQuadratureOracle) { EXPECT_NEAR(sf::normal_tail(1.2816), 0.0999915000976752, 1e-12); }

TEST(NormalTail, StrictlyDecreasingOnGrid) {
  double prev = sf::normal_tail(-8.0);
  for (double z = -7.99; z <= 8.0; z += 0.01) {
    const double cur = sf::normal_tail(z);
    // near 1 the true steps fall below an ulp, so neighbours may tie there
    if (prev < 1.0 - 1e-13) {
      EXPECT_LT(cur, prev) << z;
    } else {
      EXPECT_LE(cur, prev) << z;
    }
    prev = cur;
  }
}

TEST(NormalTail, FarTailKeepsRelativeAccuracy) {
  // Q(8) = 6.22096057427178e-16 (erfc closed form in extended precision)
  EXPECT_NEAR(sf::normal_tail(8.0) / 6.22096057427178e-16, 1.0, 1e-12);
}

TEST(NormalTail, RejectsNonFinite) {
  EXPECT_THROW(sf::normal_tail(std::numeric_limits<double>::quiet_NaN()), umm::domain_error);
  EXPECT_THROW(sf::normal_tail(std::numeric_limits<double>::infinity()), umm::domain_error);
}

TEST(NormalTailInv, HalfIsZero) { EXPECT_DOUBLE_EQ(sf::normal_tail_inv(0.5), 0.0); }

TEST(NormalTailInv, Antisymmetric) {
  EXPECT_NEAR(sf::normal_tail_inv(0.25), -sf::normal_tail_inv(0.75), 1e-14);
}

TEST(NormalTailInv, MatchesBisectionOracle) { EXPECT_NEAR(sf::normal_tail_inv(0.1), 1.2815515655445997, 1e-9); }

TEST(NormalTailInv, RoundTripOverRandomProbabilities) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-12.0, -1e-3);
  for (int i = 0; i < 2000; ++i) {
    const double p = std::pow(10.0, u(gen));
    EXPECT_NEAR(sf::normal_tail(sf::normal_tail_inv(p)), p, 1e-10) << p;
    EXPECT_NEAR(sf::normal_tail(sf::normal_tail_inv(1.0 - p)), 1.0 - p, 1e-10) << p;
  }
}

TEST(NormalTailInv, RejectsClosedEndpoints) {
  EXPECT_THROW(sf::normal_tail_inv(0.0), umm::domain_error);
  EXPECT_THROW(sf::normal_tail_inv(1.0), umm::domain_error);
  EXPECT_THROW(sf::normal_tail_inv(-0.2), umm::domain_error);
}

// --------------------------------------------------------------- chi-square

TEST(ChiSqTail, CentralTwoDofIsExponential) { EXPECT_NEAR(sf::chisq_tail({2, 0.0}, kT10), 0.1, 1e-14); }

TEST(ChiSqTail, OneDofIsTwoSidedNormal) {
  EXPECT_NEAR(sf::chisq_tail({1, 0.0}, 1.0), 2.0 * sf::normal_tail(1.0), 1e-14);
  for (double t = 0.01; t <= 50.0; t *= 1.15) {
    EXPECT_NEAR(sf::chisq_tail({1, 0.0}, t), 2.0 * sf::normal_tail(std::sqrt(t)), 1e-11) << t;
  }
}

TEST(ChiSqTail, NoncentralMatchesQuadratureAndMonteCarlo) {
  const double v = sf::chisq_tail({2, 4.0}, kT10);
  EXPECT_NEAR(v, 0.5422976956035088, 1e-9);
  // 1e7-draw simulation: 0.54195 with 3 sigma = 0.00047
  EXPECT_NEAR(v, 0.54195, 0.00047);
}

TEST(ChiSqTail, NoncentralTable) {
  struct Row {
    int k;
    double lambda, t, tail;
  };
  const Row rows[] = {
      {3, 10.0, 12.0, 0.5019323750223803},   {10, 50.0, 40.0, 0.9224337180343822},
      {1, 0.5, 2.0, 0.25669748785582136},    {50, 200.0, 300.0, 0.05298829935783433},
      {2, 1640.0, 1700.0, 0.23517627987494905},
  };
  for (const auto& r : rows) EXPECT_NEAR(sf::chisq_tail({r.k, r.lambda}, r.t), r.tail, 1e-9) << r.k << " " << r.lambda;
}

TEST(ChiSqTail, EdgeValues) {
  EXPECT_DOUBLE_EQ(sf::chisq_tail({3, 2.0}, 0.0), 1.0);
  EXPECT_LT(sf::chisq_tail({3, 2.0}, 400.0), 1e-60);
}

TEST(ChiSqTail, DecreasingInThresholdIncreasingInNoncentrality) {
  // absolute accuracy of the tail; closer to 1 than this, neighbours may tie
  constexpr double kResolution = 1e-11;
  for (int k : {1, 2, 5, 20}) {
    for (double lam : {0.0, 0.5, 4.0, 30.0}) {
      double prev = 1.0;
      for (double t = 0.05; t < 80.0; t *= 1.3) {
        const double cur = sf::chisq_tail({k, lam}, t);
        if (prev < 1.0 - kResolution) {
          EXPECT_LT(cur, prev) << k << " " << lam << " " << t;
        } else {
          EXPECT_LE(cur, prev) << k << " " << lam << " " << t;
        }
        prev = cur;
      }
    }
    for (double t : {0.5, 3.0, 15.0}) {
      double prev = -1.0;
      for (double lam = 0.0; lam < 40.0; lam += 2.5) {
        const double cur = sf::chisq_tail({k, lam}, t);
        if (prev < 1.0 - kResolution) {
          EXPECT_GT(cur, prev) << k << " " << lam << " " << t;
        } else {
          EXPECT_GE(cur, prev) << k << " " << lam << " " << t;
        }
        prev = cur;
      }
    }
  }
}

TEST(ChiSqTail, RejectsBadArguments) {
  EXPECT_THROW(sf::chisq_tail({2, 0.0}, -1.0), umm::domain_error);
  EXPECT_THROW(sf::chisq_tail({0, 0.0}, 1.0), umm::domain_error);
  EXPECT_THROW(sf::chisq_tail({2, -1.0}, 1.0), umm::domain_error);
}

TEST(ChiSqTailInv, CentralClosedForm) { EXPECT_NEAR(sf::chisq_tail_inv({2, 0.0}, 0.1), kT10, 1e-9); }

TEST(ChiSqTailInv, RoundTrip) {
  const double t = sf::chisq_tail_inv({5, 3.0}, 0.3);
  EXPECT_NEAR(sf::chisq_tail({5, 3.0}, t), 0.3, 1e-9);
}

TEST(ChiSqTailInv, NoncentralOracle) { EXPECT_NEAR(sf::chisq_tail_inv({2, 4.0}, 0.1), 12.06438436295003, 1e-9); }

TEST(ChiSqTailInv, RandomRoundTripsAndMonotone) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> dk(1, 60);
  std::uniform_real_distribution<double> dl(0.0, 200.0), dp(0.001, 0.999);
  for (int i = 0; i < 300; ++i) {
    const sf::ChiSqParams prm{dk(gen), dl(gen)};
    const double p = dp(gen);
    const double t = sf::chisq_tail_inv(prm, p);
    EXPECT_NEAR(sf::chisq_tail(prm, t), p, 1e-9) << prm.dof << " " << prm.noncentrality << " " << p;
    EXPECT_GT(sf::chisq_tail_inv(prm, p * 0.9), t);
  }
}

TEST(ChiSqTailInv, RejectsClosedEndpoints) {
  EXPECT_THROW(sf::chisq_tail_inv({2, 1.0}, 0.0), umm::domain_error);
  EXPECT_THROW(sf::chisq_tail_inv({2, 1.0}, 1.0), umm::domain_error);
}

TEST(ChiSqTailInvApprox, MedianIsDof) { EXPECT_DOUBLE_EQ(sf::chisq_tail_inv_approx({1000, 0.0}, 0.5), 1000.0); }

TEST(ChiSqTailInvApprox, DirectEvaluation) {
  EXPECT_NEAR(sf::chisq_tail_inv_approx({1000, 0.0}, 0.1), 1057.3127283445801, 1e-9);
  EXPECT_NEAR(sf::chisq_tail_inv_approx({1000, 0.0}, 0.1), 1000.0 + std::sqrt(2000.0) * 1.2815515655445997, 1e-9);
}

TEST(ChiSqTailInvApprox, ProbabilityGapShrinksWithDof) {
  const double oracle[] = {0.0075877760880496, 0.004214550171711823, 0.0015633847270091622};
  double prev = 1.0;
  int i = 0;
  for (int k : {10, 100, 1000}) {
    const double gap = std::fabs(sf::chisq_tail({k, 0.0}, sf::chisq_tail_inv_approx({k, 0.0}, 0.1)) - 0.1);
    EXPECT_NEAR(gap, oracle[i++], 1e-9) << k;
    EXPECT_LT(gap, prev) << k;
    prev = gap;
  }
}

// ------------------------------------------------------------------- Bessel

TEST(LogBesselI, OrderZeroAtOrigin) { EXPECT_DOUBLE_EQ(sf::log_bessel_i(0.0, 0.0), 0.0); }

TEST(LogBesselI, PositiveOrderAtOriginIsMinusInfinity) {
  EXPECT_EQ(sf::log_bessel_i(1.5, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(LogBesselI, HalfOrderClosedForm) {
  EXPECT_NEAR(sf::log_bessel_i(0.5, 1.0), std::log(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0)), 1e-13);
  EXPECT_NEAR(sf::log_bessel_i(0.5, 1.0), -0.0643519910735318, 1e-12);
}

TEST(LogBesselI, OracleTable) {
  struct Row {
    double order, tau, value;
  };
  const Row rows[] = {
      {1.0, 2.0, 0.4641344735461597},   {0.0, 50.0, 47.1275755018718},   {3.5, 0.01, -20.99784179820782},
      {10.0, 1e4, 9994.470903531823},   {31.0, 500.0, 495.0123539180848}, {0.5, 700.0, 695.8055212992737},
      {2.5, 30.0, 27.27879912218775},
  };
  // exp(result) relative error 1e-10 is the same as an absolute log error of 1e-10
  for (const auto& r : rows) EXPECT_NEAR(sf::log_bessel_i(r.order, r.tau), r.value, 1e-10) << r.order << " " << r.tau;
}

TEST(LogBesselI, ContinuousAcrossRegimeSwitch) {
  for (double order : {0.0, 0.5, 1.0, 4.0, 15.0, 31.0}) {
    // adjacent doubles, so the argument itself moves the value by ~1e-14 at most
    const double below = sf::log_bessel_i(order, sf::detail::kSeriesLimit);
    const double above = sf::log_bessel_i(order, std::nextafter(sf::detail::kSeriesLimit, 100.0));
    EXPECT_NEAR(below, above, 1e-10) << order;
  }
}

TEST(LogBesselI, RejectsNegativeArgument) { EXPECT_THROW(sf::log_bessel_i(1.0, -0.5), umm::domain_error); }

// ------------------------------------------------------- vMF normalizing constant

TEST(LogVmfConst, ThreeDimClosedForm) {
  const auto c3 = [](double tau) { return std::log(tau / (4.0 * std::numbers::pi * std::sinh(tau))); };
  EXPECT_NEAR(sf::log_vmf_const({3, 1.0}), c3(1.0), 1e-12);
  EXPECT_NEAR(sf::log_vmf_const({3, 1.0}), -2.6924636085404865, 1e-9);
  EXPECT_NEAR(sf::log_vmf_const({3, 2.0}), -3.126244439023514, 1e-9);
  EXPECT_LT(sf::log_vmf_const({3, 2.0}), sf::log_vmf_const({3, 1.0}));
}

TEST(LogVmfConst, UniformLimitAtZero) {
  // 1 / (sphere area): 1/(2 pi) on the circle, 1/(4 pi) on the 2-sphere
  EXPECT_NEAR(sf::log_vmf_const({2, 0.0}), -1.8378770664093453, 1e-12);
  EXPECT_NEAR(sf::log_vmf_const({3, 0.0}), -2.5310242469692907, 1e-12);
}

TEST(LogVmfConst, HigherDimOracle) { EXPECT_NEAR(sf::log_vmf_const({10, 7.5}), -5.606613655312251, 1e-9); }

TEST(LogVmfConst, StrictlyDecreasingForAllDims) {
  for (int k = 2; k <= 64; ++k) {
    double prev = sf::log_vmf_const({k, 0.0});
    for (double tau = 0.01; tau < 2000.0; tau *= 1.25) {
      const double cur = sf::log_vmf_const({k, tau});
      EXPECT_LT(cur, prev) << k << " " << tau;
      prev = cur;
    }
  }
}

TEST(LogVmfConst, SlopeMatchesBesselRatio) {
  const int k = 4;
  const double tau = 3.0, h = 1e-5;
  const double c = std::exp(sf::log_vmf_const({k, tau}));
  const double fd = (std::exp(sf::log_vmf_const({k, tau + h})) - std::exp(sf::log_vmf_const({k, tau - h}))) / (2 * h);
  const double ratio = std::exp(sf::log_bessel_i(k / 2.0, tau) - sf::log_bessel_i(k / 2.0 - 1.0, tau));
  EXPECT_NEAR(fd / (-ratio * c), 1.0, 1e-6);
  EXPECT_NEAR(sf::log_vmf_const_slope({k, tau}), -ratio, 1e-12);
}

TEST(LogVmfConst, RejectsBadArguments) {
  EXPECT_THROW(sf::log_vmf_const({1, 1.0}), umm::domain_error);
  EXPECT_THROW(sf::log_vmf_const({3, -1.0}), umm::domain_error);
}

TEST(VmfConstInv, RoundTrip) {
  EXPECT_NEAR(sf::vmf_const_inv(3, sf::log_vmf_const({3, 1.5})), 1.5, 1e-9);
  for (int k : {2, 5, 17, 64})
    for (double tau : {0.001, 0.3, 4.0, 60.0, 900.0})
      EXPECT_NEAR(sf::vmf_const_inv(k, sf::log_vmf_const({k, tau})), tau, 1e-9 * std::max(1.0, tau)) << k << " " << tau;
}

TEST(VmfConstInv, ClosedFormTarget) { EXPECT_NEAR(sf::vmf_const_inv(3, -2.6924636085404865), 1.0, 1e-9); }

TEST(VmfConstInv, LargerTargetGivesSmallerArgument) {
  double prev = std::numeric_limits<double>::infinity();
  for (double target = -40.0; target < -2.54; target += 0.5) {
    const double tau = sf::vmf_const_inv(3, target);
    EXPECT_LT(tau, prev) << target;
    prev = tau;
  }
}

TEST(VmfConstInv, OutOfRangeTarget) {
  EXPECT_THROW(sf::vmf_const_inv(3, -2.0), umm::range_error);
  EXPECT_THROW(sf::vmf_const_inv(3, std::numeric_limits<double>::quiet_NaN()), umm::domain_error);
}
