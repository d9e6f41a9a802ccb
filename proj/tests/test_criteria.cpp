#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "dpower/criteria.hpp"

using namespace dpower;

namespace {

// Frozen from a 40-digit mpmath evaluation of the defining formulas.
constexpr double kBeta_2_3over16 = 0.40314352831930172;
constexpr double kFBeta_2_3over16 = 0.021414510084623863;
constexpr double kBeta_2_001 = 0.015172657143597879;
constexpr double kNewton_2_001 = 0.11454753722794960;
constexpr double kKAlpha_2_001 = 0.032131211227273723;
constexpr double kOmegaStar2 = 0.089834679560764584;
constexpr double kOmegaStar3 = 0.050145687674592836;

} // namespace

TEST(Existence, OpenInterval) {
  EXPECT_FALSE(existence_check(Params(1, 2.0, 0.25)));
  EXPECT_TRUE(existence_check(Params(1, 2.0, 0.2)));
  EXPECT_FALSE(existence_check(Params(1, 3.0, 0.1875)));
  EXPECT_TRUE(existence_check(Params(1, 3.0, std::nextafter(0.1875, 0.0))));
}

TEST(KFunction, ValueAtBeta) {
  const Params prm(1, 2.0, 3.0 / 16);
  EXPECT_NEAR(k_function(kBeta_2_3over16, prm), -kFBeta_2_3over16, 1e-13);
  const auto cp = critical_points(prm);
  EXPECT_NEAR(k_function(*cp.beta, prm), -eval_f(*cp.beta, prm), 1e-15);
  EXPECT_LT(k_function(*cp.beta, prm), 0.0);
  // f(c) = 0 leaves the linear term, which is negative since f'(c) < 0.
  EXPECT_NEAR(k_function(*cp.c, prm), eval_f1(*cp.c, prm) * (*cp.c - *cp.beta), 1e-14);
  EXPECT_LT(k_function(*cp.c, prm), 0.0);
}

TEST(KFunction, RequiresBeta) {
  EXPECT_THROW(k_function(0.5, Params(1, 2.0, 0.23)), DomainError);
}

TEST(KFunction, DerivativeMatchesCentralDifference) {
  for (double p : {1.5, 2.0, 3.0, 5.0})
    for (double frac : {0.2, 0.5, 0.8, 0.95}) {
      const Params prm(1, p, frac * omega_p(p));
      const auto cp = critical_points(prm);
      for (int i = 1; i <= 100; ++i) {
        const double u = *cp.beta + (*cp.c - *cp.beta) * i / 101.0;
        const double h = 1e-6 * std::max(1.0, u);
        const double fd = (k_function(u + h, prm) - k_function(u - h, prm)) / (2 * h);
        const double exact = k_derivative(u, prm);
        EXPECT_LT(std::abs(exact - fd) / std::max(1.0, std::abs(exact)), 1e-6);
      }
    }
}

TEST(BasicCriterion, Examples) {
  const Params edge(1, 2.0, 1.0 / 6);
  EXPECT_TRUE(basic_criterion(edge));
  const auto cp = critical_points(edge);
  EXPECT_NEAR(cp.alpha, 1.0 / 3, 1e-15);
  EXPECT_NEAR(*cp.beta, 1.0 / 3, 1e-12);
  EXPECT_TRUE(basic_criterion(Params(1, 2.0, 0.2)));
  EXPECT_FALSE(basic_criterion(Params(1, 2.0, 0.01)));
}

TEST(BasicCriterion, ThresholdIsWhereAlphaMeetsBeta) {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    auto gap = [p](double w) {
      const auto cp = critical_points(Params(1, p, w));
      return *cp.beta - cp.alpha;
    };
    const Bracket br = bisect_root(gap, 1e-6 * omega_p(p), omega_p(p) * (1 - 1e-12), 1e-12);
    EXPECT_NEAR(br.mid(), a_p(p), 1e-10) << "p=" << p;
  }
}

TEST(ExtendedCriterion, SmallOmegaFails) {
  const Params prm(1, 2.0, 0.01);
  const ExtendedResult r = extended_criterion(prm);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.k_alpha, kKAlpha_2_001, 1e-13);
  ASSERT_TRUE(r.newton_point);
  EXPECT_NEAR(*r.newton_point, kNewton_2_001, 1e-13);
  EXPECT_NEAR(*critical_points(prm).beta, kBeta_2_001, 1e-15);
  EXPECT_GT(*r.newton_point, *critical_points(prm).beta);
}

TEST(ExtendedCriterion, HoldsJustBelowThreshold) {
  const Params prm(1, 2.0, a_p(2.0) - 1e-6);
  const ExtendedResult r = extended_criterion(prm);
  EXPECT_TRUE(r.holds);
  const auto cp = critical_points(prm);
  EXPECT_NEAR(r.k_alpha, -eval_f(*cp.beta, prm), 1e-4);
}

TEST(ExtendedCriterion, PreconditionViolations) {
  EXPECT_THROW(extended_criterion(Params(1, 2.0, 0.2)), std::invalid_argument);
  EXPECT_THROW(extended_criterion(Params(1, 2.0, 0.23)), DomainError);
}

TEST(ExtendedCriterion, NewtonStepIdentityAndLowerBound) {
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const double alpha = critical_points(Params(1, p, 0.5 * omega_p(p))).alpha;
    const double t = std::pow(alpha, p - 1);
    EXPECT_NEAR(1 - 2 * t, (p - 1) / (2 * p - 1), 1e-14);
    const double numer = (p - 1) * std::pow(alpha, p) * (1 - 2 * t);
    const double bound = numer / (p * t - (2 * p - 1) * t * t);
    EXPECT_GT(bound, 0.0);
    for (int k = 1; k <= 99; ++k) {
      const Params prm(1, p, omega_p(p) * k / 100.0);
      const double slope = eval_f1(alpha, prm);
      ASSERT_GT(slope, 0.0);
      const double newton = alpha - eval_f(alpha, prm) / slope;
      EXPECT_NEAR(newton, numer / slope, 1e-10);
      EXPECT_GT(newton, bound);
      EXPECT_GT(newton, 0.0);
    }
  }
}

TEST(GScan, MonotoneWhereTheoremApplies) {
  EXPECT_TRUE(g_monotone_scan(Params(1, 2.0, 0.2), 1000));
  EXPECT_TRUE(g_monotone_scan(Params(1, 2.0, 1.0 / 6), 1000));
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0})
    for (double s : {0.0, 0.25, 0.5, 0.75, 0.999}) {
      const double w = a_p(p) + s * (omega_p(p) - a_p(p));
      EXPECT_TRUE(g_monotone_scan(Params(1, p, w), 1000)) << p << " " << w;
    }
  EXPECT_FALSE(g_monotone_scan(Params(1, 2.0, 0.25), 1000));
}

TEST(GScan, SmallOmegaIsOnlyRecorded) {
  // No claim either way for small omega; the value is just reported.
  const bool scan = g_monotone_scan(Params(1, 2.0, 0.01), 1000);
  EXPECT_EQ(scan, classify(Params(1, 2.0, 0.01)).g_scan_monotone);
}

TEST(KFunction, NegativeOnBetaCWhenBasicHolds) {
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0})
    for (int k = 0; k <= 10; ++k) {
      const double w = a_p(p) + (0.999 * omega_p(p) - a_p(p)) * k / 10.0;
      const auto kmax = k_grid_max(Params(1, p, w), 1000);
      ASSERT_TRUE(kmax);
      EXPECT_LT(*kmax, 0.0) << "p=" << p << " omega=" << w;
    }
}

TEST(KFunction, MaximumSitsAtAlphaWhenAlphaExceedsBeta) {
  for (double p : {1.5, 2.0, 3.0})
    for (double frac : {0.05, 0.3, 0.6}) {
      const Params prm(1, p, frac * a_p(p));
      const ExtendedResult r = extended_criterion(prm);
      const auto kmax = k_grid_max(prm, 20000);
      ASSERT_TRUE(kmax);
      EXPECT_LE(*kmax, r.k_alpha + 1e-14);
      EXPECT_NEAR(*kmax, r.k_alpha, 1e-6);
    }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Params(1, 2.0, 0.2)).classification, Classification::UniqueByBasic);
  EXPECT_EQ(classify(Params(1, 2.0, 0.25)).classification, Classification::NoSolution);
  EXPECT_EQ(classify(Params(1, 2.0, 0.01)).classification, Classification::Undetermined);
  EXPECT_EQ(classify(Params(1, 2.0, 1.0 / 6)).classification, Classification::UniqueByBasic);
  EXPECT_EQ(classify(Params(1, 3.0, 0.1875)).classification, Classification::NoSolution);
  EXPECT_EQ(classify(Params(1, 2.0, 0.12)).classification, Classification::UniqueByExtended);

  const CriterionReport r = classify(Params(1, 2.0, 0.01));
  EXPECT_EQ(r.h1_limit, -0.01);
  ASSERT_TRUE(r.extended_holds);
  EXPECT_FALSE(*r.extended_holds);
  ASSERT_TRUE(r.k_alpha);
  EXPECT_NEAR(*r.k_alpha, kKAlpha_2_001, 1e-13);
}

TEST(Classify, InvariantsOnRandomParameters) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> log_p(std::log(1.05), std::log(10.0));
  std::uniform_real_distribution<double> frac(0.001, 1.3);
  for (int i = 0; i < 2000; ++i) {
    const double p = std::exp(log_p(rng));
    const Params prm(1 + i % 4, p, frac(rng) * omega_p(p));
    const CriterionReport r = classify(prm);
    EXPECT_EQ(r.classification == Classification::NoSolution, !r.exists);
    if (r.exists && r.basic_holds) {
      EXPECT_EQ(r.classification, Classification::UniqueByBasic);
    }
    if (r.classification == Classification::UniqueByExtended) {
      EXPECT_TRUE(r.exists && !r.basic_holds && r.extended_holds && *r.extended_holds);
    }
    EXPECT_EQ(r.extended_holds.has_value(), r.exists && !r.basic_holds);
    EXPECT_EQ(r.points.beta.has_value(), r.exists);
    if (r.exists && r.basic_holds) {
      EXPECT_TRUE(r.g_scan_monotone);
    }
    // Pure function: repeated evaluation yields the same report.
    EXPECT_EQ(classify(prm), r);
  }
}

TEST(OmegaStar, KnownValues) {
  const double w2 = find_omega_star(2.0);
  EXPECT_GT(w2, 0.01);
  EXPECT_LT(w2, 1.0 / 6);
  EXPECT_NEAR(w2, kOmegaStar2, 1e-9);
  EXPECT_NEAR(k_alpha_of_omega(2.0, w2), 0.0, 1e-8);

  const double w3 = find_omega_star(3.0);
  EXPECT_GT(w3, 0.0);
  EXPECT_LT(w3, 0.12);
  EXPECT_NEAR(w3, kOmegaStar3, 1e-9);
}

TEST(OmegaStar, BracketSignsAndFlip) {
  EXPECT_GT(k_alpha_of_omega(2.0, 0.01), 0.0);
  EXPECT_LT(k_alpha_of_omega(2.0, 1.0 / 6 - 1e-6), 0.0);
  for (double p : {1.3, 1.5, 2.0, 3.0, 5.0, 8.0}) {
    const double w = find_omega_star(p);
    EXPECT_GT(w, 0.0);
    EXPECT_LT(w, a_p(p));
    EXPECT_EQ(classify(Params(1, p, w * (1 - 1e-6))).classification, Classification::Undetermined);
    EXPECT_EQ(classify(Params(1, p, w * (1 + 1e-6))).classification,
              Classification::UniqueByExtended);
    // Extended criterion fails near omega = 0.
    EXPECT_FALSE(extended_criterion(Params(1, p, 1e-3 * a_p(p))).holds);
  }
}

TEST(OmegaStar, Deterministic) { EXPECT_EQ(find_omega_star(2.5), find_omega_star(2.5)); }

TEST(Bisect, RejectsMissingSignChange) {
  EXPECT_THROW(bisect_root([](double x) { return x * x + 1; }, -1.0, 1.0, 1e-12), BracketError);
  const Bracket br = bisect_root([](double x) { return x * x - 2; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(br.mid(), std::sqrt(2.0), 1e-13);
}
