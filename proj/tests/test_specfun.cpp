#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "frachs/errors.hpp"
#include "frachs/specfun.hpp"

using namespace frachs;
using boost::multiprecision::cpp_bin_float_50;

namespace {

double oracle_lgamma(double x) {
  cpp_bin_float_50 v = boost::math::lgamma(cpp_bin_float_50(x));
  return static_cast<double>(v);
}

std::vector<std::pair<double, double>> nalpha_grid() {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < 10; ++i) {
    const double n = 1.0 + 0.9 * i;
    for (int j = 0; j < 10; ++j) {
      const double amax = std::min(2.0, n);
      out.emplace_back(n, amax * (0.05 + 0.09 * j));
    }
  }
  return out;
}

}  // namespace

TEST(LogGamma, TrivialValues) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-16);
  EXPECT_NEAR(log_gamma(2.0), 0.0, 1e-16);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
}

TEST(LogGamma, MatchesHighPrecisionOracle) {
  double worst = 0.0;
  for (double x = 0.1; x <= 200.0; x *= 1.0137) {
    const double ref = oracle_lgamma(x);
    const double got = log_gamma(x);
    // relative error of Γ itself is the absolute error of ln Γ; where ln Γ is
    // large, compare relatively.
    const double err = std::abs(got - ref) / std::max(1.0, std::abs(ref));
    worst = std::max(worst, err);
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(LogGamma, AccurateNearZerosOfLogGamma) {
  for (double x : {0.999, 1.0 + 1e-9, 1.2, 1.9, 2.0 - 1e-7, 2.1}) {
    const double ref = oracle_lgamma(x);
    EXPECT_NEAR(log_gamma(x), ref, 1e-15 + 1e-13 * std::abs(ref)) << x;
  }
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-1.5), DomainError);
}

TEST(HardyConstant, Oracles) {
  // 50-digit values
  EXPECT_NEAR(hardy_constant(2.0, 1.0), 0.22847329052223181268748, 1e-14);
  EXPECT_NEAR(hardy_constant(3.0, 1.0), 2.0 / std::numbers::pi, 1e-14);
}

TEST(HardyConstant, EqualsPsiAtMidpoint) {
  for (auto [n, a] : nalpha_grid()) {
    EXPECT_NEAR(psi(n, a, (n - a) / 2.0), hardy_constant(n, a), 1e-12) << n << " " << a;
  }
}

TEST(HardyConstant, ClassicalLimit) {
  for (double n : {3.0, 4.0, 5.0}) {
    std::vector<double> v;
    for (int k = 2; k <= 6; ++k) v.push_back(hardy_constant(n, 2.0 - std::pow(10.0, -k)));
    // linear extrapolation in the step 10^{-k} from the last two samples
    const double extrap = v[4] + (v[4] - v[3]) / 9.0;
    EXPECT_LT(std::abs(extrap - (n - 2.0) * (n - 2.0) / 4.0), 1e-4) << n;
  }
  EXPECT_THROW(hardy_constant(1.0, 1.0), DomainError);
}

TEST(CNAlpha, Oracles) {
  EXPECT_NEAR(c_n_alpha(1.0, 1.0), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(c_n_alpha(3.0, 1.0), 0.10132118364233777144, 1e-15);
  for (auto [n, a] : nalpha_grid()) EXPECT_GT(c_n_alpha(n, a), 0.0);
  EXPECT_THROW(c_n_alpha(3.0, 0.0), DomainError);
  EXPECT_THROW(c_n_alpha(3.0, 2.0), DomainError);
}

TEST(SphereArea, Values) {
  EXPECT_NEAR(sphere_area(1.0), 2.0, 1e-14);
  EXPECT_NEAR(sphere_area(2.0), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(3.0), 4.0 * std::numbers::pi, 1e-13);
}

TEST(Psi, SymmetryOverGrid) {
  for (auto [n, a] : nalpha_grid()) {
    const double top = n - a;
    for (int k = 1; k <= 100; ++k) {
      const double b = top * k / 101.0;
      EXPECT_NEAR(psi(n, a, b), psi(n, a, top - b), 1e-12) << n << " " << a << " " << b;
    }
  }
}

TEST(Psi, MonotoneOnEachHalf) {
  for (auto [n, a] : nalpha_grid()) {
    const double half = (n - a) / 2.0;
    double prev = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double v = psi(n, a, half * k / 50.0);
      EXPECT_GT(v, prev);
      prev = v;
    }
    for (int k = 1; k < 50; ++k) {
      const double v = psi(n, a, half + half * k / 50.0);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(Psi, EndpointLimits) {
  for (auto [n, a] : nalpha_grid()) {
    const double top = n - a;
    EXPECT_EQ(psi(n, a, 0.0), 0.0);
    EXPECT_EQ(psi(n, a, top), 0.0);
    EXPECT_LT(psi(n, a, 1e-10 * top), 1e-6);
    EXPECT_LT(psi(n, a, top * (1.0 - 1e-10)), 1e-6);
  }
  EXPECT_THROW(psi(3.0, 1.0, -0.1), DomainError);
  EXPECT_THROW(psi(3.0, 1.0, 2.1), DomainError);
}

TEST(BetaPm, EndpointConventions) {
  auto b0 = beta_pm(3.0, 1.0, 0.0);
  EXPECT_EQ(b0.minus, 0.0);
  EXPECT_EQ(b0.plus, 2.0);
  auto bh = beta_pm(3.0, 1.0, hardy_constant(3.0, 1.0));
  EXPECT_EQ(bh.minus, 1.0);
  EXPECT_EQ(bh.plus, 1.0);
  EXPECT_THROW(beta_pm(3.0, 1.0, -0.01), DomainError);
  EXPECT_THROW(beta_pm(3.0, 1.0, 0.7), DomainError);
}

TEST(BetaPm, FrozenRoots) {
  struct Case {
    double n, a;
    double bm[3];
  };
  // roots of Ψ = f·γ_H, f ∈ {1/4, 1/2, 3/4}, 50-digit bisection
  const Case cases[] = {
      {3.0, 1.0, {0.113030090815, 0.257980703593, 0.462227642726}},
      {1.0, 0.5, {0.0305596495313, 0.068338214961, 0.119714854948}},
      {2.0, 1.0, {0.0622778568866, 0.138676122888, 0.24167301852}},
      {3.0, 1.5, {0.0964280902299, 0.213081603536, 0.368045032665}},
      {1.0, 0.75, {0.0164967731203, 0.0362020930876, 0.0620642881172}},
  };
  const double fr[3] = {0.25, 0.5, 0.75};
  for (const auto& c : cases) {
    for (int k = 0; k < 3; ++k) {
      auto b = beta_pm(c.n, c.a, fr[k] * hardy_constant(c.n, c.a));
      EXPECT_NEAR(b.minus, c.bm[k], 1e-11);
      EXPECT_EQ(b.minus + b.plus, c.n - c.a);
    }
  }
}

TEST(BetaPm, RootConsistency) {
  for (auto [n, a] : nalpha_grid()) {
    const double gh = hardy_constant(n, a);
    for (double f : {0.1, 0.5, 0.9}) {
      auto b = beta_pm(n, a, f * gh);
      EXPECT_NEAR(psi(n, a, b.minus), f * gh, 1e-10);
      EXPECT_NEAR(psi(n, a, b.plus), f * gh, 1e-10);
      EXPECT_LE(b.minus, (n - a) / 2.0);
      EXPECT_EQ(b.minus + b.plus, n - a);
    }
  }
}

TEST(GammaCrit, Cases) {
  EXPECT_EQ(gamma_crit(2.0, 1.0), 0.0);
  EXPECT_EQ(gamma_crit(1.0, 0.75), -1.0);
  EXPECT_NEAR(gamma_crit(3.0, 1.0), 0.5, 1e-13);
  for (auto [n, a] : nalpha_grid()) {
    const double gc = gamma_crit(n, a);
    EXPECT_GE(gc, -1.0);
    EXPECT_LT(gc, hardy_constant(n, a));
    if (n > 2.0 * a) {
      EXPECT_NEAR(beta_pm(n, a, gc).plus, n / 2.0, 1e-10);
      const double mid = 0.5 * (gc + hardy_constant(n, a));
      EXPECT_LT(beta_pm(n, a, mid).plus, n / 2.0);
    }
  }
}

TEST(CritExponent, Values) {
  EXPECT_DOUBLE_EQ(crit_exponent(3.0, 1.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(crit_exponent(3.0, 1.0, 0.0), 3.0);
  EXPECT_NEAR(crit_exponent(4.0, 1.0, 0.5), 7.0 / 3.0, 1e-15);
}

TEST(ProblemParams, Validation) {
  EXPECT_NO_THROW(ProblemParams::make(3.0, 1.0, 0.5, 0.3, 1.0));
  EXPECT_THROW(ProblemParams::make(3.0, 2.0, 0.5, 0.3), DomainError);
  EXPECT_THROW(ProblemParams::make(1.0, 1.0, 0.5, 0.0), DomainError);
  EXPECT_THROW(ProblemParams::make(3.0, 1.0, 1.5, 0.3), DomainError);
  EXPECT_THROW(ProblemParams::make(3.0, 1.0, 0.5, 0.64), DomainError);
  EXPECT_THROW(ProblemParams::make(3.0, 1.0, 0.5, 0.3, -1.0), DomainError);
  auto p = ProblemParams::make(3.0, 1.0, 0.5, 0.3);
  EXPECT_EQ(p.with_gamma(0.1).gamma, 0.1);
  EXPECT_THROW(p.with_gamma(1.0), DomainError);
}
