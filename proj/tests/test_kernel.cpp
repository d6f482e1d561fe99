#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frachs/errors.hpp"
#include "frachs/kernel.hpp"
#include "frachs/quadrature.hpp"

using namespace frachs;

TEST(Quadrature, GaussIntegratesPolynomials) {
  const QuadRule& g = gauss_legendre(6);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::pow(g.x[i], 11);
  EXPECT_NEAR(s, 1.0 / 12.0, 1e-15);
}

TEST(Quadrature, GradedRuleHandlesEndpointPower) {
  QuadRule q = graded_rule(45, 0.3, 10);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * std::pow(q.x[i], -0.5);
  EXPECT_NEAR(s, 2.0, 1e-11);
}

TEST(AngularKernel, OneDimensionalClosedForm) {
  const double r = 0.7, rho = 1.3, a = 0.6;
  EXPECT_NEAR(angular_kernel(1.0, a, r, rho),
              std::pow(rho - r, -1.0 - a) + std::pow(r + rho, -1.0 - a), 1e-12);
}

TEST(AngularKernel, ThreeDimensionalClosedFormMatchesQuadrature) {
  for (double a : {0.3, 1.0, 1.7}) {
    Kernel k(3.0, a);
    for (double tau : {0.0, 1e-6, 0.2, 0.6, 0.95, 0.999, 1.0 - 1e-7}) {
      const double closed = k.kappa(tau, 1.0 - tau);
      const double quad = k.kappa_quadrature(tau, 1.0 - tau);
      EXPECT_NEAR(quad / closed, 1.0, 1e-9) << a << " " << tau;
    }
  }
  // far separations: τ below the resolution of 1 − τ
  Kernel k3(3.0, 1.0);
  for (double t : {30.0, 50.0, 200.0}) {
    EXPECT_NEAR(k3.kappa_at(t) / k3.kappa_quadrature(std::exp(-t), -std::expm1(-t)), 1.0, 1e-12) << t;
  }
  // the physical-radius form
  const double r = 2.0, rho = 0.5, a = 1.0;
  const double expect = 2.0 * std::numbers::pi / (r * rho * (1.0 + a)) *
                        (std::pow(r - rho, -1.0 - a) - std::pow(r + rho, -1.0 - a));
  EXPECT_NEAR(angular_kernel(3.0, a, r, rho), expect, 1e-12);
}

TEST(AngularKernel, TwoDimensionalOracle) {
  // 2π ₂F₁(p, p; 1; τ²), p = (2+α)/2, evaluated at 30 digits
  struct C {
    double a, tau, v;
  };
  const C cases[] = {
      {0.5, 0.1, 6.3826173509038607183},  {0.5, 0.9, 80.357969253842739823},
      {0.5, 0.999, 75815.558747586250278}, {1.0, 0.5, 11.879905084938007316},
      {1.0, 0.999, 2001002.6251102351188}, {1.5, 0.9, 583.98681516666930645},
      {1.5, 0.999, 55305500.096257223122},
  };
  for (const auto& c : cases) {
    Kernel k(2.0, c.a);
    EXPECT_NEAR(k.kappa(c.tau, 1.0 - c.tau) / c.v, 1.0, 1e-9) << c.a << " " << c.tau;
  }
  Kernel k4(4.0, 1.0);
  EXPECT_NEAR(k4.kappa(0.3, 0.7) / 23.565476744051910592, 1.0, 1e-9);
  EXPECT_NEAR(k4.kappa(0.95, 0.05) / 1801.9930534657285296, 1.0, 1e-9);
}

TEST(AngularKernel, SymmetricAndSingular) {
  for (double n : {1.0, 2.0, 3.0}) {
    EXPECT_DOUBLE_EQ(angular_kernel(n, 0.8, 0.3, 0.9), angular_kernel(n, 0.8, 0.9, 0.3));
    EXPECT_THROW(angular_kernel(n, 0.8, 0.5, 0.5), DomainError);
  }
  EXPECT_THROW(Kernel(1.5, 0.5), DomainError);
}

TEST(AngularKernel, ScaledKernelLimits) {
  Kernel k(3.0, 1.0);
  // κ(0) = |S²|
  EXPECT_NEAR(k.kappa(0.0, 1.0), 4.0 * std::numbers::pi, 1e-14);
  // small t: κ ~ 2π/(1+α) (1−τ)^{−1−α}
  const double t = 1e-9;
  EXPECT_NEAR(k.scaled(t) * t * t / std::numbers::pi, 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(k.scaled(0.4), k.scaled(-0.4));
}

TEST(AngularKernel, TabulatedGeneralPathMatchesQuadrature) {
  for (double n : {2.0, 4.0, 2.5}) {
    for (double a : {0.4, 1.0, 1.6}) {
      Kernel tab(n, a);
      Kernel direct(n, a, false);
      for (double t : {3e-27, 1e-12, 1e-5, 0.013, 0.3, 1.0, 2.7, 9.0, 45.0, 200.0}) {
        const double ref = direct.kappa(std::exp(-t), -std::expm1(-t));
        EXPECT_NEAR(tab.kappa_at(t) / ref, 1.0, 1e-10) << n << " " << a << " " << t;
      }
    }
  }
}
