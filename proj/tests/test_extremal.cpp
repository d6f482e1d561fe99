#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "frachs/errors.hpp"
#include "frachs/extremal.hpp"

using namespace frachs;

namespace {

ProblemParams base(double gamma_frac, double s = 0.5) {
  return ProblemParams::make(3.0, 1.0, s, gamma_frac * hardy_constant(3.0, 1.0));
}

// shared forms for the ball [1e-6, 1] with N = 241
const AssembledForms& ball_forms() {
  static const AssembledForms f = assemble(RadialGrid(3.0, 241, 1e-6, 1.0), base(0.5));
  return f;
}

}  // namespace

TEST(Lambda1, DecreasingInGammaAndPositive) {
  const AssembledForms& f = ball_forms();
  double prev = 0.0;
  for (double frac : {0.0, 0.3, 0.6, 0.9, 0.99}) {
    const EigenResult e = lambda_1(f, base(frac));
    EXPECT_GT(e.value, 0.0) << frac;
    if (frac > 0.0) EXPECT_LT(e.value, prev) << frac;
    prev = e.value;
    EXPECT_LT(e.residual, 1e-8);
  }
}

TEST(Lambda1, PerronAgainstDenseEigensolver) {
  const ProblemParams p = base(0.5);
  const AssembledForms f = assemble(RadialGrid(3.0, 20, 1e-3, 1.0), p);
  const EigenResult e = lambda_1(f, p);

  const Eigen::MatrixXd K = f.interior_operator(p.gamma, 0.0);
  const Eigen::VectorXd w = f.mass.segment(1, K.rows()).array().rsqrt();
  const Eigen::MatrixXd S = w.asDiagonal() * K * w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  EXPECT_NEAR(e.value / es.eigenvalues()[0], 1.0, 1e-10);

  Eigen::VectorXd v = w.cwiseProduct(es.eigenvectors().col(0));
  if (v.maxCoeff() < -v.minCoeff()) v = -v;
  EXPECT_TRUE((v.array() > 0.0).all());
  const Eigen::VectorXd u = e.field.values.segment(1, K.rows());
  EXPECT_TRUE((u.array() > 0.0).all());
  EXPECT_NEAR(std::abs(u.normalized().dot(v.normalized())), 1.0, 1e-10);
}

TEST(Minimize, DescentNormalizationAndPositivity) {
  const ProblemParams p = base(0.5);
  const ExtremalResult r = minimize_mu(ball_forms(), p);
  ASSERT_FALSE(r.history.empty());
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    EXPECT_LE(r.history[k], r.history[k - 1] * (1.0 + 1e-14)) << k;
  }
  EXPECT_NEAR(sobolev_norm(ball_forms(), r.field.values), 1.0, 1e-10);
  EXPECT_GT(r.mu, 0.0);
  EXPECT_NEAR(r.kappa / r.mu, 1.0, 1e-6);
  EXPECT_NEAR(rayleigh_quotient(ball_forms(), p, r.field.values), r.mu, 1e-12 * r.mu);
  for (std::size_t i = 1; i + 1 < r.field.size(); ++i) EXPECT_GT(r.field[i], 0.0) << i;
}

TEST(Minimize, MonotoneChainInLambda) {
  const ProblemParams p = base(0.5);
  const double l1 = lambda_1(ball_forms(), p).value;
  const double m0 = minimize_mu(ball_forms(), p).mu;
  const double m5 = minimize_mu(ball_forms(), p.with_lambda(0.5 * l1)).mu;
  const double m99 = minimize_mu(ball_forms(), p.with_lambda(0.99 * l1)).mu;
  EXPECT_LT(m99, m5);
  EXPECT_LT(m5, m0);
  EXPECT_GT(m99, 0.0);
}

TEST(Minimize, Preconditions) {
  const AssembledForms& f = ball_forms();
  EXPECT_THROW(minimize_mu(f, base(0.5, 1.0)), PreconditionError);
  const double l1 = lambda_1(f, base(0.5)).value;
  EXPECT_THROW(minimize_mu(f, base(0.5).with_lambda(l1 * 1.001)), PreconditionError);
}

TEST(Minimize, DomainMonotonicity) {
  // nested log grids sharing nodes: r_min = 2^-20, h = ln2/12, R = 1 and R = 4
  const ProblemParams p = base(0.5);
  const double rmin = std::pow(2.0, -20.0);
  const AssembledForms small = assemble(RadialGrid(3.0, 241, rmin, 1.0), p);
  const AssembledForms large = assemble(RadialGrid(3.0, 265, rmin, 4.0), p);
  ASSERT_NEAR(small.grid.h(), large.grid.h(), 1e-14);
  const double mu_small = minimize_mu(small, p).mu;
  const double mu_large = minimize_mu(large, p).mu;
  EXPECT_GE(mu_small, mu_large);
}

TEST(Minimize, ScaleCoherenceOnWholeSpaceTruncation) {
  const ProblemParams p = base(0.5);
  const AssembledForms f = assemble(RadialGrid(3.0, 301, 1e-9, 1e3), p);
  const double mu = minimize_mu(f, p).mu;
  const RadialField u0(f.grid, default_initial_field(f.grid, p));
  for (double eps : {0.5, 2.0}) {
    MinimizeOptions o;
    RadialField b = bubble(f.grid, u0, p.alpha, eps);
    b.values[0] = 0.0;
    b.values[b.values.size() - 1] = 0.0;
    o.initial = b.values;
    EXPECT_NEAR(minimize_mu(f, p, o).mu / mu, 1.0, 1e-3) << eps;
  }
}

TEST(Minimize, ClassicalProfileAtZeroCoupling) {
  // γ = 0, s = 0: minimizer close to k (r² + ρ²)^{−(n−α)/2}
  const ProblemParams p = ProblemParams::make(3.0, 1.0, 0.0, 0.0);
  const AssembledForms f = assemble(RadialGrid(3.0, 301, 1e-6, 1e3), p);
  const ExtremalResult r = minimize_mu(f, p);
  const RadialField& u = r.field;
  const auto [lo, hi] = window_nodes(u.grid, {0.1, 0.9});
  double best = 0.0;
  const double rho0 = bubble_center(u, p.alpha);
  for (double t = -1.0; t <= 1.0; t += 0.01) {
    const double rho = rho0 * std::exp(t);
    Eigen::VectorXd a(static_cast<Eigen::Index>(hi - lo + 1)), b(a.size());
    for (std::size_t i = lo; i <= hi; ++i) {
      const double ri = u.grid.node(i);
      a[static_cast<Eigen::Index>(i - lo)] = u[i];
      b[static_cast<Eigen::Index>(i - lo)] = 1.0 / (ri * ri + rho * rho);
    }
    const double ca = a.mean(), cb = b.mean();
    const Eigen::VectorXd da = a.array() - ca, db = b.array() - cb;
    best = std::max(best, da.dot(db) / (da.norm() * db.norm()));
  }
  EXPECT_GE(best, 0.999);
}

TEST(FitExponents, ExactPowers) {
  const RadialGrid g(3.0, 201, 1e-8, 1.0);
  for (double beta : {0.3, 1.0, 1.7}) {
    const RadialField u = RadialField::sample(g, [&](double r) { return 2.5 * std::pow(r, -beta); });
    const ExponentFit e = fit_exponents(u);
    EXPECT_NEAR(e.beta0, beta, 1e-10);
    EXPECT_NEAR(e.betainf, beta, 1e-10);
    EXPECT_NEAR(e.lambda0, 2.5, 1e-9);
    EXPECT_NEAR(e.fit_r2, 1.0, 1e-12);
  }
}

TEST(FitExponents, TwoPowerProfileApproachesExponents) {
  const BetaPair b = beta_pm(3.0, 1.0, 0.5 * hardy_constant(3.0, 1.0));
  const RadialGrid g(3.0, 801, 1e-10, 1e10);
  const RadialField u = RadialField::sample(
      g, [&](double r) { return 1.0 / (std::pow(r, b.minus) + std::pow(r, b.plus)); });
  const ExponentFit inner = fit_exponents(u, {0.3, 0.4}, {0.6, 0.7});
  const ExponentFit outer = fit_exponents(u, {0.0, 0.1}, {0.9, 1.0});
  EXPECT_LT(std::abs(outer.beta0 - b.minus), std::abs(inner.beta0 - b.minus));
  EXPECT_LT(std::abs(outer.betainf - b.plus), std::abs(inner.betainf - b.plus));
  EXPECT_NEAR(outer.beta0, b.minus, 1e-3);
  EXPECT_NEAR(outer.betainf, b.plus, 1e-3);
}

TEST(FitExponents, Errors) {
  const RadialGrid g(3.0, 101, 1e-4, 1.0);
  RadialField u = RadialField::sample(g, [](double r) { return 1.0 / r; });
  u.values[25] = -1.0;
  EXPECT_THROW(fit_exponents(u), DomainError);
  EXPECT_THROW(window_nodes(g, {0.5, 0.4}), ConfigurationError);
  EXPECT_THROW(window_nodes(g, {0.5, 0.501}), ConfigurationError);
}

TEST(Bubble, IdentityInvarianceAndExponents) {
  const ProblemParams p = base(0.5);
  const AssembledForms f = assemble(RadialGrid(3.0, 401, 1e-10, 1e6), p);
  const RadialField U(f.grid, default_initial_field(f.grid, p));

  const RadialField same = bubble(f.grid, U, p.alpha, 1.0);
  EXPECT_EQ((same.values - U.values).cwiseAbs().maxCoeff(), 0.0);

  const double b0 = sobolev_norm(f, U.values);
  for (double eps : {0.1, 0.2, 0.5, 0.8}) {
    const RadialField ue = bubble(f.grid, U, p.alpha, eps);
    EXPECT_NEAR(sobolev_norm(f, ue.values) / b0, 1.0, 1e-3) << eps;
  }

  // node-aligned shift by 40 cells keeps the power laws
  const double eps = std::exp(-40.0 * f.grid.h());
  const RadialField ue = bubble(f.grid, U, p.alpha, eps);
  const ExponentFit a = fit_exponents(U, {0.2, 0.3}, {0.7, 0.8});
  const double shift = 40.0 / 400.0;
  const ExponentFit b = fit_exponents(ue, {0.2 - shift, 0.3 - shift}, {0.7 - shift, 0.8 - shift});
  EXPECT_NEAR(a.beta0, b.beta0, 1e-9);
  EXPECT_NEAR(a.betainf, b.betainf, 1e-9);

  EXPECT_THROW(bubble(f.grid, U, p.alpha, 0.0), DomainError);
  EXPECT_THROW(bubble(f.grid, U, p.alpha, 1e-30), DomainError);
}

TEST(Cutoff, SmoothStep) {
  const RadialGrid g(3.0, 201, 1e-3, 1.0);
  const RadialField eta = cutoff(g, 0.2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    if (r <= 0.2) EXPECT_EQ(eta[i], 1.0);
    if (r >= 0.4) EXPECT_EQ(eta[i], 0.0);
    EXPECT_GE(eta[i], 0.0);
    EXPECT_LE(eta[i], 1.0);
    if (i > 0) EXPECT_LE(eta[i], eta[i - 1]);
  }
}

TEST(Expansion, SyntheticSeriesRecovered) {
  std::vector<double> eps, val;
  for (int k = 0; k < 10; ++k) {
    const double e = std::pow(0.5, k + 2);
    eps.push_back(e);
    val.push_back(0.75 + 3.0 * std::pow(e, 0.7));
  }
  const ExpansionResult r = fit_expansion(eps, val);
  EXPECT_NEAR(r.slope, 0.7, 1e-10);
  EXPECT_NEAR(r.coefficient, 3.0, 1e-9);
  EXPECT_NEAR(r.limit, 0.75, 1e-12);
  EXPECT_TRUE(r.monotone);

  std::vector<double> bad = {1.0, 0.2, 0.9};
  EXPECT_THROW(fit_expansion({0.5, 0.25}, {1.0, 1.0}), ConfigurationError);
  EXPECT_THROW(fit_expansion({0.5, 0.25, 0.3}, bad), ConfigurationError);
}

TEST(Existence, ThresholdExamples) {
  EXPECT_EQ(existence_test(0.9, 1.0, 0.01), ExistenceVerdict::kExtremalsExist);
  EXPECT_EQ(existence_test(1.0 - 1e-4, 1.0, 0.01), ExistenceVerdict::kInconclusive);
  EXPECT_EQ(existence_test(1.2, 1.0, 0.01), ExistenceVerdict::kInconclusive);
  EXPECT_EQ(to_string(ExistenceVerdict::kExtremalsExist), "EXTREMALS_EXIST");
  EXPECT_EQ(to_string(ExistenceVerdict::kInconclusive), "INCONCLUSIVE");
}
