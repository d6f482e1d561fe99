#pragma once

// Hardy–Sobolev minimization on a radial grid: the first eigenvalue of the
// Hardy–Schrödinger operator, the Rayleigh quotient minimizer, power-law
// exponent fits and the ε-expansion of concentrating bubbles.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "frachs/radialops.hpp"

namespace frachs {

struct EigenResult {
  double value;
  RadialField field;  // positive max-magnitude entry, unit discrete L² norm
  int iterations;
  double residual;
};

/// Smallest eigenvalue of (gagliardo − γ·hardy, mass) by inverse power
/// iteration; γ is taken from `params`.
EigenResult lambda_1(const AssembledForms& forms, const ProblemParams& params,
                     int max_iter = 20000, double rel_tol = 1e-13);

/// B(u) = ∫ |u|^{2*} |x|^{−s} dx (lumped).
double sobolev_norm(const AssembledForms& forms, const Eigen::VectorXd& u);
/// A(u) = ⟨u, u⟩ − ∫ (γ|x|^{−α} + λ) u² dx with boundary values ignored.
double energy(const AssembledForms& forms, const ProblemParams& params, const Eigen::VectorXd& u);
/// J(u) = A(u) / B(u)^{2/2*}.
double rayleigh_quotient(const AssembledForms& forms, const ProblemParams& params,
                         const Eigen::VectorXd& u);

/// Sub-range of the log-range [log r_min, log R] given as fractions.
struct FitWindow {
  double lo;
  double hi;
};

struct MinimizeOptions {
  int max_iter = 20000;
  double rel_tol = 1e-10;   // relative J change
  double grad_tol = 1e-8;   // relative Euler–Lagrange residual
  std::optional<Eigen::VectorXd> initial;
  FitWindow head{0.2, 0.3};
  FitWindow tail{0.7, 0.8};
};

struct ExtremalResult {
  double mu;
  double kappa;
  RadialField field;  // B(field) = 1
  double fitted_beta0;
  double fitted_betainf;
  double fitted_lambda0;
  double fitted_lambdainf;
  double fit_r2;
  int iterations;
  double residual;
  std::vector<double> history;  // J after each accepted step
};

/// 1 / ((r/ρ)^{β−} + (r/ρ)^{β+}) with ρ the log-midpoint of the grid.
Eigen::VectorXd default_initial_field(const RadialGrid& grid, const ProblemParams& params);

/// Minimizes J over nonnegative grid functions vanishing at both boundary
/// nodes. Requires s < α and λ < λ₁ (PreconditionError otherwise).
ExtremalResult minimize_mu(const AssembledForms& forms, const ProblemParams& params,
                           const MinimizeOptions& options = {});

struct ExponentFit {
  double beta0;
  double betainf;
  double lambda0;
  double lambdainf;
  double fit_r2;  // smaller of the two window fits
};

/// Least-squares slopes of log u against log r on the two windows.
ExponentFit fit_exponents(const RadialField& u, FitWindow head = {0.2, 0.3},
                          FitWindow tail = {0.7, 0.8});

/// Nodes of `grid` whose log position lies in the window.
std::pair<std::size_t, std::size_t> window_nodes(const RadialGrid& grid, FitWindow w);

/// u_ε(r) = ε^{−(n−α)/2} U(r/ε) sampled on `target` (cubic interpolation of
/// log U in log r where U > 0, zero outside U's grid). Throws DomainError
/// when the maximum of r^{(n−α)/2}U is not inside the rescaled target range.
RadialField bubble(const RadialGrid& target, const RadialField& U, double alpha, double eps);

/// r_c with r^{(n−α)/2} U(r) maximal; the concentration scale of U.
double bubble_center(const RadialField& U, double alpha);

/// Smooth radial cut-off: 1 on [0, δ], 0 on [2δ, ∞).
double cutoff_value(double r, double delta);
RadialField cutoff(const RadialGrid& grid, double delta);

struct ExpansionResult {
  std::vector<double> eps;
  std::vector<double> values;  // J(η u_ε)
  double slope;
  double coefficient;  // c in J ≈ limit + c ε^slope
  double limit;
  bool monotone;
  std::string warning;
};

/// Evaluates J_0 on η u_ε for a geometric `eps_list` and extrapolates the
/// limit through successive differences. U is recentered so that its
/// concentration scale sits at r = 1 before rescaling.
ExpansionResult energy_expansion_check(const AssembledForms& forms, const ProblemParams& params,
                                       const RadialField& U, const RadialField& eta,
                                       const std::vector<double>& eps_list);

/// Fits values_k ≈ limit + c ε_k^d from successive differences.
ExpansionResult fit_expansion(const std::vector<double>& eps, const std::vector<double>& values);

enum class ExistenceVerdict { kExtremalsExist, kInconclusive };
std::string to_string(ExistenceVerdict v);

ExistenceVerdict existence_test(double mu_domain, double mu_rn, double rel_tol);

}  // namespace frachs
