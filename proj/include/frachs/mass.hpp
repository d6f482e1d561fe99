#pragma once

// Singular profile H = η r^{−β+} + g of the Hardy–Schrödinger operator on a
// ball and the coefficient of r^{−β−} in the corrector g (the mass).

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "frachs/extremal.hpp"
#include "frachs/radialops.hpp"

namespace frachs {

/// Ψ_h(β): a(r^{−β}, φ_i) / (hardy_i r_i^{−β}) at the middle node, with r^{−β}
/// continued analytically on both sides. The lattice counterpart of Ψ.
double discrete_psi(const AssembledForms& forms, double beta);

/// Roots of Ψ_h(β) = γ on either side of the maximum of Ψ_h.
BetaPair discrete_beta_pm(const AssembledForms& forms, double gamma);

/// Nodal f with mass_i f_i = −[a(ηr^{−β+}, φ_i) − (γ hardy_i + λ mass_i)(ηr^{−β+})_i],
/// the action on r^{−β+} taken from the lattice symbol Ψ_h (so the hole side
/// is the exact lattice continuation). Zero at the boundary nodes.
/// `beta_plus` defaults to the discrete exponent. Requires γ > γ_crit.
RadialField singular_rhs(const AssembledForms& forms, const ProblemParams& params,
                         const RadialField& eta, std::optional<double> beta_plus = std::nullopt);

enum class SolverPath { kDirect, kIterative };

/// g with (gagliardo − γ·hardy − λ·mass) g = mass ∘ f on the interior nodes.
/// Throws PreconditionError unless λ < λ₁ (pass `lambda1` to skip recomputing it).
RadialField solve_corrector(const AssembledForms& forms, const ProblemParams& params,
                            const RadialField& f, SolverPath path = SolverPath::kDirect,
                            std::optional<double> lambda1 = std::nullopt);

struct MassFit {
  double mass;
  double std_error;
  double fit_r2;  // uncentered: 1 − Σ res² / Σ y², y = g r^{β−}
  std::pair<std::size_t, std::size_t> window;
  std::vector<double> nested;  // mass on the nested windows, main first
  double drift;
  double uncertainty;
  bool trusted;
};

/// Fits g r^{β−} = m + d₁ (r/r_min)^{−(β+−β−)} [+ d₂ r^{α−(β+−β−)} when λ ≠ 0]
/// on the window and on two nested windows shrinking toward r_min.
MassFit extract_mass(const RadialField& g, const ProblemParams& params, BetaPair betas,
                     FitWindow window = {0.2, 0.4});

struct MassOptions {
  double eta_delta = 0.2;
  FitWindow window{0.2, 0.4};
  bool discrete_exponents = true;
  std::optional<double> lambda1;
};

struct MassResult {
  double mass;
  RadialField corrector;
  RadialField profile;
  RadialField eta;
  std::pair<std::size_t, std::size_t> fit_window;
  double fit_r2;
  double drift;
  double uncertainty;
  std::vector<double> nested;
  bool trusted;
  double lambda_used;
  double lambda1;
  bool coercive;
  BetaPair betas;       // exponents used in the construction
  BetaPair betas_exact;  // closed-form β±(γ)
};

MassResult compute_mass(const AssembledForms& forms, const ProblemParams& params,
                        const MassOptions& options = {});

enum class MassVerdict { kPositive, kNonpositive, kUntrusted };
/// MASS_POSITIVE_EXTREMALS_EXIST, MASS_NONPOSITIVE_INCONCLUSIVE or UNTRUSTED_FIT.
std::string to_string(MassVerdict v);

struct MassDecision {
  MassVerdict verdict;
  double margin;  // mass / uncertainty
};

/// Requires γ_crit < γ < γ_H and 0 < λ < λ₁ (PreconditionError otherwise).
MassDecision mass_criterion(const ProblemParams& params, const MassResult& result);

/// True iff H > 0 at every node with 2 r_min < r < (1 − boundary_fraction) R.
bool positivity_check(const RadialField& H, double boundary_fraction = 0.05);

struct ManufacturedCheck {
  double planted;
  double recovered;
  double relative_error;
  double field_error;  // max |ĝ − g*| / max |g*| on the fit window
};

/// Plants g* = c η̃ r^{−β−}, forms f* = K g* / mass and solves back.
ManufacturedCheck manufactured_recovery(const AssembledForms& forms, const ProblemParams& params,
                                        double planted = 1.0, const MassOptions& options = {});

/// max_i |g₁ − g₂| r_i^{β−} / max_i |g₁| r_i^{β−}.
double corrector_gap(const RadialField& g1, const RadialField& g2, double beta_minus);

struct TestFunctionExpansion {
  std::vector<double> eps;
  std::vector<double> values;  // J_λ(T_ε)
  std::vector<double> scaled;  // (J_λ(T_ε) − limit) / ε^{β+−β−}
  double coefficient;  // mean of `scaled` over the smaller-ε half
  double limit;
  bool monotone;
  std::string warning;
};

/// T_ε = η u_ε / Λ + ε^{(β+−β−)/2} g, where u_ε is U recentered at r = 1 and
/// Λ its tail constant (so that u_ε / Λ ≈ ε^{(β+−β−)/2} r^{−β+} far out).
/// `limit` is the ε → 0 value of J (the quotient of U itself).
TestFunctionExpansion test_function_with_mass(const AssembledForms& forms,
                                              const ProblemParams& params, const RadialField& U,
                                              const RadialField& eta, const RadialField& g,
                                              BetaPair betas, double limit,
                                              const std::vector<double>& eps_list,
                                              FitWindow tail = {0.85, 0.90});

}  // namespace frachs
