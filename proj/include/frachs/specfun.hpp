#pragma once

// Closed-form spectral arithmetic for the fractional Hardy–Schrödinger
// operator (−Δ)^{α/2} − γ/|x|^α on ℝⁿ.
//
// All functions are pure and thread-safe. Real (non-integer) dimensions are
// accepted wherever the Gamma-function formulas make sense.

#include <utility>

namespace frachs {

/// The scalar parameters (n, α, s, γ, λ) of a fractional Hardy–Sobolev
/// problem. Construct through `make`, which enforces
///   0 < α < min(2, n),  0 ≤ s ≤ α,  0 ≤ γ < γ_H(α),  λ ≥ 0.
struct ProblemParams {
  double n = 3.0;
  double alpha = 1.0;
  double s = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;

  static ProblemParams make(double n, double alpha, double s, double gamma,
                            double lambda = 0.0);

  /// Throws DomainError when the invariants above are violated.
  void validate() const;

  ProblemParams with_gamma(double g) const;
  ProblemParams with_lambda(double l) const;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// γ_H(α) = 2^α Γ²((n+α)/4) / Γ²((n−α)/4), the fractional Hardy constant.
double hardy_constant(double n, double alpha);

/// C_{n,α} = 2^α Γ((n+α)/2) / (π^{n/2} |Γ(−α/2)|).
double c_n_alpha(double n, double alpha);

/// Surface area of the unit sphere S^{n−1} ⊂ ℝⁿ (equals 2 for n = 1).
double sphere_area(double n);

/// Ψ_{n,α}(β), the multiplier in (−Δ)^{α/2}|x|^{−β} = Ψ(β)|x|^{−β−α}.
/// Defined on [0, n−α] with Ψ(0) = Ψ(n−α) = 0.
double psi(double n, double alpha, double beta);

struct BetaPair {
  double minus;
  double plus;
};

/// The two roots β−(γ) ≤ (n−α)/2 ≤ β+(γ) of Ψ(β) = γ, with the endpoint
/// conventions β±(0) = {0, n−α} and β±(γ_H) = (n−α)/2.
BetaPair beta_pm(double n, double alpha, double gamma);

/// γ_crit(α): Ψ(n/2) when n > 2α, 0 when n = 2α, −1 when n < 2α.
double gamma_crit(double n, double alpha);

/// 2*_α(s) = 2(n−s)/(n−α).
double crit_exponent(double n, double alpha, double s);

}  // namespace frachs
