#pragma once

#include <vector>

namespace frachs {

/// Angular reduction of |x − y|^{−(n+α)} for radial functions.
///
/// With τ = min(r, ρ)/max(r, ρ) ∈ [0, 1),
///   K(r, ρ) = ∫_{S^{n−1}} |r e − ρ ω|^{−(n+α)} dσ(ω) = max(r, ρ)^{−(n+α)} κ(τ).
/// In log coordinates t = log r − log ρ the assembler uses the scaled kernel
///   k̃(t) = e^{−(n+α)|t|/2} κ(e^{−|t|}).
class Kernel {
 public:
  /// n = 1, integer n ≥ 2 and real n ≥ 2 are supported; 1 < n < 2 is rejected.
  /// For n ∉ {1, 3} the constructor tabulates κ once (about 2000 adaptive
  /// quadratures) unless `tabulate` is false.
  Kernel(double n, double alpha, bool tabulate = true);

  double n() const { return n_; }
  double alpha() const { return alpha_; }

  /// κ(τ); `one_minus_tau` must equal 1 − τ and is passed separately so that
  /// callers with τ = e^{−t}, t small, keep full relative precision.
  double kappa(double tau, double one_minus_tau) const;

  /// κ(τ) through adaptive quadrature regardless of closed forms.
  double kappa_quadrature(double tau, double one_minus_tau) const;

  /// κ(e^{−t}) for t > 0.
  double kappa_at(double t) const;

  /// k̃(t) for t ≠ 0.
  double scaled(double t) const;

 private:
  enum class Path { kOne, kThree, kGeneral };
  double n_;
  double alpha_;
  double p_;  // (n+α)/2
  double sphere_;
  double sphere_low_;  // |S^{n−2}|
  Path path_;
  // log κ(e^{−t}) + (1+α) log t on Chebyshev panels in u = log t
  std::vector<double> table_;
  double table_umin_ = 0.0;
  double table_umax_ = 0.0;
  double table_tail_ = 0.0;
};

/// K(r, ρ) = ∫_{S^{n−1}} |r e − ρ ω|^{−(n+α)} dσ(ω); r ≠ ρ.
double angular_kernel(double n, double alpha, double r, double rho);

}  // namespace frachs
