#pragma once

// Galerkin discretization of the fractional Gagliardo form for radial
// functions on a log-uniform grid, together with the exact identities of the
// operator that serve as numerical checks.
//
// In x = log r the form of two radial functions reads
//   a(u, v) = c0 ∬_{ℝ²} (u(x) − u(y)) (v(x) − v(y)) e^{c_w (x+y)/2} k̃(x − y) dx dy,
// c0 = (C_{n,α}/2)|S^{n−1}|, c_w = n − α − 2β_w, where β_w is the optional
// ground-state weight |x|^{−β_w}|y|^{−β_w} (zero for the plain form) and k̃ is
// the scaled angular kernel of kernel.hpp.

#include <Eigen/Dense>
#include <memory>

#include "frachs/kernel.hpp"
#include "frachs/radial_grid.hpp"
#include "frachs/specfun.hpp"

namespace frachs {

/// Exterior values c·r^{−β} on one side of the grid (c = 0: zero exterior).
struct PowerTail {
  double coef = 0.0;
  double beta = 0.0;
};

/// F_c(D) = ∫_D^∞ e^{c t} k̃(t) dt for every D in `distances` (all > 0).
/// Requires c < (n+α)/2.
Eigen::VectorXd kernel_tail_integrals(const Kernel& k, double c, const Eigen::VectorXd& distances);

/// The bilinear form acting on fields that live on the grid extended by
/// `virtual_elements` log-cells on each side; beyond those cells the
/// exterior is handled analytically (zero or a power law).
///
/// Row i of `action()` corresponds to interior node i+1 of the grid (nodes 0
/// and N−1 carry the Dirichlet condition); column e to extended node e, with
/// grid node j at e = j + M.
class ExtendedOperator {
 public:
  ExtendedOperator(const RadialGrid& grid, double alpha, double weight_shift = 0.0,
                   int virtual_elements = 8);
  /// Rebuild around a previously computed action matrix.
  ExtendedOperator(const RadialGrid& grid, double alpha, double weight_shift, int virtual_elements,
                   Eigen::MatrixXd action);

  const RadialGrid& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double weight_shift() const { return shift_; }
  int virtual_elements() const { return M_; }
  Eigen::Index extended_size() const { return action_.cols(); }
  Eigen::Index free_size() const { return action_.rows(); }
  double extended_log_node(Eigen::Index e) const { return grid_.log_node(e - M_); }
  const Eigen::MatrixXd& action() const { return action_; }
  const Kernel& kernel() const { return kernel_; }
  double c0() const { return c0_; }

  /// Interior × interior block: the Dirichlet stiffness matrix.
  Eigen::MatrixXd dirichlet_block() const;

  /// a(u, φ_i) for interior i, where u has nodal values `ext` on the extended
  /// grid and continues as the given power laws beyond it.
  Eigen::VectorXd apply(const Eigen::VectorXd& ext, const PowerTail& inner = {},
                        const PowerTail& outer = {}) const;

  /// Extended nodal vector of c·r^{−β} on the virtual cells of one or both
  /// sides, grid values in between.
  Eigen::VectorXd extend(const Eigen::VectorXd& grid_values, const PowerTail& inner,
                         const PowerTail& outer) const;

 private:
  void assemble();
  Eigen::VectorXd far_power_load(bool outer, double beta) const;

  RadialGrid grid_;
  double alpha_;
  double shift_;
  int M_;
  Kernel kernel_;
  double c0_;
  double cw_;
  Eigen::MatrixXd action_;
};

/// Matrices of the discrete problem on a grid. `gagliardo` is N×N with the
/// Dirichlet boundary rows and columns set to zero; hardy, mass and
/// sobolev_weight are lumped (diagonal) weights:
///   hardy_i ≈ ∫ φ_i |x|^{−α},  mass_i ≈ ∫ φ_i,  sobolev_weight_i ≈ ∫ φ_i |x|^{−s}.
struct AssembledForms {
  RadialGrid grid;
  double n;
  double alpha;
  double s;
  Eigen::MatrixXd gagliardo;
  Eigen::VectorXd hardy;
  Eigen::VectorXd mass;
  Eigen::VectorXd sobolev_weight;
  std::shared_ptr<const ExtendedOperator> op;

  Eigen::Index interior_size() const { return gagliardo.rows() - 2; }

  /// Interior block of gagliardo − γ·hardy − λ·mass.
  Eigen::MatrixXd interior_operator(double gamma, double lambda) const;
};

AssembledForms assemble(const RadialGrid& grid, const ProblemParams& params);
/// Assemble around an existing operator (for example one loaded from cache).
AssembledForms assemble(const RadialGrid& grid, const ProblemParams& params,
                        std::shared_ptr<const ExtendedOperator> op);

/// w(r_i) = ∫_{ρ∉[r_min,R]} K(r_i, ρ) ρ^{n−1} dρ. The two boundary nodes,
/// where the integral diverges for α ≥ 1, report the value half a log-cell
/// inside the grid.
RadialField exterior_potential(const RadialGrid& grid, double n, double alpha);

/// Maximum over the middle half of the interior nodes of
/// |a(r^{−β}, φ_i) / (Ψ(β) ∫ φ_i |x|^{−α−β}) − 1|, with r^{−β} continued
/// analytically outside the grid.
double power_law_residual(const ExtendedOperator& op, const ProblemParams& params, double beta);
double power_law_residual(const RadialGrid& grid, const ProblemParams& params, double beta);

/// |E(u) − Ψ(β)∫u²|x|^{−α} − E_β(|x|^β u)| / E(u), where E_β is the form
/// with weight |x|^{−β}|y|^{−β}. u must vanish at both boundary nodes.
double ground_state_identity_gap(const RadialGrid& grid, const ProblemParams& params, double beta,
                                 const RadialField& u);

struct BEtaValue {
  double value;     // (ηφ)ᵀGψ − φᵀG(ηψ)
  double pairwise;  // Σ_{i<j} (−G_ij)(η_i − η_j)(φ_jψ_i − φ_iψ_j)
  double gap() const;
};

/// B_η(φ, ψ) = ⟨ηφ, ψ⟩ − ⟨φ, ηψ⟩ by two summation paths. Boundary nodal
/// values are ignored (Dirichlet).
BEtaValue b_eta_form(const AssembledForms& forms, const RadialField& eta, const RadialField& phi,
                     const RadialField& psi);

/// Σ_{i<j} (−G_ij)(η_i − η_j)² φ_i φ_j, the discrete ½∬(η(x)−η(y))²φ(x)φ(y)K.
double b_eta_squared_form(const AssembledForms& forms, const RadialField& eta,
                          const RadialField& phi);

/// w(r') = r'^{α−n} u(1/r') on the reflected grid [1/R, 1/r_min].
RadialField kelvin_transform(const RadialField& u, const ProblemParams& params);

/// ∫ (I u)² e^{c x} dx over [x_0, x_{N−1}] for the piecewise-linear
/// interpolant I u (element-wise Gauss quadrature).
double weighted_square_integral(const RadialGrid& grid, const Eigen::VectorXd& values, double c);

}  // namespace frachs
