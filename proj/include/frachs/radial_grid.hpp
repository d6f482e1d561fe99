#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace frachs {

/// Log-uniform radial nodes r_i = exp(x_0 + i h), i = 0..N−1, on [r_min, R].
///
/// The discrete function space is piecewise linear in x = log r (hat
/// functions φ_i). `weights()` integrates f(r) r^{n−1} dr against nodal
/// values using the hat moments ∫ φ_i e^{n x} dx, so ∫ r^{n−1} dr over
/// [r_min, R] is reproduced exactly up to rounding.
class RadialGrid {
 public:
  RadialGrid(double n, std::size_t count, double r_min, double R);

  double n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(nodes_.size()); }
  double r_min() const { return r_min_; }
  double R() const { return R_; }
  double h() const { return h_; }
  double x0() const { return x0_; }
  double log_node(std::ptrdiff_t i) const { return x0_ + static_cast<double>(i) * h_; }
  double node(std::size_t i) const { return nodes_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// ∫ φ_i(x) e^{c x} dx over [x_0, x_{N−1}] for every node.
  Eigen::VectorXd hat_moments(double c) const;

  /// Grid on [1/R, 1/r_min] with the same N; node i corresponds to 1/r_{N−1−i}.
  RadialGrid reflected() const;

  bool same_as(const RadialGrid& o) const;

 private:
  double n_;
  double r_min_;
  double R_;
  double x0_;
  double h_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

/// Nodal values of a radial function on a grid, zero outside [r_min, R].
struct RadialField {
  RadialGrid grid;
  Eigen::VectorXd values;

  RadialField(RadialGrid g, Eigen::VectorXd v);
  static RadialField zeros(const RadialGrid& g);

  /// Field with values f(r_i).
  template <class F>
  static RadialField sample(const RadialGrid& g, F&& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(g.node(i));
    return RadialField(g, std::move(v));
  }

  std::size_t size() const { return grid.size(); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

}  // namespace frachs
