#include "frachs/radial_grid.hpp"

#include <cmath>
#include <sstream>

#include "frachs/errors.hpp"

namespace frachs {

namespace {

// (e^z − 1 − z)/z²
double phi2(double z) {
  if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  return (std::expm1(z) - z) / (z * z);
}

// 2(cosh z − 1)/z²
double hat_full(double z) {
  if (std::abs(z) < 1e-3) return 1.0 + z * z / 12.0 + z * z * z * z / 360.0;
  const double s = std::sinh(0.5 * z) / (0.5 * z);
  return s * s;
}

}  // namespace

RadialGrid::RadialGrid(double n, std::size_t count, double r_min, double R)
    : n_(n), r_min_(r_min), R_(R) {
  if (count < 4) throw ConfigurationError("RadialGrid: need at least 4 nodes");
  if (!(r_min > 0.0) || !(R > r_min) || !std::isfinite(R)) {
    std::ostringstream os;
    os << "RadialGrid: need 0 < r_min < R, got r_min=" << r_min << " R=" << R;
    throw ConfigurationError(os.str());
  }
  if (!(n >= 1.0)) throw ConfigurationError("RadialGrid: dimension must be >= 1");
  x0_ = std::log(r_min);
  h_ = (std::log(R) - x0_) / static_cast<double>(count - 1);
  nodes_.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) nodes_[static_cast<Eigen::Index>(i)] = std::exp(log_node(static_cast<std::ptrdiff_t>(i)));
  nodes_[0] = r_min;
  nodes_[static_cast<Eigen::Index>(count - 1)] = R;
  weights_ = hat_moments(n);
}

Eigen::VectorXd RadialGrid::hat_moments(double c) const {
  const Eigen::Index N = nodes_.size();
  const double z = c * h_;
  Eigen::VectorXd m(N);
  for (Eigen::Index i = 0; i < N; ++i) m[i] = std::exp(c * log_node(i)) * h_ * hat_full(z);
  m[0] = std::exp(c * x0_) * h_ * phi2(z);
  m[N - 1] = std::exp(c * log_node(N - 1)) * h_ * phi2(-z);
  return m;
}

RadialGrid RadialGrid::reflected() const {
  return RadialGrid(n_, size(), 1.0 / R_, 1.0 / r_min_);
}

bool RadialGrid::same_as(const RadialGrid& o) const {
  return n_ == o.n_ && size() == o.size() && r_min_ == o.r_min_ && R_ == o.R_;
}

RadialField::RadialField(RadialGrid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw DomainError("RadialField: value count does not match grid size");
  }
  if (!values.allFinite()) throw DomainError("RadialField: values must be finite");
}

RadialField RadialField::zeros(const RadialGrid& g) {
  return RadialField(g, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())));
}

}  // namespace frachs
