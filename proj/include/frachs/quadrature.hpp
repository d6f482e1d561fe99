#pragma once

#include <vector>

namespace frachs {

/// A quadrature rule on [0, 1].
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// n-point Gauss–Legendre rule mapped to [0, 1]. Rules are computed once and
/// cached; the returned reference stays valid for the program lifetime.
const QuadRule& gauss_legendre(int n);

/// Composite Gauss rule on [0, 1] with panels [q^{k+1}, q^k], k < levels,
/// plus a last panel [0, q^levels]. Integrates t^p-type endpoint behaviour
/// at 0 to near machine precision for p > −1.
QuadRule graded_rule(int levels, double ratio, int points_per_panel);

/// Append the rule `base` mapped to [a, b] onto (xs, ws).
void append_mapped(const QuadRule& base, double a, double b, std::vector<double>& xs,
                   std::vector<double>& ws);

}  // namespace frachs
