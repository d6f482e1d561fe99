#include "frachs/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "frachs/errors.hpp"

namespace frachs {

namespace {

QuadRule build_gauss(int n) {
  // legendre_p_zeros returns the non-negative zeros in increasing order.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  QuadRule rule;
  auto push = [&](double z) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x.push_back(0.5 * (1.0 + z));
    rule.w.push_back(0.5 * w);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it != 0.0) push(-*it);
  }
  for (double z : zeros) push(z);
  return rule;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1 || n > 200) throw DomainError("gauss_legendre: point count out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadRule>(build_gauss(n));
  return *slot;
}

void append_mapped(const QuadRule& base, double a, double b, std::vector<double>& xs,
                   std::vector<double>& ws) {
  const double len = b - a;
  for (std::size_t i = 0; i < base.size(); ++i) {
    xs.push_back(a + len * base.x[i]);
    ws.push_back(len * base.w[i]);
  }
}

QuadRule graded_rule(int levels, double ratio, int points_per_panel) {
  if (!(ratio > 0.0 && ratio < 1.0) || levels < 0) {
    throw DomainError("graded_rule: need 0 < ratio < 1 and levels >= 0");
  }
  const QuadRule& g = gauss_legendre(points_per_panel);
  QuadRule out;
  double hi = 1.0;
  for (int k = 0; k < levels; ++k) {
    const double lo = hi * ratio;
    append_mapped(g, lo, hi, out.x, out.w);
    hi = lo;
  }
  append_mapped(g, 0.0, hi, out.x, out.w);
  return out;
}

}  // namespace frachs
