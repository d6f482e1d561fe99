#include "frachs/kernel.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <sstream>
#include <vector>

#include "frachs/errors.hpp"
#include "frachs/quadrature.hpp"
#include "frachs/specfun.hpp"

namespace frachs {

namespace {

constexpr int kChebPoints = 16;
constexpr double kPanelWidth = 0.5;

double cheb_node(int j) {
  return std::cos(std::numbers::pi * (j + 0.5) / kChebPoints);
}

}  // namespace

Kernel::Kernel(double n, double alpha, bool tabulate)
    : n_(n), alpha_(alpha), p_(0.5 * (n + alpha)) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !(n >= 1.0)) {
    throw DomainError("Kernel: need n >= 1 and 0 < alpha < 2");
  }
  if (n > 1.0 && n < 2.0) {
    throw DomainError("Kernel: dimensions strictly between 1 and 2 are not supported");
  }
  sphere_ = sphere_area(n);
  sphere_low_ = n >= 2.0 ? sphere_area(n - 1.0) : 0.0;
  if (n == 1.0) {
    path_ = Path::kOne;
  } else if (n == 3.0) {
    path_ = Path::kThree;
  } else {
    path_ = Path::kGeneral;
  }
  if (path_ == Path::kGeneral && tabulate) {
    // t from 1e−30 to 60: below, κ follows its leading power; above, κ(e^{−t})
    // equals |S^{n−1}| to double precision.
    table_umin_ = std::log(1e-30);
    table_umax_ = std::log(60.0);
    const int panels = static_cast<int>(std::ceil((table_umax_ - table_umin_) / kPanelWidth));
    table_umax_ = table_umin_ + panels * kPanelWidth;
    table_.resize(static_cast<std::size_t>(panels * kChebPoints));
    for (int k = 0; k < panels; ++k) {
      const double mid = table_umin_ + (k + 0.5) * kPanelWidth;
      for (int j = 0; j < kChebPoints; ++j) {
        const double u = mid + 0.5 * kPanelWidth * cheb_node(j);
        const double t = std::exp(u);
        table_[static_cast<std::size_t>(k * kChebPoints + j)] =
            std::log(kappa_quadrature(std::exp(-t), -std::expm1(-t))) + (1.0 + alpha_) * u;
      }
    }
    table_tail_ = std::log(kappa_quadrature(std::exp(-60.0), -std::expm1(-60.0)));
  }
}

double Kernel::kappa_at(double t) const {
  if (!(t > 0.0)) throw DomainError("Kernel::kappa_at: t must be positive");
  if (path_ != Path::kGeneral || table_.empty()) return kappa(std::exp(-t), -std::expm1(-t));
  const double u = std::log(t);
  if (u >= table_umax_) return std::exp(table_tail_);
  const double uc = std::max(u, table_umin_);
  const auto panels = static_cast<int>(table_.size()) / kChebPoints;
  int k = static_cast<int>((uc - table_umin_) / kPanelWidth);
  k = std::clamp(k, 0, panels - 1);
  const double mid = table_umin_ + (k + 0.5) * kPanelWidth;
  const double s = (uc - mid) / (0.5 * kPanelWidth);
  // barycentric interpolation at first-kind Chebyshev points
  double num = 0.0;
  double den = 0.0;
  const double* f = &table_[static_cast<std::size_t>(k * kChebPoints)];
  for (int j = 0; j < kChebPoints; ++j) {
    const double d = s - cheb_node(j);
    const double w = ((j % 2) ? -1.0 : 1.0) * std::sin(std::numbers::pi * (j + 0.5) / kChebPoints);
    if (d == 0.0) {
      num = f[j];
      den = 1.0;
      break;
    }
    num += w * f[j] / d;
    den += w / d;
  }
  // below the table the leading power (1−τ)^{−1−α} ~ t^{−1−α} is exact enough
  return std::exp(num / den - (1.0 + alpha_) * u);
}

double Kernel::kappa(double tau, double one_minus_tau) const {
  switch (path_) {
    case Path::kOne:
      return std::pow(one_minus_tau, -1.0 - alpha_) + std::pow(1.0 + tau, -1.0 - alpha_);
    case Path::kThree: {
      if (tau == 0.0) return sphere_;
      // (1−τ)^{−q} − (1+τ)^{−q} = (1+τ)^{−q} expm1(2q atanh τ), q = 1+α
      const double q = 1.0 + alpha_;
      const double two_atanh = std::log1p(2.0 * tau / one_minus_tau);
      const double diff = std::pow(1.0 + tau, -q) * std::expm1(q * two_atanh);
      return 2.0 * std::numbers::pi / (tau * q) * diff;
    }
    case Path::kGeneral:
      break;
  }
  if (!table_.empty()) {
    if (tau == 0.0) return sphere_;
    return kappa_at(-std::log1p(-one_minus_tau));
  }
  return kappa_quadrature(tau, one_minus_tau);
}

double Kernel::kappa_quadrature(double tau, double one_minus_tau) const {
  if (n_ < 2.0) throw DomainError("Kernel::kappa_quadrature: requires n >= 2");
  if (tau == 0.0) return sphere_;
  // (1 − 2τ cos θ + τ²) = (1−τ)² (1 + 4τ sin²(θ/2)/(1−τ)²); the (1−τ) power
  // is applied after integration to keep the integrand O(1).
  const double d2 = one_minus_tau * one_minus_tau;
  const double sin_pow = n_ - 2.0;
  auto f = [&](double th) {
    const double s = std::sin(0.5 * th);
    double v = std::pow(1.0 + 4.0 * tau * s * s / d2, -p_);
    if (sin_pow != 0.0) v *= std::pow(std::sin(th), sin_pow);
    return v;
  };
  // The peak at θ = 0 has width w0 = (1−τ)/√τ: panels double in length away
  // from it. For non-integer n the factor sin^{n−2}θ is not smooth at 0 and
  // π, so panels are also graded toward both endpoints.
  const bool graded_ends = sin_pow != std::floor(sin_pow);
  const double half = 0.5 * std::numbers::pi;
  const double w0 = std::min(half, one_minus_tau / std::sqrt(tau));
  std::vector<double> brk{0.0};
  if (graded_ends) {
    for (int k = 24; k >= 1; --k) brk.push_back(w0 * std::pow(0.3, k));
  }
  for (double b = w0; b < half; b *= 2.0) brk.push_back(b);
  brk.push_back(half);
  if (graded_ends) {
    for (int k = 1; k <= 24; ++k) brk.push_back(std::numbers::pi - half * std::pow(0.3, k));
  } else {
    brk.push_back(0.75 * std::numbers::pi);
  }
  brk.push_back(std::numbers::pi);
  const QuadRule& g = gauss_legendre(12);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double a = brk[i];
    const double len = brk[i + 1] - a;
    double s = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) s += g.w[q] * f(a + len * g.x[q]);
    total += s * len;
  }
  return sphere_low_ * std::exp(std::log(total) - 2.0 * p_ * std::log(one_minus_tau));
}

double Kernel::scaled(double t) const {
  const double a = std::abs(t);
  if (a == 0.0) throw DomainError("Kernel::scaled: singular at t = 0");
  return std::exp(-p_ * a) * kappa_at(a);
}

double angular_kernel(double n, double alpha, double r, double rho) {
  if (!(r > 0.0) || !(rho > 0.0)) throw DomainError("angular_kernel: radii must be positive");
  if (r == rho) {
    std::ostringstream os;
    os << "angular_kernel: singular at r = rho = " << r;
    throw DomainError(os.str());
  }
  Kernel k(n, alpha, false);
  const double hi = std::max(r, rho);
  const double lo = std::min(r, rho);
  return std::pow(hi, -(n + alpha)) * k.kappa(lo / hi, (hi - lo) / hi);
}

}  // namespace frachs
