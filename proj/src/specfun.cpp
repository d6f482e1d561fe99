#include "frachs/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "frachs/errors.hpp"

namespace frachs {

namespace {

// Lanczos approximation, g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// (−1)^k ζ(k)/k for k = 2..31: Taylor coefficients of ln Γ(1+z) + γ_E z.
constexpr std::array<double, 30> kLogGammaSeries = {
    0.82246703342411321824,   -0.40068563438653142847,
    0.27058080842778454788,   -0.20738555102867398527,
    0.16955717699740818995,   -0.14404989676884611812,
    0.12550966952474304242,   -0.11133426586956469049,
    0.10009945751278180853,   -0.090954017145829042233,
    0.083353840546109004025,  -0.076932516411352191473,
    0.071432946295361336059,  -0.066668705882420468033,
    0.062500955141213040742,  -0.058823978658684582339,
    0.055555767627403611102,  -0.052631679379616660734,
    0.05000004769810169364,   -0.047619070330142227991,
    0.045454556293204669442,  -0.043478266053040259361,
    0.041666669150341210469,  -0.040000001192140140586,
    0.038461539034675185706,  -0.037037037312989325549,
    0.035714285847333358028,  -0.034482758684919300811,
    0.033333333364377581081,  -0.032258064531150416339};

constexpr double kEulerGamma = 0.5772156649015328606;

// ln Γ(1+z) for |z| ≤ 0.25; keeps relative accuracy near the zero at z = 0.
double log_gamma_near_one(double z) {
  double sum = 0.0;
  double zk = z * z;
  for (double c : kLogGammaSeries) {
    sum += c * zk;
    zk *= z;
  }
  return -kEulerGamma * z + sum;
}

double lanczos_log_gamma(double x) {
  // x ≥ 0.5
  const double xm = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm + static_cast<double>(i));
  const double t = xm + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm + 0.5) * std::log(t) - t + std::log(a);
}

std::string fmt_nalpha(double n, double alpha) {
  std::ostringstream os;
  os << "(n=" << n << ", alpha=" << alpha << ")";
  return os.str();
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "log_gamma: argument must be positive and finite, got " << x;
    throw DomainError(os.str());
  }
  if (std::abs(x - 1.0) <= 0.25) return log_gamma_near_one(x - 1.0);
  if (std::abs(x - 2.0) <= 0.25) return log_gamma_near_one(x - 2.0) + std::log1p(x - 2.0);
  if (x < 0.5) {
    // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double hardy_constant(double n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < n)) {
    throw DomainError("hardy_constant: requires 0 < alpha < n " + fmt_nalpha(n, alpha));
  }
  return std::exp(alpha * std::numbers::ln2 + 2.0 * log_gamma((n + alpha) / 4.0) -
                  2.0 * log_gamma((n - alpha) / 4.0));
}

double c_n_alpha(double n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !(n > 0.0)) {
    throw DomainError("c_n_alpha: requires 0 < alpha < 2 " + fmt_nalpha(n, alpha));
  }
  // |Γ(−α/2)| = π / (|sin(πα/2)| Γ(1+α/2))
  const double log_abs_gamma_neg =
      std::log(std::numbers::pi) - std::log(std::abs(std::sin(std::numbers::pi * alpha / 2.0))) -
      log_gamma(1.0 + alpha / 2.0);
  return std::exp(alpha * std::numbers::ln2 + log_gamma((n + alpha) / 2.0) -
                  0.5 * n * std::log(std::numbers::pi) - log_abs_gamma_neg);
}

double sphere_area(double n) {
  if (!(n > 0.0)) throw DomainError("sphere_area: dimension must be positive");
  return 2.0 * std::exp(0.5 * n * std::log(std::numbers::pi) - log_gamma(0.5 * n));
}

double psi(double n, double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha < n)) {
    throw DomainError("psi: requires 0 < alpha < n " + fmt_nalpha(n, alpha));
  }
  const double top = n - alpha;
  if (!(beta >= 0.0) || !(beta <= top)) {
    std::ostringstream os;
    os << "psi: beta=" << beta << " outside [0, n-alpha=" << top << "]";
    throw DomainError(os.str());
  }
  if (beta == 0.0 || beta == top) return 0.0;
  return std::exp(alpha * std::numbers::ln2 + log_gamma((n - beta) / 2.0) +
                  log_gamma((alpha + beta) / 2.0) - log_gamma((top - beta) / 2.0) -
                  log_gamma(beta / 2.0));
}

BetaPair beta_pm(double n, double alpha, double gamma) {
  const double gh = hardy_constant(n, alpha);
  const double top = n - alpha;
  if (!(gamma >= 0.0) || gamma > gh) {
    std::ostringstream os;
    os << "beta_pm: gamma=" << gamma << " outside [0, gamma_H=" << gh << "]";
    throw DomainError(os.str());
  }
  if (gamma == 0.0) return {0.0, top};
  if (gamma == gh) return {top / 2.0, top / 2.0};

  // Ψ is strictly increasing on (0, (n−α)/2); bisect down to adjacent doubles.
  double lo = 0.0;
  double hi = top / 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (psi(n, alpha, mid) < gamma) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Round so that minus + plus reproduces top exactly.
  const double plus = top - 0.5 * (lo + hi);
  return {top - plus, plus};
}

double gamma_crit(double n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < n)) {
    throw DomainError("gamma_crit: requires 0 < alpha < n " + fmt_nalpha(n, alpha));
  }
  if (n > 2.0 * alpha) return psi(n, alpha, n / 2.0);
  if (n == 2.0 * alpha) return 0.0;
  return -1.0;
}

double crit_exponent(double n, double alpha, double s) {
  if (!(alpha > 0.0) || !(alpha < n) || !(s >= 0.0) || !(s <= alpha)) {
    throw DomainError("crit_exponent: requires 0 <= s <= alpha < n");
  }
  return 2.0 * (n - s) / (n - alpha);
}

ProblemParams ProblemParams::make(double n, double alpha, double s, double gamma, double lambda) {
  ProblemParams p{n, alpha, s, gamma, lambda};
  p.validate();
  return p;
}

void ProblemParams::validate() const {
  std::ostringstream os;
  if (!(n >= 1.0) || !std::isfinite(n)) {
    os << "ProblemParams: dimension n=" << n << " must be >= 1";
  } else if (!(alpha > 0.0) || !(alpha < 2.0) || !(alpha < n)) {
    os << "ProblemParams: need 0 < alpha < min(2, n), got alpha=" << alpha << " n=" << n;
  } else if (!(s >= 0.0) || !(s <= alpha)) {
    os << "ProblemParams: need 0 <= s <= alpha, got s=" << s;
  } else if (!(gamma >= 0.0) || !(gamma < hardy_constant(n, alpha))) {
    os << "ProblemParams: need 0 <= gamma < gamma_H=" << hardy_constant(n, alpha)
       << ", got gamma=" << gamma;
  } else if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    os << "ProblemParams: lambda must be finite and >= 0, got " << lambda;
  }
  if (!os.str().empty()) throw DomainError(os.str());
}

ProblemParams ProblemParams::with_gamma(double g) const {
  return make(n, alpha, s, g, lambda);
}

ProblemParams ProblemParams::with_lambda(double l) const {
  return make(n, alpha, s, gamma, l);
}

}  // namespace frachs
