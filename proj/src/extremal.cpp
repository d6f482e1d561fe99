#include "frachs/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frachs/errors.hpp"
#include "frachs/linalg.hpp"

namespace frachs {

namespace {

Eigen::VectorXd interior(const Eigen::VectorXd& full) { return full.segment(1, full.size() - 2); }

Eigen::VectorXd embed(const Eigen::VectorXd& inner) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(inner.size() + 2);
  full.segment(1, inner.size()) = inner;
  return full;
}

double lp_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& u, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), p);
  return s;
}

struct LineFit {
  double slope;
  double intercept;
  double r2;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - intercept - slope * x[i];
    ssr += e * e;
  }
  // A perfectly flat log profile (β = 0) has syy = 0.
  const double r2 = syy > 1e-300 ? 1.0 - ssr / syy : (ssr <= 1e-24 * n ? 1.0 : 0.0);
  return {slope, intercept, r2};
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

EigenResult lambda_1(const AssembledForms& forms, const ProblemParams& params, int max_iter,
                     double rel_tol) {
  const Eigen::MatrixXd K = forms.interior_operator(params.gamma, 0.0);
  const Eigen::VectorXd M = interior(forms.mass);
  const ScaledCholesky chol(K);

  Eigen::VectorXd u = Eigen::VectorXd::Ones(M.size());
  u /= std::sqrt(u.dot(M.cwiseProduct(u)));
  double lam = 0.0;
  double prev = 0.0;
  double residual = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd v = chol.solve(M.cwiseProduct(u));
    const double vmv = v.dot(M.cwiseProduct(v));
    lam = v.dot(M.cwiseProduct(u)) / vmv;
    v /= std::sqrt(vmv);
    const Eigen::VectorXd Mv = M.cwiseProduct(v);
    residual = (K * v - lam * Mv).norm() / (lam * Mv).norm();
    u = v;
    if (it > 1 && std::abs(lam - prev) <= rel_tol * std::abs(lam) && residual < 1e-8) {
      Eigen::Index imax = 0;
      u.cwiseAbs().maxCoeff(&imax);
      if (u[imax] < 0.0) u = -u;
      return {lam, RadialField(forms.grid, embed(u)), it, residual};
    }
    prev = lam;
  }
  std::ostringstream os;
  os << "lambda_1: inverse iteration did not converge in " << max_iter
     << " steps (residual " << residual << ")";
  throw NumericalError(os.str(), residual);
}

double sobolev_norm(const AssembledForms& forms, const Eigen::VectorXd& u) {
  const double p = crit_exponent(forms.n, forms.alpha, forms.s);
  return lp_sum(interior(forms.sobolev_weight), interior(u), p);
}

double energy(const AssembledForms& forms, const ProblemParams& params, const Eigen::VectorXd& u) {
  const Eigen::VectorXd v = interior(u);
  return v.dot(forms.interior_operator(params.gamma, params.lambda) * v);
}

double rayleigh_quotient(const AssembledForms& forms, const ProblemParams& params,
                         const Eigen::VectorXd& u) {
  const double p = crit_exponent(forms.n, forms.alpha, forms.s);
  return energy(forms, params, u) / std::pow(sobolev_norm(forms, u), 2.0 / p);
}

Eigen::VectorXd default_initial_field(const RadialGrid& grid, const ProblemParams& params) {
  const BetaPair b = beta_pm(params.n, params.alpha, params.gamma);
  const double xc = 0.5 * (std::log(grid.r_min()) + std::log(grid.R()));
  Eigen::VectorXd u(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.log_node(static_cast<std::ptrdiff_t>(i)) - xc;
    u[static_cast<Eigen::Index>(i)] = 1.0 / (std::exp(b.minus * t) + std::exp(b.plus * t));
  }
  u[0] = 0.0;
  u[u.size() - 1] = 0.0;
  return u;
}

ExtremalResult minimize_mu(const AssembledForms& forms, const ProblemParams& params,
                           const MinimizeOptions& options) {
  if (!(params.s < params.alpha)) {
    throw PreconditionError("minimize_mu: requires s < alpha");
  }
  const double lam1 = lambda_1(forms, params).value;
  if (!(params.lambda < lam1)) {
    std::ostringstream os;
    os << "minimize_mu: lambda=" << params.lambda << " is not below lambda_1=" << lam1;
    throw PreconditionError(os.str());
  }
  const double p = crit_exponent(params.n, params.alpha, params.s);
  const Eigen::MatrixXd K = forms.interior_operator(params.gamma, params.lambda);
  const Eigen::VectorXd S = interior(forms.sobolev_weight);
  const ScaledCholesky chol(K);

  Eigen::VectorXd u = interior(options.initial ? *options.initial
                                               : default_initial_field(forms.grid, params));
  if (u.size() != S.size()) throw ConfigurationError("minimize_mu: initial field has wrong size");
  u = u.cwiseMax(0.0);
  if (!(u.maxCoeff() > 0.0)) throw DomainError("minimize_mu: initial field has no positive part");

  auto normalize = [&](Eigen::VectorXd& v) { v /= std::pow(lp_sum(S, v, p), 1.0 / p); };
  auto quotient = [&](const Eigen::VectorXd& v) {
    return v.dot(K * v) / std::pow(lp_sum(S, v, p), 2.0 / p);
  };

  normalize(u);
  double J = quotient(u);
  std::vector<double> history{J};
  double residual = 1.0;
  double kappa = J;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Eigen::VectorXd Ku = K * u;
    const Eigen::VectorXd f = S.cwiseProduct(u.array().pow(p - 1.0).matrix());
    kappa = u.dot(Ku) / lp_sum(S, u, p);
    residual = (Ku - kappa * f).norm() / (kappa * f).norm();
    if (residual < options.grad_tol) break;

    const Eigen::VectorXd target = kappa * chol.solve(f);
    bool accepted = false;
    double Jc = J;
    Eigen::VectorXd cand;
    for (double tau = 1.0; tau > 1e-12; tau *= 0.5) {
      cand = (u + tau * (target - u)).cwiseMax(0.0);
      if (!(cand.maxCoeff() > 0.0)) continue;
      Jc = quotient(cand);
      if (std::isfinite(Jc) && Jc <= J) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (residual < 1e-5) break;  // no representable descent left
      throw NumericalError("minimize_mu: descent stalled", residual);
    }
    normalize(cand);
    u = cand;
    const double change = (J - Jc) / J;
    J = Jc;
    history.push_back(J);
    if (change < options.rel_tol) {
      ++it;
      break;
    }
  }
  if (it >= options.max_iter) {
    throw NumericalError("minimize_mu: iteration limit reached", residual);
  }

  const Eigen::VectorXd Ku = K * u;
  kappa = u.dot(Ku) / lp_sum(S, u, p);
  RadialField field(forms.grid, embed(u));
  ExtremalResult out{J,  kappa, field, NAN, NAN, NAN, NAN, NAN, it, residual, std::move(history)};
  try {
    const ExponentFit fit = fit_exponents(field, options.head, options.tail);
    out.fitted_beta0 = fit.beta0;
    out.fitted_betainf = fit.betainf;
    out.fitted_lambda0 = fit.lambda0;
    out.fitted_lambdainf = fit.lambdainf;
    out.fit_r2 = fit.fit_r2;
  } catch (const DomainError&) {
    // field not positive on a window; exponents stay NaN
  }
  return out;
}

std::pair<std::size_t, std::size_t> window_nodes(const RadialGrid& grid, FitWindow w) {
  if (!(0.0 <= w.lo && w.lo < w.hi && w.hi <= 1.0)) {
    throw ConfigurationError("fit window must satisfy 0 <= lo < hi <= 1");
  }
  const double last = static_cast<double>(grid.size() - 1);
  const auto lo = static_cast<std::size_t>(std::ceil(w.lo * last - 1e-9));
  const auto hi = static_cast<std::size_t>(std::floor(w.hi * last + 1e-9));
  if (hi < lo + 2) throw ConfigurationError("fit window holds fewer than three nodes");
  return {lo, hi};
}

ExponentFit fit_exponents(const RadialField& u, FitWindow head, FitWindow tail) {
  auto fit_on = [&](FitWindow w) {
    const auto [lo, hi] = window_nodes(u.grid, w);
    std::vector<double> x, y;
    for (std::size_t i = lo; i <= hi; ++i) {
      if (!(u[i] > 0.0)) {
        std::ostringstream os;
        os << "fit_exponents: field not positive at node " << i;
        throw DomainError(os.str());
      }
      x.push_back(u.grid.log_node(static_cast<std::ptrdiff_t>(i)));
      y.push_back(std::log(u[i]));
    }
    return fit_line(x, y);
  };
  const LineFit h = fit_on(head);
  const LineFit t = fit_on(tail);
  return {-h.slope, -t.slope, std::exp(h.intercept), std::exp(t.intercept), std::min(h.r2, t.r2)};
}

double bubble_center(const RadialField& U, double alpha) {
  const double c = 0.5 * (U.grid.n() - alpha);
  Eigen::Index best = 0;
  double best_v = -1.0;
  for (Eigen::Index i = 0; i < U.values.size(); ++i) {
    const double v = U.values[i] * std::exp(c * U.grid.log_node(i));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return U.grid.node(static_cast<std::size_t>(best));
}

RadialField bubble(const RadialGrid& target, const RadialField& U, double alpha, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("bubble: eps must be positive");
  const double center = bubble_center(U, alpha) * eps;
  if (center < target.r_min() || center > target.R()) {
    std::ostringstream os;
    os << "bubble: eps=" << eps << " moves the concentration scale " << center
       << " outside [" << target.r_min() << ", " << target.R() << "]";
    throw DomainError(os.str());
  }
  const double shift = std::log(eps);
  const double scale = std::pow(eps, -0.5 * (U.grid.n() - alpha));
  const double hU = U.grid.h();
  const auto last = static_cast<double>(U.size() - 1);
  Eigen::VectorXd v(static_cast<Eigen::Index>(target.size()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double q = (target.log_node(static_cast<std::ptrdiff_t>(i)) - shift - U.grid.x0()) / hU;
    double val = 0.0;
    const double qr = std::round(q);
    if (std::abs(q - qr) < 1e-9 && qr >= 0.0 && qr <= last) {
      val = U[static_cast<std::size_t>(qr)];
    } else if (q > 0.0 && q < last) {
      const auto k = static_cast<std::size_t>(std::floor(q));
      const double f = q - static_cast<double>(k);
      // Catmull–Rom on log U where four positive neighbours exist (exact on
      // power laws), plain linear otherwise
      if (k >= 1 && static_cast<double>(k + 2) <= last && U[k - 1] > 0.0 && U[k] > 0.0 &&
          U[k + 1] > 0.0 && U[k + 2] > 0.0) {
        const double p0 = std::log(U[k - 1]), p1 = std::log(U[k]);
        const double p2 = std::log(U[k + 1]), p3 = std::log(U[k + 2]);
        const double m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
        const double f2 = f * f, f3 = f2 * f;
        val = std::exp((2 * f3 - 3 * f2 + 1) * p1 + (f3 - 2 * f2 + f) * m1 +
                       (-2 * f3 + 3 * f2) * p2 + (f3 - f2) * m2);
      } else {
        val = (1.0 - f) * U[k] + f * U[k + 1];
      }
    }
    v[static_cast<Eigen::Index>(i)] = scale * val;
  }
  return RadialField(target, v);
}

double cutoff_value(double r, double delta) {
  if (!(delta > 0.0)) throw DomainError("cutoff: delta must be positive");
  return 1.0 - smooth_step(r / delta - 1.0);
}

RadialField cutoff(const RadialGrid& grid, double delta) {
  if (!(delta > 0.0)) throw DomainError("cutoff: delta must be positive");
  return RadialField::sample(grid, [&](double r) { return cutoff_value(r, delta); });
}

ExpansionResult fit_expansion(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.size() < 3) {
    throw ConfigurationError("fit_expansion: need at least three (eps, value) pairs");
  }
  const double q = eps[1] / eps[0];
  for (std::size_t k = 1; k < eps.size(); ++k) {
    if (std::abs(eps[k] / eps[k - 1] - q) > 1e-6 * q || !(q < 1.0)) {
      throw ConfigurationError("fit_expansion: eps_list must be geometric and decreasing");
    }
  }
  ExpansionResult out;
  out.eps = eps;
  out.values = values;
  std::vector<double> x, y;
  int sign = 0;
  out.monotone = true;
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    const double d = values[k] - values[k + 1];
    const int sk = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) sign = sk;
    if (sk == 0 || sk != sign) out.monotone = false;
    x.push_back(std::log(eps[k]));
    y.push_back(std::log(std::max(std::abs(d), 1e-300)));
  }
  const LineFit f = fit_line(x, y);
  out.slope = f.slope;
  out.coefficient = sign * std::exp(f.intercept) / (1.0 - std::pow(q, out.slope));
  out.limit = values.back() - out.coefficient * std::pow(eps.back(), out.slope);
  if (!out.monotone) out.warning = "expansion regime not reached: successive differences change sign";
  return out;
}

ExpansionResult energy_expansion_check(const AssembledForms& forms, const ProblemParams& params,
                                       const RadialField& U, const RadialField& eta,
                                       const std::vector<double>& eps_list) {
  if (!eta.grid.same_as(forms.grid)) throw ConfigurationError("energy_expansion_check: eta grid");
  const double center = bubble_center(U, params.alpha);
  const ProblemParams p0 = params.with_lambda(0.0);
  std::vector<double> values;
  for (double eps : eps_list) {
    const RadialField u = bubble(forms.grid, U, params.alpha, eps / center);
    values.push_back(rayleigh_quotient(forms, p0, eta.values.cwiseProduct(u.values)));
  }
  return fit_expansion(eps_list, values);
}

std::string to_string(ExistenceVerdict v) {
  return v == ExistenceVerdict::kExtremalsExist ? "EXTREMALS_EXIST" : "INCONCLUSIVE";
}

ExistenceVerdict existence_test(double mu_domain, double mu_rn, double rel_tol) {
  return mu_domain < mu_rn * (1.0 - rel_tol) ? ExistenceVerdict::kExtremalsExist
                                             : ExistenceVerdict::kInconclusive;
}

}  // namespace frachs
