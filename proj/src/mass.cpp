#include "frachs/mass.hpp"

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

Eigen::VectorXd power_values(const RadialGrid& g, double beta) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::exp(-beta * g.log_node(i));
  return v;
}

void require_critical(const ProblemParams& p, const char* who) {
  const double gc = gamma_crit(p.n, p.alpha);
  if (!(p.gamma > gc)) {
    std::ostringstream os;
    os << who << ": gamma=" << p.gamma << " must exceed gamma_crit=" << gc
       << " for the singular profile to exist";
    throw PreconditionError(os.str());
  }
}

double bisect(const auto& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double discrete_psi(const AssembledForms& forms, double beta) {
  const RadialGrid& g = forms.grid;
  const Eigen::VectorXd v = power_values(g, beta);
  const PowerTail t{1.0, beta};
  const Eigen::VectorXd a = forms.op->apply(forms.op->extend(v, t, t), t, t);
  const auto i = static_cast<Eigen::Index>((g.size() - 1) / 2);
  return a[i - 1] / (forms.hardy[i] * v[i]);
}

BetaPair discrete_beta_pm(const AssembledForms& forms, double gamma) {
  const double top = forms.n - forms.alpha;
  if (!(gamma > 0.0)) return {0.0, top};
  // golden section for the maximum of Ψ_h
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = top;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = discrete_psi(forms, c), fd = discrete_psi(forms, d);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = discrete_psi(forms, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = discrete_psi(forms, d);
    }
  }
  const double peak = 0.5 * (a + b);
  const double pmax = discrete_psi(forms, peak);
  if (!(gamma < pmax)) {
    std::ostringstream os;
    os << "discrete_beta_pm: gamma=" << gamma << " exceeds the discrete Hardy constant " << pmax;
    throw DomainError(os.str());
  }
  auto f = [&](double beta) { return discrete_psi(forms, beta) - gamma; };
  if (!(f(top) < 0.0)) throw NumericalError("discrete_beta_pm: no root above the peak");
  return {bisect(f, 0.0, peak), bisect(f, peak, top)};
}

RadialField singular_rhs(const AssembledForms& forms, const ProblemParams& params,
                         const RadialField& eta, std::optional<double> beta_plus) {
  require_critical(params, "singular_rhs");
  if (!eta.grid.same_as(forms.grid)) throw ConfigurationError("singular_rhs: eta grid mismatch");
  const double bp = beta_plus ? *beta_plus : discrete_beta_pm(forms, params.gamma).plus;
  const RadialGrid& g = forms.grid;
  // ηS = S + (η − 1)S. On the lattice S = r^{−β} continued to both sides obeys
  // a(S, φ_i) = Ψ_h(β) hardy_i S_i exactly (translation invariance in log r),
  // so only the compactly supported part away from the hole goes through the
  // assembled operator. Applying the operator to S directly would pick up the
  // O(h²) mismatch between the analytic far tail and the P1 interpolant in
  // the rows next to r_min.
  const double sym = discrete_psi(forms, bp);
  const Eigen::VectorXd S = power_values(g, bp);
  const Eigen::VectorXd w = (eta.values.array() - 1.0).matrix().cwiseProduct(S);
  const PowerTail outer{-1.0, bp};
  const Eigen::VectorXd aw = forms.op->apply(forms.op->extend(w, {}, outer), {}, outer);
  const Eigen::Index Nf = forms.interior_size();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index k = 0; k < Nf; ++k) {
    const Eigen::Index i = k + 1;
    const double local = params.gamma * forms.hardy[i] + params.lambda * forms.mass[i];
    const double b = -(sym * forms.hardy[i] * S[i] + aw[k] - local * (S[i] + w[i]));
    f[i] = b / forms.mass[i];
  }
  return RadialField(g, f);
}

RadialField solve_corrector(const AssembledForms& forms, const ProblemParams& params,
                            const RadialField& f, SolverPath path, std::optional<double> lambda1) {
  const double l1 = lambda1 ? *lambda1 : lambda_1(forms, params).value;
  if (!(params.lambda < l1)) {
    std::ostringstream os;
    os << "solve_corrector: lambda=" << params.lambda << " is not below lambda_1=" << l1;
    throw PreconditionError(os.str());
  }
  const Eigen::MatrixXd K = forms.interior_operator(params.gamma, params.lambda);
  const Eigen::VectorXd b = interior(forms.mass).cwiseProduct(interior(f.values));
  Eigen::VectorXd g;
  if (path == SolverPath::kDirect) {
    g = ScaledCholesky(K).solve(b);
  } else {
    g = conjugate_gradient(K, b, 1e-15).x;
  }
  return RadialField(forms.grid, embed(g));
}

MassFit extract_mass(const RadialField& g, const ProblemParams& params, BetaPair betas,
                     FitWindow window) {
  const RadialGrid& grid = g.grid;
  const double d = betas.plus - betas.minus;
  const bool with_lambda = params.lambda != 0.0;
  const double e2 = params.alpha - d;
  const double xmin = std::log(grid.r_min());

  auto fit_on = [&](FitWindow w, double* se, double* r2, std::pair<std::size_t, std::size_t>* nodes) {
    const auto [lo, hi] = window_nodes(grid, w);
    const auto m = static_cast<Eigen::Index>(hi - lo + 1);
    const Eigen::Index cols = with_lambda ? 3 : 2;
    Eigen::MatrixXd X(m, cols);
    Eigen::VectorXd y(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(lo) + k;
      const double x = grid.log_node(i);
      y[k] = g[static_cast<std::size_t>(i)] * std::exp(betas.minus * x);
      X(k, 0) = 1.0;
      X(k, 1) = std::exp(-d * (x - xmin));
      if (with_lambda) X(k, 2) = std::exp(e2 * x);
    }
    // column scaling keeps the normal equations well conditioned
    Eigen::VectorXd scale = X.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < cols; ++c) X.col(c) /= scale[c];
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = y - X * coef;
    const double dof = static_cast<double>(std::max<Eigen::Index>(m - cols, 1));
    const double sigma2 = res.squaredNorm() / dof;
    const Eigen::MatrixXd cov = (X.transpose() * X).inverse() * sigma2;
    if (se) *se = std::sqrt(std::max(cov(0, 0), 0.0)) / scale[0];
    if (r2) *r2 = y.squaredNorm() > 0.0 ? 1.0 - res.squaredNorm() / y.squaredNorm() : 0.0;
    if (nodes) *nodes = {lo, hi};
    return coef[0] / scale[0];
  };

  MassFit out{};
  out.mass = fit_on(window, &out.std_error, &out.fit_r2, &out.window);
  const double span = window.hi - window.lo;
  out.nested = {out.mass, fit_on({window.lo, window.lo + 0.75 * span}, nullptr, nullptr, nullptr),
                fit_on({window.lo, window.lo + 0.5 * span}, nullptr, nullptr, nullptr)};
  const auto [mn, mx] = std::minmax_element(out.nested.begin(), out.nested.end());
  out.drift = out.mass != 0.0 ? (*mx - *mn) / std::abs(out.mass) : INFINITY;
  out.uncertainty = std::max(*mx - *mn, 2.0 * out.std_error);
  out.trusted = std::isfinite(out.mass) && out.fit_r2 >= 0.99 && out.drift <= 0.05;
  return out;
}

MassResult compute_mass(const AssembledForms& forms, const ProblemParams& params,
                        const MassOptions& options) {
  require_critical(params, "compute_mass");
  const RadialGrid& grid = forms.grid;
  if (!(4.0 * options.eta_delta <= grid.R())) {
    throw ConfigurationError("compute_mass: the cut-off needs B_{4 delta} inside the ball");
  }
  const double l1 = options.lambda1 ? *options.lambda1 : lambda_1(forms, params).value;
  const BetaPair exact = beta_pm(params.n, params.alpha, params.gamma);
  const BetaPair betas =
      options.discrete_exponents ? discrete_beta_pm(forms, params.gamma) : exact;

  const RadialField eta = cutoff(grid, options.eta_delta);
  const RadialField f = singular_rhs(forms, params, eta, betas.plus);
  const RadialField g = solve_corrector(forms, params, f, SolverPath::kDirect, l1);
  Eigen::VectorXd H = eta.values.cwiseProduct(power_values(grid, betas.plus)) + g.values;
  H[0] = 0.0;
  H[H.size() - 1] = 0.0;
  const MassFit fit = extract_mass(g, params, betas, options.window);
  return MassResult{fit.mass,
                    g,
                    RadialField(grid, H),
                    eta,
                    fit.window,
                    fit.fit_r2,
                    fit.drift,
                    fit.uncertainty,
                    fit.nested,
                    fit.trusted,
                    params.lambda,
                    l1,
                    params.lambda < l1,
                    betas,
                    exact};
}

std::string to_string(MassVerdict v) {
  switch (v) {
    case MassVerdict::kPositive:
      return "MASS_POSITIVE_EXTREMALS_EXIST";
    case MassVerdict::kNonpositive:
      return "MASS_NONPOSITIVE_INCONCLUSIVE";
    case MassVerdict::kUntrusted:
      break;
  }
  return "UNTRUSTED_FIT";
}

MassDecision mass_criterion(const ProblemParams& params, const MassResult& result) {
  require_critical(params, "mass_criterion");
  if (!(params.lambda > 0.0) || !(params.lambda < result.lambda1)) {
    throw PreconditionError("mass_criterion: requires 0 < lambda < lambda_1");
  }
  const double margin = result.uncertainty > 0.0 ? result.mass / result.uncertainty
                                                 : std::copysign(INFINITY, result.mass);
  if (!result.trusted) return {MassVerdict::kUntrusted, margin};
  return {margin > 1.0 ? MassVerdict::kPositive : MassVerdict::kNonpositive, margin};
}

bool positivity_check(const RadialField& H, double boundary_fraction) {
  const double lo = 2.0 * H.grid.r_min();
  const double hi = (1.0 - boundary_fraction) * H.grid.R();
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double r = H.grid.node(i);
    if (r > lo && r < hi && !(H[i] > 0.0)) return false;
  }
  return true;
}

ManufacturedCheck manufactured_recovery(const AssembledForms& forms, const ProblemParams& params,
                                        double planted, const MassOptions& options) {
  const RadialGrid& grid = forms.grid;
  const double l1 = options.lambda1 ? *options.lambda1 : lambda_1(forms, params).value;
  const BetaPair betas = options.discrete_exponents && params.gamma > 0.0
                             ? discrete_beta_pm(forms, params.gamma)
                             : beta_pm(params.n, params.alpha, params.gamma);
  const RadialField eta = cutoff(grid, options.eta_delta);
  Eigen::VectorXd gs = planted * eta.values.cwiseProduct(power_values(grid, betas.minus));
  gs[0] = 0.0;
  gs[gs.size() - 1] = 0.0;
  const Eigen::MatrixXd K = forms.interior_operator(params.gamma, params.lambda);
  const Eigen::VectorXd load = K * interior(gs);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(gs.size());
  f.segment(1, load.size()) = load.cwiseQuotient(interior(forms.mass));
  const RadialField g = solve_corrector(forms, params, RadialField(grid, f), SolverPath::kDirect, l1);
  const MassFit fit = extract_mass(g, params, betas, options.window);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = fit.window.first; i <= fit.window.second; ++i) {
    err = std::max(err, std::abs(g[i] - gs[static_cast<Eigen::Index>(i)]));
    ref = std::max(ref, std::abs(gs[static_cast<Eigen::Index>(i)]));
  }
  return {planted, fit.mass, std::abs(fit.mass - planted) / std::abs(planted), err / ref};
}

double corrector_gap(const RadialField& g1, const RadialField& g2, double beta_minus) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double w = std::exp(beta_minus * g1.grid.log_node(static_cast<std::ptrdiff_t>(i)));
    num = std::max(num, std::abs(g1[i] - g2[i]) * w);
    den = std::max(den, std::abs(g1[i]) * w);
  }
  return den > 0.0 ? num / den : num;
}

TestFunctionExpansion test_function_with_mass(const AssembledForms& forms,
                                              const ProblemParams& params, const RadialField& U,
                                              const RadialField& eta, const RadialField& g,
                                              BetaPair betas, double limit,
                                              const std::vector<double>& eps_list,
                                              FitWindow tail) {
  if (eps_list.empty()) throw ConfigurationError("test_function_with_mass: empty eps_list");
  const double center = bubble_center(U, params.alpha);
  const auto [lo, hi] = window_nodes(U.grid, tail);
  double lam = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    lam += U[i] * std::exp(betas.plus * U.grid.log_node(static_cast<std::ptrdiff_t>(i)));
  }
  lam /= static_cast<double>(hi - lo + 1);
  lam *= std::pow(center, 0.5 * (params.n - params.alpha) - betas.plus);
  if (!(lam > 0.0)) throw DomainError("test_function_with_mass: U has no positive tail");

  const double d = betas.plus - betas.minus;
  TestFunctionExpansion out;
  out.eps = eps_list;
  out.monotone = true;
  // U is cut at its outer boundary, so u_ε hands over to ε^{d/2} r^{−β+} across
  // the tail window. A hard cut at R_U ε would drop a log-divergent part of the
  // cross term with g.
  const double xa = U.grid.log_node(static_cast<std::ptrdiff_t>(lo));
  const double xb = U.grid.log_node(static_cast<std::ptrdiff_t>(hi));
  const RadialGrid& G = forms.grid;
  for (double eps : eps_list) {
    const double e = eps / center;
    const RadialField u = bubble(G, U, params.alpha, e);
    const double amp = std::pow(eps, 0.5 * d);
    Eigen::VectorXd v(u.values.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double x = G.log_node(i);
      const double t = std::clamp((x - std::log(e) - xa) / (xb - xa), 0.0, 1.0);
      const double w = 0.5 * (1.0 + std::cos(M_PI * t));
      v[i] = w * u.values[i] / lam + (1.0 - w) * amp * std::exp(-betas.plus * x);
    }
    const Eigen::VectorXd T = eta.values.cwiseProduct(v) + amp * g.values;
    const double J = rayleigh_quotient(forms, params, T);
    out.values.push_back(J);
    out.scaled.push_back((J - limit) / std::pow(eps, d));
  }
  // U approaches its power tail slowly, so only the small-ε half of the list
  // is used for the coefficient.
  const std::size_t half = out.scaled.size() / 2;
  double sum = 0.0;
  for (std::size_t k = half; k < out.scaled.size(); ++k) sum += out.scaled[k];
  out.coefficient = sum / static_cast<double>(out.scaled.size() - half);
  out.limit = limit;
  for (std::size_t k = half + 2; k < out.scaled.size(); ++k) {
    const double a = out.scaled[k - 1] - out.scaled[k - 2];
    const double b = out.scaled[k] - out.scaled[k - 1];
    if (a * b < 0.0) out.monotone = false;
  }
  if (!out.monotone) out.warning = "expansion regime not reached: scaled residuals oscillate";
  if (U.grid.r_min() * eps_list.back() / center < forms.grid.r_min()) {
    if (!out.warning.empty()) out.warning += "; ";
    out.warning += "bubble head clipped at r_min for the smallest eps";
  }
  return out;
}

}  // namespace frachs
