#include "frachs/radialops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "frachs/errors.hpp"
#include "frachs/quadrature.hpp"

namespace frachs {

namespace {

constexpr int kGradedLevels = 45;
constexpr double kGradedRatio = 0.3;
constexpr int kGradedPoints = 10;

// Gauss order for the element-pair tensor at separation m ≥ 2.
int pair_order(Eigen::Index m) {
  if (m <= 4) return 12;
  if (m <= 16) return 8;
  return 6;
}

double integrate_panel(const QuadRule& g, double a, double b, const auto& f) {
  double s = 0.0;
  const double len = b - a;
  for (std::size_t q = 0; q < g.size(); ++q) s += g.w[q] * f(a + len * g.x[q]);
  return s * len;
}

}  // namespace

Eigen::VectorXd kernel_tail_integrals(const Kernel& k, double c, const Eigen::VectorXd& distances) {
  const double p = 0.5 * (k.n() + k.alpha());
  const double lam = p - c;
  if (!(lam > 0.0)) {
    std::ostringstream os;
    os << "kernel_tail_integrals: divergent tail, decay rate " << lam;
    throw DomainError(os.str());
  }
  const Eigen::Index K = distances.size();
  Eigen::VectorXd out(K);
  if (K == 0) return out;
  for (Eigen::Index i = 0; i < K; ++i) {
    if (!(distances[i] > 0.0)) throw DomainError("kernel_tail_integrals: distances must be positive");
  }
  // e^{ct} k̃(t) = e^{−λt} κ(e^{−t})
  auto f = [&](double t) { return std::exp(-lam * t) * k.kappa_at(t); };
  const QuadRule& g = gauss_legendre(8);
  const double step = std::min(1.0, 1.0 / lam);
  auto segment = [&](double a, double b) {
    double s = 0.0;
    double t = a;
    while (t < b) {
      double nx = std::min({b, t * 1.5, t + step});
      if (b - nx <= 1e-14 * b) nx = b;
      s += integrate_panel(g, t, nx, f);
      t = nx;
    }
    return s;
  };

  std::vector<Eigen::Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return distances[a] < distances[b]; });

  const double dmax = distances[order.back()];
  const double tend = dmax + 40.0 / lam + 1.0;
  // remainder beyond tend: κ is within ~e^{−2t} of its limit there
  double acc = segment(dmax, tend) + f(tend) / lam;
  double prev = dmax;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const double d = distances[*it];
    if (d < prev) acc += segment(d, prev);
    prev = d;
    out[*it] = acc;
  }
  return out;
}

ExtendedOperator::ExtendedOperator(const RadialGrid& grid, double alpha, double weight_shift,
                                   int virtual_elements)
    : grid_(grid), alpha_(alpha), shift_(weight_shift), M_(virtual_elements),
      kernel_(grid.n(), alpha) {
  if (M_ < 2) throw ConfigurationError("ExtendedOperator: need at least 2 virtual elements");
  if (grid_.h() > 1.0) {
    std::ostringstream os;
    os << "ExtendedOperator: log step h=" << grid_.h()
       << " is too coarse for the piecewise-linear log-space discretization (need h <= 1)";
    throw ConfigurationError(os.str());
  }
  c0_ = 0.5 * c_n_alpha(grid_.n(), alpha_) * sphere_area(grid_.n());
  cw_ = grid_.n() - alpha_ - 2.0 * shift_;
  assemble();
}

ExtendedOperator::ExtendedOperator(const RadialGrid& grid, double alpha, double weight_shift,
                                   int virtual_elements, Eigen::MatrixXd action)
    : grid_(grid), alpha_(alpha), shift_(weight_shift), M_(virtual_elements),
      kernel_(grid.n(), alpha), action_(std::move(action)) {
  const auto N = static_cast<Eigen::Index>(grid_.size());
  if (action_.rows() != N - 2 || action_.cols() != N + 2 * M_) {
    throw ConfigurationError("ExtendedOperator: cached action matrix has the wrong shape");
  }
  c0_ = 0.5 * c_n_alpha(grid_.n(), alpha_) * sphere_area(grid_.n());
  cw_ = grid_.n() - alpha_ - 2.0 * shift_;
}

void ExtendedOperator::assemble() {
  const auto N = static_cast<Eigen::Index>(grid_.size());
  const Eigen::Index Ne = N + 2 * M_;
  const Eigen::Index nel = Ne - 1;
  const Eigen::Index Nf = N - 2;
  const double h = grid_.h();
  const double cp = 0.5 * cw_ * h;
  action_.setZero(Nf, Ne);

  auto xe = [&](Eigen::Index e) { return extended_log_node(e); };
  auto row_of = [&](Eigen::Index e) -> Eigen::Index {
    const Eigen::Index r = e - M_ - 1;
    return (r >= 0 && r < Nf) ? r : -1;
  };
  auto scatter = [&](const Eigen::Index* dofs, int k, const double* T, double scale) {
    for (int a = 0; a < k; ++a) {
      const Eigen::Index r = row_of(dofs[a]);
      if (r < 0) continue;
      for (int b = 0; b < k; ++b) action_(r, dofs[b]) += scale * T[a * k + b];
    }
  };

  // m = 0: ∫_0^1 t² k̃(ht) e^{c t}(e^{c(2−2t)} − 1)/c dt, c = cp
  const QuadRule graded = graded_rule(kGradedLevels, kGradedRatio, kGradedPoints);
  double I0 = 0.0;
  for (std::size_t q = 0; q < graded.size(); ++q) {
    const double t = graded.x[q];
    const double rest = cp == 0.0 ? 2.0 - 2.0 * t : std::expm1(cp * (2.0 - 2.0 * t)) / cp;
    I0 += graded.w[q] * t * t * kernel_.scaled(h * t) * std::exp(cp * t) * rest;
  }
  const std::array<double, 4> T0 = {I0, -I0, -I0, I0};

  // m = 1: dofs (lo, lo+1, lo+2); ξ in the upper cell, η = 1 − ζ in the lower.
  // Duffy split of the unit square at the singular corner ξ = η = 0.
  std::array<double, 9> T1{};
  {
    const QuadRule& gw = gauss_legendre(12);
    for (int tri = 0; tri < 2; ++tri) {
      for (std::size_t i = 0; i < graded.size(); ++i) {
        const double rho = graded.x[i];
        for (std::size_t j = 0; j < gw.size(); ++j) {
          const double w = gw.x[j];
          const double xi = tri == 0 ? rho : rho * w;
          const double eta = tri == 0 ? rho * w : rho;
          const double weight = graded.w[i] * gw.w[j] * rho * std::exp(cp * (xi + 1.0 - eta)) *
                                kernel_.scaled(h * (xi + eta));
          const double d[3] = {-eta, eta - xi, xi};
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) T1[static_cast<std::size_t>(a * 3 + b)] += weight * d[a] * d[b];
        }
      }
    }
  }

  // m ≥ 2: slots [ψ0(ξ), ψ1(ξ), −ψ0(ζ), −ψ1(ζ)]
  std::vector<std::array<double, 16>> Tm(static_cast<std::size_t>(nel));
  for (Eigen::Index m = 2; m < nel; ++m) {
    const QuadRule& g = gauss_legendre(pair_order(m));
    std::array<double, 16> T{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double xi = g.x[i];
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double zeta = g.x[j];
        const double weight = g.w[i] * g.w[j] * std::exp(cp * (xi + zeta)) *
                              kernel_.scaled(h * (static_cast<double>(m) + xi - zeta));
        const double sl[4] = {1.0 - xi, xi, -(1.0 - zeta), -zeta};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) T[static_cast<std::size_t>(a * 4 + b)] += weight * sl[a] * sl[b];
      }
    }
    Tm[static_cast<std::size_t>(m)] = T;
  }

  const double h2 = h * h;
  const Eigen::Index dom_lo = M_;
  const Eigen::Index dom_hi = M_ + N - 2;  // last domain element
  for (Eigen::Index k = dom_lo; k <= dom_hi; ++k) {
    for (Eigen::Index l = 0; l < nel; ++l) {
      if (l > k && l <= dom_hi) continue;  // domain pairs once
      const Eigen::Index lo = std::min(k, l);
      const Eigen::Index hi = std::max(k, l);
      const Eigen::Index m = hi - lo;
      if (m == 0) {
        const Eigen::Index dofs[2] = {lo, lo + 1};
        scatter(dofs, 2, T0.data(), c0_ * h2 * std::exp(cw_ * xe(lo)));
      } else if (m == 1) {
        const Eigen::Index dofs[3] = {lo, lo + 1, lo + 2};
        scatter(dofs, 3, T1.data(), 2.0 * c0_ * h2 * std::exp(0.5 * cw_ * (xe(lo) + xe(hi))));
      } else {
        const Eigen::Index dofs[4] = {hi, hi + 1, lo, lo + 1};
        scatter(dofs, 4, Tm[static_cast<std::size_t>(m)].data(),
                2.0 * c0_ * h2 * std::exp(0.5 * cw_ * (xe(lo) + xe(hi))));
      }
    }
  }

  // Interaction with the zero exterior beyond the virtual cells.
  const QuadRule& g8 = gauss_legendre(8);
  const double A = xe(0);
  const double B = xe(Ne - 1);
  const Eigen::Index npts = (N - 1) * static_cast<Eigen::Index>(g8.size());
  Eigen::VectorXd xs(npts), dr(npts), dl(npts);
  for (Eigen::Index e = dom_lo, idx = 0; e <= dom_hi; ++e) {
    for (std::size_t q = 0; q < g8.size(); ++q, ++idx) {
      xs[idx] = xe(e) + h * g8.x[q];
      dr[idx] = B - xs[idx];
      dl[idx] = xs[idx] - A;
    }
  }
  const Eigen::VectorXd fr = kernel_tail_integrals(kernel_, 0.5 * cw_, dr);
  const Eigen::VectorXd fl = kernel_tail_integrals(kernel_, -0.5 * cw_, dl);
  for (Eigen::Index e = dom_lo, idx = 0; e <= dom_hi; ++e) {
    std::array<double, 4> F{};
    for (std::size_t q = 0; q < g8.size(); ++q, ++idx) {
      const double wfar = std::exp(cw_ * xs[idx]) * (fr[idx] + fl[idx]);
      const double xi = g8.x[q];
      const double psi[2] = {1.0 - xi, xi};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) F[static_cast<std::size_t>(a * 2 + b)] += g8.w[q] * wfar * psi[a] * psi[b];
    }
    const Eigen::Index dofs[2] = {e, e + 1};
    scatter(dofs, 2, F.data(), 2.0 * c0_ * h);
  }

  // Exact symmetry of the Dirichlet block.
  auto blk = action_.block(0, M_ + 1, Nf, Nf);
  const Eigen::MatrixXd sym = 0.5 * (Eigen::MatrixXd(blk) + Eigen::MatrixXd(blk).transpose());
  blk = sym;
}

Eigen::MatrixXd ExtendedOperator::dirichlet_block() const {
  return action_.block(0, M_ + 1, free_size(), free_size());
}

Eigen::VectorXd ExtendedOperator::far_power_load(bool outer, double beta) const {
  const auto N = static_cast<Eigen::Index>(grid_.size());
  const Eigen::Index Ne = N + 2 * M_;
  const double h = grid_.h();
  const QuadRule& g8 = gauss_legendre(8);
  const double A = extended_log_node(0);
  const double B = extended_log_node(Ne - 1);
  const Eigen::Index npts = (N - 1) * static_cast<Eigen::Index>(g8.size());
  Eigen::VectorXd xs(npts), d(npts);
  for (Eigen::Index j = 0, idx = 0; j < N - 1; ++j) {
    for (std::size_t q = 0; q < g8.size(); ++q, ++idx) {
      xs[idx] = grid_.log_node(j) + h * g8.x[q];
      d[idx] = outer ? B - xs[idx] : xs[idx] - A;
    }
  }
  const double c = outer ? 0.5 * cw_ - beta : beta - 0.5 * cw_;
  const Eigen::VectorXd F = kernel_tail_integrals(kernel_, c, d);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(free_size());
  for (Eigen::Index j = 0, idx = 0; j < N - 1; ++j) {
    for (std::size_t q = 0; q < g8.size(); ++q, ++idx) {
      const double v = 2.0 * c0_ * h * g8.w[q] * std::exp((cw_ - beta) * xs[idx]) * F[idx];
      const double xi = g8.x[q];
      // grid node j ↔ row j−1
      if (j - 1 >= 0 && j - 1 < free_size()) load[j - 1] += v * (1.0 - xi);
      if (j < free_size()) load[j] += v * xi;
    }
  }
  return load;
}

Eigen::VectorXd ExtendedOperator::extend(const Eigen::VectorXd& grid_values, const PowerTail& inner,
                                         const PowerTail& outer) const {
  const auto N = static_cast<Eigen::Index>(grid_.size());
  if (grid_values.size() != N) throw DomainError("ExtendedOperator::extend: size mismatch");
  Eigen::VectorXd ext(N + 2 * M_);
  for (Eigen::Index e = 0; e < M_; ++e) {
    ext[e] = inner.coef == 0.0 ? 0.0 : inner.coef * std::exp(-inner.beta * extended_log_node(e));
    const Eigen::Index eo = M_ + N + e;
    ext[eo] = outer.coef == 0.0 ? 0.0 : outer.coef * std::exp(-outer.beta * extended_log_node(eo));
  }
  ext.segment(M_, N) = grid_values;
  return ext;
}

Eigen::VectorXd ExtendedOperator::apply(const Eigen::VectorXd& ext, const PowerTail& inner,
                                        const PowerTail& outer) const {
  if (ext.size() != extended_size()) throw DomainError("ExtendedOperator::apply: size mismatch");
  Eigen::VectorXd out = action_ * ext;
  if (inner.coef != 0.0) out -= inner.coef * far_power_load(false, inner.beta);
  if (outer.coef != 0.0) out -= outer.coef * far_power_load(true, outer.beta);
  return out;
}

Eigen::MatrixXd AssembledForms::interior_operator(double gamma, double lambda) const {
  const Eigen::Index Nf = interior_size();
  Eigen::MatrixXd K = gagliardo.block(1, 1, Nf, Nf);
  K.diagonal() -= gamma * hardy.segment(1, Nf) + lambda * mass.segment(1, Nf);
  return K;
}

AssembledForms assemble(const RadialGrid& grid, const ProblemParams& params) {
  params.validate();
  return assemble(grid, params, std::make_shared<const ExtendedOperator>(grid, params.alpha));
}

AssembledForms assemble(const RadialGrid& grid, const ProblemParams& params,
                        std::shared_ptr<const ExtendedOperator> op) {
  params.validate();
  if (grid.n() != params.n) throw ConfigurationError("assemble: grid dimension differs from params.n");
  if (!op || !op->grid().same_as(grid) || op->alpha() != params.alpha || op->weight_shift() != 0.0) {
    throw ConfigurationError("assemble: operator does not match grid and params");
  }
  const auto N = static_cast<Eigen::Index>(grid.size());
  const double S = sphere_area(params.n);
  AssembledForms f{grid,
                   params.n,
                   params.alpha,
                   params.s,
                   Eigen::MatrixXd::Zero(N, N),
                   S * grid.hat_moments(params.n - params.alpha),
                   S * grid.hat_moments(params.n),
                   S * grid.hat_moments(params.n - params.s),
                   op};
  f.gagliardo.block(1, 1, N - 2, N - 2) = op->dirichlet_block();
  return f;
}

RadialField exterior_potential(const RadialGrid& grid, double n, double alpha) {
  if (grid.n() != n) throw ConfigurationError("exterior_potential: grid dimension differs from n");
  Kernel k(n, alpha);
  const auto N = static_cast<Eigen::Index>(grid.size());
  const double xl = grid.x0();
  const double xr = grid.log_node(N - 1);
  Eigen::VectorXd xs(N), dr(N), dl(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    double x = grid.log_node(i);
    if (i == 0) x += 0.5 * grid.h();
    if (i == N - 1) x -= 0.5 * grid.h();
    xs[i] = x;
    dr[i] = xr - x;
    dl[i] = x - xl;
  }
  const Eigen::VectorXd fr = kernel_tail_integrals(k, 0.5 * (n - alpha), dr);
  const Eigen::VectorXd fl = kernel_tail_integrals(k, -0.5 * (n - alpha), dl);
  Eigen::VectorXd w(N);
  for (Eigen::Index i = 0; i < N; ++i) w[i] = std::exp(-alpha * xs[i]) * (fr[i] + fl[i]);
  return RadialField(grid, w);
}

double power_law_residual(const ExtendedOperator& op, const ProblemParams& params, double beta) {
  const double top = params.n - params.alpha;
  if (!(beta > 0.0) || !(beta < top)) {
    std::ostringstream os;
    os << "power_law_residual: beta=" << beta << " outside (0, n-alpha=" << top << ")";
    throw DomainError(os.str());
  }
  if (op.weight_shift() != 0.0 || op.alpha() != params.alpha || op.grid().n() != params.n) {
    throw ConfigurationError("power_law_residual: operator does not match params");
  }
  const RadialGrid& g = op.grid();
  const auto N = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd vals(N);
  for (Eigen::Index i = 0; i < N; ++i) vals[i] = std::exp(-beta * g.log_node(i));
  const PowerTail tail{1.0, beta};
  const Eigen::VectorXd a = op.apply(op.extend(vals, tail, tail), tail, tail);
  const Eigen::VectorXd target = sphere_area(params.n) * psi(params.n, params.alpha, beta) *
                                 g.hat_moments(params.n - params.alpha - beta);
  const double L = g.log_node(N - 1) - g.x0();
  double worst = 0.0;
  for (Eigen::Index i = 1; i < N - 1; ++i) {
    const double rel = g.log_node(i) - g.x0();
    if (rel < 0.25 * L || rel > 0.75 * L) continue;
    worst = std::max(worst, std::abs(a[i - 1] / target[i] - 1.0));
  }
  return worst;
}

double power_law_residual(const RadialGrid& grid, const ProblemParams& params, double beta) {
  ExtendedOperator op(grid, params.alpha);
  return power_law_residual(op, params, beta);
}

double weighted_square_integral(const RadialGrid& grid, const Eigen::VectorXd& values, double c) {
  const auto N = static_cast<Eigen::Index>(grid.size());
  if (values.size() != N) throw DomainError("weighted_square_integral: size mismatch");
  const QuadRule& g = gauss_legendre(6);
  const double h = grid.h();
  double s = 0.0;
  for (Eigen::Index e = 0; e + 1 < N; ++e) {
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double xi = g.x[q];
      const double u = values[e] * (1.0 - xi) + values[e + 1] * xi;
      s += g.w[q] * u * u * std::exp(c * (grid.log_node(e) + h * xi));
    }
  }
  return s * h;
}

double ground_state_identity_gap(const RadialGrid& grid, const ProblemParams& params, double beta,
                                 const RadialField& u) {
  const double top = params.n - params.alpha;
  if (!(beta >= 0.0) || !(beta < top)) throw DomainError("ground_state_identity_gap: beta out of range");
  if (!u.grid.same_as(grid)) throw DomainError("ground_state_identity_gap: field lives on another grid");
  const auto N = static_cast<Eigen::Index>(grid.size());
  const double umax = u.values.cwiseAbs().maxCoeff();
  if (std::abs(u.values[0]) > 1e-14 * umax || std::abs(u.values[N - 1]) > 1e-14 * umax) {
    throw DomainError("ground_state_identity_gap: u must vanish at the boundary nodes");
  }
  ExtendedOperator plain(grid, params.alpha, 0.0);
  ExtendedOperator weighted(grid, params.alpha, beta);
  const Eigen::VectorXd ui = u.values.segment(1, N - 2);
  Eigen::VectorXd vi(N - 2);
  for (Eigen::Index i = 0; i < N - 2; ++i) vi[i] = std::exp(beta * grid.log_node(i + 1)) * ui[i];
  const double lhs = ui.dot(plain.dirichlet_block() * ui);
  const double hardy = sphere_area(params.n) * psi(params.n, params.alpha, beta) *
                       weighted_square_integral(grid, u.values, params.n - params.alpha);
  const double wform = vi.dot(weighted.dirichlet_block() * vi);
  return std::abs(lhs - hardy - wform) / std::abs(lhs);
}

double BEtaValue::gap() const {
  const double scale = std::max({std::abs(value), std::abs(pairwise), 1e-300});
  return std::abs(value - pairwise) / scale;
}

namespace {

void check_eta(const RadialField& eta, const AssembledForms& forms) {
  if (eta.size() != forms.grid.size()) throw DomainError("b_eta_form: eta has the wrong size");
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] < -1e-14 || eta[i] > 1.0 + 1e-14) {
      std::ostringstream os;
      os << "b_eta_form: eta must take values in [0,1], eta[" << i << "]=" << eta[i];
      throw DomainError(os.str());
    }
  }
}

}  // namespace

BEtaValue b_eta_form(const AssembledForms& forms, const RadialField& eta, const RadialField& phi,
                     const RadialField& psi_f) {
  check_eta(eta, forms);
  if (phi.size() != eta.size() || psi_f.size() != eta.size()) {
    throw DomainError("b_eta_form: field sizes differ");
  }
  const Eigen::MatrixXd& G = forms.gagliardo;
  const Eigen::VectorXd& e = eta.values;
  const Eigen::VectorXd& f = phi.values;
  const Eigen::VectorXd& p = psi_f.values;
  const double v = e.cwiseProduct(f).dot(G * p) - f.dot(G * e.cwiseProduct(p));
  double pw = 0.0;
  const Eigen::Index N = G.rows();
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      pw += -G(i, j) * (e[i] - e[j]) * (f[j] * p[i] - f[i] * p[j]);
    }
  }
  return {v, pw};
}

double b_eta_squared_form(const AssembledForms& forms, const RadialField& eta, const RadialField& phi) {
  check_eta(eta, forms);
  const Eigen::MatrixXd& G = forms.gagliardo;
  const Eigen::Index N = G.rows();
  double s = 0.0;
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double d = eta[static_cast<std::size_t>(i)] - eta[static_cast<std::size_t>(j)];
      s += -G(i, j) * d * d * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
    }
  }
  return s;
}

RadialField kelvin_transform(const RadialField& u, const ProblemParams& params) {
  const RadialGrid g = u.grid.reflected();
  const auto N = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd w(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    w[i] = std::exp((params.alpha - params.n) * g.log_node(i)) * u.values[N - 1 - i];
  }
  return RadialField(g, w);
}

}  // namespace frachs
