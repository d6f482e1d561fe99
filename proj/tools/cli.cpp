#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "frachs/errors.hpp"
#include "frachs/kernel.hpp"

namespace frachs::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigurationError(std::string("config: '") + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigurationError(std::string("config: unknown key '") + key + "' in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

// number or array of numbers
std::vector<double> read_list(const json& v, const char* key) {
  try {
    if (v.is_array()) return v.get<std::vector<double>>();
    return {v.get<double>()};
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: '") + key + "' must be a number or a list: " + e.what());
  }
}

void read_window(const json& j, const char* key, FitWindow& w) {
  if (!j.contains(key)) return;
  const std::vector<double> v = read_list(j.at(key), key);
  if (v.size() != 2) throw ConfigurationError(std::string("config: '") + key + "' needs [lo, hi]");
  w = {v[0], v[1]};
}

ojson window_json(FitWindow w) { return ojson::array({w.lo, w.hi}); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigurationError("cannot write " + p.string());
  f << text;
  if (!f) throw NumericalError("write failed for " + p.string());
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson params_json(const ProblemParams& p) {
  return ojson{{"n", p.n}, {"alpha", p.alpha}, {"s", p.s}, {"gamma", p.gamma}, {"lambda", p.lambda}};
}

ojson grid_json(const GridSpec& g) {
  return ojson{{"N", g.N}, {"r_min", g.r_min}, {"R", g.R}, {"virtual_elements", g.virtual_elements}};
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
  const auto k = static_cast<std::size_t>(std::max(1, threads));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  if (k == 1 || count < 2) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(k, count); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

struct Context {
  const RunConfig& config;
  const Flags& flags;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& log;
  std::optional<CacheInfo> cache;
};

RadialGrid make_grid(const RunConfig& c) { return RadialGrid(c.params.n, c.grid.N, c.grid.r_min, c.grid.R); }

AssembledForms forms_for(Context& ctx, const ProblemParams& p) {
  const RadialGrid grid = make_grid(ctx.config);
  CacheInfo info;
  auto op = cached_operator(ctx.config, grid, &info);
  ctx.cache = info;
  return assemble(grid, p, std::move(op));
}

double resolve_lambda(const RunConfig& c, double l1) {
  return c.lambda_fraction ? *c.lambda_fraction * l1 : c.params.lambda;
}

// mass plus the manufactured-solution gate; an untrusted gate untrusts the mass
struct GatedMass {
  MassResult result;
  ManufacturedCheck check;
};

GatedMass gated_mass(const AssembledForms& forms, const ProblemParams& p, const MassSection& s,
                     double l1) {
  MassOptions mo;
  mo.eta_delta = s.eta_delta;
  mo.window = s.window;
  mo.discrete_exponents = s.discrete_exponents;
  mo.lambda1 = l1;
  GatedMass g{compute_mass(forms, p, mo), manufactured_recovery(forms, p, s.planted, mo)};
  if (!(g.check.relative_error <= 0.01)) g.result.trusted = false;
  return g;
}

int cmd_constants(Context& ctx) {
  const std::string csv = constants_csv(ctx.config);
  write_text(ctx.out_dir / "constants.csv", csv);
  ctx.out << csv;
  return kOk;
}

int cmd_solve(Context& ctx) {
  const RunConfig& c = ctx.config;
  ProblemParams p = c.params;
  p.validate();
  if (!(p.s < p.alpha)) throw PreconditionError("solve: requires s < alpha");
  const AssembledForms forms = forms_for(ctx, p);
  const double l1 = lambda_1(forms, p).value;
  p = p.with_lambda(resolve_lambda(c, l1));
  MinimizeOptions o;
  o.max_iter = c.solve.max_iter;
  o.rel_tol = c.solve.rel_tol;
  o.grad_tol = c.solve.grad_tol;
  o.head = c.solve.head;
  o.tail = c.solve.tail;
  const ExtremalResult r = minimize_mu(forms, p, o);
  const BetaPair b = beta_pm(p.n, p.alpha, p.gamma);

  std::ostringstream csv;
  csv << "r,u\n";
  for (std::size_t i = 0; i < r.field.size(); ++i) csv << fmt(forms.grid.node(i)) << ',' << fmt(r.field[i]) << '\n';
  write_text(ctx.out_dir / "minimizer.csv", csv.str());

  ojson j;
  j["params"] = params_json(p);
  j["grid"] = grid_json(c.grid);
  j["lambda_1"] = l1;
  j["mu"] = r.mu;
  j["kappa"] = r.kappa;
  j["beta_minus"] = b.minus;
  j["beta_plus"] = b.plus;
  j["fitted_beta0"] = r.fitted_beta0;
  j["fitted_betainf"] = r.fitted_betainf;
  j["fitted_lambda0"] = r.fitted_lambda0;
  j["fitted_lambdainf"] = r.fitted_lambdainf;
  j["fit_r2"] = r.fit_r2;
  j["head"] = window_json(c.solve.head);
  j["tail"] = window_json(c.solve.tail);
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  write_text(ctx.out_dir / "solve.json", j.dump(2) + "\n");
  ctx.out << "mu=" << fmt(r.mu) << '\n';
  return kOk;
}

int cmd_mass(Context& ctx) {
  const RunConfig& c = ctx.config;
  ProblemParams p = c.params;
  p.validate();
  const double gc = gamma_crit(p.n, p.alpha);
  if (!(p.gamma > gc)) {
    throw PreconditionError("mass: gamma=" + fmt(p.gamma) + " must exceed gamma_crit=" + fmt(gc));
  }
  const AssembledForms forms = forms_for(ctx, p);
  const double l1 = lambda_1(forms, p).value;
  p = p.with_lambda(resolve_lambda(c, l1));
  if (!(p.lambda < l1)) throw PreconditionError("mass: lambda=" + fmt(p.lambda) + " is not below lambda_1=" + fmt(l1));
  const GatedMass g = gated_mass(forms, p, c.mass, l1);
  const MassResult& m = g.result;

  MassVerdict verdict;
  double margin = m.uncertainty > 0.0 ? m.mass / m.uncertainty : 0.0;
  std::string note;
  if (p.lambda > 0.0) {
    const MassDecision d = mass_criterion(p, m);
    verdict = d.verdict;
    margin = d.margin;
  } else {
    // the existence statement needs λ > 0; no positive verdict at λ = 0
    verdict = m.trusted ? MassVerdict::kNonpositive : MassVerdict::kUntrusted;
    note = "lambda = 0: outside the existence statement, verdict withheld";
  }

  std::ostringstream csv;
  csv << "r,eta,corrector,profile\n";
  for (std::size_t i = 0; i < m.profile.size(); ++i) {
    csv << fmt(forms.grid.node(i)) << ',' << fmt(m.eta[i]) << ',' << fmt(m.corrector[i]) << ','
        << fmt(m.profile[i]) << '\n';
  }
  write_text(ctx.out_dir / "profile.csv", csv.str());

  ojson j;
  j["params"] = params_json(p);
  j["grid"] = grid_json(c.grid);
  j["lambda_1"] = l1;
  j["lambda_used"] = m.lambda_used;
  j["coercive"] = m.coercive;
  j["mass"] = m.mass;
  j["uncertainty"] = m.uncertainty;
  j["fit_r2"] = m.fit_r2;
  j["drift"] = m.drift;
  j["nested"] = m.nested;
  j["fit_window"] = ojson{{"first_node", m.fit_window.first},
                          {"last_node", m.fit_window.second},
                          {"r_lo", forms.grid.node(m.fit_window.first)},
                          {"r_hi", forms.grid.node(m.fit_window.second)}};
  j["trusted"] = m.trusted;
  j["beta_minus"] = m.betas_exact.minus;
  j["beta_plus"] = m.betas_exact.plus;
  j["lattice_beta_minus"] = m.betas.minus;
  j["lattice_beta_plus"] = m.betas.plus;
  j["positivity"] = positivity_check(m.profile);
  j["manufactured"] = ojson{{"planted", g.check.planted},
                            {"recovered", g.check.recovered},
                            {"relative_error", g.check.relative_error},
                            {"field_error", g.check.field_error}};
  j["verdict"] = to_string(verdict);
  j["margin"] = margin;
  if (!note.empty()) j["note"] = note;
  write_text(ctx.out_dir / "mass.json", j.dump(2) + "\n");

  ctx.out << to_string(verdict) << '\n';
  if (ctx.flags.manufactured) {
    ctx.out << "manufactured planted=" << fmt(g.check.planted) << " recovered=" << fmt(g.check.recovered)
            << " relative_error=" << fmt(g.check.relative_error) << '\n';
  }
  return kOk;
}

struct ScanRow {
  double gamma_fraction = 0.0, gamma = 0.0, lambda_fraction = 0.0, lambda = NAN, lambda1 = NAN;
  Regime regime = Regime::kSubcritical;
  double mu_domain = NAN, mu_rn = NAN, mass = NAN, mass_uncertainty = NAN;
  std::string mu_check, mass_verdict, verdict, error;
};

std::string clean(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
  }
  return s;
}

std::string opt(double v) { return std::isnan(v) ? "" : fmt(v); }

int cmd_scan(Context& ctx) {
  const RunConfig& c = ctx.config;
  const ScanSection& sc = c.scan;
  if (sc.gamma_fraction.empty() || sc.lambda_fraction.empty()) {
    throw ConfigurationError("scan: gamma_fraction and lambda_fraction must be non-empty");
  }
  ProblemParams base = c.params.with_lambda(0.0);
  base.gamma = 0.0;
  base.validate();
  if (!(base.s < base.alpha)) throw PreconditionError("scan: requires s < alpha");
  const double gh = hardy_constant(base.n, base.alpha);
  const AssembledForms forms = forms_for(ctx, base);

  struct PerGamma {
    ProblemParams p;
    double l1 = NAN, mu_rn = NAN;
    std::string error;
  };
  std::vector<PerGamma> pg(sc.gamma_fraction.size());
  parallel_for(pg.size(), ctx.flags.threads, [&](std::size_t k) {
    try {
      pg[k].p = base.with_gamma(sc.gamma_fraction[k] * gh);
      pg[k].l1 = lambda_1(forms, pg[k].p).value;
      pg[k].mu_rn = minimize_mu(forms, pg[k].p).mu;
    } catch (const std::exception& e) {
      pg[k].error = e.what();
    }
  });

  const std::size_t nl = sc.lambda_fraction.size();
  std::vector<ScanRow> rows(pg.size() * nl);
  parallel_for(rows.size(), ctx.flags.threads, [&](std::size_t idx) {
    const PerGamma& G = pg[idx / nl];
    ScanRow& r = rows[idx];
    r.gamma_fraction = sc.gamma_fraction[idx / nl];
    r.gamma = r.gamma_fraction * gh;
    r.lambda_fraction = sc.lambda_fraction[idx % nl];
    try {
      if (!G.error.empty()) throw NumericalError(G.error);
      r.regime = regime_of(base.n, base.alpha, r.gamma);
      r.lambda1 = G.l1;
      r.lambda = r.lambda_fraction * G.l1;
      r.mu_rn = G.mu_rn;
      const ProblemParams p = G.p.with_lambda(r.lambda);
      r.mu_domain = minimize_mu(forms, p).mu;
      r.mu_check = to_string(existence_test(r.mu_domain, r.mu_rn, sc.rel_tol));
      std::optional<MassVerdict> mv;
      if (r.regime == Regime::kCritical) {
        const GatedMass g = gated_mass(forms, p, c.mass, G.l1);
        r.mass = g.result.mass;
        r.mass_uncertainty = g.result.uncertainty;
        if (r.lambda > 0.0) {
          mv = mass_criterion(p, g.result).verdict;
        } else {
          mv = g.result.trusted ? MassVerdict::kNonpositive : MassVerdict::kUntrusted;
        }
        r.mass_verdict = to_string(*mv);
      }
      r.verdict = theorem_verdict(r.regime, r.lambda, r.lambda1, mv);
    } catch (const std::exception& e) {
      r.verdict = "FAILED";
      r.error = clean(e.what());
    }
  });

  std::ostringstream csv;
  csv << "gamma_fraction,gamma,regime,lambda_fraction,lambda,lambda_1,mu_domain,mu_rn,mu_check,"
         "mass,mass_uncertainty,mass_verdict,verdict,error\n";
  std::size_t failed = 0;
  for (const ScanRow& r : rows) {
    failed += r.verdict == "FAILED";
    csv << fmt(r.gamma_fraction) << ',' << fmt(r.gamma) << ',' << to_string(r.regime) << ','
        << fmt(r.lambda_fraction) << ',' << opt(r.lambda) << ',' << opt(r.lambda1) << ','
        << opt(r.mu_domain) << ',' << opt(r.mu_rn) << ',' << r.mu_check << ',' << opt(r.mass) << ','
        << opt(r.mass_uncertainty) << ',' << r.mass_verdict << ',' << r.verdict << ',' << r.error << '\n';
  }
  write_text(ctx.out_dir / "scan.csv", csv.str());
  ctx.out << "scan rows=" << rows.size() << " failed=" << failed << '\n';
  return failed == rows.size() ? kNumerical : kOk;
}

int cmd_kernel_selftest(Context& ctx) {
  const ProblemParams& p = ctx.config.params;
  if (!(p.n >= 1.0) || !(p.alpha > 0.0) || !(p.alpha < 2.0)) {
    throw DomainError("kernel-selftest: need n >= 1 and 0 < alpha < 2");
  }
  const Kernel k(p.n, p.alpha);
  // kappa_at is the path the assembler uses (closed form or table)
  std::ostringstream csv;
  csv << "t,kappa,reference,rel_error\n";
  double worst = 0.0;
  for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 50.0}) {
    const double tau = std::exp(-t);
    const double omt = -std::expm1(-t);
    const double a = k.kappa_at(t);
    const double ref = p.n == 1.0 ? std::pow(omt, -1.0 - p.alpha) + std::pow(1.0 + tau, -1.0 - p.alpha)
                                  : k.kappa_quadrature(tau, omt);
    const double err = std::abs(a - ref) / std::abs(ref);
    worst = std::max(worst, err);
    csv << fmt(t) << ',' << fmt(a) << ',' << fmt(ref) << ',' << fmt(err) << '\n';
  }
  write_text(ctx.out_dir / "kernel_selftest.csv", csv.str());
  ctx.out << csv.str() << "max_rel_error=" << fmt(worst) << '\n';
  return worst <= 1e-8 ? kOk : kNumerical;
}

}  // namespace

RunConfig load_config(const json& j) {
  check_keys(j, "config", {"params", "grid", "solve", "mass", "scan", "constants", "out", "cache_dir", "use_cache"});
  RunConfig c;
  std::vector<double> gammas;
  if (j.contains("params")) {
    const json& p = j.at("params");
    check_keys(p, "params", {"n", "alpha", "s", "gamma", "lambda", "lambda_fraction"});
    read(p, "n", c.params.n);
    read(p, "alpha", c.params.alpha);
    read(p, "s", c.params.s);
    read(p, "lambda", c.params.lambda);
    if (p.contains("gamma")) {
      gammas = read_list(p.at("gamma"), "gamma");
      if (gammas.empty()) throw ConfigurationError("config: 'gamma' list is empty");
      c.params.gamma = gammas.front();
    }
    if (p.contains("lambda_fraction") && !p.at("lambda_fraction").is_null()) {
      double f = 0.0;
      read(p, "lambda_fraction", f);
      c.lambda_fraction = f;
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"N", "r_min", "R", "virtual_elements"});
    read(g, "N", c.grid.N);
    read(g, "r_min", c.grid.r_min);
    read(g, "R", c.grid.R);
    read(g, "virtual_elements", c.grid.virtual_elements);
  }
  if (j.contains("solve")) {
    const json& s = j.at("solve");
    check_keys(s, "solve", {"max_iter", "rel_tol", "grad_tol", "head", "tail"});
    read(s, "max_iter", c.solve.max_iter);
    read(s, "rel_tol", c.solve.rel_tol);
    read(s, "grad_tol", c.solve.grad_tol);
    read_window(s, "head", c.solve.head);
    read_window(s, "tail", c.solve.tail);
  }
  if (j.contains("mass")) {
    const json& m = j.at("mass");
    check_keys(m, "mass", {"eta_delta", "window", "discrete_exponents", "planted"});
    read(m, "eta_delta", c.mass.eta_delta);
    read_window(m, "window", c.mass.window);
    read(m, "discrete_exponents", c.mass.discrete_exponents);
    read(m, "planted", c.mass.planted);
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    check_keys(s, "scan", {"gamma_fraction", "lambda_fraction", "rel_tol"});
    if (s.contains("gamma_fraction")) c.scan.gamma_fraction = read_list(s.at("gamma_fraction"), "gamma_fraction");
    if (s.contains("lambda_fraction")) c.scan.lambda_fraction = read_list(s.at("lambda_fraction"), "lambda_fraction");
    read(s, "rel_tol", c.scan.rel_tol);
  }
  c.constants = {{c.params.n}, {c.params.alpha}, {c.params.s}, gammas.empty() ? std::vector<double>{c.params.gamma} : gammas};
  if (j.contains("constants")) {
    const json& k = j.at("constants");
    check_keys(k, "constants", {"n", "alpha", "s", "gamma"});
    if (k.contains("n")) c.constants.n = read_list(k.at("n"), "n");
    if (k.contains("alpha")) c.constants.alpha = read_list(k.at("alpha"), "alpha");
    if (k.contains("s")) c.constants.s = read_list(k.at("s"), "s");
    if (k.contains("gamma")) c.constants.gamma = read_list(k.at("gamma"), "gamma");
  }
  read(j, "out", c.out);
  read(j, "cache_dir", c.cache_dir);
  read(j, "use_cache", c.use_cache);
  if (c.grid.N < 3) throw ConfigurationError("config: grid.N must be at least 3");
  return c;
}

RunConfig load_config_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigurationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
  return load_config(j);
}

ojson to_json(const RunConfig& c) {
  ojson j;
  j["params"] = params_json(c.params);
  j["params"]["lambda_fraction"] = c.lambda_fraction ? ojson(*c.lambda_fraction) : ojson(nullptr);
  j["grid"] = grid_json(c.grid);
  j["solve"] = ojson{{"max_iter", c.solve.max_iter},
                     {"rel_tol", c.solve.rel_tol},
                     {"grad_tol", c.solve.grad_tol},
                     {"head", window_json(c.solve.head)},
                     {"tail", window_json(c.solve.tail)}};
  j["mass"] = ojson{{"eta_delta", c.mass.eta_delta},
                    {"window", window_json(c.mass.window)},
                    {"discrete_exponents", c.mass.discrete_exponents},
                    {"planted", c.mass.planted}};
  j["scan"] = ojson{{"gamma_fraction", c.scan.gamma_fraction},
                    {"lambda_fraction", c.scan.lambda_fraction},
                    {"rel_tol", c.scan.rel_tol}};
  j["constants"] = ojson{{"n", c.constants.n},
                         {"alpha", c.constants.alpha},
                         {"s", c.constants.s},
                         {"gamma", c.constants.gamma}};
  j["out"] = c.out;
  j["cache_dir"] = c.cache_dir;
  j["use_cache"] = c.use_cache;
  return j;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string forms_key(double n, double alpha, const GridSpec& g) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "frachs-op v1 n=%a alpha=%a N=%zu r_min=%a R=%a M=%d", n, alpha, g.N,
                g.r_min, g.R, g.virtual_elements);
  return buf;
}

fs::path resolve_cache_dir(const RunConfig& c) {
  if (const char* env = std::getenv("FRACHS_CACHE_DIR"); env && *env) return env;
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "frachs";
  return ".frachs_cache";
}

std::shared_ptr<const ExtendedOperator> cached_operator(const RunConfig& c, const RadialGrid& grid,
                                                        CacheInfo* info) {
  const int M = c.grid.virtual_elements;
  const std::string key_text = forms_key(c.params.n, c.params.alpha, c.grid);
  const std::string key = content_hash(key_text);
  if (info) *info = {key, "", false};
  if (!c.use_cache) return std::make_shared<const ExtendedOperator>(grid, c.params.alpha, 0.0, M);

  const fs::path dir = resolve_cache_dir(c);
  const fs::path file = dir / ("op-" + key + ".bin");
  if (info) info->path = file.string();
  const auto rows = static_cast<std::int64_t>(grid.size()) - 2;
  const auto cols = static_cast<std::int64_t>(grid.size()) + 2 * M;

  if (std::ifstream in{file, std::ios::binary}) {
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string stored(len < 1024 ? len : 0, '\0');
    in.read(stored.data(), static_cast<std::streamsize>(stored.size()));
    std::int64_t r = 0, k = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof r);
    in.read(reinterpret_cast<char*>(&k), sizeof k);
    if (in && stored == key_text && r == rows && k == cols) {
      Eigen::MatrixXd A(r, k);
      in.read(reinterpret_cast<char*>(A.data()), static_cast<std::streamsize>(sizeof(double) * A.size()));
      if (in && A.allFinite()) {
        if (info) info->hit = true;
        return std::make_shared<const ExtendedOperator>(grid, c.params.alpha, 0.0, M, std::move(A));
      }
    }
  }

  auto op = std::make_shared<const ExtendedOperator>(grid, c.params.alpha, 0.0, M);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = file.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream o(tmp, std::ios::binary);
    const std::uint64_t len = key_text.size();
    o.write(reinterpret_cast<const char*>(&len), sizeof len);
    o.write(key_text.data(), static_cast<std::streamsize>(len));
    o.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    o.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    const Eigen::MatrixXd& A = op->action();
    o.write(reinterpret_cast<const char*>(A.data()), static_cast<std::streamsize>(sizeof(double) * A.size()));
    if (!o) ec = std::make_error_code(std::errc::io_error);
  }
  // a failed cache write only costs the next run an assembly
  if (!ec) fs::rename(tmp, file, ec);
  if (ec) fs::remove(tmp, ec);
  return op;
}

std::string to_string(Regime r) { return r == Regime::kSubcritical ? "subcritical" : "critical"; }

Regime regime_of(double n, double alpha, double gamma) {
  return gamma <= gamma_crit(n, alpha) ? Regime::kSubcritical : Regime::kCritical;
}

std::string theorem_verdict(Regime regime, double lambda, double lambda1, std::optional<MassVerdict> mass) {
  if (!(lambda > 0.0) || !(lambda < lambda1)) return "INCONCLUSIVE";
  if (regime == Regime::kSubcritical) return "EXTREMALS_EXIST";
  return mass == MassVerdict::kPositive ? "EXTREMALS_EXIST" : "INCONCLUSIVE";
}

std::string constants_csv(const RunConfig& c) {
  std::ostringstream os;
  os << "n,alpha,s,gamma,gamma_H,gamma_crit,beta_minus,beta_plus,crit_exponent\n";
  for (double n : c.constants.n) {
    for (double a : c.constants.alpha) {
      for (double s : c.constants.s) {
        for (double g : c.constants.gamma) {
          const ProblemParams p = ProblemParams::make(n, a, s, g);
          const BetaPair b = beta_pm(n, a, g);
          os << fmt(n) << ',' << fmt(a) << ',' << fmt(s) << ',' << fmt(g) << ',' << fmt(hardy_constant(n, a)) << ','
             << fmt(gamma_crit(n, a)) << ',' << fmt(b.minus) << ',' << fmt(b.plus) << ','
             << fmt(crit_exponent(p.n, p.alpha, p.s)) << '\n';
        }
      }
    }
  }
  return os.str();
}

int run_command(const std::string& command, const RunConfig& config, const Flags& flags,
                std::ostream& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const fs::path out_dir = flags.out ? fs::path(*flags.out) : fs::path(config.out);
  Context ctx{config, flags, out_dir, out, log, std::nullopt};
  int code = kOk;
  std::string message;
  try {
    fs::create_directories(out_dir);
    write_text(out_dir / "config.resolved.json", to_json(config).dump(2) + "\n");
    if (command == "constants") {
      code = cmd_constants(ctx);
    } else if (command == "solve") {
      code = cmd_solve(ctx);
    } else if (command == "mass") {
      code = cmd_mass(ctx);
    } else if (command == "scan") {
      code = cmd_scan(ctx);
    } else if (command == "kernel-selftest") {
      code = cmd_kernel_selftest(ctx);
    } else {
      throw ConfigurationError("unknown command '" + command + "'");
    }
  } catch (const NumericalError& e) {
    code = kNumerical;
    message = e.what();
  } catch (const PreconditionError& e) {
    code = kUsage;
    message = e.what();
  } catch (const DomainError& e) {
    code = kUsage;
    message = e.what();
  } catch (const ConfigurationError& e) {
    code = kUsage;
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    code = kUsage;
    message = e.what();
  } catch (const std::exception& e) {
    code = kNumerical;
    message = e.what();
  }
  if (!message.empty()) log << "frachs " << command << ": " << message << '\n';

  ojson prov;
  prov["command"] = command;
  prov["exit_code"] = code;
  if (!message.empty()) prov["error"] = message;
  prov["config_hash"] = content_hash(to_json(config).dump());
  prov["threads"] = flags.threads;
  prov["manufactured"] = flags.manufactured;
  if (ctx.cache) {
    prov["cache"] = ojson{{"key", ctx.cache->key}, {"path", ctx.cache->path}, {"hit", ctx.cache->hit}};
  }
  prov["started_utc"] = started;
  prov["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  prov["version"] = kVersion;
  prov["compiler"] = __VERSION__;
  try {
    write_text(out_dir / (command + ".provenance.json"), prov.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "frachs " << command << ": provenance not written: " << e.what() << '\n';
  }
  return code;
}

}  // namespace frachs::cli
