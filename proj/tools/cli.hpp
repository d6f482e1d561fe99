#pragma once

// Batch front end: config loading, the forms cache and the five subcommands.
// Data files carry no timestamps; run metadata goes to a provenance sidecar.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frachs/extremal.hpp"
#include "frachs/mass.hpp"

namespace frachs::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

struct GridSpec {
  std::size_t N = 401;
  double r_min = 1e-10;
  double R = 1.0;
  int virtual_elements = 8;
};

struct SolveSection {
  int max_iter = 20000;
  double rel_tol = 1e-10;
  double grad_tol = 1e-8;
  FitWindow head{0.2, 0.3};
  FitWindow tail{0.7, 0.8};
};

struct MassSection {
  double eta_delta = 0.2;
  FitWindow window{0.2, 0.4};
  bool discrete_exponents = true;
  double planted = 1.0;
};

struct ScanSection {
  std::vector<double> gamma_fraction{0.2, 0.5, 0.75, 0.85, 0.95};  // of γ_H
  std::vector<double> lambda_fraction{0.1, 0.3, 0.5, 0.7, 0.9};    // of λ₁(γ)
  double rel_tol = 0.01;  // for the μ(Ω) < μ(ℝⁿ) check
};

struct ConstantsSection {
  std::vector<double> n;
  std::vector<double> alpha;
  std::vector<double> s;
  std::vector<double> gamma;
};

struct RunConfig {
  ProblemParams params;
  std::optional<double> lambda_fraction;  // overrides params.lambda as a fraction of λ₁
  GridSpec grid;
  SolveSection solve;
  MassSection mass;
  ScanSection scan;
  ConstantsSection constants;  // defaults to the scalar params
  std::string out = ".";
  std::string cache_dir;  // empty: FRACHS_CACHE_DIR, then ~/.cache/frachs
  bool use_cache = true;
};

/// Parses a config; every field not given takes its default. Throws
/// ConfigurationError on unknown keys or wrong types.
RunConfig load_config(const nlohmann::json& j);
RunConfig load_config_file(const std::filesystem::path& path);
/// All fields, defaults included, in a fixed key order.
nlohmann::ordered_json to_json(const RunConfig& c);

/// 16 hex digits of FNV-1a over a canonical text; stable across platforms.
std::string content_hash(const std::string& text);
std::string forms_key(double n, double alpha, const GridSpec& g);
std::filesystem::path resolve_cache_dir(const RunConfig& c);

struct CacheInfo {
  std::string key;
  std::string path;
  bool hit = false;
};

/// Operator for the config grid, read from or written to the cache.
std::shared_ptr<const ExtendedOperator> cached_operator(const RunConfig& c, const RadialGrid& grid,
                                                        CacheInfo* info = nullptr);

enum class Regime { kSubcritical, kCritical };
std::string to_string(Regime r);
/// γ ≤ γ_crit is subcritical; for n < 2α, γ_crit = −1 and every γ ≥ 0 is critical.
Regime regime_of(double n, double alpha, double gamma);

/// Existence verdict per the theorem's hypothesis table: EXTREMALS_EXIST or
/// INCONCLUSIVE. Subcritical rows never look at `mass`.
std::string theorem_verdict(Regime regime, double lambda, double lambda1,
                            std::optional<MassVerdict> mass);

/// Header: n,alpha,s,gamma,gamma_H,gamma_crit,beta_minus,beta_plus,crit_exponent
std::string constants_csv(const RunConfig& c);

struct Flags {
  std::optional<std::string> out;
  int threads = 1;
  bool manufactured = false;
};

/// Runs a subcommand; returns the exit code. Messages go to `log`, verdict
/// lines and tables to `out`.
int run_command(const std::string& command, const RunConfig& config, const Flags& flags,
                std::ostream& out, std::ostream& log);

}  // namespace frachs::cli
