// opmeans: weighted operator means of SPD matrices, representing-function
// tables, and seeded property suites. See README.md for the file formats.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opmeans/calculus.hpp"
#include "opmeans/generators.hpp"
#include "opmeans/linalg.hpp"
#include "opmeans/solver.hpp"
#include "opmeans/verify.hpp"

namespace {

using nlohmann::json;
using namespace opmeans;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFailure = 2;  // non-convergence / failed verification

struct GlobalFlags {
  std::uint64_t seed = 42;
  int samples = 100;
  std::vector<int> dims;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<std::string> init;
};

Generator generator_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("name"))
    throw ConfigError("generator spec must be an object with a \"name\" field");
  std::optional<double> p;
  std::optional<double> lambda;
  if (spec.contains("p")) p = spec.at("p").get<double>();
  if (spec.contains("lambda")) lambda = spec.at("lambda").get<double>();
  return registry_get(spec.at("name").get<std::string>(), p, lambda);
}

SpdMatrix matrix_from_json(const json& flat, int n, std::size_t index) {
  if (!flat.is_array() || flat.size() != static_cast<std::size_t>(n) * n) {
    std::ostringstream os;
    os << "matrices[" << index << "] must be a flat row-major array of " << n * n << " numbers";
    throw ConfigError(os.str());
  }
  std::vector<double> entries;
  entries.reserve(flat.size());
  for (const json& v : flat) entries.push_back(v.get<double>());
  // Symmetry gate before symmetrization.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::fabs(entries[i * n + j] - entries[j * n + i]);
      if (gap > 1e-9) {
        std::ostringstream os;
        os << "matrices[" << index << "] is not symmetric: |a[" << i << "][" << j << "] - a[" << j
           << "][" << i << "]| = " << gap;
        throw ConfigError(os.str());
      }
    }
  return SpdMatrix(SymMatrix(n, entries));
}

struct LoadedProblem {
  MeanProblem problem;
  SolverConfig config;
};

LoadedProblem load_problem(const std::string& path, const GlobalFlags& flags) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  json doc = json::parse(in);  // parse errors carry line/column diagnostics

  for (const char* field : {"dim", "matrices", "weights", "generator"})
    if (!doc.contains(field))
      throw ConfigError(std::string("problem file is missing the \"") + field + "\" field");

  const int n = doc.at("dim").get<int>();
  if (n < 1) throw ConfigError("\"dim\" must be a positive integer");

  std::vector<SpdMatrix> matrices;
  const json& mats = doc.at("matrices");
  if (!mats.is_array() || mats.empty())
    throw ConfigError("\"matrices\" must be a non-empty array");
  for (std::size_t i = 0; i < mats.size(); ++i)
    matrices.push_back(matrix_from_json(mats[i], n, i));

  std::vector<double> weights = doc.at("weights").get<std::vector<double>>();
  Generator gen = generator_from_json(doc.at("generator"));
  MeanProblem problem(std::move(weights), std::move(matrices), std::move(gen));

  SolverConfig config;
  if (doc.contains("grad_tol")) config.grad_tol = doc.at("grad_tol").get<double>();
  if (doc.contains("max_iters")) config.max_iters = doc.at("max_iters").get<int>();
  if (doc.contains("init_strategy"))
    config.init_strategy = init_strategy_from_string(doc.at("init_strategy").get<std::string>());
  // Command-line flags override file settings.
  if (flags.tol) config.grad_tol = *flags.tol;
  if (flags.max_iters) config.max_iters = *flags.max_iters;
  if (flags.init) config.init_strategy = init_strategy_from_string(*flags.init);
  if (config.init_strategy == InitStrategy::Custom)
    throw ConfigError("custom init is only available through the library API");
  return LoadedProblem{std::move(problem), config};
}

json solution_to_json(const SpdMatrix& x) {
  json flat = json::array();
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) flat.push_back(x(i, j));
  return flat;
}

int cmd_compute(const std::string& path, const GlobalFlags& flags) {
  LoadedProblem loaded = load_problem(path, flags);
  const SolveReport report = solve_mean(loaded.problem, loaded.config);

  json bounds = nullptr;
  if (report.bound_slack) {
    bounds = json{{"classification", to_string(loaded.problem.generator().classification)},
                  {"slack", *report.bound_slack},
                  {"holds", *report.bound_slack >= -1e-9}};
  }
  json out{{"dim", loaded.problem.dim()},
           {"solution", solution_to_json(report.solution)},
           {"iterations", report.iterations},
           {"grad_norm", report.final_grad_norm()},
           {"converged", report.converged},
           {"termination", to_string(report.termination)},
           {"bounds_check", bounds}};
  std::cout << out.dump(2) << "\n";
  return report.converged ? kExitOk : kExitFailure;
}

Generator generator_from_flags(const std::string& name, std::optional<double> p,
                               std::optional<double> lambda) {
  return registry_get(name, p, lambda);
}

int cmd_phi_table(const Generator& gen, double t_min, double t_max, int steps) {
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw ConfigError("need 0 < t-min <= t-max");
  if (steps < 1) throw ConfigError("steps must be at least 1");
  const bool has_closed_form = closed_form_phi(gen, 1.0).has_value();

  std::printf(has_closed_form ? "t,phi_numeric,phi_closed_form,abs_gap\n" : "t,phi_numeric\n");
  for (int i = 0; i < steps; ++i) {
    const double frac = (steps == 1) ? 0.0 : static_cast<double>(i) / (steps - 1);
    const double t = t_min * std::pow(t_max / t_min, frac);
    const double phi = representing_phi(gen, {0.5, 0.5}, t);
    if (has_closed_form) {
      const double closed = *closed_form_phi(gen, t);
      std::printf("%.17g,%.17g,%.17g,%.17g\n", t, phi, closed, std::fabs(phi - closed));
    } else {
      std::printf("%.17g,%.17g\n", t, phi);
    }
  }
  return kExitOk;
}

std::vector<Generator> default_generator_set() {
  return {registry_get("karcher"),
          registry_get("shifted-log", std::nullopt, 1.0),
          registry_get("power-convex", 0.5),
          registry_get("power-concave", 1.0),
          registry_get("power-concave", 2.0)};
}

int cmd_verify(const std::string& suite, const GlobalFlags& flags) {
  const std::vector<std::string> known = {"majorization",    "congruence",
                                          "bounds",          "geodesic-convexity",
                                          "gradient",        "monotonicity-search",
                                          "convexity-probe", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    throw ConfigError("unknown suite '" + suite + "'");
  const bool all = suite == "all";
  const int samples = flags.samples;
  const std::uint64_t seed = flags.seed;

  json suites = json::object();
  bool all_passed = true;
  auto add = [&](const std::string& name, const PropertyReport& report) {
    if (!suites.contains(name)) suites[name] = json::array();
    suites[name].push_back(report.to_json());
    all_passed = all_passed && report.passed();
  };

  if (all || suite == "majorization") {
    const std::vector<int> dims = flags.dims.empty() ? std::vector<int>{2, 3, 4, 5, 6} : flags.dims;
    const std::vector<double> p_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    add("majorization", check_majorization(samples, dims, p_grid, seed));
  }
  if (all || suite == "congruence") {
    const std::vector<int> dims = flags.dims.empty() ? std::vector<int>{3} : flags.dims;
    for (const Generator& gen : default_generator_set())
      add("congruence", check_congruence_invariance(gen, samples, seed, dims));
  }
  if (all || suite == "bounds") {
    const std::vector<int> dims = flags.dims.empty() ? std::vector<int>{2, 3} : flags.dims;
    for (const Generator& gen : default_generator_set())
      add("bounds", check_mean_bounds(gen, samples, seed, dims));
  }
  if (all || suite == "geodesic-convexity") {
    const std::vector<int> dims = flags.dims.empty() ? std::vector<int>{2, 3, 4} : flags.dims;
    for (const Generator& gen : default_generator_set())
      add("geodesic-convexity", check_geodesic_convexity(gen, samples, seed, dims));
  }
  if (all || suite == "gradient") {
    for (const Generator& gen : default_generator_set())
      add("gradient", check_gradient(gen, samples, seed));
  }
  if (all || suite == "monotonicity-search") {
    add("monotonicity-search",
        search_monotonicity_violation(registry_get("power-concave", 2.0), samples, seed));
  }
  if (all || suite == "convexity-probe") {
    add("convexity-probe", probe_mean_convexity(registry_get("power-concave", 2.0), samples, seed));
  }

  json out{{"seed", seed}, {"samples", samples}, {"all_passed", all_passed}, {"suites", suites}};
  std::cout << out.dump(2) << "\n";
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("OPMEANS_MAX_DIM")) {
    try {
      set_max_dimension(std::stoi(cap));
    } catch (const std::exception& e) {
      std::cerr << "error: bad OPMEANS_MAX_DIM: " << e.what() << "\n";
      return kExitInput;
    }
  }

  CLI::App app{"Weighted multivariate operator means of SPD matrices"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Seed for all sampled suites")->capture_default_str();
  app.add_option("--samples", flags.samples, "Samples per suite")->capture_default_str();
  app.add_option("--dims", flags.dims, "Matrix dimensions to sample")->delimiter(',');
  app.add_option("--tol", flags.tol, "Solver gradient tolerance");
  app.add_option("--max-iters", flags.max_iters, "Solver iteration cap");
  app.add_option("--init", flags.init, "Solver initialization (arithmetic|log-euclidean)");
  app.fallthrough();

  std::string problem_path;
  CLI::App* compute = app.add_subcommand("compute", "Solve a mean problem from a JSON file");
  compute->add_option("problem", problem_path, "Problem file (JSON)")->required();

  std::string gen_name = "karcher";
  std::optional<double> gen_p;
  std::optional<double> gen_lambda;
  double t_min = 0.1, t_max = 10.0;
  int steps = 100;
  CLI::App* phi = app.add_subcommand("phi-table", "Tabulate the bivariate representing function");
  phi->add_option("--generator", gen_name, "Generator name")->capture_default_str();
  phi->add_option("--p", gen_p, "Generator parameter p");
  phi->add_option("--lambda", gen_lambda, "Generator parameter lambda");
  phi->add_option("--t-min", t_min, "Left end of the t range")->capture_default_str();
  phi->add_option("--t-max", t_max, "Right end of the t range")->capture_default_str();
  phi->add_option("--steps", steps, "Number of rows (log-spaced)")->capture_default_str();

  std::string suite;
  CLI::App* verify = app.add_subcommand("verify", "Run a seeded property suite");
  verify->add_option("suite", suite,
                     "majorization|congruence|bounds|geodesic-convexity|gradient|"
                     "monotonicity-search|convexity-probe|all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // CLI11 prints its own diagnostics
  }

  try {
    if (compute->parsed()) return cmd_compute(problem_path, flags);
    if (phi->parsed()) return cmd_phi_table(generator_from_flags(gen_name, gen_p, gen_lambda),
                                            t_min, t_max, steps);
    if (verify->parsed()) return cmd_verify(suite, flags);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
