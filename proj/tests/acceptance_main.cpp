// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "opmeans/calculus.hpp"
#include "opmeans/generators.hpp"
#include "opmeans/solver.hpp"
#include "opmeans/verify.hpp"

using namespace opmeans;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] C%-2d %-28s %s\n", pass ? "PASS" : "FAIL", criterion, name, detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Generator> generators_with_f() {
  return {registry_get("karcher"), registry_get("shifted-log", std::nullopt, 1.0),
          registry_get("power-convex", 0.5), registry_get("power-concave", 2.0)};
}

std::vector<Generator> classified_generators() {
  return {registry_get("karcher"), registry_get("shifted-log", std::nullopt, 1.0),
          registry_get("power-convex", 0.5), registry_get("power-concave", 1.0),
          registry_get("power-concave", 2.0)};
}

MeanProblem random_problem_in(Rng& rng, const Generator& gen, int n, int k, double lo,
                              double hi) {
  std::vector<SpdMatrix> mats;
  for (int i = 0; i < k; ++i) mats.push_back(random_spd(rng, n, lo, hi));
  return MeanProblem(random_weights(rng, k), std::move(mats), gen);
}

// 1. Gradient formula (finite differences vs the perspective form).
void criterion_gradient_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  const int ns[3] = {2, 3, 5};
  const int ks[3] = {1, 3, 4};
  const double h = 1e-5;
  double worst = 0.0;
  bool pass = true;
  for (const Generator& gen : generators_with_f()) {
    for (int s = 0; s < 50; ++s) {
      Rng rng = Rng::for_sample(2026, s);
      const int n = ns[s % 3];
      const int k = ks[s % 3];
      const MeanProblem problem = random_problem_in(rng, gen, n, k, 0.2, 5.0);
      const SpdMatrix x = random_spd(rng, n, 0.2, 5.0);
      const SymMatrix grad = gradient(problem, x);
      const double fx = trace_objective(problem, x);
      for (int d = 0; d < 20; ++d) {
        const SymMatrix v = random_sym_direction(rng, n);
        const double fd = (trace_objective(problem, SpdMatrix(x.sym() + h * v)) -
                           trace_objective(problem, SpdMatrix(x.sym() + (-h) * v))) /
                          (2.0 * h);
        const double gap = std::fabs(fd - trace_inner(x, grad, v)) / (1.0 + std::fabs(fx));
        worst = std::max(worst, gap);
        if (gap > 1e-6) pass = false;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) pass = false;
  std::ostringstream os;
  os << "worst rel err " << worst << " (tol 1e-6), " << elapsed << " s (cap 30)";
  report(1, "gradient-formula", pass, os.str());
}

// 2. representing_phi vs the printed closed forms.
void criterion_phi_cross_oracle() {
  bool pass = true;
  double worst = 0.0;
  const auto sweep = [&](const Generator& gen) {
    for (int i = 0; i < 1000; ++i) {
      const double t = 1e-3 * std::pow(1e6, i / 999.0);
      const double gap =
          std::fabs(representing_phi(gen, {0.5, 0.5}, t) - *closed_form_phi(gen, t));
      worst = std::max(worst, gap);
      if (gap > 1e-10) pass = false;
    }
  };
  for (double p : {0.25, 0.5, 0.75}) sweep(registry_get("power-convex", p));
  for (double p : {1.0, 1.5, 2.0}) sweep(registry_get("power-concave", p));

  // Spot values.
  const double spot = representing_phi(registry_get("power-concave", 2.0), {0.5, 0.5}, 4.0);
  if (std::fabs(spot - 2.915476) > 5e-7) pass = false;
  const Generator p1 = registry_get("power-concave", 1.0);
  for (double t : {0.2, 1.0, 4.0, 700.0})
    if (*closed_form_phi(p1, t) != (t + 1.0) / 2.0) pass = false;

  std::ostringstream os;
  os << "worst |phi_num - phi_closed| " << worst << " (tol 1e-10), spot phi(4) = " << spot;
  report(2, "phi-cross-oracle", pass, os.str());
}

// 3. solve_mean vs bivariate_mean on k=2.
void criterion_bivariate_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  SolverConfig config;
  config.grad_tol = 1e-11;
  config.max_iters = 30000;
  bool pass = true;
  double worst = 0.0;
  const std::vector<Generator> gens = {registry_get("power-convex", 0.5),
                                       registry_get("power-concave", 2.0),
                                       registry_get("karcher")};
  for (const Generator& gen : gens) {
    for (int s = 0; s < 100; ++s) {
      Rng rng = Rng::for_sample(5150, s);
      const int n = 2 + s % 3;  // 2..4
      const SpdMatrix a1 = random_spd(rng, n, 1e-1, 1e1);
      const SpdMatrix a2 = random_spd(rng, n, 1e-1, 1e1);
      const std::vector<double> w = random_weights(rng, 2);
      const SolveReport r = solve_mean(MeanProblem(w, {a1, a2}, gen), config);
      if (!r.converged) {
        pass = false;
        continue;
      }
      const SpdMatrix direct = bivariate_mean(gen, {w[0], w[1]}, a1, a2);
      const double gap =
          (r.solution.sym() - direct.sym()).frobenius_norm() / direct.frobenius_norm();
      worst = std::max(worst, gap);
      if (gap > 1e-8) pass = false;
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) pass = false;
  std::ostringstream os;
  os << "worst rel gap " << worst << " (tol 1e-8), " << elapsed << " s (cap 60)";
  report(3, "bivariate-consistency", pass, os.str());
}

// 4. Karcher on commuting (diagonal) tuples vs exp(sum w log A).
void criterion_karcher_commuting() {
  const Generator karcher = registry_get("karcher");
  bool pass = true;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng = Rng::for_sample(31337, s);
    const int n = 2 + s % 5;  // 2..6
    const int k = 2 + s % 4;  // 2..5
    std::vector<SpdMatrix> mats;
    for (int i = 0; i < k; ++i) {
      std::vector<double> d(n);
      for (double& v : d) v = rng.log_uniform(1e-2, 1e2);
      mats.push_back(SpdMatrix::diagonal(d));
    }
    const std::vector<double> w = random_weights(rng, k);
    const MeanProblem problem(w, mats, karcher);
    const SolveReport r = solve_mean(problem);
    if (!r.converged) {
      pass = false;
      continue;
    }
    SymMatrix acc(n);
    for (int i = 0; i < k; ++i) acc += w[i] * spd_log(mats[i]);
    const SpdMatrix expected = sym_exp(acc);
    const double gap =
        (r.solution.sym() - expected.sym()).frobenius_norm() / expected.frobenius_norm();
    worst = std::max(worst, gap);
    if (gap > 1e-8) pass = false;
  }
  std::ostringstream os;
  os << "worst rel gap " << worst << " (tol 1e-8)";
  report(4, "karcher-commuting", pass, os.str());
}

// 5. power-concave p=1 degenerates to the weighted arithmetic mean.
void criterion_arithmetic_degeneration() {
  const Generator gen = registry_get("power-concave", 1.0);
  bool pass = true;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng = Rng::for_sample(8080, s);
    const int n = 2 + s % 3;
    const int k = 2 + s % 3;
    const MeanProblem problem = random_problem_in(rng, gen, n, k, 1e-2, 1e2);
    const SolveReport r = solve_mean(problem);
    if (!r.converged) {
      pass = false;
      continue;
    }
    SymMatrix arith(n);
    for (int i = 0; i < k; ++i) arith += problem.weights()[i] * problem.matrices()[i].sym();
    const double gap = (r.solution.sym() - arith).frobenius_norm() / arith.frobenius_norm();
    worst = std::max(worst, gap);
    if (gap > 1e-9) pass = false;
  }
  std::ostringstream os;
  os << "worst rel gap " << worst << " (tol 1e-9)";
  report(5, "arithmetic-degeneration", pass, os.str());
}

// 6. Theorem-6 suite: congruence invariance + signed arithmetic-mean bounds.
void criterion_theorem6_suite() {
  bool pass = true;
  double worst_congruence = 0.0;
  double worst_bound = 0.0;
  int nonconverged = 0;
  for (const Generator& gen : classified_generators()) {
    const PropertyReport congruence =
        check_congruence_invariance(gen, 200, 424242);
    const PropertyReport bounds = check_mean_bounds(gen, 200, 424243);
    worst_congruence = std::max(worst_congruence, congruence.worst_gap);
    worst_bound = std::max(worst_bound, bounds.worst_gap);
    nonconverged += congruence.nonconverged + bounds.nonconverged;
    if (congruence.violations != 0 || bounds.violations != 0) pass = false;
  }
  if (nonconverged != 0) pass = false;
  std::ostringstream os;
  os << "congruence worst " << worst_congruence << " (tol 1e-7), bound worst gap " << worst_bound
     << " (tol 1e-9), nonconverged " << nonconverged;
  report(6, "theorem6-suite", pass, os.str());
}

// 7. Ando-Hiai majorization.
void criterion_majorization() {
  const PropertyReport r = check_majorization(
      1000, {2, 3, 4, 5, 6}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, 777);
  const bool pass = r.violations == 0;
  std::ostringstream os;
  os << "1000 pairs, 9-point p grid, worst gap " << r.worst_gap << " (tol 1e-9)";
  report(7, "majorization", pass, os.str());
}

// 8. Geodesic convexity of the aggregated objective.
void criterion_geodesic_convexity() {
  bool pass = true;
  double worst = -1e300;
  for (const Generator& gen : generators_with_f()) {
    const PropertyReport r = check_geodesic_convexity(gen, 500, 2718);
    worst = std::max(worst, r.worst_gap);
    if (r.violations != 0) pass = false;
  }
  std::ostringstream os;
  os << "500 samples/generator, worst slack " << worst << " (tol 1e-9)";
  report(8, "geodesic-convexity", pass, os.str());
}

// 9. Transform consistency: g = -t f' on the dyadic grid; f rebuilt from g.
void criterion_transform_consistency() {
  bool pass = true;
  double worst_identity = 0.0;
  double worst_rebuild = 0.0;
  std::vector<Generator> sweep = {
      registry_get("karcher"),
      registry_get("shifted-log", std::nullopt, 0.5),
      registry_get("shifted-log", std::nullopt, 1.0),
      registry_get("shifted-log", std::nullopt, 4.0),
      registry_get("power-convex", 0.25),
      registry_get("power-convex", 0.5),
      registry_get("power-convex", 0.75),
      registry_get("power-concave", 1.0),
      registry_get("power-concave", 1.5),
      registry_get("power-concave", 2.0),
  };
  const std::vector<double> grid = dyadic_grid();
  for (const Generator& gen : sweep) {
    for (double t : grid) {
      const double resid = std::fabs(gen.g(t) + t * gen.f_prime(t));
      worst_identity = std::max(worst_identity, resid);
      if (resid > 1e-9) pass = false;
    }
    const ScalarFn rebuilt = build_f_from_g(gen.g, grid);
    const double offset = gen.f(1.0);
    for (double t = 0.01; t <= 100.0; t *= 1.6) {
      const double gap = std::fabs(rebuilt(t) - (gen.f(t) - offset));
      worst_rebuild = std::max(worst_rebuild, gap);
      if (gap > 1e-8) pass = false;
    }
  }
  std::ostringstream os;
  os << "worst |g + t f'| " << worst_identity << " (tol 1e-9), worst rebuild gap "
     << worst_rebuild << " (tol 1e-8)";
  report(9, "transform-consistency", pass, os.str());
}

// 10. Byte-identical `verify all --seed 42` runs.
void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path out1 = dir / "opmeans_accept_det1.json";
  const fs::path out2 = dir / "opmeans_accept_det2.json";
  const std::string base = std::string(OPMEANS_CLI_PATH) + " verify all --seed 42 > ";
  bool pass = std::system((base + out1.string()).c_str()) == 0 &&
              std::system((base + out2.string()).c_str()) == 0;
  std::string detail = "cli did not run";
  if (pass) {
    std::ifstream f1(out1, std::ios::binary);
    std::ifstream f2(out2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    pass = !s1.str().empty() && s1.str() == s2.str();
    detail = pass ? "two runs byte-identical (" + std::to_string(s1.str().size()) + " bytes)"
                  : "runs differ";
  }
  fs::remove(out1);
  fs::remove(out2);
  report(10, "verify-determinism", pass, detail);
}

// 11. Monotonicity-witness search executes its full budget; any witness
// re-verifies at solver tolerance 1e-12. Finding nothing also passes.
void criterion_monotonicity_search() {
  const PropertyReport r =
      search_monotonicity_violation(registry_get("power-concave", 2.0), 100000, 42);
  bool pass = r.samples == 100000;
  std::ostringstream os;
  os << "findings " << r.violations << "/100000, worst gap " << r.worst_gap;
  if (r.witness) {
    const bool reverified = (*r.witness)["reverified"].get<bool>();
    if (!reverified) pass = false;
    os << ", first witness reverified at 1e-12: " << (reverified ? "yes" : "NO");
  } else {
    os << ", no witness found in budget (valid outcome)";
  }
  report(11, "monotonicity-search", pass, os.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite (operator means)\n");
  criterion_gradient_formula();
  criterion_phi_cross_oracle();
  criterion_bivariate_consistency();
  criterion_karcher_commuting();
  criterion_arithmetic_degeneration();
  criterion_theorem6_suite();
  criterion_majorization();
  criterion_geodesic_convexity();
  criterion_transform_consistency();
  criterion_determinism();
  criterion_monotonicity_search();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) FAILED\n", g_failures);
  return 1;
}
