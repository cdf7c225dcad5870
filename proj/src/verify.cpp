#include "opmeans/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opmeans {

namespace {

nlohmann::json json_matrix(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) rows.push_back(m(i, j));
  return nlohmann::json{{"dim", m.dim()}, {"entries", rows}};
}

nlohmann::json json_sym(const SymMatrix& m) { return json_matrix(m.matrix()); }

// Cycles a list by sample index; deterministic sample -> size mapping.
template <typename T>
T pick(const std::vector<T>& values, int index) {
  return values[static_cast<std::size_t>(index) % values.size()];
}

SolverConfig tight_solver(double grad_tol) {
  SolverConfig config;
  config.grad_tol = grad_tol;
  // Generous budget: the preconditioned tail contracts slowly (~0.99/iter)
  // on a few shifted-log draws, and iterations are microseconds at n <= 4.
  config.max_iters = 30000;
  return config;
}

}  // namespace

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json j{
      {"property", property},
      {"samples", samples},
      {"violations", violations},
      {"nonconverged", nonconverged},
      {"worst_gap", worst_gap},
      {"tolerances", tolerances},
      {"witness", witness ? *witness : nlohmann::json(nullptr)},
      {"seed", seed},
      {"theorem_backed", theorem_backed},
  };
  if (histogram) j["histogram"] = *histogram;
  return j;
}

// ---------------------------------------------------------------------------
// Random inputs

Matrix random_orthogonal(Rng& rng, int n) {
  Matrix g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  // Modified Gram-Schmidt on the columns, run twice for orthogonality to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < j; ++k) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += g(i, k) * g(i, j);
        for (int i = 0; i < n; ++i) g(i, j) -= dot * g(i, k);
      }
      double norm = 0.0;
      for (int i = 0; i < n; ++i) norm += g(i, j) * g(i, j);
      norm = std::sqrt(norm);
      if (norm < 1e-12) {
        // Degenerate draw; redraw the column and restart it.
        for (int i = 0; i < n; ++i) g(i, j) = rng.gaussian();
        --j;
        continue;
      }
      for (int i = 0; i < n; ++i) g(i, j) /= norm;
    }
  }
  return g;
}

SpdMatrix random_spd(Rng& rng, int n, double eig_lo, double eig_hi) {
  const Matrix q = random_orthogonal(rng, n);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = rng.log_uniform(eig_lo, eig_hi);
  return SpdMatrix::from_eig(q, std::move(d));
}

Matrix random_invertible(Rng& rng, int n, double cond_cap) {
  const Matrix q1 = random_orthogonal(rng, n);
  const Matrix q2 = random_orthogonal(rng, n);
  const double s = std::sqrt(cond_cap);
  Matrix d(n);
  for (int i = 0; i < n; ++i) d(i, i) = rng.log_uniform(1.0 / s, s);
  return q1 * d * q2.transposed();
}

SymMatrix random_sym_direction(Rng& rng, int n) {
  Matrix g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = rng.gaussian();
      g(i, j) = v;
      g(j, i) = v;
    }
  SymMatrix sym(g);
  const double norm = sym.frobenius_norm();
  return sym * (1.0 / (norm > 0.0 ? norm : 1.0));
}

std::vector<double> random_weights(Rng& rng, int k) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    w[i] = -std::log(std::max(rng.uniform01(), 1e-300));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// ---------------------------------------------------------------------------
// Theorem checks

PropertyReport check_majorization(int samples, const std::vector<int>& dims,
                                  const std::vector<double>& p_grid, std::uint64_t seed) {
  PropertyReport report;
  report.property = "majorization";
  report.samples = samples;
  report.seed = seed;
  report.tolerances = {{"partial_sum_slack", 1e-9}, {"trace_gap", 1e-9}};
  if (dims.empty() || p_grid.empty()) throw ConfigError("majorization needs dims and a p grid");

  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const int n = pick(dims, s);
    const SpdMatrix x = random_spd(rng, n);
    const SpdMatrix y = random_spd(rng, n);
    const SymMatrix log_x = spd_log(x);
    const SymMatrix log_y = spd_log(y);

    double sample_gap = -std::numeric_limits<double>::infinity();
    for (double p : p_grid) {
      const SpdMatrix mean = geometric_mean(x, y, p);
      const std::vector<double> lhs = sym_eig(spd_log(mean)).lambda;
      const std::vector<double> rhs = sym_eig(p * log_x + (1.0 - p) * log_y).lambda;
      double lhs_sum = 0.0;
      double rhs_sum = 0.0;
      for (int i = 0; i < n - 1; ++i) {
        lhs_sum += lhs[i];
        rhs_sum += rhs[i];
        sample_gap = std::max(sample_gap, lhs_sum - rhs_sum);
      }
      const double trace_gap = std::fabs((lhs_sum + lhs[n - 1]) - (rhs_sum + rhs[n - 1]));
      sample_gap = std::max(sample_gap, trace_gap);
    }
    worst = std::max(worst, sample_gap);
    if (sample_gap > 1e-9) {
      ++report.violations;
      if (!report.witness)
        report.witness = nlohmann::json{
            {"x", json_sym(x.sym())}, {"y", json_sym(y.sym())}, {"gap", sample_gap}};
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

namespace {

MeanProblem random_problem(Rng& rng, const Generator& gen, int n, int k, double eig_lo = 1e-2,
                           double eig_hi = 1e2) {
  std::vector<SpdMatrix> matrices;
  matrices.reserve(k);
  for (int i = 0; i < k; ++i) matrices.push_back(random_spd(rng, n, eig_lo, eig_hi));
  return MeanProblem(random_weights(rng, k), std::move(matrices), gen);
}

}  // namespace

PropertyReport check_congruence_invariance(const Generator& gen, int samples, std::uint64_t seed,
                                           const std::vector<int>& dims,
                                           const std::vector<int>& ks) {
  if (!gen.classified())
    throw ConfigError("congruence invariance needs a classified generator");
  PropertyReport report;
  report.property = "congruence-invariance/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.tolerances = {{"relative_deviation", 1e-7}};

  // Solver-mediated check: eigenvalues in [1e-1, 1e1] keep the gradient's
  // double-precision noise (~eps * max|g|) below the convergence threshold.
  const SolverConfig config = tight_solver(3e-12);
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const int n = pick(dims, s);
    const int k = pick(ks, s);
    const MeanProblem base = random_problem(rng, gen, n, k, 1e-1, 1e1);
    const Matrix c = random_invertible(rng, n, 100.0);

    std::vector<SpdMatrix> transformed;
    transformed.reserve(k);
    for (const SpdMatrix& a : base.matrices())
      transformed.emplace_back(congruence(c, a.sym()));
    const MeanProblem moved(base.weights(), std::move(transformed), gen);

    const SolveReport r1 = solve_mean(base, config);
    const SolveReport r2 = solve_mean(moved, config);
    if (!r1.converged || !r2.converged) {
      ++report.nonconverged;
      continue;
    }
    const SymMatrix expected = congruence(c, r1.solution.sym());
    const double gap =
        (expected - r2.solution.sym()).frobenius_norm() / expected.frobenius_norm();
    worst = std::max(worst, gap);
    if (gap > 1e-7) {
      ++report.violations;
      if (!report.witness) {
        nlohmann::json mats = nlohmann::json::array();
        for (const SpdMatrix& a : base.matrices()) mats.push_back(json_sym(a.sym()));
        report.witness = nlohmann::json{{"matrices", mats},
                                        {"weights", base.weights()},
                                        {"c", json_matrix(c)},
                                        {"relative_deviation", gap}};
      }
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

PropertyReport check_mean_bounds(const Generator& gen, int samples, std::uint64_t seed,
                                 const std::vector<int>& dims, const std::vector<int>& ks) {
  if (!gen.classified()) throw ConfigError("mean bounds need a classified generator");
  PropertyReport report;
  report.property = "mean-bounds/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.tolerances = {{"min_eigenvalue_slack", 1e-9}};

  const SolverConfig config = tight_solver(1e-12);
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const MeanProblem problem =
        random_problem(rng, gen, pick(dims, s), pick(ks, s), 1e-1, 1e1);
    const SolveReport r = solve_mean(problem, config);
    if (!r.converged) {
      ++report.nonconverged;
      continue;
    }
    const double gap = -r.bound_slack.value();
    worst = std::max(worst, gap);
    if (gap > 1e-9) {
      ++report.violations;
      if (!report.witness) {
        nlohmann::json mats = nlohmann::json::array();
        for (const SpdMatrix& a : problem.matrices()) mats.push_back(json_sym(a.sym()));
        report.witness = nlohmann::json{
            {"matrices", mats}, {"weights", problem.weights()}, {"slack", -gap}};
      }
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

PropertyReport check_geodesic_convexity(const Generator& gen, int samples, std::uint64_t seed,
                                        const std::vector<int>& dims,
                                        const std::vector<int>& ks) {
  if (!gen.has_f()) throw ConfigError("geodesic convexity needs a generator with f");
  PropertyReport report;
  report.property = "geodesic-convexity/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.tolerances = {{"convexity_slack", 1e-9}};

  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const int n = pick(dims, s);
    const MeanProblem problem = random_problem(rng, gen, n, pick(ks, s));
    const SpdMatrix x = random_spd(rng, n);
    const SpdMatrix y = random_spd(rng, n);
    const double p = rng.uniform01();
    const double lhs = trace_objective(problem, geometric_mean(x, y, p));
    const double rhs = p * trace_objective(problem, x) + (1.0 - p) * trace_objective(problem, y);
    const double gap = lhs - rhs;
    worst = std::max(worst, gap);
    if (gap > 1e-9) {
      ++report.violations;
      if (!report.witness)
        report.witness = nlohmann::json{{"x", json_sym(x.sym())},
                                        {"y", json_sym(y.sym())},
                                        {"p", p},
                                        {"gap", gap}};
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

PropertyReport check_gradient(const Generator& gen, int samples, std::uint64_t seed) {
  if (!gen.has_f()) throw ConfigError("the gradient check needs a generator with f");
  PropertyReport report;
  report.property = "gradient-formula/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.tolerances = {{"relative_error", 1e-6}};

  // (k, n) instances from the calculus invariant.
  const std::vector<std::pair<int, int>> shapes = {{1, 2}, {3, 3}, {4, 5}};
  // Central differences at h = 1e-5 need moderate conditioning: eigenvalues
  // in [0.2, 5] keep the truncation term far below the tolerance.
  const double eig_lo = 0.2;
  const double eig_hi = 5.0;
  const double h = 1e-5;

  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const auto [k, n] = shapes[s % shapes.size()];
    const MeanProblem problem = random_problem(rng, gen, n, k, eig_lo, eig_hi);
    const SpdMatrix x = random_spd(rng, n, eig_lo, eig_hi);
    const SymMatrix grad = gradient(problem, x);
    const double f_at_x = trace_objective(problem, x);

    double sample_gap = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < 20; ++d) {
      const SymMatrix v = random_sym_direction(rng, n);
      const SpdMatrix x_plus(x.sym() + h * v);
      const SpdMatrix x_minus(x.sym() + (-h) * v);
      const double fd =
          (trace_objective(problem, x_plus) - trace_objective(problem, x_minus)) / (2.0 * h);
      const double pairing = trace_inner(x, grad, v);
      sample_gap = std::max(sample_gap, std::fabs(fd - pairing) / (1.0 + std::fabs(f_at_x)));
    }
    worst = std::max(worst, sample_gap);
    if (sample_gap > 1e-6) {
      ++report.violations;
      if (!report.witness)
        report.witness =
            nlohmann::json{{"x", json_sym(x.sym())}, {"relative_error", sample_gap}};
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Searches and probes (not theorem-backed)

PropertyReport search_monotonicity_violation(const Generator& gen, int samples,
                                             std::uint64_t seed) {
  if (gen.classification != Classification::OperatorConcave)
    throw ConfigError("the monotonicity search targets hyper-means (operator-concave g)");
  PropertyReport report;
  report.property = "monotonicity-search/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.theorem_backed = false;
  report.tolerances = {{"witness_threshold", 1e-8}, {"reverify_grad_tol", 1e-12}};

  const std::pair<double, double> w{0.5, 0.5};
  const int n = 2;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const SpdMatrix a1 = random_spd(rng, n, 1e-1, 1e1);
    const SpdMatrix a2 = random_spd(rng, n, 1e-1, 1e1);
    // Rank-one increments are included explicitly; operator-order failures
    // tend to live there.
    SymMatrix delta(n);
    if (rng.uniform01() < 0.5) {
      const double scale = rng.log_uniform(1e-2, 1e1);
      Matrix vv(n);
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) vv(i, j) = scale * v[i] * v[j];
      delta = SymMatrix(vv);
    } else {
      const Matrix q = random_orthogonal(rng, n);
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = rng.log_uniform(1e-2, 1e1);
      delta = SpdMatrix::from_eig(q, std::move(d)).sym();
    }

    const SpdMatrix a1_up(a1.sym() + delta);
    // Fast scan through the representing function; candidate witnesses are
    // re-verified with the descent solver below.
    const SpdMatrix m_up = bivariate_mean(gen, w, a1_up, a2);
    const SpdMatrix m_base = bivariate_mean(gen, w, a1, a2);
    const double min_eig = sym_eig(m_up.sym() - m_base.sym()).min_eigenvalue();
    const double gap = -min_eig;
    worst = std::max(worst, gap);
    if (gap > 1e-8) {
      ++report.violations;
      if (!report.witness) {
        SolverConfig tight = tight_solver(1e-12);
        tight.max_iters = 5000;
        const MeanProblem up({0.5, 0.5}, {a1_up, a2}, gen);
        const MeanProblem base({0.5, 0.5}, {a1, a2}, gen);
        const SolveReport r_up = solve_mean(up, tight);
        const SolveReport r_base = solve_mean(base, tight);
        const double recheck =
            sym_eig(r_up.solution.sym() - r_base.solution.sym()).min_eigenvalue();
        const bool confirmed =
            r_up.converged && r_base.converged && recheck < -1e-8;
        report.witness = nlohmann::json{{"a1", json_sym(a1.sym())},
                                        {"a2", json_sym(a2.sym())},
                                        {"delta", json_sym(delta)},
                                        {"min_eigenvalue", min_eig},
                                        {"reverified_min_eigenvalue", recheck},
                                        {"reverified", confirmed}};
      }
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  return report;
}

PropertyReport probe_mean_convexity(const Generator& gen, int samples, std::uint64_t seed) {
  if (gen.classification != Classification::OperatorConcave)
    throw ConfigError("the convexity probe targets hyper-means (operator-concave g)");
  PropertyReport report;
  report.property = "convexity-probe/" + gen.display_name();
  report.samples = samples;
  report.seed = seed;
  report.theorem_backed = false;
  report.tolerances = {{"finding_slack", 1e-9}};

  const std::pair<double, double> w{0.5, 0.5};
  const int n = 2;
  const std::vector<double> edges = {-1e2, -1.0, -1e-2, -1e-4, -1e-6, -1e-8, 0.0,
                                     1e-8,  1e-6, 1e-4,  1e-2,  1.0,   1e2};
  std::vector<int> counts(edges.size() + 1, 0);

  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::for_sample(seed, s);
    const SpdMatrix a1 = random_spd(rng, n, 1e-1, 1e1);
    const SpdMatrix a2 = random_spd(rng, n, 1e-1, 1e1);
    const SpdMatrix b1 = random_spd(rng, n, 1e-1, 1e1);
    const SpdMatrix b2 = random_spd(rng, n, 1e-1, 1e1);

    const SpdMatrix mixed1(0.5 * (a1.sym() + b1.sym()));
    const SpdMatrix mixed2(0.5 * (a2.sym() + b2.sym()));
    const SpdMatrix mean_mixed = bivariate_mean(gen, w, mixed1, mixed2);
    const SpdMatrix mean_a = bivariate_mean(gen, w, a1, a2);
    const SpdMatrix mean_b = bivariate_mean(gen, w, b1, b2);

    const SymMatrix diff = 0.5 * (mean_a.sym() + mean_b.sym()) - mean_mixed.sym();
    const double slack = sym_eig(diff).min_eigenvalue();
    const double gap = -slack;
    worst = std::max(worst, gap);

    std::size_t bin = 0;
    while (bin < edges.size() && slack >= edges[bin]) ++bin;
    ++counts[bin];

    if (gap > 1e-9) {
      ++report.violations;
      if (!report.witness)
        report.witness = nlohmann::json{{"a1", json_sym(a1.sym())},
                                        {"a2", json_sym(a2.sym())},
                                        {"b1", json_sym(b1.sym())},
                                        {"b2", json_sym(b2.sym())},
                                        {"slack", slack}};
    }
  }
  report.worst_gap = std::isfinite(worst) ? worst : 0.0;
  report.histogram = nlohmann::json{{"slack_edges", edges}, {"counts", counts}};
  return report;
}

}  // namespace opmeans
