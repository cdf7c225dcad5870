#include <doctest.h>

#include <cmath>

#include "opmeans/verify.hpp"

#include "test_support.hpp"

using namespace opmeans;

TEST_CASE("random_spd: controlled spectrum and exact symmetry") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdMatrix a = random_spd(rng, 4);
    for (double lam : a.eig().lambda) {
      CHECK(lam >= 1e-2 * 0.99);
      CHECK(lam <= 1e2 * 1.01);
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(a(i, j) == a(j, i));
  }
}

TEST_CASE("random_invertible: condition number capped") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix c = random_invertible(rng, 3, 100.0);
    const EigDecomposition gram = sym_eig(SymMatrix(c.transposed() * c));
    const double cond = std::sqrt(gram.max_eigenvalue() / gram.min_eigenvalue());
    CHECK(cond <= 100.0 * 1.01);
  }
}

TEST_CASE("random_weights: a probability vector") {
  Rng rng(3);
  const std::vector<double> w = random_weights(rng, 5);
  double sum = 0.0;
  for (double v : w) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("check_majorization: clean run, and the report is well-formed") {
  const PropertyReport report = check_majorization(100, {2, 3, 4}, {0.1, 0.5, 0.9}, 7);
  CHECK(report.samples == 100);
  CHECK(report.violations == 0);
  CHECK(report.worst_gap <= 1e-9);
  CHECK(report.theorem_backed);
  CHECK_FALSE(report.witness.has_value());
  const nlohmann::json j = report.to_json();
  for (const char* key :
       {"property", "samples", "violations", "nonconverged", "worst_gap", "witness", "seed",
        "tolerances"})
    CHECK(j.contains(key));
}

TEST_CASE("check_majorization: commuting pair gives equality up to float noise") {
  // diagonal X, Y commute: log(X #_p Y) = p log X + (1-p) log Y exactly
  const SpdMatrix x = SpdMatrix::diagonal({4.0, 0.25});
  const SpdMatrix y = SpdMatrix::diagonal({9.0, 1.0});
  for (double p : {0.0, 0.3, 1.0}) {
    const std::vector<double> lhs = sym_eig(spd_log(geometric_mean(x, y, p))).lambda;
    const std::vector<double> rhs =
        sym_eig(p * spd_log(x) + (1.0 - p) * spd_log(y)).lambda;
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
  }
}

TEST_CASE("check_congruence_invariance: identity transform is exact") {
  Rng rng(4);
  const Generator gen = registry_get("karcher");
  std::vector<SpdMatrix> mats = {random_spd(rng, 2, 1e-1, 1e1), random_spd(rng, 2, 1e-1, 1e1)};
  const MeanProblem problem({0.5, 0.5}, mats, gen);
  const SolveReport r = solve_mean(problem);
  REQUIRE(r.converged);
  // C = c I scales the mean by c^2
  const double c = 3.0;
  Matrix scaled_c = Matrix::identity(2) * c;
  std::vector<SpdMatrix> scaled;
  for (const SpdMatrix& a : mats) scaled.emplace_back(congruence(scaled_c, a.sym()));
  const SolveReport r2 = solve_mean(MeanProblem({0.5, 0.5}, scaled, gen));
  REQUIRE(r2.converged);
  CHECK(test::rel_frob_diff(r2.solution.sym(), SymMatrix(r.solution.sym() * (c * c))) <= 1e-8);
}

TEST_CASE("check_congruence_invariance: zero violations on a seeded run") {
  const PropertyReport report =
      check_congruence_invariance(registry_get("karcher"), 25, 11, {3}, {3});
  CHECK(report.violations == 0);
  CHECK(report.nonconverged == 0);
  CHECK(report.worst_gap <= 1e-7);
}

TEST_CASE("check_congruence_invariance: needs a classified generator") {
  Generator raw;
  raw.name = "unclassified";
  raw.g = [](double t) { return -std::log(t); };
  CHECK_THROWS_AS(check_congruence_invariance(raw, 5, 1), ConfigError);
}

TEST_CASE("check_mean_bounds: equality cases and clean runs") {
  // power-concave p=1 IS the arithmetic mean: slack exactly zero.
  const PropertyReport exact = check_mean_bounds(registry_get("power-concave", 1.0), 20, 3);
  CHECK(exact.violations == 0);
  CHECK(exact.worst_gap <= 1e-15);

  const PropertyReport hyper = check_mean_bounds(registry_get("power-concave", 2.0), 25, 3);
  CHECK(hyper.violations == 0);
  CHECK(hyper.nonconverged == 0);

  const PropertyReport lower = check_mean_bounds(registry_get("karcher"), 25, 3);
  CHECK(lower.violations == 0);
}

TEST_CASE("check_mean_bounds: identical matrices give zero slack") {
  Rng rng(44);
  const SpdMatrix a = random_spd(rng, 3, 1e-1, 1e1);
  const MeanProblem problem({0.4, 0.6}, {a, a}, registry_get("power-concave", 2.0));
  const SolveReport r = solve_mean(problem);
  REQUIRE(r.converged);
  REQUIRE(r.bound_slack.has_value());
  CHECK(std::fabs(*r.bound_slack) <= 1e-10 * (1.0 + a.frobenius_norm()));
}

TEST_CASE("monotonicity: a zero increment is never a witness") {
  Rng rng(45);
  const Generator gen = registry_get("power-concave", 2.0);
  const SpdMatrix a1 = random_spd(rng, 2, 1e-1, 1e1);
  const SpdMatrix a2 = random_spd(rng, 2, 1e-1, 1e1);
  const SpdMatrix base = bivariate_mean(gen, {0.5, 0.5}, a1, a2);
  const SpdMatrix same = bivariate_mean(gen, {0.5, 0.5}, SpdMatrix(a1.sym() + SymMatrix(2)), a2);
  CHECK(sym_eig(same.sym() - base.sym()).min_eigenvalue() >= -1e-12);
}

TEST_CASE("monotonicity: no witness exists in the commuting diagonal subclass") {
  // phi is increasing, so diagonal increments can only increase the mean.
  Rng rng(46);
  const Generator gen = registry_get("power-concave", 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> d1 = {rng.log_uniform(1e-1, 1e1), rng.log_uniform(1e-1, 1e1)};
    std::vector<double> d2 = {rng.log_uniform(1e-1, 1e1), rng.log_uniform(1e-1, 1e1)};
    std::vector<double> bump = {rng.log_uniform(1e-2, 1e1), rng.log_uniform(1e-2, 1e1)};
    const SpdMatrix a1 = SpdMatrix::diagonal(d1);
    const SpdMatrix a2 = SpdMatrix::diagonal(d2);
    const SpdMatrix a1_up = SpdMatrix::diagonal({d1[0] + bump[0], d1[1] + bump[1]});
    const SymMatrix diff = bivariate_mean(gen, {0.5, 0.5}, a1_up, a2).sym() -
                           bivariate_mean(gen, {0.5, 0.5}, a1, a2).sym();
    CHECK(sym_eig(diff).min_eigenvalue() >= -1e-10);
  }
}

TEST_CASE("check_mean_bounds: strictness for non-commuting hyper-mean inputs") {
  // For power-concave p=2 the mean sits strictly above the arithmetic mean
  // on generic non-commuting pairs: worst_gap strictly negative.
  const PropertyReport report = check_mean_bounds(registry_get("power-concave", 2.0), 25, 5);
  CHECK(report.worst_gap < 0.0);
}

TEST_CASE("check_geodesic_convexity: zero violations per generator") {
  for (const Generator& gen : {registry_get("karcher"), registry_get("power-concave", 2.0)}) {
    const PropertyReport report = check_geodesic_convexity(gen, 50, 13);
    CHECK(report.violations == 0);
    CHECK(report.worst_gap <= 1e-9);
  }
}

TEST_CASE("check_gradient: zero violations, report carries the tolerance") {
  const PropertyReport report = check_gradient(registry_get("power-convex", 0.5), 12, 17);
  CHECK(report.violations == 0);
  CHECK(report.worst_gap <= 1e-6);
  CHECK(report.tolerances.at("relative_error") == 1e-6);
}

TEST_CASE("search_monotonicity_violation: reports findings with a re-verified witness") {
  const PropertyReport report =
      search_monotonicity_violation(registry_get("power-concave", 2.0), 300, 42);
  CHECK_FALSE(report.theorem_backed);
  CHECK(report.passed());  // findings never fail the suite
  CHECK((report.witness.has_value() == (report.violations > 0)));
  if (report.witness) {
    CHECK((*report.witness)["reverified"].get<bool>());
    CHECK((*report.witness)["reverified_min_eigenvalue"].get<double>() < -1e-8);
  }
}

TEST_CASE("search_monotonicity_violation: targets hyper-means only") {
  CHECK_THROWS_AS(search_monotonicity_violation(registry_get("karcher"), 5, 1), ConfigError);
}

TEST_CASE("probe_mean_convexity: equal tuples give zero difference") {
  Rng rng(6);
  const Generator gen = registry_get("power-concave", 2.0);
  const SpdMatrix a1 = random_spd(rng, 2, 1e-1, 1e1);
  const SpdMatrix a2 = random_spd(rng, 2, 1e-1, 1e1);
  const SpdMatrix m = bivariate_mean(gen, {0.5, 0.5}, a1, a2);
  const SpdMatrix mixed = bivariate_mean(
      gen, {0.5, 0.5}, SpdMatrix(0.5 * (a1.sym() + a1.sym())), SpdMatrix(0.5 * (a2.sym() + a2.sym())));
  CHECK(test::rel_frob_diff(mixed, m) <= 1e-12);
}

TEST_CASE("probe_mean_convexity: emits a histogram and never fails") {
  const PropertyReport report = probe_mean_convexity(registry_get("power-concave", 2.0), 200, 42);
  CHECK_FALSE(report.theorem_backed);
  CHECK(report.passed());
  REQUIRE(report.histogram.has_value());
  const nlohmann::json& h = *report.histogram;
  REQUIRE(h.contains("slack_edges"));
  REQUIRE(h.contains("counts"));
  int total = 0;
  for (const auto& c : h["counts"]) total += c.get<int>();
  CHECK(total == 200);
}

TEST_CASE("reports are deterministic byte-for-byte") {
  const auto run = [] {
    return check_majorization(40, {2, 3}, {0.25, 0.75}, 2024).to_json().dump();
  };
  CHECK(run() == run());
  const auto grad = [] {
    return check_gradient(registry_get("karcher"), 6, 7).to_json().dump();
  };
  CHECK(grad() == grad());
}

TEST_CASE("zero samples is a vacuous pass everywhere") {
  CHECK(check_majorization(0, {2}, {0.5}, 1).passed());
  CHECK(check_mean_bounds(registry_get("karcher"), 0, 1).passed());
  CHECK(search_monotonicity_violation(registry_get("power-concave", 2.0), 0, 1).passed());
  const PropertyReport r = check_geodesic_convexity(registry_get("karcher"), 0, 1);
  CHECK(r.samples == 0);
  CHECK(r.worst_gap == 0.0);
}
