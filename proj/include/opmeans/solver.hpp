#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opmeans/calculus.hpp"

namespace opmeans {

enum class InitStrategy { Arithmetic, LogEuclidean, Custom };

InitStrategy init_strategy_from_string(const std::string& s);
std::string to_string(InitStrategy s);

struct SolverConfig {
  double grad_tol = 1e-10;
  int max_iters = 500;
  double initial_step = 1.0;
  double armijo_beta = 0.5;    // backtracking factor, in (0, 1)
  double armijo_sigma = 1e-4;  // sufficient-decrease fraction, in (0, 1/2)
  InitStrategy init_strategy = InitStrategy::Arithmetic;
  std::optional<SpdMatrix> custom_init;

  void validate() const;
};

enum class Termination { GradientTol, MaxIters, Stalled };

std::string to_string(Termination t);

struct SolveReport {
  SpdMatrix solution;
  int iterations = 0;
  std::vector<double> grad_norms;               // trace-metric norm per iterate
  std::optional<std::vector<double>> objective_values;
  bool converged = false;
  Termination termination = Termination::MaxIters;
  /// Theorem-6 arithmetic-mean bound at the solution, for classified
  /// generators: min eigenvalue of the signed difference (>= 0 means the
  /// bound holds; small negative values are float noise).
  std::optional<double> bound_slack;

  double final_grad_norm() const { return grad_norms.empty() ? 0.0 : grad_norms.back(); }
};

/// Minimizes the trace objective by Riemannian gradient descent with the
/// geodesic retraction X <- X^{1/2} exp(-s X^{-1/2} G X^{-1/2}) X^{1/2} and
/// Armijo backtracking. Convergence: ||G||_X <= grad_tol * (1 + ||X||_F).
/// Non-convergence is reported, not thrown.
SolveReport solve_mean(const MeanProblem& problem, const SolverConfig& config = {});

/// The representing function phi(t) of the bivariate mean: the unique root x
/// of w1 * g(t/x) + w2 * g(1/x) = 0, found by bisection on an expanding
/// bracket (|residual| <= 1e-12 at return).
double representing_phi(const Generator& gen, std::pair<double, double> weights, double t);

/// The printed closed forms for the two power families (equal weights):
/// power-convex  ((t+1)/(t^-p+1))^(1/(p+1)), power-concave ((t^p+1)/2)^(1/p).
/// Empty for other generators.
std::optional<double> closed_form_phi(const Generator& gen, double t);

/// k=2 mean through the representing function:
/// a2^{1/2} phi(a2^{-1/2} a1 a2^{-1/2}) a2^{1/2}, phi applied per eigenvalue.
SpdMatrix bivariate_mean(const Generator& gen, std::pair<double, double> weights,
                         const SpdMatrix& a1, const SpdMatrix& a2);

}  // namespace opmeans
