#pragma once

#include <vector>

#include "opmeans/generators.hpp"
#include "opmeans/linalg.hpp"

namespace opmeans {

/// A weighted mean problem: probability weights, SPD matrices of one common
/// dimension, and the generator driving the critical-point equation.
class MeanProblem {
public:
  MeanProblem(std::vector<double> weights, std::vector<SpdMatrix> matrices, Generator generator);

  int size() const { return static_cast<int>(matrices_.size()); }
  int dim() const { return matrices_.front().dim(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SpdMatrix>& matrices() const { return matrices_; }
  const Generator& generator() const { return generator_; }

private:
  std::vector<double> weights_;
  std::vector<SpdMatrix> matrices_;
  Generator generator_;
};

/// Weighted geometric mean x #_p y = y^{1/2} (y^{-1/2} x y^{-1/2})^p y^{1/2},
/// the geodesic from y (p=0) to x (p=1) in the trace metric.
SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y, double p);

/// Operator perspective P_g(a, x) = x^{1/2} g(x^{-1/2} a x^{-1/2}) x^{1/2}.
SymMatrix perspective(const Generator& gen, const SpdMatrix& a, const SpdMatrix& x);

/// Sum_i w_i Tr f(x^{-1/2} A_i x^{-1/2}). Requires the generator to carry f.
double trace_objective(const MeanProblem& problem, const SpdMatrix& x);

/// Riemannian gradient of the objective: Sum_i w_i P_g(A_i, x).
SymMatrix gradient(const MeanProblem& problem, const SpdMatrix& x);

}  // namespace opmeans
