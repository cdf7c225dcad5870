#include "opmeans/calculus.hpp"

#include <cmath>
#include <sstream>

namespace opmeans {

MeanProblem::MeanProblem(std::vector<double> weights, std::vector<SpdMatrix> matrices,
                         Generator generator)
    : weights_(std::move(weights)), matrices_(std::move(matrices)),
      generator_(std::move(generator)) {
  if (matrices_.empty()) throw ConfigError("a mean problem needs at least one matrix");
  if (weights_.size() != matrices_.size())
    throw ConfigError("weight count does not match matrix count");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ConfigError("weights must be non-negative");
    sum += w;
  }
  if (!(std::fabs(sum - 1.0) <= 1e-12)) {
    std::ostringstream os;
    os << "weights must sum to 1 (got " << sum << ")";
    throw ConfigError(os.str());
  }
  const int n = matrices_.front().dim();
  for (const SpdMatrix& a : matrices_)
    if (a.dim() != n) throw ConfigError("all matrices must share one dimension");
  if (!generator_.g) throw ConfigError("mean problem needs a generator with g");
}

SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y, double p) {
  if (x.dim() != y.dim()) throw ConfigError("dimension mismatch in geometric mean");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("geometric mean requires p in [0, 1]");
  if (p == 0.0) return y;
  if (p == 1.0) return x;
  const auto [y_half, y_invhalf] = sqrt_and_invsqrt(y);
  const SpdMatrix inner(y_invhalf.matrix() * x.matrix() * y_invhalf.matrix());
  const SpdMatrix powered = spd_pow(inner, p);
  return SpdMatrix(y_half.matrix() * powered.matrix() * y_half.matrix());
}

SymMatrix perspective(const Generator& gen, const SpdMatrix& a, const SpdMatrix& x) {
  if (a.dim() != x.dim()) throw ConfigError("dimension mismatch in perspective");
  const auto [x_half, x_invhalf] = sqrt_and_invsqrt(x);
  const SymMatrix inner(x_invhalf.matrix() * a.matrix() * x_invhalf.matrix());
  const SymMatrix g_inner = apply_fun(inner, gen.g);
  return SymMatrix(x_half.matrix() * g_inner.matrix() * x_half.matrix());
}

double trace_objective(const MeanProblem& problem, const SpdMatrix& x) {
  const Generator& gen = problem.generator();
  if (!gen.has_f())
    throw UnsupportedError("objective evaluation needs a generator with f (generator '" +
                           gen.display_name() + "' has none)");
  if (x.dim() != problem.dim()) throw ConfigError("dimension mismatch in objective");
  // One x^{-1/2} shared across all k terms; each term costs one
  // eigendecomposition and a sum of f over its spectrum.
  const SpdMatrix x_invhalf = spd_pow(x, -0.5);
  double total = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const SymMatrix inner(x_invhalf.matrix() * problem.matrices()[i].matrix() *
                          x_invhalf.matrix());
    const EigDecomposition eig = sym_eig(inner);
    double term = 0.0;
    for (double lam : eig.lambda) {
      const double v = gen.f(lam);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "f is not finite at eigenvalue " << lam;
        throw DomainError(os.str());
      }
      term += v;
    }
    total += problem.weights()[i] * term;
  }
  return total;
}

SymMatrix gradient(const MeanProblem& problem, const SpdMatrix& x) {
  if (x.dim() != problem.dim()) throw ConfigError("dimension mismatch in gradient");
  const Generator& gen = problem.generator();
  const auto [x_half, x_invhalf] = sqrt_and_invsqrt(x);
  SymMatrix sum(x.dim());
  for (int i = 0; i < problem.size(); ++i) {
    const SymMatrix inner(x_invhalf.matrix() * problem.matrices()[i].matrix() *
                          x_invhalf.matrix());
    sum += problem.weights()[i] * apply_fun(inner, gen.g);
  }
  return SymMatrix(x_half.matrix() * sum.matrix() * x_half.matrix());
}

}  // namespace opmeans
