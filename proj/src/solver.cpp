#include "opmeans/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace opmeans {

InitStrategy init_strategy_from_string(const std::string& s) {
  if (s == "arithmetic") return InitStrategy::Arithmetic;
  if (s == "log-euclidean") return InitStrategy::LogEuclidean;
  if (s == "custom") return InitStrategy::Custom;
  throw ConfigError("unknown init strategy '" + s +
                    "' (known: arithmetic, log-euclidean, custom)");
}

std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::Arithmetic: return "arithmetic";
    case InitStrategy::LogEuclidean: return "log-euclidean";
    default: return "custom";
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradientTol: return "gradient-tol";
    case Termination::MaxIters: return "max-iters";
    default: return "stalled";
  }
}

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(initial_step > 0.0)) throw ConfigError("initial_step must be positive");
  if (!(armijo_beta > 0.0 && armijo_beta < 1.0)) throw ConfigError("armijo_beta must be in (0,1)");
  if (!(armijo_sigma > 0.0 && armijo_sigma < 0.5))
    throw ConfigError("armijo_sigma must be in (0,1/2)");
  if (init_strategy == InitStrategy::Custom && !custom_init)
    throw ConfigError("custom init strategy needs a custom_init matrix");
}

namespace {

constexpr double kMinStep = 1e-16;
// exp() guard for trial retractions; anything steeper is rejected outright.
constexpr double kMaxExpArg = 350.0;

SpdMatrix initial_point(const MeanProblem& problem, const SolverConfig& config) {
  switch (config.init_strategy) {
    case InitStrategy::Custom: {
      if (config.custom_init->dim() != problem.dim())
        throw ConfigError("custom_init dimension does not match the problem");
      return *config.custom_init;
    }
    case InitStrategy::LogEuclidean: {
      SymMatrix acc(problem.dim());
      for (int i = 0; i < problem.size(); ++i)
        acc += problem.weights()[i] * spd_log(problem.matrices()[i]);
      return sym_exp(acc);
    }
    case InitStrategy::Arithmetic:
    default: {
      SymMatrix acc(problem.dim());
      for (int i = 0; i < problem.size(); ++i)
        acc += problem.weights()[i] * problem.matrices()[i].sym();
      return SpdMatrix(acc);
    }
  }
}

// Gradient and objective share the eigendecompositions of the whitened
// matrices M_i = x^{-1/2} A_i x^{-1/2}. `s_coords` is the gradient expressed
// at the identity, x^{-1/2} grad x^{-1/2} = Sum_i w_i g(M_i); its Frobenius
// norm equals the trace-metric norm of the gradient at x. `curvature` is the
// local second-derivative scaling Sum_i w_i psi(M_i) with psi(t) = -t g'(t),
// the exact Hessian diagonal in the commuting case (identity for karcher).
struct Evaluation {
  SymMatrix s_coords;
  SymMatrix curvature;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = 0.0;
};

Evaluation evaluate(const MeanProblem& problem, const SpdMatrix& x_invhalf,
                    bool with_objective) {
  const Generator& gen = problem.generator();
  Evaluation ev{SymMatrix(problem.dim()), SymMatrix(problem.dim()),
                std::numeric_limits<double>::quiet_NaN(), 0.0};
  // psi by central differences; a preconditioner only needs a few digits.
  const auto psi = [&gen](double t) {
    const double h = 1e-4;
    return -(gen.g(t * (1.0 + h)) - gen.g(t * (1.0 - h))) / (2.0 * h);
  };
  double objective = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const SymMatrix inner(x_invhalf.matrix() * problem.matrices()[i].matrix() *
                          x_invhalf.matrix());
    const EigDecomposition eig = sym_eig(inner);
    ev.s_coords += problem.weights()[i] * eig_apply(eig, gen.g);
    ev.curvature += problem.weights()[i] * eig_apply(eig, psi);
    if (with_objective) {
      for (double lam : eig.lambda) {
        const double v = gen.f(lam);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "f is not finite at eigenvalue " << lam;
          throw DomainError(os.str());
        }
        objective += problem.weights()[i] * v;
      }
    }
  }
  if (with_objective) ev.objective = objective;
  ev.grad_norm = ev.s_coords.frobenius_norm();
  return ev;
}

// Direction -W S W, W = curvature^{-1/2} with eigenvalues clamped to 1e-8 of
// the largest. Newton in the commuting case, plain -S for karcher, always a
// descent direction (Tr(S W S W) > 0).
SymMatrix preconditioned_direction(const Evaluation& ev) {
  EigDecomposition pe = sym_eig(ev.curvature);
  const double floor = std::max(pe.max_eigenvalue() * 1e-8, 1e-300);
  const SymMatrix w =
      eig_apply(pe, [floor](double t) { return 1.0 / std::sqrt(std::max(t, floor)); });
  return SymMatrix(w.matrix() * (ev.s_coords.matrix() * w.matrix())) * -1.0;
}

double bound_slack_at(const MeanProblem& problem, const SpdMatrix& solution) {
  SymMatrix arithmetic(problem.dim());
  for (int i = 0; i < problem.size(); ++i)
    arithmetic += problem.weights()[i] * problem.matrices()[i].sym();
  SymMatrix diff = (problem.generator().classification == Classification::OperatorConvex)
                       ? arithmetic - solution.sym()
                       : solution.sym() - arithmetic;
  return sym_eig(diff).min_eigenvalue();
}

}  // namespace

SolveReport solve_mean(const MeanProblem& problem, const SolverConfig& config) {
  config.validate();
  const bool has_f = problem.generator().has_f();

  SolveReport report;
  if (has_f) report.objective_values.emplace();

  SpdMatrix x = initial_point(problem, config);
  auto [x_half, x_invhalf] = sqrt_and_invsqrt(x);
  Evaluation ev = evaluate(problem, x_invhalf, has_f);

  while (true) {
    report.grad_norms.push_back(ev.grad_norm);
    if (has_f) report.objective_values->push_back(ev.objective);

    if (ev.grad_norm <= config.grad_tol * (1.0 + x.frobenius_norm())) {
      report.converged = true;
      report.termination = Termination::GradientTol;
      break;
    }
    if (report.iterations >= config.max_iters) {
      report.termination = Termination::MaxIters;
      break;
    }

    // One decomposition of the direction serves every trial step:
    // X(s) = x^{1/2} Q exp(s L) Q^T x^{1/2}.
    const SymMatrix direction = preconditioned_direction(ev);
    const EigDecomposition dir = sym_eig(direction);
    const Matrix basis = x_half.matrix() * dir.q;
    // -dF/ds along the direction: Tr(S W S W) > 0.
    const double decrease_rate = -trace_product(ev.s_coords.matrix(), direction.matrix());
    // Below this, an Armijo decrease cannot be resolved in double precision;
    // acceptance falls back to gradient-norm descent (still monotone in F).
    const double objective_noise =
        has_f ? 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(ev.objective))
              : 0.0;

    double step = config.initial_step;
    bool accepted = false;
    while (step >= kMinStep) {
      const double arg_cap = step * std::max(std::fabs(dir.lambda.front()),
                                             std::fabs(dir.lambda.back()));
      if (arg_cap > kMaxExpArg) {
        step *= config.armijo_beta;
        continue;
      }
      Matrix scaled(problem.dim());
      for (int j = 0; j < problem.dim(); ++j) {
        const double e = std::exp(step * dir.lambda[j]);
        for (int i = 0; i < problem.dim(); ++i) scaled(i, j) = basis(i, j) * e;
      }
      try {
        const SpdMatrix candidate(scaled * basis.transposed());
        const auto [c_half, c_invhalf] = sqrt_and_invsqrt(candidate);
        const Evaluation cev = evaluate(problem, c_invhalf, has_f);
        bool ok;
        if (has_f) {
          const double required = config.armijo_sigma * step * decrease_rate;
          ok = (required >= objective_noise) ? (cev.objective <= ev.objective - required)
                                             : (cev.grad_norm < ev.grad_norm);
        } else {
          ok = cev.grad_norm < ev.grad_norm;
        }
        if (ok) {
          x = candidate;
          x_half = c_half;
          x_invhalf = c_invhalf;
          ev = cev;
          accepted = true;
          break;
        }
      } catch (const ConditioningError&) {
        // trial point fell through the SPD floor; shorten the step
      } catch (const DomainError&) {
        // f blew up at a trial point; shorten the step
      }
      step *= config.armijo_beta;
    }

    if (!accepted) {
      report.termination = Termination::Stalled;
      break;
    }
    ++report.iterations;
  }

  report.solution = x;
  if (problem.generator().classified()) report.bound_slack = bound_slack_at(problem, x);
  return report;
}

// ---------------------------------------------------------------------------
// Bivariate means via the representing function

double representing_phi(const Generator& gen, std::pair<double, double> weights, double t) {
  const auto [w1, w2] = weights;
  if (!(w1 >= 0.0 && w2 >= 0.0 && std::fabs(w1 + w2 - 1.0) <= 1e-12))
    throw ConfigError("representing_phi needs a probability pair of weights");
  if (!(t > 0.0)) throw DomainError("representing_phi needs t > 0");
  if (!gen.g) throw ConfigError("representing_phi needs a generator with g");
  if (t == 1.0) return 1.0;  // both terms hit g(1) = 0

  // h is strictly increasing in x: g is decreasing and both arguments t/x,
  // 1/x decrease in x.
  const auto h = [&](double x) { return w1 * gen.g(t / x) + w2 * gen.g(1.0 / x); };

  double lo = std::min(t, 1.0) * (1.0 - 1e-3);
  double hi = std::max(t, 1.0) * (1.0 + 1e-3);
  double h_lo = h(lo);
  double h_hi = h(hi);
  int doublings = 0;
  while (h_lo > 0.0 || h_hi < 0.0) {
    if (++doublings > 60)
      throw NumericalError("representing_phi could not bracket a root after 60 doublings");
    if (h_lo > 0.0) {
      lo *= 0.5;
      h_lo = h(lo);
    }
    if (h_hi < 0.0) {
      hi *= 2.0;
      h_hi = h(hi);
    }
  }

  // |h| <= 1e-12 alone can leave the root loose where h is shallow, so the
  // bracket is also driven tight (down to float resolution if needed).
  double mid = 0.5 * (lo + hi);
  double h_mid = h(mid);
  for (int i = 0; i < 200; ++i) {
    if (h_mid == 0.0) return mid;
    const double width_tol =
        std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() * hi);
    if (std::fabs(h_mid) <= 1e-12 && (hi - lo) <= width_tol) return mid;
    if (h_mid < 0.0)
      lo = mid;
    else
      hi = mid;
    const double next = 0.5 * (lo + hi);
    if (next <= lo || next >= hi) break;  // float resolution reached
    mid = next;
    h_mid = h(mid);
  }
  if (std::fabs(h_mid) <= 1e-12) return mid;
  throw NumericalError("representing_phi bisection did not reach |h| <= 1e-12");
}

std::optional<double> closed_form_phi(const Generator& gen, double t) {
  if (!(t > 0.0)) throw DomainError("closed_form_phi needs t > 0");
  if (gen.name == "power-convex" && gen.p) {
    const double p = *gen.p;
    return std::pow((t + 1.0) / (std::pow(t, -p) + 1.0), 1.0 / (p + 1.0));
  }
  if (gen.name == "power-concave" && gen.p) {
    const double p = *gen.p;
    return std::pow(0.5 * (std::pow(t, p) + 1.0), 1.0 / p);
  }
  return std::nullopt;
}

SpdMatrix bivariate_mean(const Generator& gen, std::pair<double, double> weights,
                         const SpdMatrix& a1, const SpdMatrix& a2) {
  if (a1.dim() != a2.dim()) throw ConfigError("dimension mismatch in bivariate mean");
  const auto [a2_half, a2_invhalf] = sqrt_and_invsqrt(a2);
  const SpdMatrix ratio(a2_invhalf.matrix() * a1.matrix() * a2_invhalf.matrix());
  const EigDecomposition& eig = ratio.eig();
  std::vector<double> phi_vals(eig.lambda.size());
  for (std::size_t i = 0; i < eig.lambda.size(); ++i)
    phi_vals[i] = representing_phi(gen, weights, eig.lambda[i]);
  const SpdMatrix phi_ratio = SpdMatrix::from_eig(eig.q, std::move(phi_vals));
  return SpdMatrix(a2_half.matrix() * phi_ratio.matrix() * a2_half.matrix());
}

}  // namespace opmeans
