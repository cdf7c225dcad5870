#include "opmeans/generators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "opmeans/rng.hpp"

namespace opmeans {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::OperatorConvex: return "operator-convex";
    case Classification::OperatorConcave: return "operator-concave";
    default: return "unclassified";
  }
}

std::string Generator::display_name() const {
  std::ostringstream os;
  os << name;
  if (p || lambda) {
    os << "(";
    if (p) os << "p=" << *p;
    if (lambda) os << (p ? "," : "") << "lambda=" << *lambda;
    os << ")";
  }
  return os.str();
}

std::vector<double> dyadic_grid() {
  std::vector<double> grid;
  grid.reserve(21);
  for (int k = -10; k <= 10; ++k) grid.push_back(std::ldexp(1.0, k));
  return grid;
}

void validate_generator(const Generator& gen) {
  if (!gen.g) throw ConfigError("generator '" + gen.name + "' has no g evaluator");
  const double g1 = gen.g(1.0);
  if (!(std::fabs(g1) <= 1e-12)) {
    std::ostringstream os;
    os << "generator '" << gen.display_name() << "': g(1) = " << g1 << ", expected 0";
    throw ConfigError(os.str());
  }
  const std::vector<double> grid = dyadic_grid();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(gen.g(grid[i + 1]) < gen.g(grid[i]))) {
      std::ostringstream os;
      os << "generator '" << gen.display_name() << "' is not strictly decreasing between t="
         << grid[i] << " and t=" << grid[i + 1];
      throw ConfigError(os.str());
    }
  }
  if (gen.f_prime) {
    for (double t : grid) {
      const double resid = gen.g(t) + t * gen.f_prime(t);
      if (!(std::fabs(resid) <= 1e-9)) {
        std::ostringstream os;
        os << "generator '" << gen.display_name() << "': g(t) + t f'(t) = " << resid
           << " at t=" << t;
        throw ConfigError(os.str());
      }
    }
  }
}

namespace {

Generator make_karcher() {
  Generator gen;
  gen.name = "karcher";
  gen.g = [](double t) { return -std::log(t); };
  gen.f = [](double t) { const double l = std::log(t); return 0.5 * l * l; };
  gen.f_prime = [](double t) { return std::log(t) / t; };
  gen.classification = Classification::OperatorConvex;
  return gen;
}

// The raw row g(t) = -t/(t+lambda) has g(1) = -1/(1+lambda) != 0, so the
// registered mean generator is recentered by that constant; f picks up
// the matching -log(t)/(1+lambda) term. Recentering by a constant does not
// change operator convexity.
Generator make_shifted_log(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("shifted-log requires lambda > 0 (lambda = 0 recenters to g == 0)");
  Generator gen;
  gen.name = "shifted-log";
  gen.lambda = lambda;
  const double c = 1.0 / (1.0 + lambda);
  gen.g = [lambda, c](double t) { return c - t / (t + lambda); };
  gen.f = [lambda, c](double t) { return std::log(t + lambda) - c * std::log(t); };
  gen.f_prime = [lambda, c](double t) { return 1.0 / (t + lambda) - c / t; };
  gen.classification = Classification::OperatorConvex;
  return gen;
}

Generator make_power_convex(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("power-convex requires 0 < p < 1");
  Generator gen;
  gen.name = "power-convex";
  gen.p = p;
  gen.g = [p](double t) { return p * (std::pow(t, -p) - t); };
  gen.f = [p](double t) { return std::pow(t, -p) + p * t; };
  gen.f_prime = [p](double t) { return p * (1.0 - std::pow(t, -p - 1.0)); };
  gen.classification = Classification::OperatorConvex;
  gen.f_lower_bound = 0.0;
  return gen;
}

Generator make_power_concave(double p) {
  if (!(p >= 1.0 && p <= 2.0))
    throw ConfigError("power-concave requires 1 <= p <= 2");
  Generator gen;
  gen.name = "power-concave";
  gen.p = p;
  gen.g = [p](double t) { return p * (1.0 - std::pow(t, p)); };
  gen.f = [p](double t) { return std::pow(t, p) - p * std::log(t); };
  gen.f_prime = [p](double t) { return p * std::pow(t, p - 1.0) - p / t; };
  gen.classification = Classification::OperatorConcave;
  gen.f_lower_bound = 1.0;
  return gen;
}

}  // namespace

Generator registry_get(const std::string& name, std::optional<double> p,
                       std::optional<double> lambda) {
  Generator gen;
  if (name == "karcher") {
    if (p || lambda) throw ConfigError("karcher takes no parameters");
    gen = make_karcher();
  } else if (name == "shifted-log") {
    if (!lambda) throw ConfigError("shifted-log requires a lambda parameter");
    if (p) throw ConfigError("shifted-log takes no p parameter");
    gen = make_shifted_log(*lambda);
  } else if (name == "power-convex") {
    if (!p) throw ConfigError("power-convex requires a p parameter");
    if (lambda) throw ConfigError("power-convex takes no lambda parameter");
    gen = make_power_convex(*p);
  } else if (name == "power-concave") {
    if (!p) throw ConfigError("power-concave requires a p parameter");
    if (lambda) throw ConfigError("power-concave takes no lambda parameter");
    gen = make_power_concave(*p);
  } else {
    throw ConfigError("unknown generator '" + name +
                      "' (known: karcher, shifted-log, power-convex, power-concave)");
  }
  validate_generator(gen);
  return gen;
}

std::vector<TransformRow> transform_table() {
  std::vector<TransformRow> rows;

  {
    TransformRow row;
    row.label = "f(t)=log(t+lambda), lambda=1";
    row.f = [](double t) { return std::log(t + 1.0); };
    row.g = [](double t) { return -t / (t + 1.0); };
    row.mean_generator = false;
    row.reason = "g(1) = -1/(1+lambda) != 0 as written; the registry registers the "
                 "recentered variant g(t) - g(1)";
    rows.push_back(std::move(row));
  }
  {
    TransformRow row;
    row.label = "f(t)=(log t)^2/2";
    row.f = [](double t) { const double l = std::log(t); return 0.5 * l * l; };
    row.g = [](double t) { return -std::log(t); };
    row.mean_generator = true;
    rows.push_back(std::move(row));
  }
  {
    TransformRow row;
    row.label = "f(t)=t*log t - t";
    row.f = [](double t) { return t * std::log(t) - t; };
    row.g = [](double t) { return -t * std::log(t); };
    row.mean_generator = false;
    row.reason = "g is not strictly decreasing (increasing on (0, 1/e))";
    rows.push_back(std::move(row));
  }
  {
    TransformRow row;
    row.label = "f(t)=t^p, p=1";
    row.f = [](double t) { return t; };
    row.g = [](double t) { return -t; };
    row.mean_generator = false;
    row.reason = "g(1) = -p != 0 for p != 0";
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// f from g by quadrature

namespace {

// Adaptive Simpson with the classic |S2 - S1|/15 error estimate.
double adaptive_simpson(const ScalarFn& fn, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw NumericalError("quadrature recursion limit reached");
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const ScalarFn& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double fa = fn(a);
  const double m = 0.5 * (a + b);
  const double fm = fn(m);
  const double fb = fn(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return sign * adaptive_simpson(fn, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace

ScalarFn build_f_from_g(ScalarFn g, const std::vector<double>& grid) {
  if (grid.size() < 2) throw ConfigError("build_f_from_g needs at least two grid points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !(grid[i + 1] > grid[i]))
      throw ConfigError("build_f_from_g grid must be positive and increasing");
    if (!(g(grid[i + 1]) < g(grid[i])))
      throw ConfigError("build_f_from_g: g is not strictly decreasing on the grid");
  }
  // Phi'(x) = -g(e^x), Phi(0) = 0, f(t) = Phi(log t).
  auto phi_prime = [g = std::move(g)](double x) { return -g(std::exp(x)); };
  return [phi_prime](double t) {
    if (!(t > 0.0)) throw DomainError("f is only defined for t > 0");
    return integrate(phi_prime, 0.0, std::log(t), 1e-12);
  };
}

ConvexLogReport convex_log_check(const ScalarFn& f, int samples, std::uint64_t seed) {
  ConvexLogReport report;
  report.samples = samples;
  report.seed = seed;
  report.max_violation = -std::numeric_limits<double>::infinity();
  if (samples <= 0) {
    report.max_violation = 0.0;
    return report;
  }
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::for_sample(seed, static_cast<std::uint64_t>(i));
    const double t = rng.log_uniform(1e-3, 1e3);
    const double s = rng.log_uniform(1e-3, 1e3);
    const double p = rng.uniform01();
    const double mix = std::pow(t, p) * std::pow(s, 1.0 - p);
    const double gap = f(mix) - (p * f(t) + (1.0 - p) * f(s));
    report.max_violation = std::max(report.max_violation, gap);
    if (gap > 1e-12) ++report.violations;
  }
  return report;
}

}  // namespace opmeans
