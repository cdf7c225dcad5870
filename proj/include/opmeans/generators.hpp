#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opmeans/errors.hpp"

namespace opmeans {

using ScalarFn = std::function<double(double)>;

/// Operator convexity/concavity of g, asserted from the literature per
/// registry entry. Not derivable from scalar sampling, so it is data here.
enum class Classification { OperatorConvex, OperatorConcave, Unclassified };

std::string to_string(Classification c);

/// A mean generator: the function g driving the critical-point equation,
/// together with its antecedent f (g(t) = -t f'(t)) when known in closed
/// form. Valid generators are strictly decreasing with g(1) = 0.
struct Generator {
  std::string name;
  std::optional<double> p;
  std::optional<double> lambda;
  ScalarFn g;
  ScalarFn f;        // may be empty
  ScalarFn f_prime;  // may be empty
  Classification classification = Classification::Unclassified;
  std::optional<double> f_lower_bound;

  bool has_f() const { return static_cast<bool>(f); }
  bool classified() const { return classification != Classification::Unclassified; }
  /// "karcher", "power-convex(p=0.5)", ... used in reports and errors.
  std::string display_name() const;
};

/// The dyadic grid 2^-10 .. 2^10 on which generator invariants are sampled.
std::vector<double> dyadic_grid();

/// Checks the Generator invariants by sampling: g(1) = 0 within 1e-12,
/// g strictly decreasing on the dyadic grid, and g(t) + t f'(t) = 0 within
/// 1e-9 when f' is present. Throws ConfigError on the first failure.
void validate_generator(const Generator& gen);

/// Looks up a registered family and instantiates it with the given
/// parameters. Known names: karcher, shifted-log (lambda > 0),
/// power-convex (0 < p < 1), power-concave (1 <= p <= 2).
Generator registry_get(const std::string& name, std::optional<double> p = std::nullopt,
                       std::optional<double> lambda = std::nullopt);

/// One (f, g) pair of the transform table, as printed in the source material;
/// rows that fail the mean-generator requirements carry the reason.
struct TransformRow {
  std::string label;
  ScalarFn f;
  ScalarFn g;
  bool mean_generator = false;
  std::string reason;  // empty when mean_generator
};

/// All four classical f -> g = -t f'(t) rows (shifted-log at lambda = 1 and
/// the power row at p = 1 as representatives).
std::vector<TransformRow> transform_table();

/// Reconstructs f from a strictly decreasing g: f(t) = Phi(log t) with
/// Phi'(x) = -g(e^x) and Phi(0) = 0, by adaptive Simpson quadrature
/// (absolute tolerance 1e-12). g must be strictly decreasing on `grid`.
ScalarFn build_f_from_g(ScalarFn g, const std::vector<double>& grid);

/// Outcome of sampling the convex-log inequality
/// f(t^p s^(1-p)) <= p f(t) + (1-p) f(s).
struct ConvexLogReport {
  int samples = 0;
  int violations = 0;       // samples with gap > 1e-12
  double max_violation = 0; // largest positive gap seen (can be <= 0)
  std::uint64_t seed = 0;
};

/// Samples the inequality on seeded random triples: t, s log-uniform in
/// [1e-3, 1e3], p uniform in [0, 1]. Violations are reported, never thrown.
ConvexLogReport convex_log_check(const ScalarFn& f, int samples, std::uint64_t seed);

}  // namespace opmeans
