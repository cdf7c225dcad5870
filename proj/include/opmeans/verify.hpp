#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opmeans/calculus.hpp"
#include "opmeans/rng.hpp"
#include "opmeans/solver.hpp"

namespace opmeans {

/// Outcome of one sampled property check. Theorem-backed checks must come
/// back with zero violations; searches and probes only report findings.
/// Solver non-convergence is counted separately from violations, never
/// folded into them.
struct PropertyReport {
  std::string property;
  int samples = 0;
  int violations = 0;
  int nonconverged = 0;
  /// Largest violation measure seen; the check passes when it stays at or
  /// below its tolerance. Negative values mean margin.
  double worst_gap = 0.0;
  std::map<std::string, double> tolerances;
  std::optional<nlohmann::json> witness;  // inputs of the first violation
  std::uint64_t seed = 0;
  bool theorem_backed = true;
  std::optional<nlohmann::json> histogram;  // convexity probe only

  bool passed() const { return !theorem_backed || violations == 0; }
  nlohmann::json to_json() const;
};

// Seeded random inputs with controlled conditioning (Q from the QR of a
// Gaussian matrix, eigenvalues/singular values log-uniform).
SpdMatrix random_spd(Rng& rng, int n, double eig_lo = 1e-2, double eig_hi = 1e2);
Matrix random_orthogonal(Rng& rng, int n);
Matrix random_invertible(Rng& rng, int n, double cond_cap = 100.0);
SymMatrix random_sym_direction(Rng& rng, int n);  // Gaussian, unit Frobenius norm
std::vector<double> random_weights(Rng& rng, int k);

/// Ando-Hiai majorization: log(X #_p Y) is majorized by
/// p log X + (1-p) log Y. Partial-sum slack tolerance -1e-9, trace gap 1e-9.
PropertyReport check_majorization(int samples, const std::vector<int>& dims,
                                  const std::vector<double>& p_grid, std::uint64_t seed);

/// Congruence invariance of the mean for classified generators:
/// X_g(C^T A_i C) = C^T X_g(A_i) C within 1e-7 relative, cond(C) <= 100.
PropertyReport check_congruence_invariance(const Generator& gen, int samples, std::uint64_t seed,
                                           const std::vector<int>& dims = {3},
                                           const std::vector<int>& ks = {3});

/// Arithmetic-mean bound at the solution: the signed difference
/// (direction by classification) has min eigenvalue >= -1e-9.
PropertyReport check_mean_bounds(const Generator& gen, int samples, std::uint64_t seed,
                                 const std::vector<int>& dims = {2, 3},
                                 const std::vector<int>& ks = {2, 3});

/// Geodesic convexity of the aggregated objective:
/// F(X #_p Y) <= p F(X) + (1-p) F(Y) + 1e-9.
PropertyReport check_geodesic_convexity(const Generator& gen, int samples, std::uint64_t seed,
                                        const std::vector<int>& dims = {2, 3, 4},
                                        const std::vector<int>& ks = {1, 2, 3});

/// Gradient formula versus central finite differences along 20 random
/// symmetric directions; relative error tolerance 1e-6.
PropertyReport check_gradient(const Generator& gen, int samples, std::uint64_t seed);

/// Searches 2x2, k=2 instances for a monotonicity violation of a hyper-mean:
/// a PSD increment of one argument that decreases the mean somewhere.
/// The first finding is re-verified with the descent solver at grad_tol
/// 1e-12 before being reported. Finding nothing is a valid outcome.
PropertyReport search_monotonicity_violation(const Generator& gen, int samples,
                                             std::uint64_t seed);

/// Samples the conjectured joint convexity of hyper-means:
/// X_g((A+B)/2) <= (X_g(A) + X_g(B))/2. Findings are reported with a slack
/// histogram; they are never failures (the claim is a conjecture).
PropertyReport probe_mean_convexity(const Generator& gen, int samples, std::uint64_t seed);

}  // namespace opmeans
