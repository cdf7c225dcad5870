#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "opmeans/errors.hpp"

namespace opmeans {

/// Default cap on matrix dimension. Override with set_max_dimension() (the
/// CLI honors the OPMEANS_MAX_DIM environment variable).
int max_dimension();
void set_max_dimension(int n);

/// Dense square matrix, row-major, double precision. No symmetry assumed;
/// used for eigenvector bases, congruence transforms and intermediates.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(int n);  // zero-filled
  Matrix(int n, std::vector<double> entries);

  static Matrix identity(int n);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return a_; }

  Matrix transposed() const;
  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);
  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
  friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
  friend Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
  friend Matrix operator*(double s, Matrix rhs) { return rhs *= s; }
  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);  // matrix product

private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Tr(A * B) without forming the product.
double trace_product(const Matrix& a, const Matrix& b);

/// Real symmetric matrix. Entries are symmetrized exactly on construction
/// ((M + M^T)/2) and checked finite; a_ij == a_ji holds bit-for-bit.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int n);  // zero matrix
  /// Symmetrizes and validates an arbitrary square matrix.
  explicit SymMatrix(const Matrix& m);
  /// Row-major n*n entries; symmetrized and validated.
  SymMatrix(int n, const std::vector<double>& entries);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const std::vector<double>& d);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }
  double max_abs() const { return m_.max_abs(); }

  SymMatrix& operator+=(const SymMatrix& rhs);
  SymMatrix& operator-=(const SymMatrix& rhs);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) { return lhs += rhs; }
  friend SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) { return lhs -= rhs; }
  friend SymMatrix operator*(SymMatrix lhs, double s) { return lhs *= s; }
  friend SymMatrix operator*(double s, SymMatrix rhs) { return rhs *= s; }

private:
  struct Exact {};
  SymMatrix(Matrix m, Exact) : m_(std::move(m)) {}

  Matrix m_;
  friend class SpdMatrix;
};

/// Eigendecomposition of a symmetric matrix: A = Q diag(lambda) Q^T with
/// Q orthogonal and eigenvalues sorted in descending order.
struct EigDecomposition {
  Matrix q;
  std::vector<double> lambda;

  double min_eigenvalue() const { return lambda.back(); }
  double max_eigenvalue() const { return lambda.front(); }
};

/// Cyclic Jacobi eigensolver with threshold pivoting. Converges when the
/// off-diagonal Frobenius norm drops below tol * ||A||_F; throws
/// NumericalError (with the residual) if 100 sweeps do not suffice.
EigDecomposition sym_eig(const SymMatrix& a, double tol = 1e-14);

/// Q diag(h(lambda_i)) Q^T for a decomposition already in hand.
SymMatrix eig_apply(const EigDecomposition& eig, const std::function<double(double)>& h);

/// Symmetric positive definite matrix. Construction runs an
/// eigendecomposition (cached for later functional calculus) and rejects
/// matrices whose minimum eigenvalue is at or below 1e-12 times the maximum.
class SpdMatrix {
public:
  SpdMatrix() = default;
  explicit SpdMatrix(const SymMatrix& m);
  explicit SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}

  static SpdMatrix identity(int n);
  static SpdMatrix diagonal(const std::vector<double>& d);
  /// Builds Q diag(lambda) Q^T from a known spectral factorization with
  /// strictly positive eigenvalues (q orthogonal). Skips the re-decomposition
  /// but still enforces the SPD floor.
  static SpdMatrix from_eig(const Matrix& q, std::vector<double> lambda);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }
  const SymMatrix& sym() const { return m_; }
  const Matrix& matrix() const { return m_.matrix(); }
  const EigDecomposition& eig() const { return eig_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

private:
  SymMatrix m_;
  EigDecomposition eig_;
};

/// Functional calculus h(A) = Q diag(h(lambda)) Q^T. Throws DomainError,
/// naming the eigenvalue, when h is non-finite there.
SymMatrix apply_fun(const SpdMatrix& a, const std::function<double(double)>& h);
SymMatrix apply_fun(const SymMatrix& a, const std::function<double(double)>& h);

/// (A^{1/2}, A^{-1/2}) from one shared decomposition.
std::pair<SpdMatrix, SpdMatrix> sqrt_and_invsqrt(const SpdMatrix& a);

/// C^T A C. Throws ConditioningError when C is numerically singular
/// (smallest singular value <= 1e-12 times the largest).
SymMatrix congruence(const Matrix& c, const SymMatrix& a);

/// Trace inner product of the SPD manifold at x:
/// <u, v>_x = Tr x^{-1} u x^{-1} v.
double trace_inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v);

// Spectral-map conveniences built on the calculus above.
SymMatrix spd_log(const SpdMatrix& a);
SpdMatrix spd_pow(const SpdMatrix& a, double p);
SpdMatrix sym_exp(const SymMatrix& a);
SpdMatrix spd_inverse(const SpdMatrix& a);

}  // namespace opmeans
