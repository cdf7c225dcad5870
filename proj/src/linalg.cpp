#include "opmeans/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace opmeans {

namespace {

std::atomic<int> g_max_dimension{64};

void check_dim(int n) {
  if (n < 1) throw ConfigError("matrix dimension must be positive");
  const int cap = max_dimension();
  if (n > cap) {
    std::ostringstream os;
    os << "matrix dimension " << n << " exceeds the cap " << cap;
    throw ConfigError(os.str());
  }
}

}  // namespace

int max_dimension() { return g_max_dimension.load(); }

void set_max_dimension(int n) {
  if (n < 1) throw ConfigError("dimension cap must be positive");
  g_max_dimension.store(n);
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) { check_dim(n); }

Matrix::Matrix(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
  check_dim(n);
  if (a_.size() != static_cast<std::size_t>(n) * n)
    throw ConfigError("entry count does not match dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  if (n_ != rhs.n_) throw ConfigError("dimension mismatch in matrix sum");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  if (n_ != rhs.n_) throw ConfigError("dimension mismatch in matrix difference");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.n_ != rhs.n_) throw ConfigError("dimension mismatch in matrix product");
  const int n = lhs.n_;
  Matrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double lik = lhs(i, k);
      if (lik == 0.0) continue;
      for (int j = 0; j < n; ++j) out(i, j) += lik * rhs(k, j);
    }
  }
  return out;
}

double trace_product(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw ConfigError("dimension mismatch in trace product");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(j, i);
  return s;
}

// ---------------------------------------------------------------------------
// SymMatrix

namespace {

Matrix symmetrized(const Matrix& m) {
  const int n = m.dim();
  Matrix s(n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = m(i, i);
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(s(i, j))) throw ConfigError("matrix has non-finite entries");
  return s;
}

}  // namespace

SymMatrix::SymMatrix(int n) : m_(n) {}

SymMatrix::SymMatrix(const Matrix& m) : m_(symmetrized(m)) {}

SymMatrix::SymMatrix(int n, const std::vector<double>& entries)
    : m_(symmetrized(Matrix(n, entries))) {}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  s.m_ = Matrix::identity(n);
  return s;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.dim(); ++i) {
    if (!std::isfinite(d[i]))
      throw ConfigError("matrix has non-finite entries");
    s.m_(i, i) = d[i];
  }
  return s;
}

// Elementwise ops on exactly-symmetric storage stay exactly symmetric.
SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
  m_ += rhs.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
  m_ -= rhs.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver

namespace {

constexpr int kMaxSweeps = 100;

double offdiag_frobenius(const Matrix& a) {
  const int n = a.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

void sort_descending(Matrix& q, std::vector<double>& lambda) {
  const int n = static_cast<int>(lambda.size());
  std::vector<int> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return lambda[i] > lambda[j]; });
  std::vector<double> sorted(lambda.size());
  Matrix qs(n);
  for (int c = 0; c < n; ++c) {
    sorted[c] = lambda[idx[c]];
    for (int r = 0; r < n; ++r) qs(r, c) = q(r, idx[c]);
  }
  lambda = std::move(sorted);
  q = std::move(qs);
}

}  // namespace

EigDecomposition sym_eig(const SymMatrix& input, double tol) {
  if (tol <= 0.0) throw ConfigError("eigensolver tolerance must be positive");
  const int n = input.dim();
  Matrix a = input.matrix();
  Matrix q = Matrix::identity(n);
  const double norm = a.frobenius_norm();

  if (n > 1 && norm > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
      const double off = offdiag_frobenius(a);
      if (off <= tol * norm) {
        converged = true;
        break;
      }
      // Skip sub-threshold pivots during early sweeps so large elements are
      // annihilated first; later sweeps rotate on anything non-negligible.
      const double thresh = (sweep < 3) ? 0.2 * off * off / (n * n) : 0.0;
      for (int p = 0; p < n - 1; ++p) {
        for (int qi = p + 1; qi < n; ++qi) {
          const double apq = a(p, qi);
          const double negligible =
              1e-300 + std::numeric_limits<double>::epsilon() *
                           (std::fabs(a(p, p)) + std::fabs(a(qi, qi)));
          if (std::fabs(apq) <= negligible) {
            a(p, qi) = 0.0;
            a(qi, p) = 0.0;
            continue;
          }
          if (std::fabs(apq) * std::fabs(apq) <= thresh) continue;

          const double theta = (a(qi, qi) - a(p, p)) / (2.0 * apq);
          double t;
          if (std::fabs(theta) > 1e150) {
            t = 0.5 / theta;  // avoids overflow of theta^2
          } else {
            t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
          }
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          const double tau = s / (1.0 + c);

          a(p, p) -= t * apq;
          a(qi, qi) += t * apq;
          a(p, qi) = 0.0;
          a(qi, p) = 0.0;
          for (int r = 0; r < n; ++r) {
            if (r != p && r != qi) {
              const double arp = a(r, p);
              const double arq = a(r, qi);
              a(r, p) = arp - s * (arq + tau * arp);
              a(p, r) = a(r, p);
              a(r, qi) = arq + s * (arp - tau * arq);
              a(qi, r) = a(r, qi);
            }
            const double qrp = q(r, p);
            const double qrq = q(r, qi);
            q(r, p) = qrp - s * (qrq + tau * qrp);
            q(r, qi) = qrq + s * (qrp - tau * qrq);
          }
        }
      }
    }
    if (!converged) {
      const double off = offdiag_frobenius(a);
      if (off > tol * norm) {
        std::ostringstream os;
        os << "jacobi eigensolver did not converge in " << kMaxSweeps
           << " sweeps; off-diagonal residual " << off << " (target " << tol * norm << ")";
        throw NumericalError(os.str());
      }
    }
  }

  std::vector<double> lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = a(i, i);
  sort_descending(q, lambda);
  return EigDecomposition{std::move(q), std::move(lambda)};
}

SymMatrix eig_apply(const EigDecomposition& eig, const std::function<double(double)>& h) {
  const int n = eig.q.dim();
  Matrix scaled(n);  // Q * diag(h(lambda))
  for (int j = 0; j < n; ++j) {
    const double hv = h(eig.lambda[j]);
    if (!std::isfinite(hv)) {
      std::ostringstream os;
      os << "scalar function is not finite at eigenvalue " << eig.lambda[j];
      throw DomainError(os.str());
    }
    for (int i = 0; i < n; ++i) scaled(i, j) = eig.q(i, j) * hv;
  }
  return SymMatrix(scaled * eig.q.transposed());
}

// ---------------------------------------------------------------------------
// SpdMatrix

namespace {

constexpr double kSpdFloor = 1e-12;

void check_spd_floor(double min_eig, double max_eig) {
  if (!(max_eig > 0.0) || min_eig <= kSpdFloor * max_eig) {
    std::ostringstream os;
    os << "matrix is not safely positive definite: min eigenvalue " << min_eig
       << ", max eigenvalue " << max_eig;
    throw ConditioningError(os.str());
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const SymMatrix& m) : m_(m), eig_(sym_eig(m)) {
  check_spd_floor(eig_.min_eigenvalue(), eig_.max_eigenvalue());
}

SpdMatrix SpdMatrix::identity(int n) { return SpdMatrix(SymMatrix::identity(n)); }

SpdMatrix SpdMatrix::diagonal(const std::vector<double>& d) {
  return SpdMatrix(SymMatrix::diagonal(d));
}

SpdMatrix SpdMatrix::from_eig(const Matrix& q, std::vector<double> lambda) {
  const int n = q.dim();
  if (static_cast<int>(lambda.size()) != n) throw ConfigError("eigenvalue count mismatch");
  Matrix qc = q;
  sort_descending(qc, lambda);
  check_spd_floor(lambda.back(), lambda.front());

  Matrix scaled(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) scaled(i, j) = qc(i, j) * lambda[j];
  SpdMatrix out;
  out.m_ = SymMatrix(scaled * qc.transposed());
  out.eig_ = EigDecomposition{std::move(qc), std::move(lambda)};
  return out;
}

// ---------------------------------------------------------------------------
// Functional calculus and the trace metric

SymMatrix apply_fun(const SpdMatrix& a, const std::function<double(double)>& h) {
  return eig_apply(a.eig(), h);
}

SymMatrix apply_fun(const SymMatrix& a, const std::function<double(double)>& h) {
  return eig_apply(sym_eig(a), h);
}

std::pair<SpdMatrix, SpdMatrix> sqrt_and_invsqrt(const SpdMatrix& a) {
  const EigDecomposition& e = a.eig();
  std::vector<double> root(e.lambda.size());
  std::vector<double> invroot(e.lambda.size());
  for (std::size_t i = 0; i < e.lambda.size(); ++i) {
    root[i] = std::sqrt(e.lambda[i]);
    invroot[i] = 1.0 / root[i];
  }
  return {SpdMatrix::from_eig(e.q, std::move(root)), SpdMatrix::from_eig(e.q, std::move(invroot))};
}

SymMatrix congruence(const Matrix& c, const SymMatrix& a) {
  if (c.dim() != a.dim()) throw ConfigError("dimension mismatch in congruence");
  const Matrix ct = c.transposed();
  // Singularity gate on the singular values of C (via C^T C).
  const EigDecomposition gram = sym_eig(SymMatrix(ct * c));
  if (!(gram.max_eigenvalue() > 0.0) ||
      gram.min_eigenvalue() <= 1e-12 * gram.max_eigenvalue()) {
    throw ConditioningError("congruence transform is numerically singular");
  }
  return SymMatrix(ct * a.matrix() * c);
}

double trace_inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) {
  if (u.dim() != x.dim() || v.dim() != x.dim())
    throw ConfigError("dimension mismatch in trace inner product");
  const SymMatrix xinv = eig_apply(x.eig(), [](double t) { return 1.0 / t; });
  const Matrix xu = xinv.matrix() * u.matrix();
  const Matrix xv = xinv.matrix() * v.matrix();
  return trace_product(xu, xv);
}

SymMatrix spd_log(const SpdMatrix& a) {
  return eig_apply(a.eig(), [](double t) { return std::log(t); });
}

SpdMatrix spd_pow(const SpdMatrix& a, double p) {
  const EigDecomposition& e = a.eig();
  std::vector<double> powered(e.lambda.size());
  for (std::size_t i = 0; i < e.lambda.size(); ++i) powered[i] = std::pow(e.lambda[i], p);
  return SpdMatrix::from_eig(e.q, std::move(powered));
}

SpdMatrix sym_exp(const SymMatrix& a) {
  EigDecomposition e = sym_eig(a);
  std::vector<double> expd(e.lambda.size());
  for (std::size_t i = 0; i < e.lambda.size(); ++i) {
    expd[i] = std::exp(e.lambda[i]);
    if (!std::isfinite(expd[i])) {
      std::ostringstream os;
      os << "matrix exponential overflows at eigenvalue " << e.lambda[i];
      throw DomainError(os.str());
    }
  }
  return SpdMatrix::from_eig(e.q, std::move(expd));
}

SpdMatrix spd_inverse(const SpdMatrix& a) {
  const EigDecomposition& e = a.eig();
  std::vector<double> inv(e.lambda.size());
  for (std::size_t i = 0; i < e.lambda.size(); ++i) inv[i] = 1.0 / e.lambda[i];
  return SpdMatrix::from_eig(e.q, std::move(inv));
}

}  // namespace opmeans
