#pragma once

#include <cmath>
#include <vector>

#include "opmeans/linalg.hpp"
#include "opmeans/rng.hpp"
#include "opmeans/verify.hpp"

namespace opmeans::test {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

inline double max_abs_diff(const SpdMatrix& a, const SpdMatrix& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

inline double rel_frob_diff(const SymMatrix& a, const SymMatrix& b) {
  return (a - b).frobenius_norm() / b.frobenius_norm();
}

inline double rel_frob_diff(const SpdMatrix& a, const SpdMatrix& b) {
  return rel_frob_diff(a.sym(), b.sym());
}

}  // namespace opmeans::test
