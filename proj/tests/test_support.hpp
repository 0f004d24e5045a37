#pragma once

// Shared helpers for the unit tests: naive reference implementations used
// as oracles, and random inputs.

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "qicert/matrix.hpp"
#include "qicert/quantum.hpp"

namespace qicert::testing {

inline constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;

/// Entry-by-entry Kronecker product straight from the definition.
inline ComplexMatrix naive_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return c;
}

/// Triple-loop product.
inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s{};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& e : m.entries()) e = rng.complex_normal();
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = random_matrix(dim, dim, rng);
  return (g + g.adjoint()) * 0.5;
}

inline ComplexMatrix cnot() {
  ComplexMatrix c(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

inline Ket phi_plus() { return {kHalfSqrt2, 0.0, 0.0, kHalfSqrt2}; }

inline void expect_matrix_near(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE(max_abs_diff(a, b), tol);
}

}  // namespace qicert::testing
