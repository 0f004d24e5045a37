#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qicert {

using Complex = std::complex<double>;

/// Column vector of amplitudes.
using Ket = std::vector<Complex>;

/// Subsystem dimensions of a composite space, most significant first.
using Dims = std::vector<std::size_t>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or subsystem dimensions that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numeric premise of an operation (hermiticity, unitarity, probability
/// floor, eigenvalue gap) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |v><v|
  static ComplexMatrix projector(const Ket& v);
  /// |out><in|
  static ComplexMatrix outer(const Ket& out, const Ket& in);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex s, ComplexMatrix m);
ComplexMatrix operator*(ComplexMatrix m, Complex s);
/// Matrix product; dispatches to the parallel kernel above a size threshold.
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
Ket operator*(const ComplexMatrix& m, const Ket& v);

/// Largest absolute entry.
double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& m);

Complex inner(const Ket& bra, const Ket& ket);
double norm(const Ket& v);
Ket normalized(const Ket& v);
Ket kron(const Ket& a, const Ket& b);
Ket basis_ket(std::size_t dim, std::size_t index);

/// Tr(a * b) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-9);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-9);
/// m^dagger m = I (columns orthonormal); allows non-square maps.
bool is_isometry(const ComplexMatrix& m, double tol = 1e-9);

std::size_t product(const Dims& dims);
std::string shape_string(const ComplexMatrix& m);

}  // namespace qicert
