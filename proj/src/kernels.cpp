#include "qicert/kernels.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qicert::kernels {

namespace {

void check_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("cannot multiply " + shape_string(a) + " by " + shape_string(b));
}

// One output row; shared by both variants so the accumulation order matches.
inline void matmul_row(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c,
                       std::size_t r) {
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  for (std::size_t k = 0; k < inner; ++k) {
    const Complex aik = a(r, k);
    if (aik == Complex{}) continue;
    for (std::size_t j = 0; j < cols; ++j) c(r, j) += aik * b(k, j);
  }
}

inline void kron_row(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c,
                     std::size_t r) {
  const std::size_t ia = r / b.rows();
  const std::size_t ib = r % b.rows();
  for (std::size_t ja = 0; ja < a.cols(); ++ja) {
    const Complex s = a(ia, ja);
    for (std::size_t jb = 0; jb < b.cols(); ++jb) c(r, ja * b.cols() + jb) = s * b(ib, jb);
  }
}

}  // namespace

namespace serial {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_matmul(a, b);
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) matmul_row(a, b, c, r);
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t r = 0; r < c.rows(); ++r) kron_row(a, b, c, r);
  return c;
}

double max_over_range(std::uint64_t count, const std::function<double(std::uint64_t)>& f) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < count; ++i) best = std::max(best, f(i));
  return best;
}

}  // namespace serial

namespace omp {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_matmul(a, b);
  ComplexMatrix c(a.rows(), b.cols());
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) matmul_row(a, b, c, static_cast<std::size_t>(r));
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  const auto rows = static_cast<std::int64_t>(c.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) kron_row(a, b, c, static_cast<std::size_t>(r));
  return c;
}

double max_over_range(std::uint64_t count, const std::function<double(std::uint64_t)>& f) {
  double best = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) reduction(max : best)
  for (std::int64_t i = 0; i < n; ++i) best = std::max(best, f(static_cast<std::uint64_t>(i)));
  return best;
}

}  // namespace omp

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() * a.cols() * b.cols() >= kParallelWorkThreshold && max_threads() > 1)
    return omp::matmul(a, b);
  return serial::matmul(a, b);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.size() * b.size() >= kParallelWorkThreshold && max_threads() > 1) return omp::kron(a, b);
  return serial::kron(a, b);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qicert::kernels
