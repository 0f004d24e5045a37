#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; both produce
// bit-identical results (every output entry is accumulated in the same order).

#include <cstddef>
#include <cstdint>
#include <functional>

#include "qicert/matrix.hpp"

namespace qicert::kernels {

/// Work (multiply-adds) above which the dispatching wrappers go parallel.
inline constexpr std::size_t kParallelWorkThreshold = 1u << 15;

namespace serial {
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// max over i in [0, count) of f(i), first maximizer wins ties.
double max_over_range(std::uint64_t count, const std::function<double(std::uint64_t)>& f);
}  // namespace serial

namespace omp {
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
double max_over_range(std::uint64_t count, const std::function<double(std::uint64_t)>& f);
}  // namespace omp

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Number of threads the OpenMP runtime will use (1 without OpenMP).
int max_threads();

}  // namespace qicert::kernels
