#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qicert/matrix.hpp"

namespace qicert {

/// Tolerances shared across the library.
namespace tol {
inline constexpr double kIdentity = 1e-9;       // algebraic identities
inline constexpr double kCertification = 1e-8;  // factorization / certification acceptance
inline constexpr double kSingular = 1e-12;      // eigenvalue / probability floor
}  // namespace tol

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);

/// Reduced matrix on the subsystems listed in `keep` (any order; result
/// keeps them in ascending subsystem order).
ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims,
                            const std::vector<std::size_t>& keep);

/// Reorders tensor factors of a vector space. `perm[k]` is the input
/// subsystem that becomes output subsystem k. Returns the permutation
/// matrix P with P (x_0 ⊗ x_1 ⊗ ...) = x_perm[0] ⊗ x_perm[1] ⊗ ...
ComplexMatrix subsystem_permutation(const Dims& dims, const std::vector<std::size_t>& perm);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Each eigenvector
/// has its first non-negligible component real and positive.
EigenDecomposition herm_eig(const ComplexMatrix& h);

/// Sum of sign(lambda_k) v_k v_k^dagger. Throws if some |lambda_k| <= 1e-12.
ComplexMatrix sign_operator(const ComplexMatrix& h);

/// Orthonormal basis (as columns) of the eigenspace of a Hermitian PSD
/// matrix with eigenvalues above `threshold`.
ComplexMatrix support_basis(const ComplexMatrix& psd, double threshold = 1e-10);

/// (<out| ⊗ I_aux) W (|in> ⊗ I_aux), an aux_in -> aux_out matrix.
/// `dims_out` = {primary_out, aux_out}, `dims_in` = {primary_in, aux_in}.
ComplexMatrix operator_block(const ComplexMatrix& w, const Ket& out_vec, const Ket& in_vec,
                             const Dims& dims_out, const Dims& dims_in);

struct TensorSplit {
  std::size_t out1 = 0, out2 = 0;  // row dimensions of factor 1 and factor 2
  std::size_t in1 = 0, in2 = 0;    // column dimensions of factor 1 and factor 2
};

struct Factorization {
  bool is_product = false;
  ComplexMatrix factor1;  // out1 x in1, unit largest singular value, phase-fixed
  ComplexMatrix factor2;  // out2 x in2
  double residual = 0.0;  // max-norm of W - factor1 ⊗ factor2
  std::vector<double> schmidt_coefficients;  // operator-Schmidt, descending
};

/// Operator-Schmidt analysis of W across the split. is_product iff the
/// leading squared coefficient carries at least (1 - tol) of the total.
Factorization factorize_tensor_product(const ComplexMatrix& w, const TensorSplit& split,
                                       double tolerance = tol::kCertification);

/// Multiplies by a unit phase so the first entry with modulus above
/// `threshold` is real positive.
ComplexMatrix fix_phase(const ComplexMatrix& m, double threshold = 1e-10);
Ket fix_phase(const Ket& v, double threshold = 1e-10);

/// min over unit phases c of max|a - c b|; c taken from the largest entry of b.
double distance_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qicert
