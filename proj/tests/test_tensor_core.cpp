#include <numbers>

#include "qicert/kernels.hpp"
#include "qicert/linalg.hpp"
#include "qicert/reference.hpp"
#include "qicert/bell.hpp"
#include "test_support.hpp"

namespace qicert {
namespace {

using testing::expect_matrix_near;
using testing::kHalfSqrt2;

TEST(ComplexMatrixTest, ConstructorRejectsWrongEntryCount) {
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<Complex>(3)), DimensionError);
}

TEST(ComplexMatrixTest, AdjointIsAnExactInvolution) {
  Rng rng(3);
  for (std::size_t d : {1u, 3u, 7u}) {
    const ComplexMatrix m = testing::random_matrix(d, d + 2, rng);
    EXPECT_EQ(m.adjoint().adjoint(), m);
  }
}

TEST(ComplexMatrixTest, ProductMatchesTripleLoop) {
  Rng rng(5);
  const ComplexMatrix a = testing::random_matrix(5, 7, rng);
  const ComplexMatrix b = testing::random_matrix(7, 4, rng);
  expect_matrix_near(a * b, testing::naive_matmul(a, b), 1e-12);
  EXPECT_THROW(b * a * b, DimensionError);
}

TEST(KronTest, IdentityTimesIdentity) {
  EXPECT_EQ(kron(pauli::identity(), pauli::identity()), ComplexMatrix::identity(4));
}

TEST(KronTest, ZTimesZIsDiagonal) {
  const std::vector<double> d{1.0, -1.0, -1.0, 1.0};
  EXPECT_EQ(kron(pauli::z(), pauli::z()), ComplexMatrix::diagonal(std::span<const double>(d)));
}

TEST(KronTest, XTimesXIsAntidiagonal) {
  const ComplexMatrix xx = kron(pauli::x(), pauli::x());
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(xx(r, c), Complex(r + c == 3 ? 1.0 : 0.0));
}

ComplexMatrix gaussian_integer_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& e : m.entries())
    e = Complex(static_cast<double>(rng.next() % 9) - 4.0, static_cast<double>(rng.next() % 9) - 4.0);
  return m;
}

TEST(KronTest, MatchesDefinition) {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = testing::random_matrix(2, 3, rng);
    const ComplexMatrix b = testing::random_matrix(3, 2, rng);
    EXPECT_EQ(kron(a, b), testing::naive_kron(a, b));
  }
}

TEST(KronTest, AssociativeExactlyOnExactlyRepresentableEntries) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = gaussian_integer_matrix(2, 3, rng);
    const ComplexMatrix b = gaussian_integer_matrix(3, 2, rng);
    const ComplexMatrix c = gaussian_integer_matrix(2, 2, rng);
    EXPECT_EQ(kron(kron(a, b), c), kron(a, kron(b, c)));
  }
}

TEST(KronTest, AssociativeToRoundingOnRandomEntries) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = testing::random_matrix(2, 3, rng);
    const ComplexMatrix b = testing::random_matrix(3, 2, rng);
    const ComplexMatrix c = testing::random_matrix(2, 2, rng);
    expect_matrix_near(kron(kron(a, b), c), kron(a, kron(b, c)), 1e-14);
  }
}

TEST(KernelsTest, SerialAndParallelAgreeBitForBit) {
  Rng rng(17);
  const ComplexMatrix a = testing::random_matrix(40, 33, rng);
  const ComplexMatrix b = testing::random_matrix(33, 45, rng);
  EXPECT_EQ(kernels::serial::matmul(a, b), kernels::omp::matmul(a, b));
  EXPECT_EQ(kernels::serial::kron(a, b), kernels::omp::kron(a, b));
  auto f = [](std::uint64_t i) { return std::sin(static_cast<double>(i) * 0.37); };
  EXPECT_EQ(kernels::serial::max_over_range(5000, f), kernels::omp::max_over_range(5000, f));
}

TEST(PartialTraceTest, MaximallyEntangledReducesToMixed) {
  const auto rho = ComplexMatrix::projector(testing::phi_plus());
  expect_matrix_near(partial_trace(rho, {2, 2}, {0}), ComplexMatrix::identity(2) * 0.5, 1e-15);
}

TEST(PartialTraceTest, ProductOperatorKeepsTraceWeightedFactor) {
  Rng rng(2);
  const ComplexMatrix a = testing::random_matrix(3, 3, rng);
  const ComplexMatrix b = testing::random_matrix(2, 2, rng);
  expect_matrix_near(partial_trace(kron(a, b), {3, 2}, {0}), a * b.trace(), 1e-12);
  expect_matrix_near(partial_trace(kron(a, b), {3, 2}, {1}), b * a.trace(), 1e-12);
}

TEST(PartialTraceTest, ProductStateKeepsSecondFactor) {
  const auto rho = ComplexMatrix::projector(basis_ket(4, 0));
  expect_matrix_near(partial_trace(rho, {2, 2}, {1}), ComplexMatrix::projector(basis_ket(2, 0)), 0.0);
}

TEST(PartialTraceTest, MalformedDimsAreRejected) {
  EXPECT_THROW(partial_trace(ComplexMatrix::identity(4), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(ComplexMatrix(4, 2), {2, 2}, {0}), DimensionError);
}

TEST(PartialTraceTest, PreservesTraceOfRandomHermitianMatrices) {
  Rng rng(21);
  const std::vector<Dims> shapes{{2, 2}, {2, 3, 2}, {4, 2, 4}, {2, 2, 2, 2, 2}};
  for (const auto& dims : shapes) {
    const ComplexMatrix m = testing::random_hermitian(product(dims), rng);
    for (std::size_t k = 0; k < dims.size(); ++k)
      EXPECT_NEAR(std::abs(partial_trace(m, dims, {k}).trace() - m.trace()), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(partial_trace(m, dims, {0, dims.size() - 1}).trace() - m.trace()), 0.0, 1e-12);
  }
}

TEST(SubsystemPermutationTest, SwapsFactorsOfAProductVector) {
  Rng rng(4);
  Ket a(2), b(3);
  for (auto& z : a) z = rng.complex_normal();
  for (auto& z : b) z = rng.complex_normal();
  const ComplexMatrix p = subsystem_permutation({2, 3}, {1, 0});
  const Ket swapped = p * kron(a, b);
  const Ket expected = kron(b, a);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(std::abs(swapped[i] - expected[i]), 0.0, 1e-15);
}

TEST(HermEigTest, PauliZ) {
  const auto e = herm_eig(pauli::z());
  ASSERT_EQ(e.eigenvalues.size(), 2u);
  EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-12);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-12);
}

TEST(HermEigTest, BarBasisOfXPlusZ) {
  const auto e = herm_eig((pauli::x() + pauli::z()) * kHalfSqrt2);
  EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-12);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-12);
  const double c = std::cos(std::numbers::pi / 8), s = std::sin(std::numbers::pi / 8);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 1) - c), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 1) - s), 0.0, 1e-12);
}

TEST(HermEigTest, ReferenceBellOperatorTopsOutAtTwo) {
  const ComplexMatrix b = build_bell_operator(BellExpression::all_zero(2), reference_observables(2));
  EXPECT_NEAR(herm_eig(b).eigenvalues.back(), 2.0, 1e-12);
}

TEST(HermEigTest, RejectsNonHermitianInput) {
  EXPECT_THROW(herm_eig(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), PreconditionError);
}

TEST(HermEigTest, RandomMatricesSatisfyTheInvariants) {
  Rng rng(8);
  for (std::size_t d : {1u, 2u, 5u, 12u, 24u}) {
    const ComplexMatrix h = testing::random_hermitian(d, rng);
    const auto e = herm_eig(h);
    const ComplexMatrix& v = e.eigenvectors;
    expect_matrix_near(v.adjoint() * v, ComplexMatrix::identity(d), 1e-9);
    ComplexMatrix rebuilt(d, d);
    for (std::size_t k = 0; k < d; ++k) {
      if (k > 0) EXPECT_LE(e.eigenvalues[k - 1], e.eigenvalues[k]);
      Ket col(d);
      for (std::size_t r = 0; r < d; ++r) col[r] = v(r, k);
      const Ket hv = h * col;
      for (std::size_t r = 0; r < d; ++r) EXPECT_NEAR(std::abs(hv[r] - e.eigenvalues[k] * col[r]), 0.0, 1e-9);
      // Phase convention: first non-negligible component real positive.
      for (std::size_t r = 0; r < d; ++r)
        if (std::abs(col[r]) > 1e-10) {
          EXPECT_NEAR(col[r].imag(), 0.0, 1e-12);
          EXPECT_GT(col[r].real(), 0.0);
          break;
        }
      rebuilt += ComplexMatrix::projector(col) * e.eigenvalues[k];
    }
    expect_matrix_near(rebuilt, h, 1e-9);
  }
}

TEST(SignOperatorTest, Examples) {
  expect_matrix_near(sign_operator(pauli::z()), pauli::z(), 1e-12);
  const std::vector<double> d{3.0, -2.0}, s{1.0, -1.0};
  expect_matrix_near(sign_operator(ComplexMatrix::diagonal(std::span<const double>(d))),
                     ComplexMatrix::diagonal(std::span<const double>(s)), 1e-12);
  expect_matrix_near(sign_operator(pauli::x() * 2.0), pauli::x(), 1e-12);
}

TEST(SignOperatorTest, IsIdempotentOnDichotomicObservables) {
  Rng rng(12);
  for (std::size_t d : {2u, 3u, 6u}) {
    const ComplexMatrix o = random_dichotomic(d, rng);
    const ComplexMatrix s = sign_operator(o);
    expect_matrix_near(s, o, 1e-9);
    expect_matrix_near(s * s, ComplexMatrix::identity(d), 1e-9);
  }
}

TEST(SignOperatorTest, NearSingularInputNamesTheEigenvalue) {
  const std::vector<double> d{1.0, 1e-14};
  try {
    sign_operator(ComplexMatrix::diagonal(std::span<const double>(d)));
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("e-14"), std::string::npos) << e.what();
  }
}

TEST(OperatorBlockTest, ReferenceInteractionBlocks) {
  const ComplexMatrix u = reference_interaction(2);
  const Ket in = interaction_basis_ket({0, 0});
  const ComplexMatrix b1 = operator_block(u, ghz_like({0, 0}), in, {4, 1}, {4, 1});
  EXPECT_NEAR(std::abs(b1(0, 0) - 1.0), 0.0, 1e-12);
  const ComplexMatrix b2 = operator_block(u, basis_ket(4, 0), in, {4, 1}, {4, 1});
  EXPECT_NEAR(std::abs(b2(0, 0) - kHalfSqrt2), 0.0, 1e-12);
}

TEST(OperatorBlockTest, ExtractsScaledAuxUnitary) {
  const ComplexMatrix v0 = random_unitary(2, 99);
  const ComplexMatrix w = kron(reference_interaction(2), v0);
  const ComplexMatrix b = operator_block(w, basis_ket(4, 0), interaction_basis_ket({0, 0}), {4, 2}, {4, 2});
  expect_matrix_near(b, v0 * kHalfSqrt2, 1e-12);
  EXPECT_THROW(operator_block(w, basis_ket(4, 0), basis_ket(3, 0), {4, 2}, {3, 2}), DimensionError);
}

TEST(FactorizeTest, ExactProductWithIdentity) {
  const ComplexMatrix u = reference_interaction(2);
  const auto f = factorize_tensor_product(kron(u, ComplexMatrix::identity(2)), {4, 2, 4, 2});
  EXPECT_TRUE(f.is_product);
  EXPECT_LT(f.residual, 1e-10);
  EXPECT_LT(distance_up_to_phase(f.factor1, u), 1e-10);
}

TEST(FactorizeTest, CnotHasOperatorSchmidtRankTwo) {
  const auto f = factorize_tensor_product(testing::cnot(), {2, 2, 2, 2});
  EXPECT_FALSE(f.is_product);
  // Brute force: CNOT = |0><0| ⊗ I + |1><1| ⊗ X, two equal coefficients.
  ASSERT_GE(f.schmidt_coefficients.size(), 2u);
  EXPECT_NEAR(f.schmidt_coefficients[0], f.schmidt_coefficients[1], 1e-12);
  for (std::size_t k = 2; k < f.schmidt_coefficients.size(); ++k) EXPECT_LT(f.schmidt_coefficients[k], 1e-12);
}

TEST(FactorizeTest, RecoversRandomAuxUnitary) {
  const ComplexMatrix v0 = random_unitary(3, 1234);
  const auto f = factorize_tensor_product(kron(reference_interaction(2), v0), {4, 3, 4, 3});
  EXPECT_TRUE(f.is_product);
  EXPECT_LT(f.residual, 1e-9);
  EXPECT_LT(distance_up_to_phase(f.factor2 * (1.0 / std::abs(f.factor2(0, 0))),
                                 v0 * (1.0 / std::abs(v0(0, 0)))),
            1e-9);
}

TEST(FactorizeTest, RoundTripOfRandomUnitaryPairs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix a = random_unitary(3, seed * 2 + 1);
    const ComplexMatrix b = random_unitary(4, seed * 2 + 2);
    const auto f = factorize_tensor_product(kron(a, b), {3, 4, 3, 4});
    EXPECT_TRUE(f.is_product);
    EXPECT_LT(f.residual, 1e-9);
    // Unit largest singular value of a unitary factor means factor1 is a itself up to phase.
    EXPECT_LT(distance_up_to_phase(f.factor1, a), 1e-9);
    EXPECT_LT(distance_up_to_phase(f.factor2, b), 1e-9);
    EXPECT_GT(f.factor1(0, 0).real(), 0.0);
    EXPECT_NEAR(f.factor1(0, 0).imag(), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace qicert
