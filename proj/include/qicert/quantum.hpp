#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qicert/linalg.hpp"
#include "qicert/matrix.hpp"

namespace qicert {

/// Density operator on a composite space. Pure states are stored as
/// projectors too; nothing in the certification path assumes purity.
struct QuantumState {
  ComplexMatrix density;
  Dims dims;

  static QuantumState from_ket(const Ket& psi, Dims dims);
  std::size_t dimension() const { return density.rows(); }
  std::size_t parties() const { return dims.size(); }

  /// Throws PreconditionError unless Hermitian, unit trace and PSD within 1e-9.
  void validate() const;
};

enum class TimeSlice { t1 = 1, t2 = 2 };

struct ObservableLabel {
  std::size_t party = 0;
  int setting = 0;
  TimeSlice slice = TimeSlice::t1;
};

/// Two-outcome observable O = M_0 - M_1; outcome a has effect (I + (-1)^a O) / 2.
struct DichotomicObservable {
  ComplexMatrix matrix;
  ObservableLabel label;

  ComplexMatrix effect(int outcome) const;
  /// O^2 = I within tol.
  bool is_projective(double tolerance = tol::kIdentity) const;
};

/// Measurement element of outcome a for observable o.
ComplexMatrix effect_of(const ComplexMatrix& o, int outcome);

struct Interaction {
  ComplexMatrix matrix;
  Dims dims_in;
  Dims dims_out;

  /// Throws unless the matrix is unitary and matches the dimension lists.
  void validate() const;
};

double born_probability(const QuantumState& state, const std::vector<ComplexMatrix>& effects);

/// Tr((⊗ observables) rho); pass identity matrices for parties not measured.
double expectation(const QuantumState& state, const std::vector<ComplexMatrix>& observables);

/// (⊗Π) rho (⊗Π) / p. Throws PreconditionError if p <= 1e-12 or a
/// projector is not idempotent and Hermitian.
QuantumState post_measurement_state(const QuantumState& state,
                                    const std::vector<ComplexMatrix>& projectors);

/// V rho V^dagger.
QuantumState evolve(const QuantumState& state, const Interaction& v);

/// v rho + (1 - v) I / d.
QuantumState white_noise_mix(const QuantumState& state, double visibility);

/// 64-bit Mersenne Twister with a portable uniform/normal layer, so seeded
/// scrambles reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  Complex complex_normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed unitary from Gram-Schmidt on a complex Gaussian matrix.
ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed);
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);

/// Full-rank random density matrix G G^dagger / Tr with Gaussian G.
ComplexMatrix random_density(std::size_t dim, Rng& rng);

/// U diag(+1.., -1..) U^dagger with ceil(dim/2) positive signs.
ComplexMatrix random_dichotomic(std::size_t dim, Rng& rng);

}  // namespace qicert
