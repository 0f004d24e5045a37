#include "qicert/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qicert {

QuantumState QuantumState::from_ket(const Ket& psi, Dims dims) {
  if (product(dims) != psi.size())
    throw DimensionError("ket length does not match subsystem dimensions");
  return QuantumState{ComplexMatrix::projector(normalized(psi)), std::move(dims)};
}

void QuantumState::validate() const {
  if (!density.is_square() || product(dims) != density.rows())
    throw DimensionError("state " + shape_string(density) + " does not match its dims");
  if (!is_hermitian(density, tol::kIdentity)) throw PreconditionError("state is not Hermitian");
  const double tr = density.trace().real();
  if (std::abs(tr - 1.0) > tol::kIdentity) {
    std::ostringstream os;
    os << "state trace " << tr << " differs from 1";
    throw PreconditionError(os.str());
  }
  const auto eig = herm_eig(density);
  if (!eig.eigenvalues.empty() && eig.eigenvalues.front() < -tol::kIdentity) {
    std::ostringstream os;
    os << "state has negative eigenvalue " << eig.eigenvalues.front();
    throw PreconditionError(os.str());
  }
}

ComplexMatrix effect_of(const ComplexMatrix& o, int outcome) {
  ComplexMatrix e = ComplexMatrix::identity(o.rows());
  if (outcome == 0) e += o;
  else e -= o;
  e *= 0.5;
  return e;
}

ComplexMatrix DichotomicObservable::effect(int outcome) const { return effect_of(matrix, outcome); }

bool DichotomicObservable::is_projective(double tolerance) const {
  return is_hermitian(matrix, tolerance) &&
         max_abs_diff(matrix * matrix, ComplexMatrix::identity(matrix.rows())) <= tolerance;
}

void Interaction::validate() const {
  if (matrix.rows() != product(dims_out) || matrix.cols() != product(dims_in))
    throw DimensionError("interaction " + shape_string(matrix) + " does not match its dims");
  if (!is_unitary(matrix, tol::kIdentity)) throw PreconditionError("interaction is not unitary");
}

namespace {

void check_local_operators(const QuantumState& state, const std::vector<ComplexMatrix>& ops) {
  if (ops.size() != state.dims.size()) {
    throw DimensionError("expected " + std::to_string(state.dims.size()) +
                         " local operators, got " + std::to_string(ops.size()));
  }
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (ops[k].rows() != state.dims[k] || ops[k].cols() != state.dims[k]) {
      throw DimensionError("operator for party " + std::to_string(k) + " is " +
                           shape_string(ops[k]) + ", local dimension is " +
                           std::to_string(state.dims[k]));
    }
  }
}

}  // namespace

double born_probability(const QuantumState& state, const std::vector<ComplexMatrix>& effects) {
  check_local_operators(state, effects);
  double p = trace_of_product(kron_all(effects), state.density).real();
  if (p < 0.0 && p > -tol::kSingular) p = 0.0;
  if (p > 1.0 && p < 1.0 + tol::kSingular) p = 1.0;
  return p;
}

double expectation(const QuantumState& state, const std::vector<ComplexMatrix>& observables) {
  check_local_operators(state, observables);
  return trace_of_product(kron_all(observables), state.density).real();
}

QuantumState post_measurement_state(const QuantumState& state,
                                    const std::vector<ComplexMatrix>& projectors) {
  check_local_operators(state, projectors);
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const auto& p = projectors[k];
    if (!is_hermitian(p, tol::kIdentity) || max_abs_diff(p * p, p) > tol::kIdentity)
      throw PreconditionError("measurement element of party " + std::to_string(k) +
                              " is not a projector");
  }
  const ComplexMatrix proj = kron_all(projectors);
  ComplexMatrix out = proj * state.density * proj;
  const double prob = out.trace().real();
  if (prob <= tol::kSingular) {
    std::ostringstream os;
    os << "outcome has probability " << prob << " (impossible outcome, floor 1e-12)";
    throw PreconditionError(os.str());
  }
  out *= 1.0 / prob;
  return QuantumState{std::move(out), state.dims};
}

QuantumState evolve(const QuantumState& state, const Interaction& v) {
  v.validate();
  if (v.dims_in != state.dims) throw DimensionError("interaction input dims differ from state dims");
  return QuantumState{v.matrix * state.density * v.matrix.adjoint(), v.dims_out};
}

QuantumState white_noise_mix(const QuantumState& state, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    std::ostringstream os;
    os << "visibility " << visibility << " outside [0, 1]";
    throw PreconditionError(os.str());
  }
  const std::size_t d = state.dimension();
  ComplexMatrix mixed = state.density * visibility;
  mixed += ComplexMatrix::identity(d) * ((1.0 - visibility) / static_cast<double>(d));
  return QuantumState{std::move(mixed), state.dims};
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  if (dim == 0) throw DimensionError("random_unitary: dimension must be at least 1");
  std::vector<Ket> cols(dim, Ket(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) cols[c][r] = rng.complex_normal();
  // Modified Gram-Schmidt, twice for orthogonality at machine precision.
  for (std::size_t c = 0; c < dim; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < c; ++k) {
        const Complex proj = inner(cols[k], cols[c]);
        for (std::size_t i = 0; i < dim; ++i) cols[c][i] -= proj * cols[k][i];
      }
    cols[c] = normalized(cols[c]);
  }
  ComplexMatrix u(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) u(r, c) = cols[c][r];
  return u;
}

ComplexMatrix random_density(std::size_t dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (auto& e : g.entries()) e = rng.complex_normal();
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

ComplexMatrix random_dichotomic(std::size_t dim, Rng& rng) {
  std::vector<double> signs(dim, -1.0);
  for (std::size_t i = 0; i < (dim + 1) / 2; ++i) signs[i] = 1.0;
  const ComplexMatrix u = random_unitary(dim, rng);
  ComplexMatrix o = u * ComplexMatrix::diagonal(std::span<const double>(signs)) * u.adjoint();
  // Exact hermiticity.
  return (o + o.adjoint()) * 0.5;
}

}  // namespace qicert
