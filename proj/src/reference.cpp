#include "qicert/reference.hpp"

#include <cmath>
#include <numbers>

#include "qicert/linalg.hpp"

namespace qicert {

Bits bits_of(std::uint64_t index, std::size_t parties) {
  Bits b(parties);
  for (std::size_t k = parties; k-- > 0;) {
    b[k] = static_cast<int>(index & 1u);
    index >>= 1;
  }
  return b;
}

std::uint64_t index_of(const Bits& bits) {
  std::uint64_t idx = 0;
  for (int b : bits) idx = (idx << 1) | static_cast<std::uint64_t>(b & 1);
  return idx;
}

std::string to_string(const Bits& bits) {
  std::string s;
  for (int b : bits) s.push_back(b ? '1' : '0');
  return s;
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

Ket bar_ket(int i) {
  const double c = std::cos(std::numbers::pi / 8.0);
  const double s = std::sin(std::numbers::pi / 8.0);
  return i == 0 ? Ket{c, s} : Ket{-s, c};
}

Ket x_ket(int i) {
  const double h = std::numbers::sqrt2 / 2.0;
  return i == 0 ? Ket{h, h} : Ket{h, -h};
}

Ket ghz_like(const Bits& l) {
  const std::size_t n = l.size();
  Bits perp(n);
  for (std::size_t k = 0; k < n; ++k) perp[k] = 1 - l[k];
  Ket psi(std::size_t{1} << n);
  const double h = std::numbers::sqrt2 / 2.0;
  psi[index_of(l)] += h;
  psi[index_of(perp)] += (l[0] == 0 ? 1.0 : -1.0) * h;
  return psi;
}

ObservableSet reference_observables(std::size_t parties) {
  const double h = std::numbers::sqrt2 / 2.0;
  ObservableSet obs;
  obs.push_back({(pauli::x() + pauli::z()) * h, (pauli::x() - pauli::z()) * h});
  for (std::size_t n = 1; n < parties; ++n) obs.push_back({pauli::z(), pauli::x()});
  return obs;
}

Ket interaction_basis_ket(const Bits& l) {
  Ket v = bar_ket(l[0]);
  if (l.size() > 1) v = kron(v, basis_ket(2, static_cast<std::size_t>(l[1])));
  for (std::size_t k = 2; k < l.size(); ++k) v = kron(v, x_ket(l[k]));
  return v;
}

ComplexMatrix reference_interaction(std::size_t parties) {
  const std::size_t dim = std::size_t{1} << parties;
  ComplexMatrix u(dim, dim);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    const Bits l = bits_of(idx, parties);
    u += ComplexMatrix::outer(ghz_like(l), interaction_basis_ket(l));
  }
  return u;
}

Bits bell_branch_settings(std::size_t parties) {
  Bits x(parties, 1);
  x[0] = 0;
  if (parties > 1) x[1] = 0;
  return x;
}

Bits extra_statistics_settings(std::size_t parties) {
  Bits x(parties, 0);
  x[0] = 1;
  if (parties > 1) x[1] = 1;
  return x;
}

}  // namespace qicert
