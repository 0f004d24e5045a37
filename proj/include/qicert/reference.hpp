#pragma once

// Reference objects of the two-time scenario: qubit observables, the
// GHZ-like target states and the entangling interaction U_N.

#include <array>
#include <cstdint>
#include <vector>

#include "qicert/matrix.hpp"

namespace qicert {

/// Outcome or setting vector, one bit per party (party 1 first).
using Bits = std::vector<int>;

Bits bits_of(std::uint64_t index, std::size_t parties);
std::uint64_t index_of(const Bits& bits);
std::string to_string(const Bits& bits);

/// Observables of one party indexed by setting (0, 1).
using PartyObservables = std::array<ComplexMatrix, 2>;
/// Observables of every party, party 1 first.
using ObservableSet = std::vector<PartyObservables>;

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// Eigenvectors of (X+Z)/sqrt2: |0bar> = cos(pi/8)|0> + sin(pi/8)|1>,
/// |1bar> = -sin(pi/8)|0> + cos(pi/8)|1>.
Ket bar_ket(int i);
/// |0^x> = |+>, |1^x> = |->.
Ket x_ket(int i);

/// (|l_1..l_N> + (-1)^{l_1} |l_1^perp..l_N^perp>) / sqrt2.
Ket ghz_like(const Bits& l);

/// Party 1: ((X+Z)/sqrt2, (X-Z)/sqrt2); parties n >= 2: (Z, X).
ObservableSet reference_observables(std::size_t parties);

/// Input basis vector of U_N: |lbar_1> ⊗ |l_2> ⊗ |l_3^x> ⊗ ... ⊗ |l_N^x>.
Ket interaction_basis_ket(const Bits& l);

/// U_N = sum_l |phi_l><lbar_1 l_2 l_3^x ... l_N^x|.
ComplexMatrix reference_interaction(std::size_t parties);

/// First-round settings whose outcomes feed the second-round Bell tests:
/// (0, 0, 1, ..., 1).
Bits bell_branch_settings(std::size_t parties);
/// First-round settings of the extra-statistics event: (1, 1, 0, ..., 0).
Bits extra_statistics_settings(std::size_t parties);

}  // namespace qicert
