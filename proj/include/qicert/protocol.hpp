#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qicert/bell.hpp"
#include "qicert/quantum.hpp"
#include "qicert/reference.hpp"

namespace qicert {

/// Source state, per-party observables at both times and the interaction.
/// Dimension chain: source.dims == interaction.dims_in == t1 observable
/// dims; interaction.dims_out == t2 observable dims.
struct Strategy {
  QuantumState source;
  ObservableSet observables_t1;
  ObservableSet observables_t2;
  Interaction interaction;

  std::size_t parties() const { return source.dims.size(); }
  const Dims& dims_t1() const { return source.dims; }
  const Dims& dims_t2() const { return interaction.dims_out; }

  /// Throws DimensionError / PreconditionError on a broken chain or a
  /// non-unitary interaction.
  void validate() const;
};

/// Honest reference: GHZ-like |phi_0..0>, reference observables at both
/// times and U_N.
Strategy reference_strategy(std::size_t parties);

/// Planted deviations from the reference interaction.
namespace deviation {
/// SWAP of the first two parties' qubits after U_N.
ComplexMatrix swapped_interaction(std::size_t parties);
/// U_N · D with D = diag(1, .., 1, e^{i phase}) in the input basis of U_N.
/// Every Bell branch still ends in a maximally violating state.
ComplexMatrix diag_phase_interaction(std::size_t parties, double phase);
}  // namespace deviation

Strategy with_interaction(Strategy s, ComplexMatrix v);
/// Source mixed with white noise at the given visibility.
Strategy with_visibility(Strategy s, double visibility);

/// A first-round event (settings x1, outcomes a1).
struct EventKey {
  std::uint64_t settings = 0;
  std::uint64_t outcomes = 0;
  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

struct ConditionalTable {
  double probability = 0.0;  // p1 of the conditioning event
  /// p2[x2][a2], both indexed by bits_of(..., N).
  std::vector<std::vector<double>> p2;
};

struct ConditionalBellValue {
  Bits outcomes;                 // a1 of the branch, also the Bell expression index
  std::optional<double> value;   // empty when the branch has zero probability
};

/// Exact statistics of the two-time scenario.
struct CorrelationRecord {
  std::size_t parties = 0;
  /// p1[x1][a1].
  std::vector<std::vector<double>> p1;
  /// Second-round tables for every t1 event with p1 > 1e-12.
  std::map<EventKey, ConditionalTable> p2;
  double bell_value_t1 = 0.0;  // B_{0..0} on the source
  std::vector<ConditionalBellValue> conditional_bell_values;  // indexed by a1
  std::optional<ExtraStatisticsResult> extra_stats;  // empty if the event is impossible
};

/// Post-measurement state of one first-round event, evolved by V.
QuantumState conditional_state(const Strategy& s, const Bits& settings, const Bits& outcomes);

/// Exact Born-rule propagation through both rounds. Throws
/// PreconditionError if a first-round observable is not projective.
CorrelationRecord run_scenario(const Strategy& s);
/// Single-threaded reference for run_scenario; identical output.
CorrelationRecord run_scenario_serial(const Strategy& s);

/// sum over outcomes of (-1)^{sum_{n in parties} a_n} p(a | x) for one table row.
double correlator(const std::vector<double>& row, std::size_t parties,
                  const std::vector<std::size_t>& subset);

/// Bell value recomputed from a probability table p[x][a] by correlators.
double bell_value_from_table(const std::vector<std::vector<double>>& table,
                             const BellExpression& expr);

/// Replaces the post-measurement state before a lab-local re-measurement.
enum class SpotcheckDevice { honest, maximally_mixed };

struct SpotcheckResult {
  bool consistent = true;
  std::size_t mismatches = 0;
  std::size_t rounds = 0;
};

/// Samples rounds (settings uniform, outcomes by Born rule), re-measures
/// every party's post-measurement state with the same setting and counts
/// reproductions that differ from the first outcome.
SpotcheckResult repeatability_spotcheck(const Strategy& s, std::size_t rounds, std::uint64_t seed,
                                        SpotcheckDevice device = SpotcheckDevice::honest);

struct ScrambleOptions {
  /// Zero one eigenvalue of the planted xi (needs total aux dimension >= 2).
  bool rank_deficient_xi = false;
};

/// The planted objects behind a scrambled strategy, for round-trip checks.
struct ScrambleWitness {
  std::vector<std::size_t> aux_dims;
  std::vector<ComplexMatrix> local_t1;  // W_n: qubit ⊗ aux_n -> physical, t1
  std::vector<ComplexMatrix> local_t2;
  ComplexMatrix xi;                     // on aux_1 ⊗ ... ⊗ aux_N
  ComplexMatrix v0;                     // aux -> aux
};

struct ScrambledStrategy {
  Strategy strategy;
  ScrambleWitness witness;
};

/// Embeds `reference` (qubit parties) into qubit ⊗ aux_n spaces:
///   rho = W (rho_ref ⊗ xi) W^dagger, A = W_n (A_ref ⊗ I) W_n^dagger,
///   V = W_t2 (V_ref ⊗ V0) W_t1^dagger
/// with random local unitaries, random full-rank xi and random V0.
ScrambledStrategy scramble_strategy(const Strategy& reference, const std::vector<std::size_t>& aux_dims,
                                    std::uint64_t seed, const ScrambleOptions& options = {});

/// Permutation taking the party-ordered space (q_1 aux_1 q_2 aux_2 ...) to
/// the canonical order (q_1 .. q_N aux_1 .. aux_N).
ComplexMatrix canonical_order(const std::vector<std::size_t>& qubit_dims,
                              const std::vector<std::size_t>& aux_dims);

}  // namespace qicert
