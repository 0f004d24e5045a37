#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qicert/protocol.hpp"

namespace qicert {

/// Isometry from one party's local support onto qubit ⊗ aux.
struct LocalFrame {
  std::size_t party = 0;
  TimeSlice slice = TimeSlice::t1;
  ComplexMatrix unitary;  // (2 aux_dim) x physical dimension
  std::size_t aux_dim = 0;
  /// max_j ||U Abar_j U^dagger - target_j ⊗ I||_max
  double postcondition_residual = 0.0;
};

/// Orthonormal support bases (columns) per party and time slice.
struct LocalSupports {
  std::vector<ComplexMatrix> t1;
  std::vector<ComplexMatrix> t2;
};

/// t1: support of each reduced source state. t2: joint support of the
/// reduced post-interaction states over all Bell branches.
LocalSupports compute_supports(const Strategy& s, double threshold = 1e-10);

/// S^dagger A S.
ComplexMatrix restrict_to_support(const ComplexMatrix& a, const ComplexMatrix& support);

struct ObservableDefect {
  std::size_t party = 0;
  TimeSlice slice = TimeSlice::t1;
  int setting = 0;
  double defect = 0.0;  // ||Abar^2 - I_support||_max
};

std::vector<ObservableDefect> check_projectivity(const Strategy& s, const LocalSupports& supports);

/// ||{Abar_0, Abar_1}||_max for observables already restricted to a support.
double check_anticommutation(const ComplexMatrix& a0_bar, const ComplexMatrix& a1_bar);

/// Frame U (2k x 2k) with U Abar_j U^dagger = target_j ⊗ I_k. Throws
/// PreconditionError naming the violated premise (odd support, unequal
/// eigenspaces, anticommutation or projectivity failure).
LocalFrame extract_local_frame(const ComplexMatrix& a0_bar, const ComplexMatrix& a1_bar,
                               const PartyObservables& targets);

struct SourceCertificate {
  double residual = 0.0;  // ||rho' - |phi'><phi'| ⊗ xi||_max
  QuantumState xi;
  double xi_min_eigenvalue = 0.0;
};

/// `frames` are full isometries (support frame composed with the support basis).
SourceCertificate certify_source_state(const QuantumState& rho, const std::vector<LocalFrame>& frames);

struct InteractionCertificate {
  bool consistent = false;        // every block relation held
  std::string failure;            // first violated relation, empty when consistent
  double proportionality_residual = 0.0;
  double cross_block_residual = 0.0;
  double v0_unitarity_defect = 0.0;
  bool is_product = false;
  ComplexMatrix recovered_v0;
  double residual = 0.0;          // ||W' - U_ref ⊗ V0||_max
  std::vector<double> schmidt_coefficients;
};

inline constexpr double kProportionalityTolerance = 1e-7;

/// Block analysis of W' = (⊗U_t2) V (⊗U_t1)^dagger in canonical order.
InteractionCertificate certify_interaction(const Interaction& v, const std::vector<LocalFrame>& frames_t1,
                                           const std::vector<LocalFrame>& frames_t2);

enum class Verdict { certified, refuted, inconclusive };
std::string to_string(Verdict v);
/// 0 certified, 1 refuted, 3 inconclusive.
int exit_code_for(Verdict v);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AnticommutatorNorm {
  std::size_t party = 0;
  TimeSlice slice = TimeSlice::t1;
  double norm = 0.0;
};

struct CertificationReport {
  std::size_t parties = 0;
  std::vector<CheckResult> bell_checks;
  std::vector<CheckResult> extra_statistics;
  std::vector<ObservableDefect> projectivity_defects;
  std::vector<AnticommutatorNorm> anticommutator_norms;
  std::vector<LocalFrame> frames;
  std::optional<double> state_residual;
  std::optional<QuantumState> xi;
  std::optional<double> xi_min_eigenvalue;
  std::optional<InteractionCertificate> interaction;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;  // first failed premise, or "all checks passed"
};

/// Runs the whole chain: scenario, Bell checks, extra statistics,
/// projectivity, anticommutation, frames, source state, interaction.
/// `bell_tolerance` decides "maximal" for Bell values and extra statistics.
CertificationReport run_full_certification(const Strategy& s, double bell_tolerance = tol::kIdentity);

}  // namespace qicert
