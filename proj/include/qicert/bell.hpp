#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qicert/quantum.hpp"
#include "qicert/reference.hpp"

namespace qicert {

/// The functional
///   B_a = (-1)^{a_1} < (N-1) Atilde_{1,1} ⊗ A_{2,1} ⊗ ... ⊗ A_{N,1}
///                     + sum_{n>=2} (-1)^{a_n} Atilde_{1,0} ⊗ A_{n,0} >
/// with Atilde_{1,0} = (A_{1,0} - A_{1,1}) / sqrt2 and
/// Atilde_{1,1} = (A_{1,0} + A_{1,1}) / sqrt2.
class BellExpression {
 public:
  explicit BellExpression(Bits target_outcomes);
  static BellExpression all_zero(std::size_t parties) { return BellExpression(Bits(parties, 0)); }

  std::size_t parties() const { return outcomes_.size(); }
  const Bits& target_outcomes() const { return outcomes_; }
  /// sqrt2 (N - 1)
  double classical_bound() const { return classical_bound_; }
  /// 2 (N - 1)
  double quantum_bound() const { return quantum_bound_; }

  /// One product term coefficient * ⊗_n F_n, where factors[n] is the
  /// setting of party n or -1 for the identity.
  struct Term {
    double coefficient = 0.0;
    std::vector<int> factors;
  };
  /// Expansion into products of the raw observables A_{n,x}.
  std::vector<Term> terms() const;

  /// Value for deterministic +-1 assignments, values[n][x] = A_{n,x}.
  double evaluate_deterministic(const std::vector<std::array<int, 2>>& values) const;

  std::string name() const { return "B_" + to_string(outcomes_); }

 private:
  Bits outcomes_;
  double classical_bound_;
  double quantum_bound_;
};

/// ((A0 - A1)/sqrt2, (A0 + A1)/sqrt2).
std::pair<ComplexMatrix, ComplexMatrix> tilde_observables(const ComplexMatrix& a0,
                                                          const ComplexMatrix& a1);

ComplexMatrix build_bell_operator(const BellExpression& expr, const ObservableSet& obs);

/// Maximum over all deterministic +-1 assignments (2^{2N} of them).
/// Throws PreconditionError for N > 10.
double classical_bound(const BellExpression& expr);
double classical_bound_serial(const BellExpression& expr);

inline constexpr std::size_t kMaxEnumerationParties = 10;

double quantum_value(const QuantumState& state, const ObservableSet& obs,
                     const BellExpression& expr);

/// P and Q_n of the sum-of-squares decomposition, padded with identities.
struct SosTerms {
  ComplexMatrix p;
  std::vector<ComplexMatrix> q;  // q[k] is Q for party n = k + 2
};
SosTerms sos_terms(const BellExpression& expr, const ObservableSet& obs);

struct SosResidual {
  double residual_matrix_norm = 0.0;
  bool is_exact_identity = false;
};

/// Max-norm of 2(beta_Q I - B) - [(N-1) P^2 + sum_n Q_n^2].
SosResidual sos_residual(const ObservableSet& obs, const BellExpression& expr);

struct SosRelationViolations {
  double p_violation = 0.0;
  std::vector<double> q_violations;
  double max() const;
};

/// Tr(P^2 rho) and Tr(Q_n^2 rho); all vanish at maximal violation.
SosRelationViolations check_sos_relations(const QuantumState& state, const ObservableSet& obs,
                                          const BellExpression& expr);

struct ExtraStatistic {
  std::string label;
  double value = 0.0;
  double target = 0.0;
};

struct ExtraStatisticsResult {
  bool passes = false;
  std::vector<ExtraStatistic> values;
};

/// For n = 2..N the pair <Atilde_{1,0} ⊗ I> = -1 and <I ⊗ A_{n,1}> = 1.
ExtraStatisticsResult extra_statistics_check(const QuantumState& state, const ObservableSet& obs,
                                             std::size_t parties,
                                             double tolerance = tol::kIdentity);

/// Checks that every party's pair is square with a common dimension
/// matching `dims`; throws DimensionError otherwise.
void check_observable_dims(const ObservableSet& obs, const Dims& dims);

}  // namespace qicert
