#pragma once

#include <cstdint>
#include <vector>

#include "qicert/bell.hpp"
#include "qicert/protocol.hpp"

namespace qicert {

struct SeesawConfig {
  Dims local_dims;
  std::size_t max_iters = 300;
  double convergence_tol = 1e-12;
  std::uint64_t seed = 1;
  std::size_t restarts = 20;

  /// Throws PreconditionError on max_iters == 0, convergence_tol <= 0,
  /// restarts == 0 or a local dimension below 2.
  void validate() const;
};

/// Maximizer of Tr(O H) over dichotomic O: the sign of H, with H shifted
/// by 1e-12 so zero eigenvalues map to +1.
DichotomicObservable optimal_observable_update(const ComplexMatrix& effective);

/// Pure state on the top eigenvector of the operator.
QuantumState optimal_state_update(const ComplexMatrix& bell_operator, const Dims& dims);

/// H with value = Tr(A_{party,setting} H) + terms independent of that observable.
ComplexMatrix effective_operator(const BellExpression& expr, const ObservableSet& obs,
                                 const QuantumState& state, std::size_t party, int setting);

struct SeesawRun {
  std::uint64_t seed = 0;
  double value = 0.0;
  std::vector<double> history;  // value after every half step
  std::size_t iterations = 0;
  QuantumState state;
  ObservableSet observables;
};

struct SeesawResult {
  double best_value = 0.0;
  SeesawRun best;
  std::vector<double> restart_values;

  /// Best state with its observables at both times and an identity interaction.
  Strategy strategy_found() const;
};

/// One seeded run from random dichotomic observables.
SeesawRun seesaw_run(const BellExpression& expr, const Dims& local_dims, std::size_t max_iters,
                     double convergence_tol, std::uint64_t seed);

/// Restarts with seeds seed, seed + 1, ...; run in parallel, each one
/// single-threaded and deterministic.
SeesawResult seesaw_maximize(const BellExpression& expr, const SeesawConfig& config);
SeesawResult seesaw_maximize_serial(const BellExpression& expr, const SeesawConfig& config);

}  // namespace qicert
