#include "qicert/seesaw.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace qicert {

void SeesawConfig::validate() const {
  if (max_iters < 1) throw PreconditionError("seesaw: max_iters must be at least 1");
  if (!(convergence_tol > 0.0)) throw PreconditionError("seesaw: convergence_tol must be positive");
  if (restarts < 1) throw PreconditionError("seesaw: at least one restart is required");
  if (local_dims.size() < 2) throw PreconditionError("seesaw: at least two parties are required");
  for (std::size_t d : local_dims)
    if (d < 2) throw PreconditionError("seesaw: local dimensions must be at least 2");
}

DichotomicObservable optimal_observable_update(const ComplexMatrix& effective) {
  const ComplexMatrix h = (effective + effective.adjoint()) * 0.5;
  const auto eig = herm_eig(h);
  const std::size_t d = h.rows();
  ComplexMatrix o(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double sign = eig.eigenvalues[k] + 1e-12 >= 0.0 ? 1.0 : -1.0;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        o(r, c) += sign * eig.eigenvectors(r, k) * std::conj(eig.eigenvectors(c, k));
  }
  return {(o + o.adjoint()) * 0.5, {}};
}

QuantumState optimal_state_update(const ComplexMatrix& bell_operator, const Dims& dims) {
  const auto eig = herm_eig((bell_operator + bell_operator.adjoint()) * 0.5);
  const std::size_t d = bell_operator.rows();
  Ket top(d);
  for (std::size_t r = 0; r < d; ++r) top[r] = eig.eigenvectors(r, d - 1);
  return QuantumState::from_ket(top, dims);
}

ComplexMatrix effective_operator(const BellExpression& expr, const ObservableSet& obs,
                                 const QuantumState& state, std::size_t party, int setting) {
  const std::size_t n = expr.parties();
  ComplexMatrix h(state.dims[party], state.dims[party]);
  for (const auto& term : expr.terms()) {
    if (term.factors[party] != setting) continue;
    std::vector<ComplexMatrix> factors;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == party || term.factors[m] < 0) factors.push_back(ComplexMatrix::identity(state.dims[m]));
      else factors.push_back(obs[m][term.factors[m]]);
    }
    h += partial_trace(kron_all(factors) * state.density, state.dims, {party}) * term.coefficient;
  }
  return (h + h.adjoint()) * 0.5;
}

SeesawRun seesaw_run(const BellExpression& expr, const Dims& local_dims, std::size_t max_iters,
                     double convergence_tol, std::uint64_t seed) {
  const std::size_t n = expr.parties();
  if (local_dims.size() != n) throw DimensionError("seesaw: one local dimension per party required");
  Rng rng(seed);
  SeesawRun run;
  run.seed = seed;
  run.observables.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    for (int x : {0, 1}) run.observables[k][x] = random_dichotomic(local_dims[k], rng);

  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    run.state = optimal_state_update(build_bell_operator(expr, run.observables), local_dims);
    run.history.push_back(quantum_value(run.state, run.observables, expr));
    for (std::size_t k = 0; k < n; ++k)
      for (int x : {0, 1})
        run.observables[k][x] =
            optimal_observable_update(effective_operator(expr, run.observables, run.state, k, x)).matrix;
    run.value = quantum_value(run.state, run.observables, expr);
    run.history.push_back(run.value);
    run.iterations = it + 1;
    if (std::abs(run.value - previous) < convergence_tol) break;
    previous = run.value;
  }
  return run;
}

namespace {

SeesawResult maximize(const BellExpression& expr, const SeesawConfig& config, bool parallel) {
  config.validate();
  if (config.local_dims.size() != expr.parties())
    throw DimensionError("seesaw: one local dimension per party required");
  std::vector<SeesawRun> runs(config.restarts);
  std::exception_ptr failure;
  const auto total = static_cast<std::int64_t>(config.restarts);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t r = 0; r < total; ++r) {
    try {
      runs[static_cast<std::size_t>(r)] =
          seesaw_run(expr, config.local_dims, config.max_iters, config.convergence_tol,
                     config.seed + static_cast<std::uint64_t>(r));
    } catch (...) {
#pragma omp critical(qicert_seesaw_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  SeesawResult result;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    result.restart_values.push_back(runs[r].value);
    if (runs[r].value > runs[best].value) best = r;
  }
  result.best_value = runs[best].value;
  result.best = std::move(runs[best]);
  return result;
}

}  // namespace

SeesawResult seesaw_maximize(const BellExpression& expr, const SeesawConfig& config) {
  return maximize(expr, config, true);
}

SeesawResult seesaw_maximize_serial(const BellExpression& expr, const SeesawConfig& config) {
  return maximize(expr, config, false);
}

Strategy SeesawResult::strategy_found() const {
  Strategy s;
  s.source = best.state;
  s.observables_t1 = best.observables;
  s.observables_t2 = best.observables;
  s.interaction = Interaction{ComplexMatrix::identity(best.state.dimension()), best.state.dims,
                              best.state.dims};
  return s;
}

}  // namespace qicert
