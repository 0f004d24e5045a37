#include <algorithm>

#include "qicert/seesaw.hpp"
#include "test_support.hpp"

namespace qicert {
namespace {

using testing::expect_matrix_near;

TEST(ObservableUpdateTest, Examples) {
  expect_matrix_near(optimal_observable_update(pauli::z()).matrix, pauli::z(), 1e-14);
  expect_matrix_near(optimal_observable_update(pauli::x() * 0.3).matrix, pauli::x(), 1e-14);
  // Zero eigenvalues go to +1.
  expect_matrix_near(optimal_observable_update(ComplexMatrix(2, 2)).matrix, ComplexMatrix::identity(2), 1e-14);
}

TEST(ObservableUpdateTest, MaximizesTheLinearFunctional) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = testing::random_hermitian(3, rng);
    const ComplexMatrix best = optimal_observable_update(h).matrix;
    expect_matrix_near(best * best, ComplexMatrix::identity(3), 1e-10);
    // Tr(sign(H) H) = sum |lambda|.
    double abs_sum = 0.0;
    for (double l : herm_eig(h).eigenvalues) abs_sum += std::abs(l);
    EXPECT_NEAR(trace_of_product(best, h).real(), abs_sum, 1e-10);
    for (int k = 0; k < 5; ++k)
      EXPECT_LE(trace_of_product(random_dichotomic(3, rng), h).real(), abs_sum + 1e-10);
  }
}

TEST(StateUpdateTest, Examples) {
  const ComplexMatrix b = kron(pauli::x(), pauli::x()) + kron(pauli::z(), pauli::z());
  const auto s = optimal_state_update(b, {2, 2});
  expect_matrix_near(s.density, ComplexMatrix::projector(testing::phi_plus()), 1e-12);
  const auto top = optimal_state_update(pauli::z() * -1.0, {2});
  expect_matrix_near(top.density, ComplexMatrix::projector(basis_ket(2, 1)), 1e-12);
}

TEST(EffectiveOperatorTest, ValueIsAffineInTheChosenObservable) {
  Rng rng(8);
  const auto expr = BellExpression::all_zero(3);
  ObservableSet obs(3);
  for (auto& pair : obs)
    for (auto& o : pair) o = random_dichotomic(2, rng);
  const QuantumState s{random_density(8, rng), {2, 2, 2}};
  for (std::size_t party = 0; party < 3; ++party)
    for (int x : {0, 1}) {
      const ComplexMatrix h = effective_operator(expr, obs, s, party, x);
      ObservableSet other = obs;
      other[party][x] = random_dichotomic(2, rng);
      const double delta = quantum_value(s, other, expr) - quantum_value(s, obs, expr);
      EXPECT_NEAR(delta, trace_of_product(other[party][x] - obs[party][x], h).real(), 1e-12);
    }
}

TEST(SeesawRunTest, HistoryIsMonotone) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto run = seesaw_run(BellExpression::all_zero(3), {2, 2, 2}, 300, 1e-12, seed);
    for (std::size_t k = 1; k < run.history.size(); ++k) EXPECT_GE(run.history[k], run.history[k - 1] - 1e-12);
    EXPECT_EQ(run.value, run.history.back());
  }
}

TEST(SeesawRunTest, SameSeedSameRun) {
  const auto a = seesaw_run(BellExpression::all_zero(2), {2, 2}, 50, 1e-12, 99);
  const auto b = seesaw_run(BellExpression::all_zero(2), {2, 2}, 50, 1e-12, 99);
  EXPECT_EQ(a.history, b.history);
}

TEST(SeesawMaximizeTest, ReachesTheQuantumBound) {
  for (std::size_t n : {2u, 3u}) {
    const auto expr = BellExpression::all_zero(n);
    const auto result = seesaw_maximize(expr, {.local_dims = Dims(n, 2), .restarts = 20});
    EXPECT_NEAR(result.best_value, expr.quantum_bound(), 1e-6);
    const auto hits = std::count_if(result.restart_values.begin(), result.restart_values.end(),
                                    [&](double v) { return std::abs(v - expr.quantum_bound()) < 1e-4; });
    EXPECT_GE(hits, 18);
  }
}

TEST(SeesawMaximizeTest, LargerLocalDimensionsStayBelowTheBound) {
  const auto expr = BellExpression::all_zero(2);
  const auto result = seesaw_maximize(expr, {.local_dims = {3, 3}, .restarts = 20});
  EXPECT_LE(result.best_value, expr.quantum_bound() + 1e-9);
  for (double v : result.restart_values) EXPECT_LE(v, expr.quantum_bound() + 1e-9);
}

TEST(SeesawMaximizeTest, SerialAndParallelAgree) {
  const auto expr = BellExpression::all_zero(2);
  const SeesawConfig config{.local_dims = {2, 2}, .max_iters = 100, .seed = 5, .restarts = 6};
  const auto a = seesaw_maximize(expr, config), b = seesaw_maximize_serial(expr, config);
  EXPECT_EQ(a.restart_values, b.restart_values);
  EXPECT_EQ(a.best.seed, b.best.seed);
}

TEST(SeesawMaximizeTest, FoundStrategyReproducesTheBestValue) {
  const auto result = seesaw_maximize(BellExpression::all_zero(2), {.local_dims = {2, 2}, .restarts = 4});
  const Strategy s = result.strategy_found();
  EXPECT_NO_THROW(s.validate());
  EXPECT_NEAR(quantum_value(s.source, s.observables_t1, BellExpression::all_zero(2)), result.best_value, 1e-12);
}

TEST(SeesawConfigTest, RejectsNonsense) {
  EXPECT_THROW((SeesawConfig{.local_dims = {2, 1}}.validate()), PreconditionError);
  EXPECT_THROW((SeesawConfig{.local_dims = {2, 2}, .max_iters = 0}.validate()), PreconditionError);
  EXPECT_THROW((SeesawConfig{.local_dims = {2, 2}, .convergence_tol = 0.0}.validate()), PreconditionError);
  EXPECT_THROW((SeesawConfig{.local_dims = {2, 2}, .restarts = 0}.validate()), PreconditionError);
  EXPECT_NO_THROW((SeesawConfig{.local_dims = {2, 2}}.validate()));
}

}  // namespace
}  // namespace qicert
