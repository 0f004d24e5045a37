#include <numbers>

#include "qicert/protocol.hpp"
#include "test_support.hpp"

namespace qicert {
namespace {

using testing::expect_matrix_near;

void expect_records_near(const CorrelationRecord& a, const CorrelationRecord& b, double tol) {
  ASSERT_EQ(a.parties, b.parties);
  for (std::size_t x = 0; x < a.p1.size(); ++x)
    for (std::size_t o = 0; o < a.p1[x].size(); ++o) EXPECT_NEAR(a.p1[x][o], b.p1[x][o], tol);
  ASSERT_EQ(a.p2.size(), b.p2.size());
  for (const auto& [key, table] : a.p2) {
    const auto it = b.p2.find(key);
    ASSERT_NE(it, b.p2.end());
    for (std::size_t x = 0; x < table.p2.size(); ++x)
      for (std::size_t o = 0; o < table.p2[x].size(); ++o) EXPECT_NEAR(table.p2[x][o], it->second.p2[x][o], tol);
  }
  EXPECT_NEAR(a.bell_value_t1, b.bell_value_t1, tol);
}

TEST(ReferenceStrategyTest, Validates) {
  for (std::size_t n : {2u, 3u, 4u}) EXPECT_NO_THROW(reference_strategy(n).validate());
  EXPECT_THROW(reference_strategy(1), PreconditionError);
}

TEST(StrategyTest, BrokenDimensionChainIsRejected) {
  Strategy s = reference_strategy(2);
  s.observables_t2[1][0] = ComplexMatrix::identity(3);
  EXPECT_THROW(s.validate(), DimensionError);
  EXPECT_THROW(with_interaction(reference_strategy(2), ComplexMatrix::identity(4) * 2.0).validate(),
               PreconditionError);
}

TEST(RunScenarioTest, ReferenceValuesReachTheQuantumBound) {
  for (std::size_t n : {2u, 3u}) {
    const auto rec = run_scenario(reference_strategy(n));
    const double target = 2.0 * static_cast<double>(n - 1);
    EXPECT_NEAR(rec.bell_value_t1, target, 1e-10);
    ASSERT_EQ(rec.conditional_bell_values.size(), std::size_t{1} << n);
    for (const auto& c : rec.conditional_bell_values) {
      ASSERT_TRUE(c.value.has_value());
      EXPECT_NEAR(*c.value, target, 1e-10);
    }
    ASSERT_TRUE(rec.extra_stats.has_value());
    EXPECT_TRUE(rec.extra_stats->passes);
  }
}

TEST(RunScenarioTest, BellBranchProbabilitiesAreUniform) {
  const auto rec = run_scenario(reference_strategy(2));
  // Settings (0, 0) on phi+: A0 ⊗ Z gives p(a) = (1 ± (-1)^{a1+a2}/sqrt2) / 4.
  const std::uint64_t x = index_of(bell_branch_settings(2));
  const double plus = (1.0 + std::numbers::sqrt2 / 2.0) / 4.0, minus = (1.0 - std::numbers::sqrt2 / 2.0) / 4.0;
  EXPECT_NEAR(rec.p1[x][0], plus, 1e-12);
  EXPECT_NEAR(rec.p1[x][1], minus, 1e-12);
  EXPECT_NEAR(rec.p1[x][2], minus, 1e-12);
  EXPECT_NEAR(rec.p1[x][3], plus, 1e-12);
}

TEST(RunScenarioTest, IdentityInteractionLosesMaximalViolation) {
  const Strategy s = with_interaction(reference_strategy(2), ComplexMatrix::identity(4));
  const auto rec = run_scenario(s);
  for (const auto& c : rec.conditional_bell_values) {
    ASSERT_TRUE(c.value.has_value());
    EXPECT_LE(*c.value, std::numbers::sqrt2 + 1e-12);
  }
}

TEST(RunScenarioTest, TablesAreNormalizedAndNoSignaling) {
  ScrambledStrategy scr = scramble_strategy(reference_strategy(2), {2, 3}, 3);
  const Strategy noisy = with_visibility(scr.strategy, 0.7);
  const auto rec = run_scenario(noisy);
  auto check_table = [](const std::vector<std::vector<double>>& t) {
    for (const auto& row : t) {
      double sum = 0.0;
      for (double p : row) {
        EXPECT_GE(p, -1e-12);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-10);
    }
    // Party 1's marginal is independent of party 2's setting.
    for (int x1 : {0, 1})
      for (int a1 : {0, 1}) {
        auto marginal = [&](int x2) {
          return t[index_of({x1, x2})][index_of({a1, 0})] + t[index_of({x1, x2})][index_of({a1, 1})];
        };
        EXPECT_NEAR(marginal(0), marginal(1), 1e-10);
      }
  };
  check_table(rec.p1);
  for (const auto& [key, table] : rec.p2) check_table(table.p2);
}

TEST(RunScenarioTest, SecondRoundTablesOnlyForPossibleEvents) {
  const auto rec = run_scenario(reference_strategy(2));
  for (std::uint64_t x = 0; x < 4; ++x)
    for (std::uint64_t a = 0; a < 4; ++a) EXPECT_EQ(rec.p2.count({x, a}) == 1, rec.p1[x][a] > 1e-12);
  EXPECT_EQ(rec.p2.size(), 16u);
  const Strategy prod{QuantumState::from_ket(basis_ket(4, 0), {2, 2}), reference_observables(2),
                      reference_observables(2), {reference_interaction(2), {2, 2}, {2, 2}}};
  const auto rec2 = run_scenario(prod);
  // Party 2 measures Z on |0> at setting 0: outcome 1 never occurs.
  EXPECT_EQ(rec2.p2.count({index_of({0, 0}), index_of({0, 1})}), 0u);
}

TEST(RunScenarioTest, SerialAndParallelAgreeExactly) {
  const auto s = scramble_strategy(reference_strategy(2), {2, 2}, 8).strategy;
  const auto a = run_scenario(s), b = run_scenario_serial(s);
  expect_records_near(a, b, 0.0);
}

TEST(RunScenarioTest, NonProjectiveFirstRoundObservableIsRejected) {
  Strategy s = reference_strategy(2);
  s.observables_t1[0][0] = s.observables_t1[0][0] * 0.9;
  try {
    run_scenario(s);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("projective"), std::string::npos);
  }
}

TEST(RunScenarioTest, ScramblingLeavesStatisticsInvariant) {
  for (std::size_t n : {2u, 3u}) {
    const auto ref = run_scenario(reference_strategy(n));
    for (std::uint64_t seed : {1u, 2u}) {
      const auto scr = scramble_strategy(reference_strategy(n), std::vector<std::size_t>(n, 2), seed);
      expect_records_near(run_scenario(scr.strategy), ref, 1e-9);
    }
  }
}

TEST(ConditionalStateTest, MatchesManualPipeline) {
  const Strategy s = reference_strategy(2);
  const Bits x{0, 1}, a{1, 0};
  const auto post = post_measurement_state(s.source, {effect_of(s.observables_t1[0][0], 1),
                                                       effect_of(s.observables_t1[1][1], 0)});
  expect_matrix_near(conditional_state(s, x, a).density, evolve(post, s.interaction).density, 1e-14);
}

TEST(CorrelatorTest, Examples) {
  const std::vector<double> row{0.5, 0.0, 0.0, 0.5};
  EXPECT_NEAR(correlator(row, 2, {0, 1}), 1.0, 1e-15);
  EXPECT_NEAR(correlator(row, 2, {0}), 0.0, 1e-15);
  EXPECT_NEAR(correlator(row, 2, {}), 1.0, 1e-15);
}

TEST(BellFromTableTest, EqualsQuantumValue) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    Strategy s = reference_strategy(3);
    for (auto& pair : s.observables_t1)
      for (auto& o : pair) o = random_dichotomic(2, rng);
    s.source = QuantumState{random_density(8, rng), {2, 2, 2}};
    const auto rec = run_scenario(s);
    const auto expr = BellExpression::all_zero(3);
    EXPECT_NEAR(bell_value_from_table(rec.p1, expr), quantum_value(s.source, s.observables_t1, expr), 1e-12);
    EXPECT_NEAR(rec.bell_value_t1, quantum_value(s.source, s.observables_t1, expr), 1e-12);
  }
}

TEST(DeviationTest, InteractionsAreUnitary) {
  for (std::size_t n : {2u, 3u}) {
    for (const ComplexMatrix& v :
         {deviation::swapped_interaction(n), deviation::diag_phase_interaction(n, 0.4)}) {
      expect_matrix_near(v.adjoint() * v, ComplexMatrix::identity(std::size_t{1} << n), 1e-12);
    }
  }
  expect_matrix_near(deviation::diag_phase_interaction(2, 0.0), reference_interaction(2), 1e-15);
}

TEST(DeviationTest, SwapIsCaughtByExtraStatistics) {
  const auto rec = run_scenario(with_interaction(reference_strategy(2), deviation::swapped_interaction(2)));
  ASSERT_TRUE(rec.extra_stats.has_value());
  EXPECT_FALSE(rec.extra_stats->passes);
}

TEST(DeviationTest, DiagonalPhaseKeepsEveryBellBranchMaximal) {
  const auto rec = run_scenario(with_interaction(reference_strategy(2), deviation::diag_phase_interaction(2, 0.7)));
  for (const auto& c : rec.conditional_bell_values) EXPECT_NEAR(*c.value, 2.0, 1e-10);
}

TEST(ScrambleTest, WitnessReproducesTheStrategy) {
  const Strategy ref = reference_strategy(2);
  const auto scr = scramble_strategy(ref, {2, 3}, 21);
  const auto& w = scr.witness;
  ASSERT_EQ(w.local_t1.size(), 2u);
  for (std::size_t n = 0; n < 2; ++n) {
    expect_matrix_near(w.local_t1[n].adjoint() * w.local_t1[n], ComplexMatrix::identity(2 * w.aux_dims[n]), 1e-12);
    for (int x : {0, 1}) {
      const ComplexMatrix expected =
          w.local_t1[n] * kron(ref.observables_t1[n][x], ComplexMatrix::identity(w.aux_dims[n])) *
          w.local_t1[n].adjoint();
      expect_matrix_near(scr.strategy.observables_t1[n][x], expected, 1e-12);
    }
  }
  EXPECT_NEAR(w.xi.trace().real(), 1.0, 1e-12);
  EXPECT_GT(herm_eig(w.xi).eigenvalues.front(), 1e-6);
  expect_matrix_near(w.v0.adjoint() * w.v0, ComplexMatrix::identity(6), 1e-12);
  EXPECT_NO_THROW(scr.strategy.validate());
}

TEST(ScrambleTest, RankDeficientXiHasAZeroEigenvalue) {
  const auto scr = scramble_strategy(reference_strategy(2), {2, 2}, 5, {.rank_deficient_xi = true});
  EXPECT_NEAR(herm_eig(scr.witness.xi).eigenvalues.front(), 0.0, 1e-12);
  EXPECT_THROW(scramble_strategy(reference_strategy(2), {1, 1}, 5, {.rank_deficient_xi = true}),
               PreconditionError);
}

TEST(CanonicalOrderTest, MovesAuxiliariesBehindQubits) {
  const ComplexMatrix p = canonical_order({2, 2}, {3, 1});
  const Ket q1 = basis_ket(2, 1), a1 = basis_ket(3, 2), q2 = basis_ket(2, 0), a2 = basis_ket(1, 0);
  const Ket interleaved = kron(kron(q1, a1), kron(q2, a2));
  const Ket canonical = kron(kron(q1, q2), kron(a1, a2));
  const Ket mapped = p * interleaved;
  for (std::size_t k = 0; k < mapped.size(); ++k) EXPECT_EQ(mapped[k], canonical[k]);
}

TEST(SpotcheckTest, HonestDevicesRepeat) {
  const auto r = repeatability_spotcheck(scramble_strategy(reference_strategy(2), {2, 2}, 4).strategy, 200, 17);
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.mismatches, 0u);
  EXPECT_EQ(r.rounds, 200u);
}

TEST(SpotcheckTest, ResettingDeviceIsCaught) {
  const auto r = repeatability_spotcheck(reference_strategy(2), 200, 17, SpotcheckDevice::maximally_mixed);
  EXPECT_FALSE(r.consistent);
  EXPECT_GT(r.mismatches, 0u);
}

TEST(SpotcheckTest, ZeroRoundsIsVacuouslyConsistent) {
  const auto r = repeatability_spotcheck(reference_strategy(2), 0, 1);
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.rounds, 0u);
}

}  // namespace
}  // namespace qicert
