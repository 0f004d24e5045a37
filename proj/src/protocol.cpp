#include "qicert/protocol.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace qicert {

namespace {

constexpr double kEventFloor = 1e-12;

// effects[n][x][a]
using EffectTable = std::vector<std::array<std::array<ComplexMatrix, 2>, 2>>;

EffectTable effect_table(const ObservableSet& obs) {
  EffectTable t(obs.size());
  for (std::size_t n = 0; n < obs.size(); ++n)
    for (int x : {0, 1})
      for (int a : {0, 1}) t[n][x][a] = effect_of(obs[n][x], a);
  return t;
}

std::vector<ComplexMatrix> pick(const EffectTable& t, const Bits& settings, const Bits& outcomes) {
  std::vector<ComplexMatrix> out;
  out.reserve(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) out.push_back(t[n][settings[n]][outcomes[n]]);
  return out;
}

std::vector<std::vector<double>> probability_table(const QuantumState& state,
                                                   const EffectTable& effects) {
  const std::size_t n = effects.size();
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::vector<double>> table(count, std::vector<double>(count, 0.0));
  for (std::size_t x = 0; x < count; ++x) {
    const Bits settings = bits_of(x, n);
    for (std::size_t a = 0; a < count; ++a)
      table[x][a] = born_probability(state, pick(effects, settings, bits_of(a, n)));
  }
  return table;
}

void check_first_round_projective(const Strategy& s) {
  for (std::size_t n = 0; n < s.parties(); ++n)
    for (int x : {0, 1}) {
      const DichotomicObservable o{s.observables_t1[n][x], {n, x, TimeSlice::t1}};
      if (!o.is_projective()) {
        std::ostringstream os;
        os << "observable A_{" << n + 1 << "," << x
           << "} at t1 is not projective (A^2 != I), so the post-measurement state is undefined";
        throw PreconditionError(os.str());
      }
    }
}

CorrelationRecord run_scenario_impl(const Strategy& s, bool parallel) {
  s.validate();
  check_first_round_projective(s);
  const std::size_t n = s.parties();
  const std::size_t count = std::size_t{1} << n;
  const EffectTable e1 = effect_table(s.observables_t1);
  const EffectTable e2 = effect_table(s.observables_t2);

  CorrelationRecord rec;
  rec.parties = n;
  rec.p1 = probability_table(s.source, e1);
  rec.bell_value_t1 = quantum_value(s.source, s.observables_t1, BellExpression::all_zero(n));

  std::vector<EventKey> events;
  for (std::uint64_t x = 0; x < count; ++x)
    for (std::uint64_t a = 0; a < count; ++a)
      if (rec.p1[x][a] > kEventFloor) events.push_back({x, a});

  std::vector<ConditionalTable> tables(events.size());
  std::vector<QuantumState> states(events.size());
  std::exception_ptr failure;
  const auto total = static_cast<std::int64_t>(events.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      const EventKey& ev = events[static_cast<std::size_t>(i)];
      const Bits settings = bits_of(ev.settings, n);
      QuantumState post = post_measurement_state(s.source, pick(e1, settings, bits_of(ev.outcomes, n)));
      QuantumState sigma = evolve(post, s.interaction);
      tables[static_cast<std::size_t>(i)] = {rec.p1[ev.settings][ev.outcomes],
                                             probability_table(sigma, e2)};
      states[static_cast<std::size_t>(i)] = std::move(sigma);
    } catch (...) {
#pragma omp critical(qicert_scenario_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const std::uint64_t bell_settings = index_of(bell_branch_settings(n));
  const std::uint64_t extra_settings = index_of(extra_statistics_settings(n));
  rec.conditional_bell_values.resize(count);
  for (std::uint64_t a = 0; a < count; ++a) rec.conditional_bell_values[a].outcomes = bits_of(a, n);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventKey& ev = events[i];
    if (ev.settings == bell_settings) {
      const BellExpression expr(bits_of(ev.outcomes, n));
      rec.conditional_bell_values[ev.outcomes].value =
          quantum_value(states[i], s.observables_t2, expr);
    }
    if (ev.settings == extra_settings && ev.outcomes == 0)
      rec.extra_stats = extra_statistics_check(states[i], s.observables_t2, n);
    rec.p2.emplace(ev, std::move(tables[i]));
  }
  return rec;
}

}  // namespace

void Strategy::validate() const {
  const std::size_t n = parties();
  if (n < 2) throw PreconditionError("a strategy needs at least two parties");
  source.validate();
  interaction.validate();
  if (interaction.dims_in != source.dims)
    throw DimensionError("interaction input dims do not match the source state dims");
  if (observables_t1.size() != n || observables_t2.size() != n)
    throw DimensionError("observables must be given for every party at both times");
  check_observable_dims(observables_t1, source.dims);
  check_observable_dims(observables_t2, interaction.dims_out);
  for (const auto* set : {&observables_t1, &observables_t2})
    for (std::size_t k = 0; k < n; ++k)
      for (int x : {0, 1})
        if (!is_hermitian((*set)[k][x], tol::kIdentity))
          throw PreconditionError("observable of party " + std::to_string(k + 1) +
                                  ", setting " + std::to_string(x) + " is not Hermitian");
}

Strategy reference_strategy(std::size_t parties) {
  if (parties < 2) throw PreconditionError("reference strategy needs at least two parties");
  const Dims dims(parties, 2);
  Strategy s;
  s.source = QuantumState::from_ket(ghz_like(Bits(parties, 0)), dims);
  s.observables_t1 = reference_observables(parties);
  s.observables_t2 = s.observables_t1;
  s.interaction = Interaction{reference_interaction(parties), dims, dims};
  return s;
}

namespace deviation {

ComplexMatrix swapped_interaction(std::size_t parties) {
  const Dims dims(parties, 2);
  std::vector<std::size_t> perm(parties);
  for (std::size_t k = 0; k < parties; ++k) perm[k] = k;
  std::swap(perm[0], perm[1]);
  return subsystem_permutation(dims, perm) * reference_interaction(parties);
}

ComplexMatrix diag_phase_interaction(std::size_t parties, double phase) {
  const std::size_t dim = std::size_t{1} << parties;
  ComplexMatrix d = ComplexMatrix::identity(dim);
  const Ket last = interaction_basis_ket(bits_of(dim - 1, parties));
  d += ComplexMatrix::projector(last) * (std::polar(1.0, phase) - 1.0);
  return reference_interaction(parties) * d;
}

}  // namespace deviation

Strategy with_interaction(Strategy s, ComplexMatrix v) {
  s.interaction.matrix = std::move(v);
  return s;
}

Strategy with_visibility(Strategy s, double visibility) {
  s.source = white_noise_mix(s.source, visibility);
  return s;
}

QuantumState conditional_state(const Strategy& s, const Bits& settings, const Bits& outcomes) {
  std::vector<ComplexMatrix> projectors;
  for (std::size_t k = 0; k < s.parties(); ++k)
    projectors.push_back(effect_of(s.observables_t1[k][settings[k]], outcomes[k]));
  return evolve(post_measurement_state(s.source, projectors), s.interaction);
}

CorrelationRecord run_scenario(const Strategy& s) { return run_scenario_impl(s, true); }
CorrelationRecord run_scenario_serial(const Strategy& s) { return run_scenario_impl(s, false); }

double correlator(const std::vector<double>& row, std::size_t parties,
                  const std::vector<std::size_t>& subset) {
  double sum = 0.0;
  for (std::uint64_t a = 0; a < row.size(); ++a) {
    const Bits bits = bits_of(a, parties);
    int parity = 0;
    for (std::size_t k : subset) parity ^= bits[k];
    sum += parity ? -row[a] : row[a];
  }
  return sum;
}

double bell_value_from_table(const std::vector<std::vector<double>>& table,
                             const BellExpression& expr) {
  const std::size_t n = expr.parties();
  double value = 0.0;
  for (const auto& term : expr.terms()) {
    Bits settings(n, 0);
    std::vector<std::size_t> subset;
    for (std::size_t k = 0; k < n; ++k) {
      if (term.factors[k] < 0) continue;
      settings[k] = term.factors[k];
      subset.push_back(k);
    }
    value += term.coefficient * correlator(table[index_of(settings)], n, subset);
  }
  return value;
}

SpotcheckResult repeatability_spotcheck(const Strategy& s, std::size_t rounds, std::uint64_t seed,
                                        SpotcheckDevice device) {
  check_first_round_projective(s);
  const std::size_t n = s.parties();
  const std::size_t count = std::size_t{1} << n;
  const EffectTable e1 = effect_table(s.observables_t1);
  Rng rng(seed);
  SpotcheckResult result;
  result.rounds = rounds;

  for (std::size_t round = 0; round < rounds; ++round) {
    Bits settings(n);
    for (auto& x : settings) x = static_cast<int>(rng.next() & 1u);
    // Joint outcome by the Born rule.
    const double u = rng.uniform();
    double acc = 0.0;
    Bits outcomes = bits_of(count - 1, n);
    for (std::uint64_t a = 0; a < count; ++a) {
      acc += born_probability(s.source, pick(e1, settings, bits_of(a, n)));
      if (u < acc) {
        outcomes = bits_of(a, n);
        break;
      }
    }
    QuantumState state = device == SpotcheckDevice::honest
                             ? post_measurement_state(s.source, pick(e1, settings, outcomes))
                             : QuantumState{ComplexMatrix::identity(s.source.dimension()) *
                                                (1.0 / static_cast<double>(s.source.dimension())),
                                            s.source.dims};
    // Each lab re-measures its own system with the same setting.
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<ComplexMatrix> local;
      for (std::size_t m = 0; m < n; ++m)
        local.push_back(m == k ? e1[k][settings[k]][outcomes[k]]
                               : ComplexMatrix::identity(s.source.dims[m]));
      const double p_same = born_probability(state, local);
      const bool same = rng.uniform() < p_same;
      if (!same) ++result.mismatches;
      const int seen = same ? outcomes[k] : 1 - outcomes[k];
      local[k] = e1[k][settings[k]][seen];
      state = post_measurement_state(state, local);
    }
  }
  result.consistent = result.mismatches == 0;
  return result;
}

ComplexMatrix canonical_order(const std::vector<std::size_t>& qubit_dims,
                              const std::vector<std::size_t>& aux_dims) {
  if (qubit_dims.size() != aux_dims.size())
    throw DimensionError("canonical_order: qubit and aux dimension lists differ in length");
  const std::size_t n = qubit_dims.size();
  Dims interleaved;
  for (std::size_t k = 0; k < n; ++k) {
    interleaved.push_back(qubit_dims[k]);
    interleaved.push_back(aux_dims[k]);
  }
  std::vector<std::size_t> perm(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    perm[k] = 2 * k;
    perm[n + k] = 2 * k + 1;
  }
  return subsystem_permutation(interleaved, perm);
}

ScrambledStrategy scramble_strategy(const Strategy& reference, const std::vector<std::size_t>& aux_dims,
                                    std::uint64_t seed, const ScrambleOptions& options) {
  reference.validate();
  const std::size_t n = reference.parties();
  if (aux_dims.size() != n)
    throw DimensionError("scramble_strategy: " + std::to_string(aux_dims.size()) +
                         " aux dimensions for " + std::to_string(n) + " parties");
  for (std::size_t d : aux_dims)
    if (d < 1) throw PreconditionError("scramble_strategy: aux dimensions must be at least 1");
  const std::size_t aux_total = product(aux_dims);
  if (options.rank_deficient_xi && aux_total < 2)
    throw PreconditionError("a rank-deficient xi needs total aux dimension >= 2");

  Rng rng(seed);
  const Dims& q1 = reference.dims_t1();
  const Dims& q2 = reference.dims_t2();
  ScrambledStrategy out;
  ScrambleWitness& w = out.witness;
  w.aux_dims = aux_dims;
  Dims phys1, phys2;
  for (std::size_t k = 0; k < n; ++k) {
    phys1.push_back(q1[k] * aux_dims[k]);
    phys2.push_back(q2[k] * aux_dims[k]);
    w.local_t1.push_back(random_unitary(phys1.back(), rng));
    w.local_t2.push_back(random_unitary(phys2.back(), rng));
  }
  w.xi = random_density(aux_total, rng);
  if (options.rank_deficient_xi) {
    const auto eig = herm_eig(w.xi);
    ComplexMatrix xi(aux_total, aux_total);
    for (std::size_t j = 1; j < aux_total; ++j) {
      Ket v(aux_total);
      for (std::size_t r = 0; r < aux_total; ++r) v[r] = eig.eigenvectors(r, j);
      xi += ComplexMatrix::projector(v) * eig.eigenvalues[j];
    }
    xi *= 1.0 / xi.trace().real();
    w.xi = (xi + xi.adjoint()) * 0.5;
  }
  w.v0 = random_unitary(aux_total, rng);

  const ComplexMatrix p1 = canonical_order(q1, aux_dims);
  const ComplexMatrix p2 = canonical_order(q2, aux_dims);
  const ComplexMatrix w1 = kron_all(w.local_t1) * p1.adjoint();
  const ComplexMatrix w2 = kron_all(w.local_t2) * p2.adjoint();

  Strategy& s = out.strategy;
  ComplexMatrix rho = w1 * kron(reference.source.density, w.xi) * w1.adjoint();
  s.source = QuantumState{(rho + rho.adjoint()) * 0.5, phys1};
  auto lift = [&](const ObservableSet& obs, const std::vector<ComplexMatrix>& local) {
    ObservableSet lifted(n);
    for (std::size_t k = 0; k < n; ++k)
      for (int x : {0, 1}) {
        const ComplexMatrix a =
            local[k] * kron(obs[k][x], ComplexMatrix::identity(aux_dims[k])) * local[k].adjoint();
        lifted[k][x] = (a + a.adjoint()) * 0.5;
      }
    return lifted;
  };
  s.observables_t1 = lift(reference.observables_t1, w.local_t1);
  s.observables_t2 = lift(reference.observables_t2, w.local_t2);
  s.interaction = Interaction{w2 * kron(reference.interaction.matrix, w.v0) * w1.adjoint(), phys1, phys2};
  return out;
}

}  // namespace qicert
