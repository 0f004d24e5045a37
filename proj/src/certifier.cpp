#include "qicert/certifier.hpp"

#include <cmath>
#include <sstream>

namespace qicert {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string slice_name(TimeSlice s) { return s == TimeSlice::t1 ? "t1" : "t2"; }

ComplexMatrix sum_of_reduced(const std::vector<QuantumState>& states, std::size_t party) {
  ComplexMatrix acc;
  for (const auto& st : states) {
    ComplexMatrix r = partial_trace(st.density, st.dims, {party});
    if (acc.size() == 0) acc = std::move(r);
    else acc += r;
  }
  return acc;
}

// W' = P_out (⊗U_out) M (⊗U_in)^dagger P_in^dagger
ComplexMatrix to_canonical(const ComplexMatrix& m, const std::vector<LocalFrame>& out,
                           const std::vector<LocalFrame>& in) {
  auto collect = [](const std::vector<LocalFrame>& frames, std::vector<ComplexMatrix>& us,
                    std::vector<std::size_t>& qubits, std::vector<std::size_t>& aux) {
    for (const auto& f : frames) {
      us.push_back(f.unitary);
      qubits.push_back(2);
      aux.push_back(f.aux_dim);
    }
  };
  std::vector<ComplexMatrix> u_out, u_in;
  std::vector<std::size_t> q_out, a_out, q_in, a_in;
  collect(out, u_out, q_out, a_out);
  collect(in, u_in, q_in, a_in);
  const ComplexMatrix left = canonical_order(q_out, a_out) * kron_all(u_out);
  const ComplexMatrix right = canonical_order(q_in, a_in) * kron_all(u_in);
  return left * m * right.adjoint();
}

std::size_t total_aux(const std::vector<LocalFrame>& frames) {
  std::size_t d = 1;
  for (const auto& f : frames) d *= f.aux_dim;
  return d;
}

}  // namespace

LocalSupports compute_supports(const Strategy& s, double threshold) {
  const std::size_t n = s.parties();
  LocalSupports out;
  for (std::size_t k = 0; k < n; ++k)
    out.t1.push_back(support_basis(partial_trace(s.source.density, s.source.dims, {k}), threshold));

  const Bits settings = bell_branch_settings(n);
  std::vector<ComplexMatrix> projectors(n);
  std::vector<QuantumState> branches;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    const Bits outcomes = bits_of(a, n);
    for (std::size_t k = 0; k < n; ++k)
      projectors[k] = effect_of(s.observables_t1[k][settings[k]], outcomes[k]);
    if (born_probability(s.source, projectors) <= tol::kSingular) continue;
    branches.push_back(conditional_state(s, settings, outcomes));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (branches.empty()) {
      out.t2.push_back(ComplexMatrix(s.dims_t2()[k], 0));
      continue;
    }
    out.t2.push_back(support_basis(sum_of_reduced(branches, k), threshold));
  }
  return out;
}

ComplexMatrix restrict_to_support(const ComplexMatrix& a, const ComplexMatrix& support) {
  return support.adjoint() * a * support;
}

std::vector<ObservableDefect> check_projectivity(const Strategy& s, const LocalSupports& supports) {
  std::vector<ObservableDefect> out;
  for (TimeSlice slice : {TimeSlice::t1, TimeSlice::t2}) {
    const auto& obs = slice == TimeSlice::t1 ? s.observables_t1 : s.observables_t2;
    const auto& sup = slice == TimeSlice::t1 ? supports.t1 : supports.t2;
    for (std::size_t k = 0; k < s.parties(); ++k)
      for (int x : {0, 1}) {
        const ComplexMatrix bar = restrict_to_support(obs[k][x], sup[k]);
        const double defect = max_abs_diff(bar * bar, ComplexMatrix::identity(bar.rows()));
        out.push_back({k, slice, x, defect});
      }
  }
  return out;
}

double check_anticommutation(const ComplexMatrix& a0_bar, const ComplexMatrix& a1_bar) {
  return max_abs(a0_bar * a1_bar + a1_bar * a0_bar);
}

namespace {

// T with T^dagger a0 T = Z ⊗ I_k and T^dagger a1 T = X ⊗ I_k.
ComplexMatrix pairing_basis(const ComplexMatrix& a0, const ComplexMatrix& a1) {
  const std::size_t m = a0.rows();
  if (!a0.is_square() || a0.rows() != a1.rows() || a1.cols() != m)
    throw DimensionError("frame extraction: observables " + shape_string(a0) + " and " +
                         shape_string(a1) + " do not share a support");
  if (m == 0 || m % 2 != 0)
    throw PreconditionError("frame extraction: support dimension " + std::to_string(m) +
                            " is not even, so it cannot be qubit ⊗ aux");
  const ComplexMatrix id = ComplexMatrix::identity(m);
  for (int j : {0, 1}) {
    const ComplexMatrix& a = j == 0 ? a0 : a1;
    const double defect = max_abs_diff(a * a, id);
    if (defect >= tol::kCertification)
      throw PreconditionError("frame extraction: Abar_" + std::to_string(j) +
                              " squares to identity only up to " + fmt(defect));
  }
  const double anti = check_anticommutation(a0, a1);
  if (anti >= tol::kCertification)
    throw PreconditionError("frame extraction: observables do not anticommute (norm " + fmt(anti) + ")");

  const auto eig = herm_eig(a0);
  std::size_t positive = 0;
  for (double l : eig.eigenvalues)
    if (l > 0.0) ++positive;
  const std::size_t k = m / 2;
  if (positive != k)
    throw PreconditionError("frame extraction: +1 eigenspace has dimension " +
                            std::to_string(positive) + ", -1 eigenspace " +
                            std::to_string(m - positive) + "; they must be equal");

  ComplexMatrix t(m, m);
  for (std::size_t j = 0; j < k; ++j) {
    // herm_eig is ascending, so the +1 eigenvectors are the last k columns.
    Ket v(m);
    for (std::size_t r = 0; r < m; ++r) v[r] = eig.eigenvectors(r, m - k + j);
    const Ket w = normalized(a1 * v);
    for (std::size_t r = 0; r < m; ++r) {
      t(r, j) = v[r];
      t(r, k + j) = w[r];
    }
  }
  return t;
}

}  // namespace

LocalFrame extract_local_frame(const ComplexMatrix& a0_bar, const ComplexMatrix& a1_bar,
                               const PartyObservables& targets) {
  const ComplexMatrix t = pairing_basis(a0_bar, a1_bar);
  const ComplexMatrix r = pairing_basis(targets[0], targets[1]);
  if (r.rows() != 2) throw DimensionError("frame targets must be qubit observables");
  const std::size_t k = a0_bar.rows() / 2;

  LocalFrame f;
  f.aux_dim = k;
  f.unitary = fix_phase(kron(r, ComplexMatrix::identity(k)) * t.adjoint());
  for (int j : {0, 1}) {
    const ComplexMatrix& a = j == 0 ? a0_bar : a1_bar;
    const double res = max_abs_diff(f.unitary * a * f.unitary.adjoint(),
                                    kron(targets[j], ComplexMatrix::identity(k)));
    f.postcondition_residual = std::max(f.postcondition_residual, res);
  }
  return f;
}

SourceCertificate certify_source_state(const QuantumState& rho, const std::vector<LocalFrame>& frames) {
  const std::size_t n = frames.size();
  if (n != rho.parties()) throw DimensionError("certify_source_state: one frame per party required");
  std::vector<ComplexMatrix> us;
  std::vector<std::size_t> qubits(n, 2), aux;
  for (const auto& f : frames) {
    us.push_back(f.unitary);
    aux.push_back(f.aux_dim);
  }
  const ComplexMatrix u = canonical_order(qubits, aux) * kron_all(us);
  const ComplexMatrix rho_p = u * rho.density * u.adjoint();

  const std::size_t q = std::size_t{1} << n;
  const std::size_t d_aux = product(aux);
  const Ket phi = ghz_like(Bits(n, 0));
  SourceCertificate out;
  ComplexMatrix xi = operator_block(rho_p, phi, phi, {q, d_aux}, {q, d_aux});
  xi = (xi + xi.adjoint()) * 0.5;
  out.residual = max_abs_diff(rho_p, kron(ComplexMatrix::projector(phi), xi));
  out.xi_min_eigenvalue = herm_eig(xi).eigenvalues.front();
  out.xi = QuantumState{std::move(xi), aux};
  return out;
}

InteractionCertificate certify_interaction(const Interaction& v, const std::vector<LocalFrame>& frames_t1,
                                           const std::vector<LocalFrame>& frames_t2) {
  const std::size_t n = frames_t1.size();
  if (frames_t2.size() != n || v.dims_in.size() != n)
    throw DimensionError("certify_interaction: one frame per party and time slice required");
  const ComplexMatrix w = to_canonical(v.matrix, frames_t2, frames_t1);
  const std::size_t q = std::size_t{1} << n;
  const Dims dims_out{q, total_aux(frames_t2)};
  const Dims dims_in{q, total_aux(frames_t1)};

  InteractionCertificate out;
  auto fail = [&out](std::string msg) {
    if (out.failure.empty()) out.failure = std::move(msg);
  };

  std::vector<Ket> basis;
  for (std::uint64_t l = 0; l < q; ++l) basis.push_back(interaction_basis_ket(bits_of(l, n)));

  std::vector<ComplexMatrix> v_in(q);
  for (std::uint64_t l = 0; l < q; ++l) {
    const Ket phi = ghz_like(bits_of(l, n));
    std::vector<Complex> coeff(q);
    std::vector<ComplexMatrix> blocks(q);
    ComplexMatrix estimate(dims_out[1], dims_in[1]);
    for (std::uint64_t m = 0; m < q; ++m) {
      coeff[m] = inner(basis[m], phi);
      blocks[m] = operator_block(w, basis[m], basis[l], dims_out, dims_in);
      estimate += blocks[m] * std::conj(coeff[m]);
    }
    double worst = 0.0;
    std::uint64_t worst_m = 0;
    for (std::uint64_t m = 0; m < q; ++m) {
      const double r = max_abs_diff(blocks[m], estimate * coeff[m]);
      if (r > worst) {
        worst = r;
        worst_m = m;
      }
    }
    out.proportionality_residual = std::max(out.proportionality_residual, worst);
    if (worst > kProportionalityTolerance)
      fail("block (out " + to_string(bits_of(worst_m, n)) + "; in " + to_string(bits_of(l, n)) +
           ") is not proportional to V_" + to_string(bits_of(l, n)) + " (residual " + fmt(worst) + ")");
    v_in[l] = std::move(estimate);
  }

  for (std::uint64_t l = 1; l < q; ++l) {
    const double r = max_abs_diff(v_in[l], v_in[0]);
    out.cross_block_residual = std::max(out.cross_block_residual, r);
    if (r > kProportionalityTolerance)
      fail("V_" + to_string(bits_of(l, n)) + " differs from V_" + to_string(bits_of(0, n)) +
           " (residual " + fmt(r) + ")");
  }

  out.recovered_v0 = v_in[0];
  if (!out.recovered_v0.is_square()) {
    out.v0_unitarity_defect = 1.0;
    fail("recovered V0 is " + shape_string(out.recovered_v0) + ", not square");
  } else {
    out.v0_unitarity_defect =
        max_abs_diff(out.recovered_v0.adjoint() * out.recovered_v0,
                     ComplexMatrix::identity(out.recovered_v0.cols()));
    if (out.v0_unitarity_defect >= tol::kCertification)
      fail("recovered V0 is not unitary (defect " + fmt(out.v0_unitarity_defect) + ")");
  }

  const auto fac = factorize_tensor_product(w, {q, dims_out[1], q, dims_in[1]});
  out.is_product = fac.is_product;
  out.schmidt_coefficients = fac.schmidt_coefficients;
  if (!out.is_product) fail("W' has operator-Schmidt rank above 1");

  out.residual = max_abs_diff(w, kron(reference_interaction(n), out.recovered_v0));
  if (out.residual >= tol::kCertification)
    fail("W' differs from U_ref ⊗ V0 by " + fmt(out.residual));
  out.consistent = out.failure.empty();
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::certified: return 0;
    case Verdict::refuted: return 1;
    case Verdict::inconclusive: return 3;
  }
  return 3;
}

CertificationReport run_full_certification(const Strategy& s, double bell_tolerance) {
  CertificationReport rep;
  rep.parties = s.parties();
  const std::size_t n = s.parties();
  auto stop = [&rep](Verdict v, std::string reason) {
    rep.verdict = v;
    rep.reason = std::move(reason);
    return rep;
  };

  CorrelationRecord rec;
  try {
    rec = run_scenario(s);
  } catch (const PreconditionError& e) {
    return stop(Verdict::inconclusive, std::string("scenario could not be run: ") + e.what());
  }

  const double beta_q = 2.0 * static_cast<double>(n - 1);
  rep.bell_checks.push_back({BellExpression::all_zero(n).name() + " at t1", rec.bell_value_t1, beta_q,
                             bell_tolerance, std::abs(rec.bell_value_t1 - beta_q) <= bell_tolerance});
  for (const auto& c : rec.conditional_bell_values) {
    const double value = c.value.value_or(0.0);
    rep.bell_checks.push_back({BellExpression(c.outcomes).name() + " at t2", value, beta_q, bell_tolerance,
                               c.value.has_value() && std::abs(value - beta_q) <= bell_tolerance});
  }
  for (const auto& b : rep.bell_checks)
    if (!b.pass) {
      return stop(Verdict::inconclusive,
                  b.name + " = " + std::to_string(b.value) + " is not maximal (beta_Q = " +
                      std::to_string(beta_q) + ")");
    }

  if (!rec.extra_stats)
    return stop(Verdict::refuted, "the extra-statistics event has zero probability");
  for (const auto& e : rec.extra_stats->values)
    rep.extra_statistics.push_back({e.label, e.value, e.target, bell_tolerance,
                                    std::abs(e.value - e.target) <= bell_tolerance});
  for (const auto& e : rep.extra_statistics)
    if (!e.pass)
      return stop(Verdict::refuted, "extra statistic " + e.name + " = " + std::to_string(e.value) +
                                        ", required " + std::to_string(e.target));

  const LocalSupports supports = compute_supports(s);
  rep.projectivity_defects = check_projectivity(s, supports);
  for (const auto& d : rep.projectivity_defects)
    if (d.defect >= tol::kCertification)
      return stop(Verdict::inconclusive, "observable of party " + std::to_string(d.party + 1) + " at " +
                                             slice_name(d.slice) + " is not projective on its support");

  const ObservableSet targets = reference_observables(n);
  std::vector<LocalFrame> frames_t1, frames_t2;
  for (TimeSlice slice : {TimeSlice::t1, TimeSlice::t2}) {
    const auto& obs = slice == TimeSlice::t1 ? s.observables_t1 : s.observables_t2;
    const auto& sup = slice == TimeSlice::t1 ? supports.t1 : supports.t2;
    for (std::size_t k = 0; k < n; ++k) {
      const ComplexMatrix a0 = restrict_to_support(obs[k][0], sup[k]);
      const ComplexMatrix a1 = restrict_to_support(obs[k][1], sup[k]);
      rep.anticommutator_norms.push_back({k, slice, check_anticommutation(a0, a1)});
      if (rep.anticommutator_norms.back().norm >= tol::kCertification)
        return stop(Verdict::inconclusive, "observables of party " + std::to_string(k + 1) + " at " +
                                               slice_name(slice) + " do not anticommute on the support");
      LocalFrame f;
      try {
        f = extract_local_frame(a0, a1, targets[k]);
      } catch (const Error& e) {
        return stop(Verdict::inconclusive, e.what());
      }
      f.party = k;
      f.slice = slice;
      f.unitary = f.unitary * sup[k].adjoint();
      if (f.postcondition_residual >= tol::kCertification)
        return stop(Verdict::inconclusive, "frame of party " + std::to_string(k + 1) + " at " +
                                               slice_name(slice) + " misses its targets by " +
                                               fmt(f.postcondition_residual));
      (slice == TimeSlice::t1 ? frames_t1 : frames_t2).push_back(f);
      rep.frames.push_back(std::move(f));
    }
  }

  const SourceCertificate src = certify_source_state(s.source, frames_t1);
  rep.state_residual = src.residual;
  rep.xi = src.xi;
  rep.xi_min_eigenvalue = src.xi_min_eigenvalue;
  if (src.residual >= tol::kCertification)
    return stop(Verdict::inconclusive, "source state differs from |phi> ⊗ xi by " + fmt(src.residual));

  rep.interaction = certify_interaction(s.interaction, frames_t1, frames_t2);
  if (!rep.interaction->consistent) return stop(Verdict::refuted, rep.interaction->failure);

  if (src.xi_min_eigenvalue <= 1e-10)
    return stop(Verdict::inconclusive, "recovered xi is not full rank (min eigenvalue " +
                                           fmt(src.xi_min_eigenvalue) + ")");
  return stop(Verdict::certified, "all checks passed");
}

}  // namespace qicert
