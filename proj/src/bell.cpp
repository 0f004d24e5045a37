#include "qicert/bell.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qicert/kernels.hpp"

namespace qicert {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

double sign_of_bit(int bit) { return bit ? -1.0 : 1.0; }

// Tensor product with `op` at position `party` and identities elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, std::size_t party, const Dims& dims) {
  std::vector<ComplexMatrix> factors;
  factors.reserve(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k)
    factors.push_back(k == party ? op : ComplexMatrix::identity(dims[k]));
  return kron_all(factors);
}

Dims local_dims(const ObservableSet& obs) {
  Dims d;
  for (const auto& pair : obs) d.push_back(pair[0].rows());
  return d;
}

}  // namespace

BellExpression::BellExpression(Bits target_outcomes) : outcomes_(std::move(target_outcomes)) {
  if (outcomes_.size() < 2) throw PreconditionError("Bell expression needs at least two parties");
  for (int b : outcomes_)
    if (b != 0 && b != 1) throw PreconditionError("outcome bits must be 0 or 1");
  const double n_minus_1 = static_cast<double>(outcomes_.size() - 1);
  classical_bound_ = std::numbers::sqrt2 * n_minus_1;
  quantum_bound_ = 2.0 * n_minus_1;
}

std::vector<BellExpression::Term> BellExpression::terms() const {
  const std::size_t n = parties();
  const double global = sign_of_bit(outcomes_[0]);
  const double weight = static_cast<double>(n - 1) * kInvSqrt2 * global;
  std::vector<Term> out;
  // (N-1) Atilde_{1,1} ⊗ A_{2,1} ... with Atilde_{1,1} = (A_{1,0} + A_{1,1}) / sqrt2.
  for (int x : {0, 1}) {
    Term t{weight, std::vector<int>(n, 1)};
    t.factors[0] = x;
    out.push_back(t);
  }
  // (-1)^{a_n} Atilde_{1,0} ⊗ A_{n,0} with Atilde_{1,0} = (A_{1,0} - A_{1,1}) / sqrt2.
  for (std::size_t party = 1; party < n; ++party) {
    const double c = global * sign_of_bit(outcomes_[party]) * kInvSqrt2;
    for (int x : {0, 1}) {
      Term t{x == 0 ? c : -c, std::vector<int>(n, -1)};
      t.factors[0] = x;
      t.factors[party] = 0;
      out.push_back(t);
    }
  }
  return out;
}

double BellExpression::evaluate_deterministic(const std::vector<std::array<int, 2>>& values) const {
  const std::size_t n = parties();
  const double tilde0 = (values[0][0] - values[0][1]) * kInvSqrt2;
  const double tilde1 = (values[0][0] + values[0][1]) * kInvSqrt2;
  double full = static_cast<double>(n - 1) * tilde1;
  for (std::size_t k = 1; k < n; ++k) full *= values[k][1];
  double pairs = 0.0;
  for (std::size_t k = 1; k < n; ++k) pairs += sign_of_bit(outcomes_[k]) * tilde0 * values[k][0];
  return sign_of_bit(outcomes_[0]) * (full + pairs);
}

std::pair<ComplexMatrix, ComplexMatrix> tilde_observables(const ComplexMatrix& a0,
                                                          const ComplexMatrix& a1) {
  if (a0.rows() != a1.rows() || a0.cols() != a1.cols())
    throw DimensionError("tilde_observables: " + shape_string(a0) + " vs " + shape_string(a1));
  return {(a0 - a1) * kInvSqrt2, (a0 + a1) * kInvSqrt2};
}

void check_observable_dims(const ObservableSet& obs, const Dims& dims) {
  if (obs.size() != dims.size()) {
    throw DimensionError("observables given for " + std::to_string(obs.size()) +
                         " parties, expected " + std::to_string(dims.size()));
  }
  for (std::size_t k = 0; k < obs.size(); ++k)
    for (int x : {0, 1})
      if (obs[k][x].rows() != dims[k] || obs[k][x].cols() != dims[k])
        throw DimensionError("observable (party " + std::to_string(k) + ", setting " +
                             std::to_string(x) + ") is " + shape_string(obs[k][x]) +
                             ", local dimension " + std::to_string(dims[k]));
}

ComplexMatrix build_bell_operator(const BellExpression& expr, const ObservableSet& obs) {
  const std::size_t n = expr.parties();
  if (obs.size() != n)
    throw DimensionError("Bell operator for " + std::to_string(n) + " parties given " +
                         std::to_string(obs.size()) + " observable pairs");
  const Dims dims = local_dims(obs);
  check_observable_dims(obs, dims);
  const auto [tilde0, tilde1] = tilde_observables(obs[0][0], obs[0][1]);
  const Bits& a = expr.target_outcomes();
  const double global = sign_of_bit(a[0]);

  std::vector<ComplexMatrix> full{tilde1};
  for (std::size_t k = 1; k < n; ++k) full.push_back(obs[k][1]);
  ComplexMatrix b = kron_all(full) * (global * static_cast<double>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<ComplexMatrix> factors;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == 0) factors.push_back(tilde0);
      else if (m == k) factors.push_back(obs[k][0]);
      else factors.push_back(ComplexMatrix::identity(dims[m]));
    }
    b += kron_all(factors) * (global * sign_of_bit(a[k]));
  }
  return b;
}

namespace {

void check_enumerable(const BellExpression& expr) {
  if (expr.parties() > kMaxEnumerationParties) {
    std::ostringstream os;
    os << "classical_bound: enumeration over 2^(2N) assignments is limited to N <= "
       << kMaxEnumerationParties << "; for N = " << expr.parties()
       << " use the closed form sqrt2 (N - 1) = " << expr.classical_bound();
    throw PreconditionError(os.str());
  }
}

std::function<double(std::uint64_t)> assignment_value(const BellExpression& expr) {
  const std::size_t n = expr.parties();
  return [&expr, n](std::uint64_t code) {
    std::vector<std::array<int, 2>> values(n);
    for (std::size_t k = 0; k < n; ++k)
      for (int x : {0, 1}) values[k][x] = ((code >> (2 * k + x)) & 1u) ? -1 : 1;
    return expr.evaluate_deterministic(values);
  };
}

}  // namespace

double classical_bound(const BellExpression& expr) {
  check_enumerable(expr);
  return kernels::omp::max_over_range(std::uint64_t{1} << (2 * expr.parties()),
                                      assignment_value(expr));
}

double classical_bound_serial(const BellExpression& expr) {
  check_enumerable(expr);
  return kernels::serial::max_over_range(std::uint64_t{1} << (2 * expr.parties()),
                                         assignment_value(expr));
}

double quantum_value(const QuantumState& state, const ObservableSet& obs,
                     const BellExpression& expr) {
  check_observable_dims(obs, state.dims);
  return trace_of_product(build_bell_operator(expr, obs), state.density).real();
}

SosTerms sos_terms(const BellExpression& expr, const ObservableSet& obs) {
  const std::size_t n = expr.parties();
  const Dims dims = local_dims(obs);
  check_observable_dims(obs, dims);
  const auto [tilde0, tilde1] = tilde_observables(obs[0][0], obs[0][1]);
  const Bits& a = expr.target_outcomes();

  SosTerms out;
  std::vector<ComplexMatrix> rest{ComplexMatrix::identity(dims[0])};
  for (std::size_t k = 1; k < n; ++k) rest.push_back(obs[k][1]);
  out.p = embed(tilde1, 0, dims) * sign_of_bit(a[0]) - kron_all(rest);
  for (std::size_t k = 1; k < n; ++k) {
    out.q.push_back(embed(tilde0, 0, dims) * (sign_of_bit(a[0]) * sign_of_bit(a[k])) -
                    embed(obs[k][0], k, dims));
  }
  return out;
}

SosResidual sos_residual(const ObservableSet& obs, const BellExpression& expr) {
  const auto terms = sos_terms(expr, obs);
  const ComplexMatrix bell = build_bell_operator(expr, obs);
  const std::size_t dim = bell.rows();
  ComplexMatrix r = (ComplexMatrix::identity(dim) * expr.quantum_bound() - bell) * 2.0;
  r -= terms.p * terms.p * static_cast<double>(expr.parties() - 1);
  for (const auto& q : terms.q) r -= q * q;
  SosResidual out;
  out.residual_matrix_norm = max_abs(r);
  out.is_exact_identity = out.residual_matrix_norm < tol::kIdentity;
  return out;
}

double SosRelationViolations::max() const {
  double m = p_violation;
  for (double q : q_violations) m = std::max(m, q);
  return m;
}

SosRelationViolations check_sos_relations(const QuantumState& state, const ObservableSet& obs,
                                          const BellExpression& expr) {
  check_observable_dims(obs, state.dims);
  const auto terms = sos_terms(expr, obs);
  SosRelationViolations out;
  out.p_violation = trace_of_product(terms.p.adjoint() * terms.p, state.density).real();
  for (const auto& q : terms.q)
    out.q_violations.push_back(trace_of_product(q.adjoint() * q, state.density).real());
  return out;
}

ExtraStatisticsResult extra_statistics_check(const QuantumState& state, const ObservableSet& obs,
                                             std::size_t parties, double tolerance) {
  if (parties < 2 || obs.size() != parties || state.dims.size() != parties)
    throw DimensionError("extra_statistics_check: party count mismatch");
  check_observable_dims(obs, state.dims);
  const auto tilde0 = tilde_observables(obs[0][0], obs[0][1]).first;
  const double tilde_value = trace_of_product(embed(tilde0, 0, state.dims), state.density).real();

  ExtraStatisticsResult out;
  out.passes = true;
  for (std::size_t k = 1; k < parties; ++k) {
    const double x_value =
        trace_of_product(embed(obs[k][1], k, state.dims), state.density).real();
    const std::string n = std::to_string(k + 1);
    out.values.push_back({"<Atilde_{1,0}> (pair n=" + n + ")", tilde_value, -1.0});
    out.values.push_back({"<A_{" + n + ",1}>", x_value, 1.0});
  }
  for (const auto& v : out.values)
    if (std::abs(v.value - v.target) > tolerance) out.passes = false;
  return out;
}

}  // namespace qicert
