#include "qicert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qicert/kernels.hpp"

namespace qicert {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kernels::kron(a, b); }

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) return ComplexMatrix::identity(1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

namespace {

// Digits of `index` in the mixed radix `dims`, most significant first.
std::vector<std::size_t> digits_of(std::size_t index, const Dims& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = index % dims[k];
    index /= dims[k];
  }
  return d;
}

std::size_t index_of(const std::vector<std::size_t>& digits, const Dims& dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims,
                            const std::vector<std::size_t>& keep) {
  if (!m.is_square()) throw DimensionError("partial trace of non-square " + shape_string(m));
  if (product(dims) != m.rows()) {
    throw DimensionError("subsystem dimensions multiply to " + std::to_string(product(dims)) +
                         " but matrix is " + shape_string(m));
  }
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size()) throw DimensionError("kept subsystem index out of range");
    kept[k] = true;
  }
  Dims kept_dims, traced_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) (kept[k] ? kept_dims : traced_dims).push_back(dims[k]);
  const std::size_t dk = product(kept_dims);
  const std::size_t dt = product(traced_dims);

  // full_index[rk * dt + t] for kept multi-index rk and traced multi-index t.
  std::vector<std::size_t> full_index(dk * dt);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto d = digits_of(i, dims);
    std::size_t rk = 0, t = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (kept[k]) rk = rk * dims[k] + d[k];
      else t = t * dims[k] + d[k];
    }
    full_index[rk * dt + t] = i;
  }
  ComplexMatrix out(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) acc += m(full_index[r * dt + t], full_index[c * dt + t]);
      out(r, c) = acc;
    }
  return out;
}

ComplexMatrix subsystem_permutation(const Dims& dims, const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size()) throw DimensionError("permutation length mismatch");
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k)
    if (sorted[k] != k) throw DimensionError("not a permutation of subsystem indices");
  Dims out_dims(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) out_dims[k] = dims[perm[k]];
  const std::size_t n = product(dims);
  ComplexMatrix p(n, n);
  std::vector<std::size_t> out_digits(dims.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = digits_of(i, dims);
    for (std::size_t k = 0; k < dims.size(); ++k) out_digits[k] = d[perm[k]];
    p(index_of(out_digits, out_dims), i) = 1.0;
  }
  return p;
}

EigenDecomposition herm_eig(const ComplexMatrix& h) {
  if (!is_hermitian(h, tol::kIdentity))
    throw PreconditionError("herm_eig: input " + shape_string(h) + " is not Hermitian");
  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = avg;
      a(c, r) = std::conj(avg);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(frobenius_norm(a), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * r, app - aqq);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const Complex phase = std::conj(apq) / r;  // e^{-i phi}
        // Rotation on the (p, q) plane: G = diag(1, e^{-i phi}) * [[c, -s], [s, c]].
        const Complex g00 = c, g01 = -s, g10 = s * phase, g11 = c * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    Ket col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, order[k]);
    col = fix_phase(col);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = col[i];
  }
  return out;
}

ComplexMatrix sign_operator(const ComplexMatrix& h) {
  const auto eig = herm_eig(h);
  const std::size_t n = h.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.eigenvalues[k];
    if (std::abs(lambda) <= tol::kSingular) {
      std::ostringstream os;
      os << "sign_operator: eigenvalue " << lambda << " (index " << k
         << ") is within 1e-12 of zero";
      throw PreconditionError(os.str());
    }
    const double sgn = lambda > 0 ? 1.0 : -1.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) += sgn * eig.eigenvectors(r, k) * std::conj(eig.eigenvectors(c, k));
  }
  return out;
}

ComplexMatrix support_basis(const ComplexMatrix& psd, double threshold) {
  const auto eig = herm_eig(psd);
  std::vector<std::size_t> cols;
  // Largest eigenvalues first so the basis order is stable under tiny perturbations.
  for (std::size_t k = eig.eigenvalues.size(); k-- > 0;)
    if (eig.eigenvalues[k] > threshold) cols.push_back(k);
  ComplexMatrix basis(psd.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < psd.rows(); ++i) basis(i, j) = eig.eigenvectors(i, cols[j]);
  return basis;
}

ComplexMatrix operator_block(const ComplexMatrix& w, const Ket& out_vec, const Ket& in_vec,
                             const Dims& dims_out, const Dims& dims_in) {
  if (dims_out.size() != 2 || dims_in.size() != 2)
    throw DimensionError("operator_block expects {primary, aux} dimension pairs");
  const std::size_t po = dims_out[0], ao = dims_out[1];
  const std::size_t pi = dims_in[0], ai = dims_in[1];
  if (w.rows() != po * ao || w.cols() != pi * ai) {
    throw DimensionError("operator_block: " + shape_string(w) + " does not map " +
                         std::to_string(pi) + "*" + std::to_string(ai) + " to " +
                         std::to_string(po) + "*" + std::to_string(ao));
  }
  if (out_vec.size() != po || in_vec.size() != pi)
    throw DimensionError("operator_block: basis vector length does not match primary dimension");
  ComplexMatrix block(ao, ai);
  for (std::size_t p = 0; p < po; ++p) {
    const Complex bra = std::conj(out_vec[p]);
    if (bra == Complex{}) continue;
    for (std::size_t q = 0; q < pi; ++q) {
      const Complex coeff = bra * in_vec[q];
      if (coeff == Complex{}) continue;
      for (std::size_t r = 0; r < ao; ++r)
        for (std::size_t c = 0; c < ai; ++c) block(r, c) += coeff * w(p * ao + r, q * ai + c);
    }
  }
  return block;
}

namespace {

ComplexMatrix project_second_factor(const ComplexMatrix& w, const ComplexMatrix& f1,
                                    const TensorSplit& s) {
  double weight = 0.0;
  for (const auto& e : f1.entries()) weight += std::norm(e);
  ComplexMatrix f2(s.out2, s.in2);
  for (std::size_t i1 = 0; i1 < s.out1; ++i1)
    for (std::size_t j1 = 0; j1 < s.in1; ++j1) {
      const Complex c = std::conj(f1(i1, j1));
      if (c == Complex{}) continue;
      for (std::size_t i2 = 0; i2 < s.out2; ++i2)
        for (std::size_t j2 = 0; j2 < s.in2; ++j2)
          f2(i2, j2) += c * w(i1 * s.out2 + i2, j1 * s.in2 + j2);
    }
  f2 *= 1.0 / weight;
  return f2;
}

}  // namespace

Factorization factorize_tensor_product(const ComplexMatrix& w, const TensorSplit& s,
                                       double tolerance) {
  if (w.rows() != s.out1 * s.out2 || w.cols() != s.in1 * s.in2)
    throw DimensionError("factorize_tensor_product: split does not match " + shape_string(w));
  const std::size_t n1 = s.out1 * s.in1;
  const std::size_t n2 = s.out2 * s.in2;
  // Realignment: R[(i1,j1),(i2,j2)] = W[(i1,i2),(j1,j2)].
  ComplexMatrix r(n1, n2);
  for (std::size_t i1 = 0; i1 < s.out1; ++i1)
    for (std::size_t j1 = 0; j1 < s.in1; ++j1)
      for (std::size_t i2 = 0; i2 < s.out2; ++i2)
        for (std::size_t j2 = 0; j2 < s.in2; ++j2)
          r(i1 * s.in1 + j1, i2 * s.in2 + j2) = w(i1 * s.out2 + i2, j1 * s.in2 + j2);

  const auto eig = herm_eig(r * r.adjoint());
  Factorization out;
  double total = 0.0;
  for (std::size_t k = eig.eigenvalues.size(); k-- > 0;) {
    const double sq = std::max(eig.eigenvalues[k], 0.0);
    total += sq;
    out.schmidt_coefficients.push_back(std::sqrt(sq));
  }
  const double lead = out.schmidt_coefficients.empty() ? 0.0 : out.schmidt_coefficients.front();
  out.is_product = total > 0.0 && lead * lead >= (1.0 - tolerance) * total;

  ComplexMatrix f1(s.out1, s.in1);
  const std::size_t top = n1 - 1;
  for (std::size_t i1 = 0; i1 < s.out1; ++i1)
    for (std::size_t j1 = 0; j1 < s.in1; ++j1) f1(i1, j1) = eig.eigenvectors(i1 * s.in1 + j1, top);
  const auto f1_sv = herm_eig(f1 * f1.adjoint());
  const double largest_sv = std::sqrt(std::max(f1_sv.eigenvalues.back(), 0.0));
  if (largest_sv > 0.0) f1 *= 1.0 / largest_sv;
  out.factor1 = fix_phase(f1);
  out.factor2 = project_second_factor(w, out.factor1, s);
  out.residual = max_abs_diff(w, kron(out.factor1, out.factor2));
  return out;
}

ComplexMatrix fix_phase(const ComplexMatrix& m, double threshold) {
  for (const auto& e : m.entries()) {
    if (std::abs(e) > threshold) return m * (std::conj(e) / std::abs(e));
  }
  return m;
}

Ket fix_phase(const Ket& v, double threshold) {
  for (const auto& e : v) {
    if (std::abs(e) > threshold) {
      const Complex c = std::conj(e) / std::abs(e);
      Ket out = v;
      for (auto& x : out) x *= c;
      return out;
    }
  }
  return v;
}

double distance_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("distance_up_to_phase: shapes differ");
  std::size_t best = 0;
  auto eb = b.entries();
  for (std::size_t i = 1; i < eb.size(); ++i)
    if (std::abs(eb[i]) > std::abs(eb[best])) best = i;
  if (eb.empty() || std::abs(eb[best]) == 0.0) return max_abs(a);
  const Complex ratio = a.entries()[best] / eb[best];
  const Complex phase = std::abs(ratio) > 0 ? ratio / std::abs(ratio) : Complex{1.0};
  return max_abs_diff(a, b * phase);
}

}  // namespace qicert
