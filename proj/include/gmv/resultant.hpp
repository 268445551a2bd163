#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/mpoly.hpp"
#include "gmv/upoly.hpp"
#include "gmv/util.hpp"

namespace gmv {

struct ResultantOptions {
  int threads = 1;
  bool low_mem = false;  // forces the ladder-free accumulation even when threaded
};

/// Split of a (linear, dense) pair with respect to the eliminated variable:
/// linear = beta1*v + beta0, dense = sum alpha_j v^j with h = deg_v(dense).
template <class W>
struct SylvesterDecomposition {
  MultiPoly<W> beta0, beta1;
  std::vector<MultiPoly<W>> alphas;
  long long h = 0;
  VarId eliminated = 0;
};

template <class W>
SylvesterDecomposition<W> decompose_linear_dense(const MultiPoly<W>& linear,
                                                 const MultiPoly<W>& dense, VarId v) {
  if (linear.degree_in(v) != 1)
    raise(errc::not_linear, "left operand must be linear in x" + std::to_string(v));
  long long h = dense.degree_in(v);
  if (dense.is_zero() || h < 1)
    raise(errc::trivial_dense, "right operand must have positive degree in x" + std::to_string(v));
  SylvesterDecomposition<W> d;
  auto bs = coefficients_in(linear, v);
  d.beta0 = bs[0];
  d.beta1 = bs[1];
  d.alphas = coefficients_in(dense, v);
  d.h = h;
  d.eliminated = v;
  return d;
}

/// res(linear, dense; v) by the sparse closed form
///     sum_{j=0}^{h} (-1)^j alpha_j beta0^j beta1^{h-j}.
///
/// Default execution is a Horner pass ascending in j with the beta0 power
/// carried incrementally (3h products, no ladder storage). With threads > 1
/// both power ladders are materialized and the h+1 summands run in parallel
/// (2(h-1) + 2(h+1) = 4h products, the Corollary accounting); chunk sums are
/// merged in index order, so outputs are identical for any worker count.
template <class W>
MultiPoly<W> sparse_resultant(const MultiPoly<W>& linear, const MultiPoly<W>& dense, VarId v,
                              const ReductionRule<W>* rule = nullptr, MulCounter* counter = nullptr,
                              const ResultantOptions& opts = {}) {
  const auto& F = mpoly_detail::same_field(linear, dense);
  std::optional<ScopedMulCounter> scope;
  if (counter) scope.emplace(counter);
  auto red = [&](MultiPoly<W>&& f) {
    return rule ? reduce_x1(f, *rule) : std::move(f);
  };
  auto d = decompose_linear_dense(linear, dense, v);
  MultiPoly<W> b0 = red(std::move(d.beta0));
  MultiPoly<W> b1 = red(std::move(d.beta1));
  std::vector<MultiPoly<W>>& al = d.alphas;
  if (rule)
    for (auto& a : al) a = reduce_x1(a, *rule);
  long long h = d.h;

  if (opts.threads > 1 && !opts.low_mem && h >= 4) {
    // ladder path: pow0[j] = beta0^j, pow1[j] = beta1^j, all reduced
    std::vector<MultiPoly<W>> pow0(size_t(h) + 1), pow1(size_t(h) + 1);
    pow0[0] = pow1[0] = MultiPoly<W>::constant(F, 1);
    pow0[1] = b0;
    pow1[1] = b1;
    for (long long j = 2; j <= h; ++j) {
      pow0[size_t(j)] = red(poly_mul(pow0[size_t(j - 1)], b0));
      pow1[size_t(j)] = red(poly_mul(pow1[size_t(j - 1)], b1));
    }
    int nchunks = opts.threads;
    std::vector<MultiPoly<W>> partial;
    partial.assign(size_t(nchunks), MultiPoly<W>(F));
    std::vector<unsigned long long> chunk_muls(size_t(nchunks), 0);
    parallel_chunks(size_t(h) + 1, opts.threads, [&](int c, size_t lo, size_t hi) {
      MulCounter local;
      ScopedMulCounter worker_scope(&local);
      MultiPoly<W> acc(F);
      for (size_t j = lo; j < hi; ++j) {
        MultiPoly<W> t = rule ? reduce_x1(poly_mul(al[j], pow0[j]), *rule) : poly_mul(al[j], pow0[j]);
        t = rule ? reduce_x1(poly_mul(t, pow1[size_t(h) - j]), *rule)
                 : poly_mul(t, pow1[size_t(h) - j]);
        acc = (j % 2) ? poly_sub(acc, t) : poly_add(acc, t);
      }
      partial[size_t(c)] = std::move(acc);
      chunk_muls[size_t(c)] = local.count;
    });
    MultiPoly<W> S(F);
    for (auto& part : partial) S = poly_add(S, part);
    if (counter)
      for (auto m : chunk_muls) counter->count += m;
    return S;
  }

  // Horner pass, ascending j
  MultiPoly<W> S = al[0];
  MultiPoly<W> pw = MultiPoly<W>::constant(F, 1);
  for (long long j = 1; j <= h; ++j) {
    pw = red(poly_mul(pw, b0));
    S = red(poly_mul(S, b1));
    MultiPoly<W> t = red(poly_mul(al[size_t(j)], pw));
    S = (j % 2) ? poly_sub(S, t) : poly_add(S, t);
  }
  return S;
}

/// The (d+e)x(d+e) Sylvester matrix of (f, g) w.r.t. v, rows of f's
/// coefficients first (descending), one shift per row.
template <class W>
std::vector<std::vector<MultiPoly<W>>> sylvester_matrix(const MultiPoly<W>& f,
                                                        const MultiPoly<W>& g, VarId v) {
  long long d = f.degree_in(v), e = g.degree_in(v);
  if (f.is_zero() || g.is_zero()) raise(errc::zero_polynomial, "sylvester matrix of zero polynomial");
  if (d < 1 || e < 1) raise(errc::zero_degree, "both operands need positive degree in the target variable");
  const auto& F = f.field();
  auto fc = coefficients_in(f, v);  // ascending
  auto gc = coefficients_in(g, v);
  size_t n = size_t(d + e);
  std::vector<std::vector<MultiPoly<W>>> M(n, std::vector<MultiPoly<W>>(n, MultiPoly<W>(F)));
  for (long long row = 0; row < e; ++row)
    for (long long k = 0; k <= d; ++k) M[size_t(row)][size_t(row + d - k)] = fc[size_t(k)];
  for (long long row = 0; row < d; ++row)
    for (long long k = 0; k <= e; ++k) M[size_t(e + row)][size_t(row + e - k)] = gc[size_t(k)];
  return M;
}

namespace resultant_detail {

template <class W>
MultiPoly<W> det_expand(const std::vector<std::vector<MultiPoly<W>>>& M, std::vector<int> rows,
                        std::vector<int> cols) {
  const auto& F = M[0][0].field();
  if (rows.size() == 1) return M[size_t(rows[0])][size_t(cols[0])];
  MultiPoly<W> acc(F);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& entry = M[size_t(rows[i])][size_t(cols[0])];
    if (entry.is_zero()) continue;
    std::vector<int> sub(rows);
    sub.erase(sub.begin() + long(i));
    std::vector<int> subc(cols.begin() + 1, cols.end());
    MultiPoly<W> term = poly_mul(entry, det_expand(M, sub, subc));
    acc = (i % 2) ? poly_sub(acc, term) : poly_add(acc, term);
  }
  return acc;
}

}  // namespace resultant_detail

/// Reference oracle: determinant of the Sylvester matrix by cofactor
/// expansion. Kept deliberately independent of the other engines; sizes are
/// capped at 6x6.
template <class W>
MultiPoly<W> resultant_cofactor(const MultiPoly<W>& f, const MultiPoly<W>& g, VarId v) {
  auto M = sylvester_matrix(f, g, v);
  if (M.size() > 6) raise(errc::bad_shape, "cofactor oracle capped at 6x6 matrices");
  std::vector<int> idx(M.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  return resultant_detail::det_expand(M, idx, idx);
}

namespace resultant_detail {

// polynomial in v with MultiPoly coefficients, ascending, trimmed
template <class W>
struct VPoly {
  std::vector<MultiPoly<W>> c;

  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  long long deg() const { return c.empty() ? kZeroPolyDegree : (long long)c.size() - 1; }
  const MultiPoly<W>& lc() const { return c.back(); }
};

template <class W>
VPoly<W> vp_from(const MultiPoly<W>& f, VarId v) {
  VPoly<W> r;
  if (!f.is_zero()) r.c = coefficients_in(f, v);
  r.trim();
  return r;
}

template <class W>
VPoly<W> vp_scale(const VPoly<W>& a, const MultiPoly<W>& m) {
  VPoly<W> r;
  r.c.reserve(a.c.size());
  for (auto& x : a.c) r.c.push_back(poly_mul(x, m));
  r.trim();
  return r;
}

// r = a - m * x^shift * b
template <class W>
VPoly<W> vp_sub_shifted(const VPoly<W>& a, const MultiPoly<W>& m, size_t shift, const VPoly<W>& b,
                        const PrimeField<W>& F) {
  VPoly<W> r = a;
  if (r.c.size() < b.c.size() + shift) r.c.resize(b.c.size() + shift, MultiPoly<W>(F));
  for (size_t i = 0; i < b.c.size(); ++i)
    r.c[i + shift] = poly_sub(r.c[i + shift], poly_mul(m, b.c[i]));
  r.trim();
  return r;
}

// pseudo-remainder: lc(B)^(degA-degB+1) * A = Q*B + R with deg R < deg B
template <class W>
VPoly<W> vp_prem(const VPoly<W>& A, const VPoly<W>& B, const PrimeField<W>& F) {
  VPoly<W> R = A;
  long long dB = B.deg();
  const MultiPoly<W>& lb = B.lc();
  long long e = A.deg() - dB + 1;
  while (!R.is_zero() && R.deg() >= dB) {
    MultiPoly<W> lr = R.lc();
    size_t shift = size_t(R.deg() - dB);
    R = vp_scale(R, lb);
    R.c.pop_back();  // leading term cancels exactly
    R.trim();
    VPoly<W> sub = B;
    sub.c.pop_back();
    R = vp_sub_shifted(R, lr, shift, sub, F);
    --e;
  }
  for (; e > 0; --e) R = vp_scale(R, lb);
  return R;
}

template <class W>
VPoly<W> vp_divexact(const VPoly<W>& a, const MultiPoly<W>& m) {
  VPoly<W> r;
  r.c.reserve(a.c.size());
  for (auto& x : a.c) r.c.push_back(x.is_zero() ? x : poly_divexact(x, m));
  return r;
}

}  // namespace resultant_detail

/// Subresultant pseudo-remainder sequence; returns det(sylvester_matrix(f,g,v))
/// including its sign. Runs in the plain polynomial ring and applies the
/// reduction rule only to the final output (intermediate exact divisions are
/// valid in the ring, not the quotient).
template <class W>
MultiPoly<W> resultant_prs(const MultiPoly<W>& f, const MultiPoly<W>& g, VarId v,
                           const ReductionRule<W>* rule = nullptr) {
  using resultant_detail::VPoly;
  const auto& F = mpoly_detail::same_field(f, g);
  if (f.is_zero() || g.is_zero()) raise(errc::zero_polynomial, "resultant of zero polynomial");
  long long df = f.degree_in(v), dg = g.degree_in(v);
  if (df < 1 || dg < 1) raise(errc::zero_degree, "both operands need positive degree in the target variable");

  VPoly<W> A = resultant_detail::vp_from(f, v);
  VPoly<W> B = resultant_detail::vp_from(g, v);
  bool negate = false;
  if (A.deg() < B.deg()) {
    std::swap(A, B);
    if ((df % 2) && (dg % 2)) negate = !negate;
  }
  MultiPoly<W> gg = MultiPoly<W>::constant(F, 1);
  MultiPoly<W> hh = MultiPoly<W>::constant(F, 1);
  while (B.deg() > 0) {
    long long delta = A.deg() - B.deg();
    if ((A.deg() % 2) && (B.deg() % 2)) negate = !negate;
    VPoly<W> R = resultant_detail::vp_prem(A, B, F);
    A = std::move(B);
    if (R.is_zero()) {
      return MultiPoly<W>(F);  // common factor of positive degree
    }
    MultiPoly<W> denom = poly_mul(gg, poly_pow(hh, u64(delta)));
    B = resultant_detail::vp_divexact(R, denom);
    gg = A.lc();
    if (delta > 0) hh = delta == 1 ? gg : poly_divexact(poly_pow(gg, u64(delta)), poly_pow(hh, u64(delta - 1)));
  }
  if (B.is_zero()) return MultiPoly<W>(F);
  long long l = A.deg();
  MultiPoly<W> res = poly_pow(B.c[0], u64(l));
  if (l > 1) res = poly_divexact(res, poly_pow(hh, u64(l - 1)));
  if (negate) res = poly_neg(res);
  if (rule) res = reduce_x1(res, *rule);
  return res;
}

/// Engine dispatch: the Prop.-1 kernel whenever one operand is linear in the
/// eliminated variable (with the operand-swap sign fixed up), subresultant
/// PRS otherwise. Always equals det(sylvester_matrix(f, g, v)).
template <class W>
MultiPoly<W> general_resultant(const MultiPoly<W>& f, const MultiPoly<W>& g, VarId v,
                               const ReductionRule<W>* rule = nullptr, MulCounter* counter = nullptr,
                               const ResultantOptions& opts = {}) {
  if (f.is_zero() || g.is_zero()) raise(errc::zero_polynomial, "resultant of zero polynomial");
  long long df = f.degree_in(v), dg = g.degree_in(v);
  if (df < 1 || dg < 1) raise(errc::zero_degree, "both operands need positive degree in the target variable");
  if (df == 1) return sparse_resultant(f, g, v, rule, counter, opts);
  if (dg == 1) {
    MultiPoly<W> r = sparse_resultant(g, f, v, rule, counter, opts);
    return (df % 2) ? poly_neg(r) : r;  // res(f,g) = (-1)^(df*dg) res(g,f), dg = 1
  }
  return resultant_prs(f, g, v, rule);
}

namespace resultant_detail {

// determinant of a small matrix of univariate polynomials via subset DP over
// row masks, expanding column by column; shared minors are computed once
template <class W>
UnivariatePoly<W> det_univariate(const std::vector<std::vector<UnivariatePoly<W>>>& M,
                                 const PrimeField<W>& F) {
  size_t n = M.size();
  std::unordered_map<unsigned, UnivariatePoly<W>> memo;
  // mask = set of available rows; column index = n - popcount(mask)
  std::function<const UnivariatePoly<W>&(unsigned)> det = [&](unsigned mask) -> const UnivariatePoly<W>& {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    UnivariatePoly<W> acc(F);
    if (mask == 0) {
      acc = UnivariatePoly<W>::constant(F, 1);
    } else {
      size_t col = n - size_t(__builtin_popcount(mask));
      int pos = 0;
      for (size_t r = 0; r < n; ++r) {
        if (!(mask & (1u << r))) continue;
        const auto& entry = M[r][col];
        if (!entry.is_zero()) {
          UnivariatePoly<W> term = upoly_mul(entry, det(mask & ~(1u << r)));
          acc = (pos % 2) ? upoly_sub(acc, term) : upoly_add(acc, term);
        }
        ++pos;
      }
    }
    return memo.emplace(mask, std::move(acc)).first->second;
  };
  return det((1u << n) - 1);
}

}  // namespace resultant_detail

/// The finishing resultant u(xn) = res(f1, g2; x1) computed as the explicit
/// (3+e)x(3+e) banded determinant (5x5 generically; smaller when g2
/// degenerates in x1, down to res(f1, c) = c^3 for an x1-free g2).
template <class W>
UnivariatePoly<W> final_resultant(const MultiPoly<W>& f1, const MultiPoly<W>& g2, VarId x1,
                                  VarId xn, const ReductionRule<W>* rule = nullptr) {
  const auto& F = mpoly_detail::same_field(f1, g2);
  (void)rule;
  for (VarId v : f1.vars())
    if (v != x1 && v != xn) raise(errc::bad_shape, "f1 must live in {x1, xn}");
  for (VarId v : g2.vars())
    if (v != x1 && v != xn) raise(errc::bad_shape, "g2 must live in {x1, xn}");
  if (f1.degree_in(x1) != 3) raise(errc::bad_shape, "f1 must be cubic in x1");
  if (g2.is_zero()) raise(errc::zero_polynomial, "g2 is identically zero");
  long long e = std::max(0LL, g2.degree_in(x1));
  if (e > 2) raise(errc::bad_shape, "g2 must have x1-degree at most 2");

  auto fc = coefficients_in(f1, x1);  // ascending, size 4
  auto gc = coefficients_in(g2, x1);  // ascending, size e+1
  std::vector<UnivariatePoly<W>> B(4), A(size_t(e) + 1);
  for (size_t k = 0; k < 4; ++k) B[k] = to_univariate(k < fc.size() ? fc[k] : MultiPoly<W>(F), xn);
  for (size_t k = 0; k <= size_t(e); ++k) A[k] = to_univariate(gc[k], xn);

  if (e == 0) {
    // res(f1, c(xn)) = c^3
    return upoly_mul(upoly_mul(A[0], A[0]), A[0]);
  }
  size_t n = size_t(3 + e);
  std::vector<std::vector<UnivariatePoly<W>>> M(n, std::vector<UnivariatePoly<W>>(n, UnivariatePoly<W>(F)));
  for (long long row = 0; row < e; ++row)
    for (long long k = 0; k <= 3; ++k) M[size_t(row)][size_t(row + 3 - k)] = B[size_t(k)];
  for (long long row = 0; row < 3; ++row)
    for (long long k = 0; k <= e; ++k) M[size_t(e + row)][size_t(row + e - k)] = A[size_t(k)];
  return resultant_detail::det_univariate(M, F);
}

}  // namespace gmv
