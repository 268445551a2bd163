#pragma once

#include <algorithm>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/field.hpp"
#include "gmv/mpoly.hpp"
#include "gmv/rng.hpp"
#include "gmv/uniroot.hpp"
#include "gmv/util.hpp"

namespace gmv {

/// A full assignment x0..xn.
template <class W>
struct Solution {
  std::vector<W> x;

  bool operator==(const Solution& o) const { return x == o.x; }
  bool operator<(const Solution& o) const { return x < o.x; }
};

/// The generated system over F_p[x0..xn]:
///   f0  = b1 x0 + x1 + xn
///   f1' = a0 x0^3 - (b0 x0 + 2 x1)(a1 x0^2 + x1^2 + 1)
///   fi  = xi(x_{i-1}^2 - 1) + (ai x1 + bi xn)(2 xi x_{i-1} - x_{i-1}^2 + 1) + 2 x_{i-1}
///   fn  = t(x_{n-1}^2 + 2 xn x_{n-1} - 1) - xn(x_{n-1}^2 - 1) + 2 x_{n-1}
/// with all constants in F_p and b1 != 0. Variable x_k carries VarId k.
template <class W>
struct GmvSystem {
  const PrimeField<W>* field = nullptr;
  int n = 0;
  W t = 0;
  std::vector<W> a, b;  // a[0..n-1], b[0..n-1]
  MultiPoly<W> f0, f1prime;
  std::vector<MultiPoly<W>> f;  // f[i] valid for 2 <= i <= n

  const PrimeField<W>& F() const { return *field; }
};

template <class W>
MultiPoly<W> make_f0(const PrimeField<W>& F, int n, W b1) {
  return MultiPoly<W>::from_terms(F, {{Monomial{{0, 1}}, b1}, {Monomial{{1, 1}}, 1},
                                      {Monomial{{VarId(n), 1}}, 1}});
}

template <class W>
MultiPoly<W> make_f1prime(const PrimeField<W>& F, W a0, W a1, W b0) {
  auto x0 = MultiPoly<W>::variable(F, 0);
  auto x1 = MultiPoly<W>::variable(F, 1);
  auto lin = poly_add(poly_scale(x0, b0), poly_scale(x1, W(2 % F.modulus())));
  auto quad = poly_add(poly_scale(poly_mul(x0, x0), a1),
                       poly_add(poly_mul(x1, x1), MultiPoly<W>::constant(F, 1)));
  auto cube = poly_scale(poly_mul(poly_mul(x0, x0), x0), a0);
  return poly_sub(cube, poly_mul(lin, quad));
}

template <class W>
MultiPoly<W> make_fi(const PrimeField<W>& F, int n, int i, W ai, W bi) {
  auto xi = MultiPoly<W>::variable(F, i);
  auto xm = MultiPoly<W>::variable(F, i - 1);
  auto x1 = MultiPoly<W>::variable(F, 1);
  auto xn = MultiPoly<W>::variable(F, n);
  auto xm2 = poly_mul(xm, xm);
  auto one = MultiPoly<W>::constant(F, 1);
  auto lin = poly_add(poly_scale(x1, ai), poly_scale(xn, bi));
  auto bracket = poly_add(poly_sub(poly_scale(poly_mul(xi, xm), W(2 % F.modulus())), xm2), one);
  auto r = poly_mul(xi, poly_sub(xm2, one));
  r = poly_add(r, poly_mul(lin, bracket));
  return poly_add(r, poly_scale(xm, W(2 % F.modulus())));
}

template <class W>
MultiPoly<W> make_fn(const PrimeField<W>& F, int n, W t) {
  auto xn = MultiPoly<W>::variable(F, n);
  auto xm = MultiPoly<W>::variable(F, n - 1);
  auto xm2 = poly_mul(xm, xm);
  auto one = MultiPoly<W>::constant(F, 1);
  auto tpart = poly_sub(poly_add(xm2, poly_scale(poly_mul(xn, xm), W(2 % F.modulus()))), one);
  auto r = poly_scale(tpart, t);
  r = poly_sub(r, poly_mul(xn, poly_sub(xm2, one)));
  return poly_add(r, poly_scale(xm, W(2 % F.modulus())));
}

/// Samples t, a, b uniformly (b1 redrawn until nonzero) and builds the
/// equations. Draw order is pinned: a[0..n-1], then b[0..n-1], then t, so
/// overriding t leaves a and b untouched.
template <class W>
GmvSystem<W> generate(const PrimeField<W>& F, int n, SplitMix64& rng) {
  if (n < 4) raise(errc::bad_n, "system needs n >= 4");
  GmvSystem<W> sys;
  sys.field = &F;
  sys.n = n;
  sys.a.resize(size_t(n));
  sys.b.resize(size_t(n));
  for (int j = 0; j < n; ++j) sys.a[size_t(j)] = F.sample(rng);
  for (int j = 0; j < n; ++j) {
    do {
      sys.b[size_t(j)] = F.sample(rng);
    } while (j == 1 && sys.b[1] == 0);
  }
  sys.t = F.sample(rng);
  rebuild_polys(sys);
  return sys;
}

template <class W>
void rebuild_polys(GmvSystem<W>& sys) {
  const auto& F = sys.F();
  sys.f0 = make_f0(F, sys.n, sys.b[1]);
  sys.f1prime = make_f1prime(F, sys.a[0], sys.a[1], sys.b[0]);
  sys.f.assign(size_t(sys.n) + 1, MultiPoly<W>(F));
  for (int i = 2; i <= sys.n - 1; ++i)
    sys.f[size_t(i)] = make_fi(F, sys.n, i, sys.a[size_t(i)], sys.b[size_t(i)]);
  sys.f[size_t(sys.n)] = make_fn(F, sys.n, sys.t);
}

template <class W>
GmvSystem<W> with_t(const GmvSystem<W>& sys, W t) {
  GmvSystem<W> out = sys;
  out.t = W(t % sys.F().modulus());
  out.f[size_t(out.n)] = make_fn(out.F(), out.n, out.t);
  return out;
}

/// System after x0 elimination: f1(x1, xn) = f1'(-b1^{-1}(x1+xn), x1),
/// its cubic leading coefficient, and the rewrite rule x1^3 = r(x1, xn).
template <class W>
struct InitializedSystem {
  MultiPoly<W> f1;
  ReductionRule<W> rule;
  W lead_c = 0;
};

template <class W>
W lead_c_closed_form(const GmvSystem<W>& sys) {
  const auto& F = sys.F();
  W binv = F.inv(sys.b[1]);
  W b2 = F.mul(binv, binv), b3 = F.mul(b2, binv);
  W v = F.mul(F.sub(F.mul(sys.a[1], sys.b[0]), sys.a[0]), b3);   // (-a0 + a1 b0)/b1^3
  v = F.sub(v, F.mul(F.mul(W(2 % F.modulus()), sys.a[1]), b2));  // - 2 a1 / b1^2
  v = F.add(v, F.mul(sys.b[0], binv));                           // + b0 / b1
  return F.sub(v, W(2 % F.modulus()));                           // - 2
}

template <class W>
InitializedSystem<W> initialize(const GmvSystem<W>& sys) {
  const auto& F = sys.F();
  if (sys.b[1] == 0) raise(errc::bad_shape, "b1 must be nonzero");
  // x0 = -b1^{-1} (x1 + xn), substituted into f1'
  W binv = F.inv(sys.b[1]);
  auto x1 = MultiPoly<W>::variable(F, 1);
  auto xn = MultiPoly<W>::variable(F, sys.n);
  auto x0sub = poly_scale(poly_add(x1, xn), F.neg(binv));
  auto x0sq = poly_mul(x0sub, x0sub);
  auto x0cu = poly_mul(x0sq, x0sub);
  auto lin = poly_add(poly_scale(x0sub, sys.b[0]), poly_scale(x1, W(2 % F.modulus())));
  auto quad = poly_add(poly_scale(x0sq, sys.a[1]),
                       poly_add(poly_mul(x1, x1), MultiPoly<W>::constant(F, 1)));
  MultiPoly<W> f1 = poly_sub(poly_scale(x0cu, sys.a[0]), poly_mul(lin, quad));

  W lead = f1.coeff_of(Monomial{{1, 3}});
  W closed = lead_c_closed_form(sys);
  if (lead != closed) raise(errc::internal, "x1^3 coefficient disagrees with its closed form");
  if (lead == 0)
    raise(errc::degenerate_leading_coefficient, "coefficient of x1^3 in f1 vanished; resample the system");

  // r = x1^3 - f1/lead
  MultiPoly<W> x1cube = MultiPoly<W>::monomial(F, 1, Monomial{{1, 3}});
  MultiPoly<W> r = poly_sub(x1cube, poly_scale(f1, F.inv(lead)));
  InitializedSystem<W> init{std::move(f1), ReductionRule<W>(std::move(r), 1, VarId(sys.n)), lead};
  return init;
}

template <class W>
bool verify(const GmvSystem<W>& sys, const Solution<W>& s) {
  if (s.x.size() != size_t(sys.n) + 1) return false;
  std::map<VarId, W> asg;
  for (int k = 0; k <= sys.n; ++k) asg[k] = s.x[size_t(k)];
  if (evaluate(sys.f0, asg) != 0) return false;
  if (evaluate(sys.f1prime, asg) != 0) return false;
  for (int i = 2; i <= sys.n; ++i)
    if (evaluate(sys.f[size_t(i)], asg) != 0) return false;
  return true;
}

namespace system_detail {

// Forward substitution from a fixed (x1, xn) pair: each fi (2 <= i <= n-1)
// is linear in xi given x_{i-1}; chains die on an inconsistent zero pivot,
// branch over all of F_p on a doubly-zero pivot (oracle scale only), and
// must satisfy fn at the end.
template <class W>
void extend_chain(const GmvSystem<W>& sys, W x1v, W xnv, bool branch_free_pivots,
                  std::vector<Solution<W>>& out) {
  const auto& F = sys.F();
  W binv = F.inv(sys.b[1]);
  W x0 = F.mul(F.neg(binv), F.add(x1v, xnv));

  struct Frame {
    int i;
    std::vector<W> prefix;  // x0..x_{i-1}
  };
  std::vector<Frame> stack;
  stack.push_back({2, {x0, x1v}});
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    if (fr.i == sys.n) {
      W xm = fr.prefix.back();
      // fn residual
      W xm2 = F.mul(xm, xm);
      W v = F.mul(sys.t, F.sub(F.add(xm2, F.mul(W(2 % F.modulus()), F.mul(xnv, xm))), W(1)));
      v = F.sub(v, F.mul(xnv, F.sub(xm2, W(1))));
      v = F.add(v, F.mul(W(2 % F.modulus()), xm));
      if (v == 0) {
        Solution<W> s;
        s.x = fr.prefix;
        s.x.push_back(xnv);
        out.push_back(std::move(s));
      }
      continue;
    }
    int i = fr.i;
    W xm = fr.prefix.back();
    W lin = F.add(F.mul(sys.a[size_t(i)], x1v), F.mul(sys.b[size_t(i)], xnv));
    W xm2 = F.mul(xm, xm);
    // fi = C*xi + D
    W C = F.add(F.sub(xm2, W(1)), F.mul(W(2 % F.modulus()), F.mul(lin, xm)));
    W D = F.add(F.mul(lin, F.sub(W(1), xm2)), F.mul(W(2 % F.modulus()), xm));
    if (C != 0) {
      W xi = F.neg(F.mul(D, F.inv(C)));
      fr.prefix.push_back(xi);
      stack.push_back({i + 1, std::move(fr.prefix)});
    } else if (D == 0) {
      if (branch_free_pivots) {
        for (W xi = 0; xi < F.modulus(); ++xi) {
          Frame nf{i + 1, fr.prefix};
          nf.prefix.push_back(xi);
          stack.push_back(std::move(nf));
        }
      } else {
        logf(1, "free pivot at x%d abandoned (p too large to branch)", i);
      }
    }
    // C == 0, D != 0: inconsistent, chain dies
  }
}

}  // namespace system_detail

/// All verified solutions extending the given xn (possibly none). The cubic
/// f1(., xn) supplies the x1 candidates; deterministic.
template <class W>
std::vector<Solution<W>> recover_solution(const InitializedSystem<W>& init,
                                          const GmvSystem<W>& sys, W xn) {
  const auto& F = sys.F();
  // f1 lives in {x1, xn}: specialize xn, keep x1
  std::vector<W> dense(4, W(0));
  for (auto& t : init.f1.terms()) {
    Monomial m = init.f1.monomial_of(t);
    u64 e1 = 0, en = 0;
    for (auto& [v, e] : m.e) {
      if (v == 1) e1 = e;
      if (v == VarId(sys.n)) en = e;
    }
    dense[e1] = F.add(dense[e1], F.mul(t.coeff, F.pow(xn, en)));
  }
  UnivariatePoly<W> f1x(F, std::move(dense));
  std::vector<Solution<W>> out;
  if (f1x.is_zero()) return out;
  bool oracle_scale = sys.F().modulus() <= (u128(1) << 16);
  std::vector<W> x1roots = find_roots(f1x, u64(0xC0FFEE));
  for (W x1v : x1roots)
    system_detail::extend_chain(sys, x1v, xn, oracle_scale, out);
  std::vector<Solution<W>> kept;
  for (auto& s : out)
    if (verify(sys, s)) kept.push_back(s);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

/// Exhaustive oracle over (x1, xn) pairs; guarded to p <= 2^16 and n <= 8.
/// Returns every verified solution, sorted.
template <class W>
std::vector<Solution<W>> brute_force_solve(const GmvSystem<W>& sys) {
  const auto& F = sys.F();
  if (F.modulus() > (u128(1) << 16) || sys.n > 8)
    raise(errc::oracle_too_large, "brute force is guarded to p <= 2^16 and n <= 8");
  InitializedSystem<W> init = initialize(sys);
  // dense bivariate table of f1 coefficients: c[e1][en]
  W c[4][4] = {};
  for (auto& t : init.f1.terms()) {
    Monomial m = init.f1.monomial_of(t);
    u64 e1 = 0, en = 0;
    for (auto& [v, e] : m.e) {
      if (v == 1) e1 = e;
      if (v == VarId(sys.n)) en = e;
    }
    c[e1][en] = t.coeff;
  }
  std::vector<Solution<W>> out;
  u64 p = u64(F.modulus());
  for (u64 xnv = 0; xnv < p; ++xnv) {
    // specialize to a cubic in x1
    W d[4];
    for (int e1 = 0; e1 < 4; ++e1) {
      W acc = 0;
      for (int en = 3; en >= 0; --en) acc = F.add(F.mul(acc, W(xnv)), c[e1][en]);
      d[e1] = acc;
    }
    for (u64 x1v = 0; x1v < p; ++x1v) {
      W acc = 0;
      for (int e1 = 3; e1 >= 0; --e1) acc = F.add(F.mul(acc, W(x1v)), d[e1]);
      if (acc == 0) system_detail::extend_chain(sys, W(x1v), W(xnv), true, out);
    }
  }
  std::vector<Solution<W>> kept;
  for (auto& s : out)
    if (verify(sys, s)) kept.push_back(s);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

}  // namespace gmv
