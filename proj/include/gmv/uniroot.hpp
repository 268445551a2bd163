#pragma once

#include <algorithm>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/rng.hpp"
#include "gmv/upoly.hpp"

namespace gmv {

/// gcd(x^p - x, u): the product of the distinct linear factors of u, monic.
/// This is where root finding spends its time for large deg(u); the x^p mod u
/// ladder reuses one precomputed reduction context.
template <class W>
UnivariatePoly<W> linear_part(const UnivariatePoly<W>& u) {
  if (u.is_zero()) raise(errc::zero_polynomial, "linear_part of zero polynomial");
  const auto& F = u.field();
  if (u.degree() < 1) return UnivariatePoly<W>::constant(F, 1);
  UModCtx<W> ctx(u);
  UnivariatePoly<W> xp = ctx.powmod(UnivariatePoly<W>::x(F), u128(F.modulus()));
  UnivariatePoly<W> xpminusx = upoly_sub(xp, UnivariatePoly<W>::x(F));
  if (xpminusx.is_zero()) return upoly_monic(u);  // u divides x^p - x: squarefree, all roots
  return upoly_gcd(xpminusx, u);
}

namespace uniroot_detail {

// Equal-degree style splitting restricted to products of distinct linear
// factors: gcd(v, (x+c)^((p-1)/2) - 1) separates roots by residue class of
// rho + c. Roots rho = -c land on the non-residue side and are picked up by
// the recursion; retries draw fresh shifts from the caller's stream.
template <class W>
void split_linear(const UnivariatePoly<W>& v, SplitMix64& rng, std::vector<W>& out,
                  unsigned long long& attempts, unsigned long long attempt_cap) {
  const auto& F = v.field();
  long long d = v.degree();
  if (d <= 0) return;
  if (d == 1) {
    // monic x + c0  ->  root -c0
    W c0 = F.mul(v.coeff(0), F.inv(v.coeff(1)));
    out.push_back(F.neg(c0));
    return;
  }
  u128 half = (u128(F.modulus()) - 1) >> 1;
  for (;;) {
    if (++attempts > attempt_cap)
      raise(errc::internal, "equal-degree splitting stalled; input was not a product of distinct linear factors");
    W c = F.sample(rng);
    UModCtx<W> ctx(v);
    UnivariatePoly<W> base(F, {c, W(1)});
    UnivariatePoly<W> s = ctx.powmod(base, half);
    // w = gcd(v, s - 1)
    UnivariatePoly<W> s1 = upoly_sub(s, UnivariatePoly<W>::constant(F, 1));
    UnivariatePoly<W> w = s1.is_zero() ? v : upoly_gcd(s1, v);
    if (w.degree() > 0 && w.degree() < d) {
      UnivariatePoly<W> rest = upoly_divexact(v, w);
      split_linear(w, rng, out, attempts, attempt_cap);
      split_linear(rest, rng, out, attempts, attempt_cap);
      return;
    }
  }
}

}  // namespace uniroot_detail

/// All roots of u in F_p, ascending, deterministic for a fixed seed.
/// Multiplicities are not reported: the linear part is squarefree.
template <class W>
std::vector<W> find_roots(const UnivariatePoly<W>& u, u64 seed) {
  if (u.is_zero()) raise(errc::zero_polynomial, "find_roots of zero polynomial");
  const auto& F = u.field();
  std::vector<W> roots;
  if (u.degree() < 1) return roots;
  UnivariatePoly<W> v = linear_part(u);
  if (v.degree() < 1) return roots;
  // strip a root at zero explicitly: x | v
  if (v.coeff(0) == 0) {
    roots.push_back(0);
    std::vector<W> c(v.coeffs().begin() + 1, v.coeffs().end());
    v = UnivariatePoly<W>(F, std::move(c));
  }
  SplitMix64 rng(seed ^ 0x726f6f7473ULL);
  unsigned long long attempts = 0;
  unsigned long long cap = 64ULL * (unsigned long long)std::max(1LL, u.degree());
  uniroot_detail::split_linear(v, rng, roots, attempts, cap);
  std::sort(roots.begin(), roots.end());
  for (W r : roots)
    if (u.evaluate(r) != 0) raise(errc::internal, "root finder returned a non-root");
  return roots;
}

}  // namespace gmv
