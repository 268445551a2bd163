#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/field.hpp"

namespace gmv {

/// Degree sentinel for the zero polynomial: a distinguished value far below
/// zero so it can never collide with degree arithmetic (never -1).
inline constexpr long long kZeroPolyDegree = std::numeric_limits<long long>::min() / 2;

namespace upoly_detail {

template <class W>
void trim(std::vector<W>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// r[i+j] += a[i]*b[j], schoolbook
template <class W>
void conv_schoolbook(const PrimeField<W>& F, const W* a, size_t na, const W* b, size_t nb, W* r) {
  for (size_t i = 0; i < na; ++i) {
    W ai = a[i];
    if (ai == 0) continue;
    for (size_t j = 0; j < nb; ++j) {
      if (b[j] == 0) continue;
      r[i + j] = F.add(r[i + j], F.mul(ai, b[j]));
    }
  }
}

inline constexpr size_t kKaratsubaThreshold = 48;

// r (length na+nb-1, pre-zeroed) += a * b
template <class W>
void conv_acc(const PrimeField<W>& F, const W* a, size_t na, const W* b, size_t nb, W* r) {
  if (na == 0 || nb == 0) return;
  if (na < nb) {
    std::swap(a, b);
    std::swap(na, nb);
  }
  if (nb <= kKaratsubaThreshold) {
    conv_schoolbook(F, a, na, b, nb, r);
    return;
  }
  if (na > 2 * nb) {
    // long-by-short: process the long side in blocks of nb
    for (size_t off = 0; off < na; off += nb) {
      size_t len = std::min(nb, na - off);
      conv_acc(F, a + off, len, b, nb, r + off);
    }
    return;
  }
  size_t m = (na + 1) / 2;  // nb > na/2 here, so both split non-trivially
  const W* a0 = a;
  size_t n_a0 = std::min(m, na);
  const W* a1 = a + n_a0;
  size_t n_a1 = na - n_a0;
  const W* b0 = b;
  size_t n_b0 = std::min(m, nb);
  const W* b1 = b + n_b0;
  size_t n_b1 = nb - n_b0;

  std::vector<W> z0(n_a0 + n_b0 - 1, W(0));
  conv_acc(F, a0, n_a0, b0, n_b0, z0.data());
  std::vector<W> z2;
  if (n_a1 && n_b1) {
    z2.assign(n_a1 + n_b1 - 1, W(0));
    conv_acc(F, a1, n_a1, b1, n_b1, z2.data());
  }

  // z1 = (a0+a1)(b0+b1) - z0 - z2
  std::vector<W> sa(std::max(n_a0, n_a1)), sb(std::max(n_b0, n_b1));
  for (size_t i = 0; i < sa.size(); ++i)
    sa[i] = F.add(i < n_a0 ? a0[i] : W(0), i < n_a1 ? a1[i] : W(0));
  for (size_t i = 0; i < sb.size(); ++i)
    sb[i] = F.add(i < n_b0 ? b0[i] : W(0), i < n_b1 ? b1[i] : W(0));
  std::vector<W> z1(sa.size() + sb.size() - 1, W(0));
  conv_acc(F, sa.data(), sa.size(), sb.data(), sb.size(), z1.data());
  for (size_t i = 0; i < z0.size(); ++i) z1[i] = F.sub(z1[i], z0[i]);
  for (size_t i = 0; i < z2.size(); ++i) z1[i] = F.sub(z1[i], z2[i]);

  for (size_t i = 0; i < z0.size(); ++i) r[i] = F.add(r[i], z0[i]);
  for (size_t i = 0; i < z2.size(); ++i) r[2 * m + i] = F.add(r[2 * m + i], z2[i]);
  for (size_t i = 0; i < z1.size(); ++i) r[m + i] = F.add(r[m + i], z1[i]);
}

template <class W>
std::vector<W> conv(const PrimeField<W>& F, const std::vector<W>& a, const std::vector<W>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<W> r(a.size() + b.size() - 1, W(0));
  conv_acc(F, a.data(), a.size(), b.data(), b.size(), r.data());
  return r;
}

}  // namespace upoly_detail

/// Dense univariate polynomial over F_p, ascending coefficients, canonical
/// (no trailing zeros; the zero polynomial stores nothing).
template <class W>
class UnivariatePoly {
 public:
  UnivariatePoly() : field_(nullptr) {}
  explicit UnivariatePoly(const PrimeField<W>& f) : field_(&f) {}
  UnivariatePoly(const PrimeField<W>& f, std::vector<W> coeffs) : field_(&f), c_(std::move(coeffs)) {
    upoly_detail::trim(c_);
  }

  static UnivariatePoly constant(const PrimeField<W>& f, W v) {
    UnivariatePoly r(f);
    if (v % f.modulus()) r.c_.push_back(v % f.modulus());
    return r;
  }
  static UnivariatePoly x(const PrimeField<W>& f) { return UnivariatePoly(f, {W(0), W(1)}); }

  const PrimeField<W>& field() const { return *field_; }
  const PrimeField<W>* field_ptr() const { return field_; }
  bool is_zero() const { return c_.empty(); }
  long long degree() const { return c_.empty() ? kZeroPolyDegree : (long long)c_.size() - 1; }
  const std::vector<W>& coeffs() const { return c_; }
  W coeff(size_t i) const { return i < c_.size() ? c_[i] : W(0); }
  W lead() const { return c_.empty() ? W(0) : c_.back(); }

  W evaluate(W x) const {
    W acc = 0;
    for (size_t i = c_.size(); i-- > 0;) acc = field_->add(field_->mul(acc, x), c_[i]);
    return acc;
  }

  bool operator==(const UnivariatePoly& o) const { return c_ == o.c_; }

  std::vector<W>& raw() { return c_; }
  void renormalize() { upoly_detail::trim(c_); }

 private:
  const PrimeField<W>* field_;
  std::vector<W> c_;
};

namespace upoly_detail {
template <class W>
const PrimeField<W>& same_field(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) {
  if (!a.field_ptr() || !b.field_ptr() || !(a.field() == b.field()))
    raise(errc::field_mismatch, "univariate operands over different fields");
  return a.field();
}
}  // namespace upoly_detail

template <class W>
UnivariatePoly<W> upoly_add(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) {
  const auto& F = upoly_detail::same_field(a, b);
  std::vector<W> r(std::max(a.coeffs().size(), b.coeffs().size()), W(0));
  for (size_t i = 0; i < r.size(); ++i) r[i] = F.add(a.coeff(i), b.coeff(i));
  return UnivariatePoly<W>(F, std::move(r));
}

template <class W>
UnivariatePoly<W> upoly_sub(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) {
  const auto& F = upoly_detail::same_field(a, b);
  std::vector<W> r(std::max(a.coeffs().size(), b.coeffs().size()), W(0));
  for (size_t i = 0; i < r.size(); ++i) r[i] = F.sub(a.coeff(i), b.coeff(i));
  return UnivariatePoly<W>(F, std::move(r));
}

template <class W>
UnivariatePoly<W> upoly_scale(const UnivariatePoly<W>& a, W s) {
  const auto& F = a.field();
  std::vector<W> r(a.coeffs().size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = F.mul(a.coeffs()[i], s);
  return UnivariatePoly<W>(F, std::move(r));
}

template <class W>
UnivariatePoly<W> upoly_mul(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) {
  const auto& F = upoly_detail::same_field(a, b);
  return UnivariatePoly<W>(F, upoly_detail::conv(F, a.coeffs(), b.coeffs()));
}

template <class W>
UnivariatePoly<W> upoly_monic(const UnivariatePoly<W>& a) {
  if (a.is_zero()) return a;
  return upoly_scale(a, a.field().inv(a.lead()));
}

namespace upoly_detail {

// Schoolbook in-place remainder; quotient discarded unless requested.
template <class W>
void divrem_schoolbook(const PrimeField<W>& F, std::vector<W>& r, const std::vector<W>& m,
                       std::vector<W>* quo) {
  W lead_inv = F.inv(m.back());
  size_t dm = m.size() - 1;
  if (quo) quo->assign(r.size() > dm ? r.size() - dm : 0, W(0));
  while (r.size() > dm) {
    W q = F.mul(r.back(), lead_inv);
    size_t shift = r.size() - 1 - dm;
    if (q != 0) {
      if (quo) (*quo)[shift] = q;
      for (size_t i = 0; i < dm; ++i) r[shift + i] = F.sub(r[shift + i], F.mul(q, m[i]));
    }
    r.pop_back();
    while (!r.empty() && r.back() == 0) r.pop_back();
    if (r.size() <= dm) break;
  }
}

}  // namespace upoly_detail

/// Reduction context for a fixed modulus: precomputes the reversed-modulus
/// power-series inverse once so each remainder costs two multiplications.
template <class W>
class UModCtx {
 public:
  explicit UModCtx(const UnivariatePoly<W>& m) : m_(m) {
    if (m.is_zero() || m.degree() < 1) raise(errc::zero_modulus, "modulus must have degree >= 1");
    const auto& F = m.field();
    dm_ = size_t(m.degree());
    lead_inv_ = F.inv(m.lead());
    if (dm_ >= kNewtonThreshold) {
      std::vector<W> rev(m.coeffs().rbegin(), m.coeffs().rend());
      inv_rev_ = series_inverse(F, rev, dm_);
    }
  }

  const UnivariatePoly<W>& modulus() const { return m_; }

  UnivariatePoly<W> rem(const UnivariatePoly<W>& a) const {
    const auto& F = m_.field();
    if (a.is_zero() || size_t(a.degree()) < dm_) return a;
    size_t da = size_t(a.degree());
    size_t qn = da - dm_ + 1;
    if (inv_rev_.empty() || qn > inv_rev_.size()) {
      std::vector<W> r = a.coeffs();
      upoly_detail::divrem_schoolbook(F, r, m_.coeffs(), (std::vector<W>*)nullptr);
      return UnivariatePoly<W>(F, std::move(r));
    }
    // Newton division: q = rev(rev(a)*inv mod x^(da-dm+1))
    std::vector<W> ra(a.coeffs().rbegin(), a.coeffs().rend());
    ra.resize(std::min(ra.size(), qn));
    std::vector<W> qi = inv_rev_;
    qi.resize(std::min(qi.size(), qn));
    std::vector<W> qrev = upoly_detail::conv(F, ra, qi);
    qrev.resize(qn, W(0));
    std::vector<W> q(qrev.rbegin(), qrev.rend());
    // r = a - q*m, keep only the low dm_ coefficients
    std::vector<W> qm = upoly_detail::conv(F, q, m_.coeffs());
    std::vector<W> r(dm_, W(0));
    for (size_t i = 0; i < dm_; ++i) r[i] = F.sub(a.coeff(i), i < qm.size() ? qm[i] : W(0));
    return UnivariatePoly<W>(F, std::move(r));
  }

  UnivariatePoly<W> mulmod(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) const {
    return rem(upoly_mul(a, b));
  }

  UnivariatePoly<W> powmod(const UnivariatePoly<W>& base, u128 e) const {
    const auto& F = m_.field();
    UnivariatePoly<W> acc = rem(UnivariatePoly<W>::constant(F, 1));
    UnivariatePoly<W> b = rem(base);
    while (e) {
      if (e & 1) acc = mulmod(acc, b);
      e >>= 1;
      if (e) b = mulmod(b, b);
    }
    return acc;
  }

 private:
  static constexpr size_t kNewtonThreshold = 384;

  // inverse of f (f[0] != 0 required by construction from a trimmed reversal)
  static std::vector<W> series_inverse(const PrimeField<W>& F, const std::vector<W>& f, size_t k) {
    std::vector<W> g{F.inv(f[0])};
    size_t len = 1;
    while (len < k) {
      len = std::min(2 * len, k);
      std::vector<W> ft(f.begin(), f.begin() + std::min(f.size(), len));
      std::vector<W> fg = upoly_detail::conv(F, ft, g);
      fg.resize(len, W(0));
      // g <- g*(2 - f*g) mod x^len
      for (auto& v : fg) v = F.neg(v);
      fg[0] = F.add(fg[0], W(2 % F.modulus()));
      std::vector<W> ng = upoly_detail::conv(F, g, fg);
      ng.resize(len, W(0));
      g = std::move(ng);
    }
    return g;
  }

  UnivariatePoly<W> m_;
  size_t dm_ = 0;
  W lead_inv_ = 0;
  std::vector<W> inv_rev_;
};

template <class W>
UnivariatePoly<W> upoly_mulmod(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b,
                               const UnivariatePoly<W>& m) {
  if (m.is_zero() || m.degree() < 1) raise(errc::zero_modulus, "mulmod modulus must have degree >= 1");
  const auto& F = upoly_detail::same_field(a, b);
  std::vector<W> r = upoly_detail::conv(F, a.coeffs(), b.coeffs());
  if (r.size() > size_t(m.degree()))
    upoly_detail::divrem_schoolbook(F, r, m.coeffs(), (std::vector<W>*)nullptr);
  return UnivariatePoly<W>(F, std::move(r));
}

template <class W>
UnivariatePoly<W> upoly_divexact(const UnivariatePoly<W>& a, const UnivariatePoly<W>& b) {
  const auto& F = upoly_detail::same_field(a, b);
  if (b.is_zero()) raise(errc::division_by_zero, "division by zero polynomial");
  std::vector<W> r = a.coeffs();
  std::vector<W> q;
  upoly_detail::divrem_schoolbook(F, r, b.coeffs(), &q);
  if (!r.empty()) raise(errc::internal, "upoly_divexact: nonzero remainder");
  return UnivariatePoly<W>(F, std::move(q));
}

template <class W>
UnivariatePoly<W> upoly_gcd(const UnivariatePoly<W>& a0, const UnivariatePoly<W>& b0) {
  if (a0.is_zero() && b0.is_zero()) raise(errc::both_zero, "gcd of two zero polynomials");
  const auto& F = a0.is_zero() ? b0.field() : a0.field();
  if (!a0.is_zero() && !b0.is_zero()) upoly_detail::same_field(a0, b0);
  std::vector<W> a = a0.coeffs(), b = b0.coeffs();
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    upoly_detail::divrem_schoolbook(F, a, b, (std::vector<W>*)nullptr);
    std::swap(a, b);
  }
  return upoly_monic(UnivariatePoly<W>(F, std::move(a)));
}

}  // namespace gmv
