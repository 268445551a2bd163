#pragma once

#include <cstdint>
#include <string>

#include "gmv/errors.hpp"
#include "gmv/rng.hpp"
#include "gmv/wideint.hpp"

namespace gmv {

namespace detail {

// Miller-Rabin witnesses from a fixed-seed stream; 40 rounds.
template <class W>
inline bool probably_prime(W p) {
  if (p < 2) return false;
  for (W q : {W(2), W(3), W(5), W(7), W(11), W(13), W(17), W(19), W(23), W(29), W(31), W(37)}) {
    if (p == q) return true;
    if (p % q == 0) return false;
  }
  u128 d = u128(p - 1);
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  SplitMix64 rng(0x6d696c6c6572ULL);
  for (int round = 0; round < 40; ++round) {
    u128 raw = (sizeof(W) == 8) ? u128(rng.next()) : rng.next128();
    W a = W(2 + raw % u128(p - 3));
    W x = powmod_w<W>(a, d, p);
    if (x == 1 || x == p - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_w<W>(x, x, p);
      if (x == p - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace detail

/// Arithmetic context for F_p. Immutable after construction; value-level
/// operations work on raw canonical words in [0, p). W selects the backend:
/// u64 covers moduli below 2^64 (with a Barrett shortcut below 2^32), u128
/// covers everything up to 128-bit primes.
template <class W>
class PrimeField {
 public:
  using word = W;

  explicit PrimeField(W p) : p_(p) {
    if (p < 3 || (p & 1) == 0) raise(errc::invalid_modulus, "modulus must be an odd integer >= 3, got " + to_decimal(u128(p)));
    if (!detail::probably_prime<W>(p)) raise(errc::composite_modulus, to_decimal(u128(p)) + " is not prime");
    bits_ = bit_length(u128(p));
    if constexpr (sizeof(W) == 8) {
      if (p < (u64(1) << 32)) barrett_ = u64((u128(1) << 64) / p);
    }
  }

  W modulus() const { return p_; }
  int bits() const { return bits_; }

  W reduce(u128 v) const { return W(v % p_); }

  W add(W a, W b) const { return addmod_w<W>(a, b, p_); }
  W sub(W a, W b) const { return submod_w<W>(a, b, p_); }
  W neg(W a) const { return a == 0 ? 0 : W(p_ - a); }

  W mul(W a, W b) const {
    if constexpr (sizeof(W) == 8) {
      if (barrett_) {
        // p < 2^32 so the product fits in one word; Barrett quotient
        // underestimates by at most 2.
        u64 x = a * b;
        u64 q = u64((u128(x) * barrett_) >> 64);
        u64 r = x - q * p_;
        while (r >= p_) r -= p_;
        return r;
      }
      return u64((u128(a) * b) % p_);
    } else {
      return mulmod_u128(a, b, p_);
    }
  }

  W sqr(W a) const { return mul(a, a); }

  W pow(W base, u128 e) const {
    W acc = 1;
    W b = base;
    while (e) {
      if (e & 1) acc = mul(acc, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return acc;
  }

  W inv(W a) const {
    if (a == 0) raise(errc::division_by_zero, "inverse of zero");
    return pow(a, u128(p_) - 2);
  }

  W div(W a, W b) const { return mul(a, inv(b)); }

  W from_int(long long v) const {
    if (v >= 0) return W(u128(v) % u128(p_));
    u128 mag = u128(-(v + 1)) + 1;
    return neg(W(mag % u128(p_)));
  }

  /// Uniform draw in [0, p) by masked rejection; consumes 64-bit words from
  /// the stream low-to-high. Identical seed gives an identical sequence.
  W sample(SplitMix64& rng) const {
    int words = (bits_ + 63) / 64;
    u64 top_mask = (bits_ % 64 == 0) ? ~u64(0) : ((u64(1) << (bits_ % 64)) - 1);
    for (;;) {
      u128 v = 0;
      for (int i = 0; i < words; ++i) {
        u64 w = rng.next();
        if (i == words - 1) w &= top_mask;
        v |= u128(w) << (64 * i);
      }
      if (v < u128(p_)) return W(v);
    }
  }

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }

 private:
  W p_;
  int bits_;
  u64 barrett_ = 0;  // floor(2^64 / p) when W=u64 and p < 2^32, else 0
};

template <class W>
PrimeField<W> field_new(W p) {
  return PrimeField<W>(p);
}

/// Canonical element carrying its field context. Operations between elements
/// of different fields are rejected. Hot loops use the raw-word kernel on
/// PrimeField directly; this wrapper is the checked value-level surface.
template <class W>
struct FieldElement {
  W v = 0;
  const PrimeField<W>* field = nullptr;

  FieldElement() = default;
  FieldElement(const PrimeField<W>& f, W value) : v(W(value % f.modulus())), field(&f) {}

  static FieldElement wrap(const PrimeField<W>& f, W canonical) {
    FieldElement e;
    e.v = canonical;
    e.field = &f;
    return e;
  }

  std::string str() const { return to_decimal(u128(v)); }
};

namespace detail {
template <class W>
inline const PrimeField<W>& same_field(const FieldElement<W>& a, const FieldElement<W>& b) {
  if (!a.field || !b.field || !(*a.field == *b.field))
    raise(errc::field_mismatch, "operands belong to different prime fields");
  return *a.field;
}
}  // namespace detail

template <class W>
FieldElement<W> operator+(const FieldElement<W>& a, const FieldElement<W>& b) {
  const auto& f = detail::same_field(a, b);
  return FieldElement<W>::wrap(f, f.add(a.v, b.v));
}
template <class W>
FieldElement<W> operator-(const FieldElement<W>& a, const FieldElement<W>& b) {
  const auto& f = detail::same_field(a, b);
  return FieldElement<W>::wrap(f, f.sub(a.v, b.v));
}
template <class W>
FieldElement<W> operator*(const FieldElement<W>& a, const FieldElement<W>& b) {
  const auto& f = detail::same_field(a, b);
  return FieldElement<W>::wrap(f, f.mul(a.v, b.v));
}
template <class W>
FieldElement<W> operator-(const FieldElement<W>& a) {
  return FieldElement<W>::wrap(*a.field, a.field->neg(a.v));
}
template <class W>
FieldElement<W> inv(const FieldElement<W>& a) {
  return FieldElement<W>::wrap(*a.field, a.field->inv(a.v));
}
template <class W>
FieldElement<W> pow(const FieldElement<W>& a, u128 e) {
  return FieldElement<W>::wrap(*a.field, a.field->pow(a.v, e));
}
template <class W>
bool operator==(const FieldElement<W>& a, const FieldElement<W>& b) {
  return a.v == b.v && a.field && b.field && *a.field == *b.field;
}

template <class W>
FieldElement<W> sample_uniform(const PrimeField<W>& f, SplitMix64& rng) {
  return FieldElement<W>::wrap(f, f.sample(rng));
}

}  // namespace gmv
