#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "gmv/errors.hpp"

namespace gmv {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline int bit_length(u128 v) {
  int n = 0;
  while (v) {
    ++n;
    v >>= 1;
  }
  return n;
}

inline std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  char buf[48];
  int i = 48;
  while (v) {
    buf[--i] = char('0' + int(v % 10));
    v /= 10;
  }
  return std::string(buf + i, buf + 48);
}

inline std::string to_decimal(u64 v) { return to_decimal(u128(v)); }

inline u128 parse_decimal_u128(std::string_view s) {
  if (s.empty()) raise(errc::io_error, "empty integer literal");
  constexpr u128 kMax = ~u128(0);
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') raise(errc::io_error, "bad digit in integer literal '" + std::string(s) + "'");
    unsigned d = unsigned(c - '0');
    if (v > (kMax - d) / 10) raise(errc::io_error, "integer literal out of range");
    v = v * 10 + d;
  }
  return v;
}

// (a*b) mod m for 64-bit m, via 128-bit product.
inline u64 mulmod_u64(u64 a, u64 b, u64 m) { return u64((u128(a) * b) % m); }

// Overflow-free a+b mod m, canonical inputs, any m below the word ceiling.
template <class W>
inline W addmod_w(W a, W b, W m) {
  W gap = W(m - b);
  return a >= gap ? W(a - gap) : W(a + b);
}

template <class W>
inline W submod_w(W a, W b, W m) {
  return a >= b ? W(a - b) : W(a + (m - b));
}

// Shift-and-add product for moduli up to 2^128-1; slow but exact.
inline u128 mulmod_u128(u128 a, u128 b, u128 m) {
  if (a < b) {
    u128 t = a;
    a = b;
    b = t;
  }
  u128 acc = 0;
  a %= m;
  while (b) {
    if (b & 1) acc = addmod_w<u128>(acc, a, m);
    b >>= 1;
    if (b) a = addmod_w<u128>(a, a, m);
  }
  return acc;
}

template <class W>
inline W mulmod_w(W a, W b, W m) {
  if constexpr (sizeof(W) == 8)
    return mulmod_u64(a, b, m);
  else
    return mulmod_u128(a, b, m);
}

template <class W>
inline W powmod_w(W base, u128 e, W m) {
  W acc = W(1 % m);
  W b = W(base % m);
  while (e) {
    if (e & 1) acc = mulmod_w<W>(acc, b, m);
    e >>= 1;
    if (e) b = mulmod_w<W>(b, b, m);
  }
  return acc;
}

}  // namespace gmv
