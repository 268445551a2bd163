#pragma once

#include <vector>

#include "gmv/resultant.hpp"
#include "gmv/system.hpp"

namespace gmv {

/// The published toy instance (p = 1523, n = 7): the two polynomial pairs
/// (f5, f6) and (f3, f4) plus the two pairwise resultants printed for it.
///
/// The printed resultants are already reduced modulo x1^3 = r(x1, x7), but
/// the instance's first four constants (and hence r itself) were never
/// published. r is recoverable: the raw sparse resultant of the first pair
/// has an x1^3 slice s(x4, x6), and printed - raw_low = s * r, so exact
/// division returns r. recover_rule() performs that division and
/// cross-validates the result bit-exactly on the second pair.
struct ExampleCase {
  using P = MultiPoly<u64>;

  const PrimeField<u64>& field;
  P f3, f4, f5, f6;
  P res_f6_f5;  // printed res(f6, f5; x5)
  P res_f4_f3;  // printed res(f4, f3; x3)

  static const PrimeField<u64>& field_1523() {
    static PrimeField<u64> F(1523);
    return F;
  }

  static const ExampleCase& get() {
    static ExampleCase c = build();
    return c;
  }

  /// a_i, b_i read off the printed pairs (e.g. f5's x1-terms give a5 = 244).
  static constexpr u64 kA3 = 352, kB3 = 838;
  static constexpr u64 kA4 = 235, kB4 = 114;
  static constexpr u64 kA5 = 244, kB5 = 67;
  static constexpr u64 kA6 = 1431, kB6 = 859;

  ReductionRule<u64> recover_rule() const;

 private:
  static ExampleCase build();
};

namespace example_detail {

struct TermSpec {
  u64 c;
  int e1, ea, eb, e7;  // exponents of x1, of the two middle variables, of x7
};

inline MultiPoly<u64> from_specs(const PrimeField<u64>& F, VarId va, VarId vb,
                                 const std::vector<TermSpec>& specs) {
  std::vector<std::pair<Monomial, u64>> ts;
  ts.reserve(specs.size());
  for (auto& s : specs) {
    Monomial m;
    if (s.e1) m.e.push_back({1, u32(s.e1)});
    if (s.ea) m.e.push_back({va, u32(s.ea)});
    if (s.eb) m.e.push_back({vb, u32(s.eb)});
    if (s.e7) m.e.push_back({7, u32(s.e7)});
    std::sort(m.e.begin(), m.e.end());
    ts.push_back({m, s.c});
  }
  return MultiPoly<u64>::from_terms(F, ts);
}

}  // namespace example_detail

inline ExampleCase ExampleCase::build() {
  using example_detail::from_specs;
  const auto& F = field_1523();
  ExampleCase c{F, P(F), P(F), P(F), P(F), P(F), P(F)};

  // pairs as printed; specs carry (coeff, e1, e_left, e_right, e7)
  c.f5 = from_specs(F, 4, 5, {{1279, 1, 2, 0, 0}, {488, 1, 1, 1, 0}, {1, 0, 2, 1, 0},
                              {1456, 0, 2, 0, 1}, {134, 0, 1, 1, 1}, {244, 1, 0, 0, 0},
                              {2, 0, 1, 0, 0}, {1522, 0, 0, 1, 0}, {67, 0, 0, 0, 1}});
  c.f6 = from_specs(F, 5, 6, {{92, 1, 2, 0, 0}, {1339, 1, 1, 1, 0}, {1, 0, 2, 1, 0},
                              {664, 0, 2, 0, 1}, {195, 0, 1, 1, 1}, {1431, 1, 0, 0, 0},
                              {2, 0, 1, 0, 0}, {1522, 0, 0, 1, 0}, {859, 0, 0, 0, 1}});
  c.f3 = from_specs(F, 2, 3, {{1171, 1, 2, 0, 0}, {704, 1, 1, 1, 0}, {1, 0, 2, 1, 0},
                              {685, 0, 2, 0, 1}, {153, 0, 1, 1, 1}, {352, 1, 0, 0, 0},
                              {2, 0, 1, 0, 0}, {1522, 0, 0, 1, 0}, {838, 0, 0, 0, 1}});
  c.f4 = from_specs(F, 3, 4, {{1288, 1, 2, 0, 0}, {470, 1, 1, 1, 0}, {1, 0, 2, 1, 0},
                              {1409, 0, 2, 0, 1}, {228, 0, 1, 1, 1}, {235, 1, 0, 0, 0},
                              {2, 0, 1, 0, 0}, {1522, 0, 0, 1, 0}, {114, 0, 0, 0, 1}});

  // res(f6, f5; x5), 45 printed terms, variables (x1, x4, x6, x7)
  c.res_f6_f5 = from_specs(
      F, 4, 6,
      {{933, 2, 4, 1, 0},  {388, 2, 4, 0, 1},  {1494, 2, 3, 1, 1}, {936, 1, 4, 1, 1},
       {431, 1, 4, 0, 2},  {1322, 1, 3, 1, 2}, {801, 0, 4, 1, 2},  {49, 0, 4, 0, 3},
       {1327, 0, 3, 1, 3}, {686, 2, 3, 0, 0},  {646, 1, 4, 0, 0},  {494, 2, 2, 1, 0},
       {462, 1, 3, 1, 0},  {1522, 0, 4, 1, 0}, {718, 2, 2, 0, 1},  {698, 1, 3, 0, 1},
       {679, 0, 4, 0, 1},  {29, 2, 1, 1, 1},   {476, 1, 2, 1, 1},  {330, 0, 3, 1, 1},
       {460, 1, 2, 0, 2},  {158, 0, 3, 0, 2},  {201, 1, 1, 1, 2},  {1286, 0, 2, 1, 2},
       {1229, 0, 2, 0, 3}, {196, 0, 1, 1, 3},  {837, 2, 1, 0, 0},  {693, 1, 2, 0, 0},
       {1519, 0, 3, 0, 0}, {933, 2, 0, 1, 0},  {1061, 1, 1, 1, 0}, {6, 0, 2, 1, 0},
       {388, 2, 0, 0, 1},  {825, 1, 1, 0, 1},  {495, 0, 2, 0, 1},  {936, 1, 0, 1, 1},
       {1193, 0, 1, 1, 1}, {431, 1, 0, 0, 2},  {1365, 0, 1, 0, 2}, {801, 0, 0, 1, 2},
       {49, 0, 0, 0, 3},   {646, 1, 0, 0, 0},  {4, 0, 1, 0, 0},    {1522, 0, 0, 1, 0},
       {679, 0, 0, 0, 1}});

  // res(f4, f3; x3), 45 printed terms, variables (x1, x2, x4, x7)
  c.res_f4_f3 = from_specs(
      F, 2, 4,
      {{1497, 2, 4, 1, 0}, {1003, 2, 4, 0, 1}, {557, 2, 3, 1, 1},  {1014, 1, 4, 1, 1},
       {365, 1, 4, 0, 2},  {63, 1, 3, 1, 2},   {830, 0, 4, 1, 2},  {1256, 0, 4, 0, 3},
       {1068, 0, 3, 1, 3}, {1419, 2, 3, 0, 0}, {931, 1, 4, 0, 0},  {156, 2, 2, 1, 0},
       {845, 1, 3, 1, 0},  {1522, 0, 4, 1, 0}, {74, 2, 2, 0, 1},   {1010, 1, 3, 0, 1},
       {9, 0, 4, 0, 1},    {966, 2, 1, 1, 1},  {8, 1, 2, 1, 1},    {1487, 0, 3, 1, 1},
       {856, 1, 2, 0, 2},  {274, 0, 3, 0, 2},  {1460, 1, 1, 1, 2}, {1112, 0, 2, 1, 2},
       {79, 0, 2, 0, 3},   {455, 0, 1, 1, 3},  {104, 2, 1, 0, 0},  {506, 1, 2, 0, 0},
       {1519, 0, 3, 0, 0}, {1497, 2, 0, 1, 0}, {678, 1, 1, 1, 0},  {6, 0, 2, 1, 0},
       {1003, 2, 0, 0, 1}, {513, 1, 1, 0, 1},  {1469, 0, 2, 0, 1}, {1014, 1, 0, 1, 1},
       {36, 0, 1, 1, 1},   {365, 1, 0, 0, 2},  {1249, 0, 1, 0, 2}, {830, 0, 0, 1, 2},
       {1256, 0, 0, 0, 3}, {931, 1, 0, 0, 0},  {4, 0, 1, 0, 0},    {1522, 0, 0, 1, 0},
       {9, 0, 0, 0, 1}});
  return c;
}

inline ReductionRule<u64> ExampleCase::recover_rule() const {
  // raw = unreduced res(f6, f5; x5) = sum (-1)^j alpha_j b0^j b1^(2-j)
  MultiPoly<u64> raw = sparse_resultant(f5, f6, 5);
  // split raw = low + x1^3 * s
  auto parts = coefficients_in(raw, 1);
  if (parts.size() != 4) raise(errc::internal, "raw pair-1 resultant should be cubic in x1");
  MultiPoly<u64> x1p = MultiPoly<u64>::variable(field, 1);
  MultiPoly<u64> low(field);
  for (int e = 0; e <= 2; ++e)
    low = poly_add(low, poly_mul(parts[size_t(e)], poly_pow(x1p, u64(e))));
  const MultiPoly<u64>& s = parts[3];
  MultiPoly<u64> diff = poly_sub(res_f6_f5, low);
  MultiPoly<u64> r = poly_divexact(diff, s);
  ReductionRule<u64> rule(r, 1, 7);

  // cross-validate on the second pair
  MultiPoly<u64> red1 = reduce_x1(raw, rule);
  if (red1 != res_f6_f5) raise(errc::internal, "recovered rule does not reproduce pair 1");
  MultiPoly<u64> red2 = reduce_x1(sparse_resultant(f3, f4, 3), rule);
  if (red2 != res_f4_f3) raise(errc::internal, "recovered rule does not reproduce pair 2");
  return rule;
}

}  // namespace gmv
