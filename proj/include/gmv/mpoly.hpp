#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/field.hpp"
#include "gmv/upoly.hpp"
#include "gmv/util.hpp"

namespace gmv {

using VarId = int;  // names the variable x_<index>

/// Multiplication instrumentation: counts polynomial products executed while
/// a counter is installed on the current thread.
struct MulCounter {
  unsigned long long count = 0;
  std::string label;
};

namespace mpoly_detail {
inline thread_local MulCounter* tls_counter = nullptr;
}

class ScopedMulCounter {
 public:
  explicit ScopedMulCounter(MulCounter* c) : prev_(mpoly_detail::tls_counter) {
    mpoly_detail::tls_counter = c;
  }
  ~ScopedMulCounter() { mpoly_detail::tls_counter = prev_; }
  ScopedMulCounter(const ScopedMulCounter&) = delete;
  ScopedMulCounter& operator=(const ScopedMulCounter&) = delete;

 private:
  MulCounter* prev_;
};

/// Exponent map of a single term; absent variable means exponent zero.
struct Monomial {
  std::vector<std::pair<VarId, u32>> e;  // sorted by VarId, exponents > 0

  Monomial() = default;
  Monomial(std::initializer_list<std::pair<VarId, u32>> init) {
    for (auto& p : init)
      if (p.second) e.push_back(p);
    std::sort(e.begin(), e.end());
  }
  long long total() const {
    long long t = 0;
    for (auto& p : e) t += p.second;
    return t;
  }
};

namespace mpoly_detail {

constexpr int kMaxVars = 6;
constexpr int kExpBits = 20;
constexpr u128 kExpMask = (u128(1) << kExpBits) - 1;
constexpr u64 kExpLimit = (u64(1) << kExpBits) - 1;
constexpr u128 kEmptyKey = ~u128(0);  // top 8 bits set: unreachable for packed keys

inline u64 key_slot(u128 key, int slot) { return u64((key >> (kExpBits * slot)) & kExpMask); }

inline u128 slot_value(u64 exp, int slot) { return u128(exp) << (kExpBits * slot); }

inline u64 key_total(u128 key, int nvars) {
  u64 t = 0;
  for (int s = 0; s < nvars; ++s) t += key_slot(key, s);
  return t;
}

// canonical term order: graded (total degree) descending, ties by packed key
// descending (higher VarId sits in higher bits, so ties resolve on the
// largest variable first)
struct KeyGrlexDesc {
  int nvars;
  bool operator()(u128 a, u128 b) const {
    u64 ta = key_total(a, nvars), tb = key_total(b, nvars);
    if (ta != tb) return ta > tb;
    return a > b;
  }
};

inline u64 hash_key(u128 k) {
  u64 lo = u64(k), hi = u64(k >> 64);
  u64 z = lo ^ (hi * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Open-addressing accumulator keyed by packed exponents.
template <class W>
class AccumMap {
 public:
  explicit AccumMap(const PrimeField<W>& F, size_t expect = 16) : F_(&F) {
    size_t cap = 16;
    while (cap < expect * 2) cap <<= 1;
    keys_.assign(cap, kEmptyKey);
    vals_.resize(cap);
    mask_ = cap - 1;
  }

  void add(u128 key, W val) {
    if (val == 0) return;
    size_t i = hash_key(key) & mask_;
    for (;;) {
      if (keys_[i] == key) {
        vals_[i] = F_->add(vals_[i], val);
        return;
      }
      if (keys_[i] == kEmptyKey) {
        keys_[i] = key;
        vals_[i] = val;
        if (++size_ * 5 > mask_ * 3) grow();
        return;
      }
      i = (i + 1) & mask_;
    }
  }

  size_t size() const { return size_; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (size_t i = 0; i <= mask_; ++i)
      if (keys_[i] != kEmptyKey && vals_[i] != 0) fn(keys_[i], vals_[i]);
  }

 private:
  void grow() {
    std::vector<u128> ok = std::move(keys_);
    std::vector<W> ov = std::move(vals_);
    size_t cap = (mask_ + 1) * 2;
    keys_.assign(cap, kEmptyKey);
    vals_.assign(cap, W(0));
    mask_ = cap - 1;
    size_ = 0;
    for (size_t i = 0; i < ok.size(); ++i) {
      if (ok[i] == kEmptyKey || ov[i] == 0) continue;
      size_t j = hash_key(ok[i]) & mask_;
      while (keys_[j] != kEmptyKey) j = (j + 1) & mask_;
      keys_[j] = ok[i];
      vals_[j] = ov[i];
      ++size_;
    }
  }

  const PrimeField<W>* F_;
  std::vector<u128> keys_;
  std::vector<W> vals_;
  size_t mask_ = 0, size_ = 0;
};

}  // namespace mpoly_detail

/// Sparse multivariate polynomial with a small explicit variable support
/// (at most 6 active variables; the pipeline never needs more than 5).
/// Terms are stored canonically: graded-lex descending, zero coefficients
/// pruned, variable list equal to the exact support. Immutable in practice:
/// all arithmetic returns new values.
template <class W>
class MultiPoly {
 public:
  struct Term {
    u128 key;
    W coeff;
  };

  MultiPoly() : field_(nullptr) {}
  explicit MultiPoly(const PrimeField<W>& f) : field_(&f) {}

  static MultiPoly constant(const PrimeField<W>& f, W v) {
    MultiPoly r(f);
    v = W(v % f.modulus());
    if (v) r.terms_.push_back({0, v});
    return r;
  }

  static MultiPoly monomial(const PrimeField<W>& f, W coeff, const Monomial& m) {
    return from_terms(f, {{m, coeff}});
  }

  static MultiPoly variable(const PrimeField<W>& f, VarId v) {
    return monomial(f, 1, Monomial{{v, 1}});
  }

  static MultiPoly from_terms(const PrimeField<W>& f,
                              const std::vector<std::pair<Monomial, W>>& ts) {
    std::vector<VarId> vars;
    for (auto& [m, c] : ts)
      for (auto& [v, e] : m.e) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (vars.size() > mpoly_detail::kMaxVars)
      raise(errc::internal, "more than 6 active variables in one polynomial");
    mpoly_detail::AccumMap<W> acc(f, ts.size());
    for (auto& [m, c] : ts) {
      u128 key = 0;
      for (auto& [v, e] : m.e) {
        if (e > mpoly_detail::kExpLimit) raise(errc::exponent_overflow, "exponent exceeds 2^20-1");
        int slot = int(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
        key |= mpoly_detail::slot_value(e, slot);
      }
      acc.add(key, W(c % f.modulus()));
    }
    return from_accum(f, vars, acc);
  }

  const PrimeField<W>& field() const { return *field_; }
  const PrimeField<W>* field_ptr() const { return field_; }
  const std::vector<VarId>& vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  int slot_of(VarId v) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) return -1;
    return int(it - vars_.begin());
  }

  /// Max exponent of v; kZeroPolyDegree for the zero polynomial.
  long long degree_in(VarId v) const {
    if (terms_.empty()) return kZeroPolyDegree;
    int s = slot_of(v);
    if (s < 0) return 0;
    u64 d = 0;
    for (auto& t : terms_) d = std::max(d, mpoly_detail::key_slot(t.key, s));
    return (long long)d;
  }

  long long total_degree() const {
    if (terms_.empty()) return kZeroPolyDegree;
    // canonical order is graded: the first term carries the total degree
    return (long long)mpoly_detail::key_total(terms_.front().key, int(vars_.size()));
  }

  /// Max over terms of exp(va)+exp(vb).
  long long joint_degree(VarId va, VarId vb) const {
    if (terms_.empty()) return kZeroPolyDegree;
    int sa = slot_of(va), sb = slot_of(vb);
    u64 best = 0;
    for (auto& t : terms_) {
      u64 j = (sa >= 0 ? mpoly_detail::key_slot(t.key, sa) : 0) +
              (sb >= 0 ? mpoly_detail::key_slot(t.key, sb) : 0);
      best = std::max(best, j);
    }
    return (long long)best;
  }

  Monomial monomial_of(const Term& t) const {
    Monomial m;
    for (size_t s = 0; s < vars_.size(); ++s) {
      u64 e = mpoly_detail::key_slot(t.key, int(s));
      if (e) m.e.push_back({vars_[s], u32(e)});
    }
    return m;
  }

  W coeff_of(const Monomial& m) const {
    u128 key = 0;
    for (auto& [v, e] : m.e) {
      int s = slot_of(v);
      if (s < 0) return 0;
      key |= mpoly_detail::slot_value(e, s);
    }
    for (auto& t : terms_)
      if (t.key == key) return t.coeff;
    return 0;
  }

  bool operator==(const MultiPoly& o) const {
    return vars_ == o.vars_ && terms_.size() == o.terms_.size() &&
           std::equal(terms_.begin(), terms_.end(), o.terms_.begin(),
                      [](const Term& a, const Term& b) { return a.key == b.key && a.coeff == b.coeff; });
  }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }

  // -- internal plumbing (used by the arithmetic kernels below) --
  static MultiPoly from_accum(const PrimeField<W>& f, const std::vector<VarId>& vars,
                              const mpoly_detail::AccumMap<W>& acc) {
    MultiPoly r(f);
    std::vector<Term> ts;
    ts.reserve(acc.size());
    acc.for_each([&](u128 k, W v) { ts.push_back({k, v}); });
    r.adopt(vars, std::move(ts));
    return r;
  }

  void adopt(const std::vector<VarId>& vars, std::vector<Term>&& ts) {
    vars_ = vars;
    terms_ = std::move(ts);
    prune_vars();
    std::sort(terms_.begin(), terms_.end(),
              [cmp = mpoly_detail::KeyGrlexDesc{int(vars_.size())}](const Term& a, const Term& b) {
                return cmp(a.key, b.key);
              });
  }

 private:
  // canonical support: drop variables whose exponent is zero everywhere
  void prune_vars() {
    if (vars_.empty()) return;
    u128 used = 0;
    for (auto& t : terms_) used |= t.key;
    std::vector<int> keep;
    for (size_t s = 0; s < vars_.size(); ++s)
      if (mpoly_detail::key_slot(used, int(s)) != 0) keep.push_back(int(s));
    if (keep.size() == vars_.size()) return;
    std::vector<VarId> nv;
    nv.reserve(keep.size());
    for (int s : keep) nv.push_back(vars_[size_t(s)]);
    for (auto& t : terms_) {
      u128 nk = 0;
      for (size_t j = 0; j < keep.size(); ++j)
        nk |= mpoly_detail::slot_value(mpoly_detail::key_slot(t.key, keep[j]), int(j));
      t.key = nk;
    }
    vars_ = std::move(nv);
  }

  const PrimeField<W>* field_;
  std::vector<VarId> vars_;
  std::vector<Term> terms_;
};

namespace mpoly_detail {

template <class W>
const PrimeField<W>& same_field(const MultiPoly<W>& a, const MultiPoly<W>& b) {
  if (!a.field_ptr() || !b.field_ptr() || !(a.field() == b.field()))
    raise(errc::field_mismatch, "polynomial operands over different fields");
  return a.field();
}

inline std::vector<VarId> union_vars(const std::vector<VarId>& a, const std::vector<VarId>& b) {
  std::vector<VarId> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  if (u.size() > kMaxVars) raise(errc::internal, "more than 6 active variables in one polynomial");
  return u;
}

// keys of `p` repacked into the slot layout of `target` (target ⊇ vars(p))
template <class W>
std::vector<typename MultiPoly<W>::Term> remap_terms(const MultiPoly<W>& p,
                                                     const std::vector<VarId>& target) {
  std::vector<typename MultiPoly<W>::Term> out(p.terms().begin(), p.terms().end());
  if (p.vars() == target) return out;
  int shift[kMaxVars] = {0};
  for (size_t s = 0; s < p.vars().size(); ++s) {
    auto it = std::lower_bound(target.begin(), target.end(), p.vars()[s]);
    shift[s] = int(it - target.begin());
  }
  for (auto& t : out) {
    u128 nk = 0;
    for (size_t s = 0; s < p.vars().size(); ++s)
      nk |= slot_value(key_slot(t.key, int(s)), shift[s]);
    t.key = nk;
  }
  return out;
}

}  // namespace mpoly_detail

template <class W>
MultiPoly<W> poly_neg(const MultiPoly<W>& a) {
  MultiPoly<W> r = a;
  std::vector<typename MultiPoly<W>::Term> ts(a.terms());
  for (auto& t : ts) t.coeff = a.field().neg(t.coeff);
  r.adopt(a.vars(), std::move(ts));
  return r;
}

template <class W>
MultiPoly<W> poly_scale(const MultiPoly<W>& a, W s) {
  std::vector<typename MultiPoly<W>::Term> ts;
  ts.reserve(a.terms().size());
  for (auto& t : a.terms()) {
    W c = a.field().mul(t.coeff, s);
    if (c) ts.push_back({t.key, c});
  }
  MultiPoly<W> r(a.field());
  r.adopt(a.vars(), std::move(ts));
  return r;
}

template <class W>
MultiPoly<W> poly_add(const MultiPoly<W>& a, const MultiPoly<W>& b) {
  const auto& F = mpoly_detail::same_field(a, b);
  auto vars = mpoly_detail::union_vars(a.vars(), b.vars());
  auto ta = mpoly_detail::remap_terms(a, vars);
  auto tb = mpoly_detail::remap_terms(b, vars);
  // both remain sorted under the target layout; merge
  mpoly_detail::KeyGrlexDesc cmp{int(vars.size())};
  std::vector<typename MultiPoly<W>::Term> out;
  out.reserve(ta.size() + tb.size());
  size_t i = 0, j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && cmp(ta[i].key, tb[j].key))) {
      out.push_back(ta[i++]);
    } else if (i == ta.size() || cmp(tb[j].key, ta[i].key)) {
      out.push_back(tb[j++]);
    } else {
      W c = F.add(ta[i].coeff, tb[j].coeff);
      if (c) out.push_back({ta[i].key, c});
      ++i;
      ++j;
    }
  }
  MultiPoly<W> r(F);
  r.adopt(vars, std::move(out));
  return r;
}

template <class W>
MultiPoly<W> poly_sub(const MultiPoly<W>& a, const MultiPoly<W>& b) {
  return poly_add(a, poly_neg(b));
}

namespace mpoly_detail {

// Dense fast path: at most one "wide" variable; all narrow variables are
// flattened into a mixed-radix slice index and slice pairs are convolved
// with the univariate kernel. Only a win when both operands are populated.
template <class W>
struct DensePlan {
  bool usable = false;
  int wide_slot = -1;  // slot in union vars, -1 when no wide variable
  long long wide_bound = 0;
  size_t small_space = 1;
  u64 radix[kMaxVars] = {0};
  double est_cost = 0;
};

template <class W>
DensePlan<W> plan_dense(const std::vector<VarId>& vars, const std::vector<long long>& bound,
                        size_t terms_a, size_t terms_b) {
  DensePlan<W> plan;
  constexpr long long kWideDeg = 16;
  constexpr size_t kMaxSmallSpace = 48;
  if (terms_a < 12 || terms_b < 12) return plan;
  int wide = -1;
  size_t space = 1;
  for (size_t s = 0; s < vars.size(); ++s) {
    if (bound[s] > kWideDeg) {
      if (wide >= 0) return plan;  // two wide variables: stay sparse
      wide = int(s);
    } else {
      space *= size_t(bound[s] + 1);
      if (space > kMaxSmallSpace) return plan;
    }
  }
  plan.usable = true;
  plan.wide_slot = wide;
  plan.wide_bound = wide >= 0 ? bound[size_t(wide)] : 0;
  plan.small_space = space;
  u64 stride = 1;
  for (size_t s = 0; s < vars.size(); ++s) {
    if (int(s) == wide) continue;
    plan.radix[s] = stride;
    stride *= u64(bound[s] + 1);
  }
  return plan;
}

template <class W>
std::vector<std::vector<W>> dense_slices(const MultiPoly<W>& p, const std::vector<VarId>& vars,
                                         const DensePlan<W>& plan) {
  std::vector<std::vector<W>> slices(plan.small_space);
  auto ts = remap_terms(p, vars);
  for (auto& t : ts) {
    u64 idx = 0, wexp = 0;
    for (size_t s = 0; s < vars.size(); ++s) {
      u64 e = key_slot(t.key, int(s));
      if (int(s) == plan.wide_slot)
        wexp = e;
      else
        idx += e * plan.radix[s];
    }
    auto& sl = slices[idx];
    if (sl.size() <= wexp) sl.resize(wexp + 1, W(0));
    sl[wexp] = t.coeff;  // keys are unique, no accumulation needed
  }
  return slices;
}

}  // namespace mpoly_detail

template <class W>
MultiPoly<W> poly_mul(const MultiPoly<W>& a, const MultiPoly<W>& b) {
  const auto& F = mpoly_detail::same_field(a, b);
  if (auto* c = mpoly_detail::tls_counter) ++c->count;
  if (a.is_zero() || b.is_zero()) return MultiPoly<W>(F);
  auto vars = mpoly_detail::union_vars(a.vars(), b.vars());

  std::vector<long long> bound(vars.size());
  for (size_t s = 0; s < vars.size(); ++s) {
    long long da = std::max(0LL, a.degree_in(vars[s]));
    long long db = std::max(0LL, b.degree_in(vars[s]));
    bound[s] = da + db;
    if (bound[s] >= (long long)mpoly_detail::kExpLimit)
      raise(errc::exponent_overflow, "product exponent exceeds 2^20-1 in x" + std::to_string(vars[s]));
  }

  auto plan = mpoly_detail::plan_dense<W>(vars, bound, a.term_count(), b.term_count());
  if (plan.usable) {
    // units: one dense mult-add; a hash accumulate costs roughly 8 of those
    double est_sparse = double(a.term_count()) * double(b.term_count()) * 8.0;
    double la = plan.wide_slot >= 0 ? double(std::max(0LL, a.degree_in(vars[size_t(plan.wide_slot)])) + 1) : 1;
    double lb = plan.wide_slot >= 0 ? double(std::max(0LL, b.degree_in(vars[size_t(plan.wide_slot)])) + 1) : 1;
    double lo = std::min(la, lb), hi = std::max(la, lb);
    double kara = lo <= 48 ? lo * hi : std::pow(lo, 0.585) * hi;
    double occ_a = std::min(double(plan.small_space), double(a.term_count()) / std::max(1.0, la * 0.25));
    double occ_b = std::min(double(plan.small_space), double(b.term_count()) / std::max(1.0, lb * 0.25));
    double est_dense = std::max(1.0, occ_a) * std::max(1.0, occ_b) * kara;
    if (est_dense < est_sparse) {
      auto sa = mpoly_detail::dense_slices(a, vars, plan);
      auto sb = mpoly_detail::dense_slices(b, vars, plan);
      std::vector<std::vector<W>> out(2 * plan.small_space - 1);
      size_t wlen = size_t(plan.wide_bound) + 1;
      for (size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].empty()) continue;
        for (size_t j = 0; j < sb.size(); ++j) {
          if (sb[j].empty()) continue;
          auto& dst = out[i + j];
          if (dst.empty()) dst.assign(wlen, W(0));
          upoly_detail::conv_acc(F, sa[i].data(), sa[i].size(), sb[j].data(), sb[j].size(),
                                 dst.data());
        }
      }
      std::vector<typename MultiPoly<W>::Term> ts;
      for (size_t idx = 0; idx < out.size(); ++idx) {
        if (out[idx].empty()) continue;
        // decode the mixed-radix slice index, most significant slot first
        u128 base = 0;
        u64 rem = u64(idx);
        for (size_t s = vars.size(); s-- > 0;) {
          if (int(s) == plan.wide_slot) continue;
          u64 e = rem / plan.radix[s];
          rem %= plan.radix[s];
          base |= mpoly_detail::slot_value(e, int(s));
        }
        for (size_t wexp = 0; wexp < out[idx].size(); ++wexp) {
          if (out[idx][wexp] == 0) continue;
          u128 key = base;
          if (plan.wide_slot >= 0) key |= mpoly_detail::slot_value(wexp, plan.wide_slot);
          ts.push_back({key, out[idx][wexp]});
        }
      }
      MultiPoly<W> r(F);
      r.adopt(vars, std::move(ts));
      return r;
    }
  }

  // generic sparse path
  const MultiPoly<W>& outer = a.term_count() <= b.term_count() ? a : b;
  const MultiPoly<W>& inner = a.term_count() <= b.term_count() ? b : a;
  auto to = mpoly_detail::remap_terms(outer, vars);
  auto ti = mpoly_detail::remap_terms(inner, vars);
  size_t expect = std::min<size_t>(to.size() * ti.size(), size_t(1) << 22);
  mpoly_detail::AccumMap<W> acc(F, std::max<size_t>(expect, ti.size()));
  for (auto& t1 : to) {
    for (auto& t2 : ti) acc.add(t1.key + t2.key, F.mul(t1.coeff, t2.coeff));
  }
  return MultiPoly<W>::from_accum(F, vars, acc);
}

template <class W>
MultiPoly<W> poly_pow(const MultiPoly<W>& a, u64 e) {
  MultiPoly<W> acc = MultiPoly<W>::constant(a.field(), 1);
  MultiPoly<W> b = a;
  while (e) {
    if (e & 1) acc = poly_mul(acc, b);
    e >>= 1;
    if (e) b = poly_mul(b, b);
  }
  return acc;
}

/// degree_in as a free function (kZeroPolyDegree sentinel on the zero poly).
template <class W>
long long degree_in(const MultiPoly<W>& f, VarId v) {
  return f.degree_in(v);
}

template <class W>
long long joint_degree(const MultiPoly<W>& f, VarId va, VarId vb) {
  return f.joint_degree(va, vb);
}

/// [alpha_0 .. alpha_d] with f = sum alpha_k v^k; each alpha_k is v-free.
template <class W>
std::vector<MultiPoly<W>> coefficients_in(const MultiPoly<W>& f, VarId v) {
  const auto& F = f.field();
  int s = f.slot_of(v);
  if (s < 0 || f.is_zero()) return {f};
  long long d = f.degree_in(v);
  std::vector<std::vector<typename MultiPoly<W>::Term>> buckets(size_t(d) + 1);
  u128 slot_mask = mpoly_detail::slot_value(mpoly_detail::kExpMask, s);
  for (auto& t : f.terms()) {
    u64 e = mpoly_detail::key_slot(t.key, s);
    buckets[e].push_back({t.key & ~slot_mask, t.coeff});
  }
  std::vector<MultiPoly<W>> out;
  out.reserve(buckets.size());
  for (auto& bucket : buckets) {
    MultiPoly<W> g(F);
    g.adopt(f.vars(), std::move(bucket));
    out.push_back(std::move(g));
  }
  return out;
}

template <class W>
W evaluate(const MultiPoly<W>& f, const std::map<VarId, W>& assignment) {
  const auto& F = f.field();
  for (VarId v : f.vars())
    if (!assignment.count(v))
      raise(errc::missing_variable, "no value assigned to x" + std::to_string(v));
  W acc = 0;
  for (auto& t : f.terms()) {
    W m = t.coeff;
    for (size_t s = 0; s < f.vars().size(); ++s) {
      u64 e = mpoly_detail::key_slot(t.key, int(s));
      if (e) m = F.mul(m, F.pow(assignment.at(f.vars()[s]), e));
    }
    acc = F.add(acc, m);
  }
  return acc;
}

/// Requires vars(f) ⊆ {v}; returns the dense coefficient sequence.
template <class W>
UnivariatePoly<W> to_univariate(const MultiPoly<W>& f, VarId v) {
  const auto& F = f.field();
  for (VarId w : f.vars())
    if (w != v)
      raise(errc::not_univariate, "polynomial still involves x" + std::to_string(w));
  if (f.is_zero()) return UnivariatePoly<W>(F);
  std::vector<W> c(size_t(std::max(0LL, f.degree_in(v))) + 1, W(0));
  int s = f.slot_of(v);
  for (auto& t : f.terms()) c[s < 0 ? 0 : mpoly_detail::key_slot(t.key, s)] = t.coeff;
  return UnivariatePoly<W>(F, std::move(c));
}

template <class W>
MultiPoly<W> from_univariate(const UnivariatePoly<W>& u, VarId v) {
  const auto& F = u.field();
  std::vector<std::pair<Monomial, W>> ts;
  for (size_t i = 0; i < u.coeffs().size(); ++i)
    if (u.coeffs()[i]) ts.push_back({Monomial{{v, u32(i)}}, u.coeffs()[i]});
  return MultiPoly<W>::from_terms(F, ts);
}

/// Exact division (throws errc::internal if g does not divide f).
template <class W>
MultiPoly<W> poly_divexact(const MultiPoly<W>& f, const MultiPoly<W>& g) {
  const auto& F = mpoly_detail::same_field(f, g);
  if (g.is_zero()) raise(errc::division_by_zero, "exact division by zero polynomial");
  MultiPoly<W> num = f;
  MultiPoly<W> q(F);
  auto vars_all = mpoly_detail::union_vars(f.vars(), g.vars());
  std::vector<std::pair<Monomial, W>> qterms;
  W lead_inv = F.inv(g.terms().empty() ? W(1) : g.terms().front().coeff);
  while (!num.is_zero()) {
    // leading terms under the canonical graded order
    Monomial ml = num.monomial_of(num.terms().front());
    Monomial mg = g.monomial_of(g.terms().front());
    // t = lead(num)/lead(g)
    Monomial mt;
    {
      std::map<VarId, long long> e;
      for (auto& [v, ee] : ml.e) e[v] += ee;
      for (auto& [v, ee] : mg.e) e[v] -= ee;
      for (auto& [v, ee] : e) {
        if (ee < 0) raise(errc::internal, "exact division failed (monomial mismatch)");
        if (ee) mt.e.push_back({v, u32(ee)});
      }
    }
    W c = F.mul(num.terms().front().coeff, lead_inv);
    qterms.push_back({mt, c});
    MultiPoly<W> tpoly = MultiPoly<W>::monomial(F, c, mt);
    num = poly_sub(num, poly_mul(tpoly, g));
  }
  (void)vars_all;
  return MultiPoly<W>::from_terms(F, qterms);
}

/// The rewrite x1^3 = r(x1, xn): deg_x1(r) <= 2. Precomputes reduced powers
/// x1^k mod (x1^3 - r) up to k = 10 so callers can substitute per term.
template <class W>
class ReductionRule {
 public:
  static constexpr int kMaxPow = 10;

  ReductionRule() = default;
  ReductionRule(MultiPoly<W> r, VarId x1, VarId xn) : r_(std::move(r)), x1_(x1), xn_(xn) {
    if (r_.is_zero()) raise(errc::bad_shape, "reduction rule with zero right-hand side");
    if (r_.degree_in(x1_) > 2) raise(errc::bad_shape, "reduction rule must have deg_x1 <= 2");
    for (VarId v : r_.vars())
      if (v != x1_ && v != xn_) raise(errc::bad_shape, "reduction rule involves unexpected variable");
    const auto& F = r_.field();
    pows_.resize(kMaxPow + 1);
    pows_[0] = MultiPoly<W>::constant(F, 1);
    pows_[1] = MultiPoly<W>::variable(F, x1_);
    pows_[2] = poly_mul(pows_[1], pows_[1]);
    pows_[3] = r_;
    MultiPoly<W> x1p = pows_[1];
    for (int k = 4; k <= kMaxPow; ++k) {
      MultiPoly<W> raised = poly_mul(x1p, pows_[k - 1]);  // deg_x1 <= 3
      pows_[k] = substitute_cubes(raised);
    }
  }

  const MultiPoly<W>& r() const { return r_; }
  VarId x1() const { return x1_; }
  VarId xn() const { return xn_; }
  const MultiPoly<W>& reduced_power(int k) const {
    if (k < 0 || k > kMaxPow) raise(errc::internal, "reduced power out of range");
    return pows_[size_t(k)];
  }

 private:
  MultiPoly<W> substitute_cubes(const MultiPoly<W>& f) const {
    // single round: terms with e1 == 3 get one application of the rule
    const auto& F = f.field();
    int s = f.slot_of(x1_);
    if (s < 0 || f.degree_in(x1_) <= 2) return f;
    auto vars = mpoly_detail::union_vars(f.vars(), r_.vars());
    auto tf = mpoly_detail::remap_terms(f, vars);
    auto tr = mpoly_detail::remap_terms(r_, vars);
    int slot = int(std::lower_bound(vars.begin(), vars.end(), x1_) - vars.begin());
    u128 cube = mpoly_detail::slot_value(3, slot);
    mpoly_detail::AccumMap<W> acc(F, tf.size() * 2);
    for (auto& t : tf) {
      if (mpoly_detail::key_slot(t.key, slot) < 3) {
        acc.add(t.key, t.coeff);
      } else {
        u128 rest = t.key - cube;
        for (auto& rt : tr) acc.add(rest + rt.key, F.mul(t.coeff, rt.coeff));
      }
    }
    return MultiPoly<W>::from_accum(F, vars, acc);
  }

  MultiPoly<W> r_;
  VarId x1_ = 1, xn_ = 0;
  std::vector<MultiPoly<W>> pows_;
};

/// Canonical representative of f modulo <x1^3 - r>: deg_x1(result) <= 2.
/// Idempotent; the joint (x1, xn)-degree never increases.
template <class W>
MultiPoly<W> reduce_x1(const MultiPoly<W>& f, const ReductionRule<W>& rule) {
  long long d = f.degree_in(rule.x1());
  if (f.is_zero() || d <= 2) return f;
  if (d > ReductionRule<W>::kMaxPow) {
    // rare tall input (only reachable through the generic engines): peel one
    // cube at a time until the precomputed powers apply
    MultiPoly<W> g = f;
    while (g.degree_in(rule.x1()) > ReductionRule<W>::kMaxPow) {
      auto parts = coefficients_in(g, rule.x1());
      MultiPoly<W> acc(f.field());
      for (size_t e = 0; e < parts.size(); ++e) {
        if (parts[e].is_zero()) continue;
        MultiPoly<W> mono = parts[e];
        if (e >= 3) {
          for (size_t q = 0; q < e - 3; ++q)
            mono = poly_mul(mono, MultiPoly<W>::variable(f.field(), rule.x1()));
          mono = poly_mul(mono, rule.r());
        } else if (e > 0) {
          mono = poly_mul(mono, rule.reduced_power(int(e)));
        }
        acc = poly_add(acc, mono);
      }
      g = acc;
    }
    return reduce_x1(g, rule);
  }
  const auto& F = f.field();
  auto vars = mpoly_detail::union_vars(f.vars(), rule.r().vars());
  auto tf = mpoly_detail::remap_terms(f, vars);
  int slot = int(std::lower_bound(vars.begin(), vars.end(), rule.x1()) - vars.begin());
  // remap each needed reduced power once
  std::vector<std::vector<typename MultiPoly<W>::Term>> rp(size_t(d) + 1);
  for (long long k = 3; k <= d; ++k)
    rp[size_t(k)] = mpoly_detail::remap_terms(rule.reduced_power(int(k)), vars);
  mpoly_detail::AccumMap<W> acc(F, tf.size() * 2);
  for (auto& t : tf) {
    u64 e1 = mpoly_detail::key_slot(t.key, slot);
    if (e1 <= 2) {
      acc.add(t.key, t.coeff);
    } else {
      u128 rest = t.key - mpoly_detail::slot_value(e1, slot);
      for (auto& rt : rp[e1]) acc.add(rest + rt.key, F.mul(t.coeff, rt.coeff));
    }
  }
  return MultiPoly<W>::from_accum(F, vars, acc);
}

/// Per-variable degree vector plus the joint (x1, xn) degree.
struct DegreeProfile {
  std::vector<std::pair<VarId, long long>> per_var;
  long long joint_x1_xn = 0;
};

template <class W>
DegreeProfile degree_profile(const MultiPoly<W>& f, VarId x1, VarId xn, VarId max_var) {
  DegreeProfile d;
  for (VarId v = 1; v <= max_var; ++v) d.per_var.push_back({v, std::max(0LL, f.degree_in(v))});
  d.joint_x1_xn = std::max(0LL, f.joint_degree(x1, xn));
  return d;
}

// ---- canonical text serialization ----
// header:  vars: x1,x4,x7  field: <p>
//          terms: <count>
// body:    one term per line, "<coeff> * x<i>^<e> x<j>^<e>" (variables
//          ascending), bare "<coeff>" for the constant term; canonical order.

template <class W>
std::string to_text(const MultiPoly<W>& f) {
  std::string s = "vars: ";
  for (size_t i = 0; i < f.vars().size(); ++i) {
    if (i) s += ",";
    s += "x" + std::to_string(f.vars()[i]);
  }
  s += "  field: " + to_decimal(u128(f.field().modulus())) + "\n";
  s += "terms: " + std::to_string(f.term_count()) + "\n";
  for (auto& t : f.terms()) {
    s += to_decimal(u128(t.coeff));
    bool any = false;
    for (size_t slot = 0; slot < f.vars().size(); ++slot) {
      u64 e = mpoly_detail::key_slot(t.key, int(slot));
      if (!e) continue;
      s += any ? " " : " * ";
      any = true;
      s += "x" + std::to_string(f.vars()[slot]) + "^" + std::to_string(e);
    }
    s += "\n";
  }
  return s;
}

template <class W>
MultiPoly<W> from_text(const PrimeField<W>& F, const std::string& text, size_t* consumed = nullptr) {
  size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= text.size()) raise(errc::io_error, "unexpected end of polynomial block");
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  std::string hdr = next_line();
  if (hdr.rfind("vars: ", 0) != 0) raise(errc::io_error, "bad polynomial header: " + hdr);
  size_t fpos = hdr.find("field: ");
  if (fpos == std::string::npos) raise(errc::io_error, "polynomial header missing field");
  u128 p = parse_decimal_u128(hdr.substr(fpos + 7));
  if (p != u128(F.modulus())) raise(errc::io_error, "polynomial field does not match context");
  std::string tl = next_line();
  if (tl.rfind("terms: ", 0) != 0) raise(errc::io_error, "bad term count line: " + tl);
  size_t nterms = size_t(std::stoull(tl.substr(7)));
  std::vector<std::pair<Monomial, W>> ts;
  ts.reserve(nterms);
  for (size_t i = 0; i < nterms; ++i) {
    std::string line = next_line();
    size_t star = line.find(" * ");
    std::string cs = star == std::string::npos ? line : line.substr(0, star);
    W coeff = W(parse_decimal_u128(cs));
    Monomial m;
    if (star != std::string::npos) {
      size_t q = star + 3;
      while (q < line.size()) {
        size_t sp = line.find(' ', q);
        if (sp == std::string::npos) sp = line.size();
        std::string tok = line.substr(q, sp - q);
        q = sp + 1;
        if (tok.empty()) continue;
        if (tok[0] != 'x') raise(errc::io_error, "bad monomial token " + tok);
        size_t caret = tok.find('^');
        if (caret == std::string::npos) raise(errc::io_error, "bad monomial token " + tok);
        VarId v = VarId(std::stoi(tok.substr(1, caret - 1)));
        u32 e = u32(std::stoul(tok.substr(caret + 1)));
        m.e.push_back({v, e});
      }
    }
    ts.push_back({m, coeff});
  }
  if (consumed) *consumed = pos;
  return MultiPoly<W>::from_terms(F, ts);
}

}  // namespace gmv
