#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmv/plan.hpp"
#include "gmv/resultant.hpp"
#include "gmv/system.hpp"
#include "gmv/uniroot.hpp"
#include "gmv/util.hpp"

namespace gmv {

struct SolveOptions {
  int threads = 1;
  bool low_mem = false;
  bool find_roots = true;
  u64 root_seed = 1;
};

struct NodeStats {
  int lo = 0, hi = 0, elim = -1;
  long long h = 0;
  size_t out_terms = 0;
  unsigned long long muls = 0;
  double seconds = 0;
  std::string anomaly;  // empty when the degree laws held
};

/// The t-independent output of Part 1: g3 in {x1, x_{n-1}, xn}, together
/// with f1 and the reduction rule. Systems differing only in t produce
/// byte-identical states (and hence caches).
template <class W>
struct PrecomputedState {
  int n = 0;
  MultiPoly<W> g3;
  InitializedSystem<W> init;
  u64 plan_fingerprint = 0;
  std::string plan_signature;
  u64 content_hash = 0;
  std::vector<NodeStats> stats;
  std::vector<std::string> anomalies;
  size_t peak_terms = 0;
  double part1_seconds = 0;
};

template <class W>
u64 state_content_hash(const PrimeField<W>& F, int n, u64 plan_fp, const MultiPoly<W>& g3,
                       const MultiPoly<W>& f1, const MultiPoly<W>& r) {
  u64 h = fnv1a64("gmv-part1");
  h = fnv1a64(to_decimal(u128(F.modulus())) + "|" + std::to_string(n) + "|" + hex64(plan_fp), h);
  h = fnv1a64(to_text(g3), h);
  h = fnv1a64(to_text(f1), h);
  h = fnv1a64(to_text(r), h);
  return h;
}

namespace solver_detail {

// Generic degree laws for a span [lo..hi] of length L:
//   left boundary x_{lo-1}: 2^L   (x1 itself when lo == 2: capped at 2)
//   right boundary x_hi:    1
//   joint deg_{x1,xn}:      2^L - 1, or 2^{L+1} - 1 when the span holds f_2
template <class W>
std::string check_span_laws(const MultiPoly<W>& out, int lo, int hi, int n) {
  long long len = hi - lo + 1;
  if (len >= 62) return "";  // law values would overflow; skip
  std::string bad;
  long long joint = out.joint_degree(1, VarId(n));
  long long expect_joint = (lo == 2 ? (2LL << len) : (1LL << len)) - 1;
  if (joint != expect_joint)
    bad += "joint(x1,xn)=" + std::to_string(joint) + " expected " + std::to_string(expect_joint) + "; ";
  if (lo == 2) {
    if (out.degree_in(1) > 2) bad += "deg_x1=" + std::to_string(out.degree_in(1)) + " expected <=2; ";
  } else {
    long long dw = out.degree_in(VarId(lo - 1));
    if (dw != (1LL << len))
      bad += "deg_x" + std::to_string(lo - 1) + "=" + std::to_string(dw) + " expected " +
             std::to_string(1LL << len) + "; ";
  }
  long long dr = out.degree_in(VarId(hi));
  if (dr != 1)
    bad += "deg_x" + std::to_string(hi) + "=" + std::to_string(dr) + " expected 1; ";
  return bad;
}

template <class W>
MultiPoly<W> eval_plan_node(const GmvSystem<W>& sys, const InitializedSystem<W>& init,
                            const EliminationPlan& plan, int idx, const SolveOptions& opts,
                            PrecomputedState<W>& st) {
  const PlanNode& nd = plan.nodes[size_t(idx)];
  if (nd.is_leaf()) return reduce_x1(sys.f[size_t(nd.lo)], init.rule);
  MultiPoly<W> L = eval_plan_node(sys, init, plan, nd.left, opts, st);
  MultiPoly<W> R = eval_plan_node(sys, init, plan, nd.right, opts, st);
  st.peak_terms = std::max(st.peak_terms, L.term_count() + R.term_count());

  Stopwatch sw;
  MulCounter counter;
  counter.label = "node[" + std::to_string(nd.lo) + ".." + std::to_string(nd.hi) + "]";
  VarId v = VarId(nd.elim);
  MultiPoly<W> out;
  long long h = R.degree_in(v);
  ResultantOptions ropts{opts.threads, opts.low_mem};
  if (L.degree_in(v) == 1 && h >= 1) {
    out = sparse_resultant(L, R, v, &init.rule, &counter, ropts);
  } else {
    // degenerate shapes fall back to the generic engine
    logf(1, "node [%d..%d]: fast path unavailable (deg_left=%lld), using general engine", nd.lo,
         nd.hi, L.degree_in(v));
    out = general_resultant(L, R, v, &init.rule, &counter, ropts);
    h = std::max(h, L.degree_in(v));
  }
  if (out.is_zero())
    raise(errc::degenerate_system, "resultant collapsed to zero at node [" +
                                       std::to_string(nd.lo) + ".." + std::to_string(nd.hi) + "]");

  NodeStats ns;
  ns.lo = nd.lo;
  ns.hi = nd.hi;
  ns.elim = nd.elim;
  ns.h = h;
  ns.out_terms = out.term_count();
  ns.muls = counter.count;
  ns.seconds = sw.seconds();
  ns.anomaly = check_span_laws(out, nd.lo, nd.hi, sys.n);
  if (!ns.anomaly.empty()) {
    st.anomalies.push_back("DegreeAnomaly at [" + std::to_string(nd.lo) + ".." +
                           std::to_string(nd.hi) + "]: " + ns.anomaly);
    logf(1, "%s", st.anomalies.back().c_str());
  }
  st.peak_terms = std::max(st.peak_terms, out.term_count());
  logf(2, "node [%d..%d] x%d h=%lld terms=%zu muls=%llu %.3fs", nd.lo, nd.hi, nd.elim, h,
       ns.out_terms, ns.muls, ns.seconds);
  st.stats.push_back(std::move(ns));
  return out;
}

}  // namespace solver_detail

/// Part 1: reduce {f_2..f_{n-1}} to the single polynomial g3 following the
/// plan tree bottom-up. Children are released as soon as their parent is
/// built; only t-free inputs are touched.
template <class W>
PrecomputedState<W> precompute(const GmvSystem<W>& sys, const InitializedSystem<W>& init,
                               const EliminationPlan& plan, const SolveOptions& opts = {}) {
  if (plan.n != sys.n) raise(errc::bad_plan, "plan was built for a different n");
  Stopwatch sw;
  PrecomputedState<W> st;
  st.n = sys.n;
  st.init = init;
  st.plan_fingerprint = plan.fingerprint();
  st.plan_signature = plan.signature();
  st.g3 = solver_detail::eval_plan_node(sys, init, plan, plan.root, opts, st);
  for (VarId v : st.g3.vars())
    if (v != 1 && v != VarId(sys.n - 1) && v != VarId(sys.n))
      raise(errc::internal, "g3 contains unexpected variable x" + std::to_string(v));
  st.part1_seconds = sw.seconds();
  st.content_hash =
      state_content_hash(sys.F(), sys.n, st.plan_fingerprint, st.g3, st.init.f1, st.init.rule.r());
  return st;
}

/// Per-t report of Part 2.
template <class W>
struct SolveReport {
  W t = 0;
  long long deg_u = kZeroPolyDegree;
  size_t g2_terms = 0;
  bool empty_ideal = false;
  UnivariatePoly<W> u_monic;  // deg_u recorded before root finding
  std::vector<W> roots;
  std::vector<Solution<W>> solutions;
  double g2_seconds = 0, u_seconds = 0, root_seconds = 0, recover_seconds = 0, total_seconds = 0;
};

/// Part 2 for one t: g2 = res(fn, g3; x_{n-1}), u = res(f1, g2; x1) via the
/// final banded determinant, then roots and back-substitution. Safe to run
/// concurrently for distinct t against one shared state.
template <class W>
SolveReport<W> solve_for_t(const PrecomputedState<W>& st, const GmvSystem<W>& sys, W t,
                           const SolveOptions& opts = {}) {
  const auto& F = sys.F();
  SolveReport<W> rep;
  rep.t = W(t % F.modulus());
  Stopwatch total;
  Stopwatch sw;
  MultiPoly<W> fn = make_fn(F, sys.n, rep.t);
  MulCounter counter;
  ResultantOptions ropts{opts.threads, opts.low_mem};
  MultiPoly<W> g2 = general_resultant(fn, st.g3, VarId(sys.n - 1), &st.init.rule, &counter, ropts);
  rep.g2_seconds = sw.seconds();
  rep.g2_terms = g2.term_count();
  if (g2.is_zero()) {
    rep.empty_ideal = true;
    rep.total_seconds = total.seconds();
    return rep;
  }

  sw.reset();
  UnivariatePoly<W> u = final_resultant(st.init.f1, g2, 1, VarId(sys.n), &st.init.rule);
  rep.u_seconds = sw.seconds();
  if (u.is_zero()) {
    rep.empty_ideal = true;  // u vanished identically: flag, do not guess roots
    rep.total_seconds = total.seconds();
    return rep;
  }
  u = upoly_monic(u);
  rep.deg_u = u.degree();
  rep.u_monic = u;

  if (opts.find_roots) {
    sw.reset();
    rep.roots = find_roots(u, opts.root_seed);
    rep.root_seconds = sw.seconds();
    sw.reset();
    GmvSystem<W> sys_t = with_t(sys, rep.t);
    for (W r : rep.roots) {
      auto sols = recover_solution(st.init, sys_t, r);
      for (auto& s : sols) rep.solutions.push_back(std::move(s));
    }
    std::sort(rep.solutions.begin(), rep.solutions.end());
    rep.solutions.erase(std::unique(rep.solutions.begin(), rep.solutions.end()),
                        rep.solutions.end());
    rep.recover_seconds = sw.seconds();
  }
  rep.total_seconds = total.seconds();
  return rep;
}

/// Closed-form degree expectations.
struct DegreeSchedule {
  long long deg_u = 0;       // 3(2^n - 1)
  long long g2_xn_bound = 0;  // 2^n - 1
  struct WalkStep {
    int a;
    long long boundary;  // deg_{x_{a-1}}(g_a) = 2^{n-a+1}
    long long xn;        // 2^{n-a+1} - 1
    long long joint;     // 2^{n-a+1} - 1
  };
  std::vector<WalkStep> walkthrough;  // a = n-1 down to 3
};

inline DegreeSchedule predicted_degrees(int n) {
  if (n < 4) raise(errc::bad_n, "degree schedule needs n >= 4");
  DegreeSchedule s;
  s.deg_u = 3 * ((1LL << n) - 1);
  s.g2_xn_bound = (1LL << n) - 1;
  for (int a = n - 1; a >= 3; --a) {
    long long v = 1LL << (n - a + 1);
    s.walkthrough.push_back({a, v, v - 1, v - 1});
  }
  return s;
}

/// The descending single-chain elimination including fn (the form the chain
/// degree law is stated in): g_n = fn, then g_a = res(f_a, g_{a+1}; x_a)
/// for a = n-1 .. 3. Returns the per-step measured degrees and g_3.
template <class W>
struct WalkthroughResult {
  struct Step {
    int a;
    long long boundary, xn, joint;
    unsigned long long muls;
    long long h;
  };
  std::vector<Step> steps;
  MultiPoly<W> g3;
};

template <class W>
WalkthroughResult<W> run_walkthrough_chain(const GmvSystem<W>& sys,
                                           const InitializedSystem<W>& init) {
  WalkthroughResult<W> res;
  MultiPoly<W> g = reduce_x1(sys.f[size_t(sys.n)], init.rule);
  for (int a = sys.n - 1; a >= 3; --a) {
    MultiPoly<W> fa = reduce_x1(sys.f[size_t(a)], init.rule);
    MulCounter counter;
    long long h = g.degree_in(VarId(a));
    g = sparse_resultant(fa, g, VarId(a), &init.rule, &counter);
    res.steps.push_back({a, g.degree_in(VarId(a - 1)), g.degree_in(VarId(sys.n)),
                         g.joint_degree(1, VarId(sys.n)), counter.count, h});
  }
  res.g3 = g;
  return res;
}

}  // namespace gmv
