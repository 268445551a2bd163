#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gmv/errors.hpp"
#include "gmv/util.hpp"

namespace gmv {

enum class PlanKind { chain, balanced, explicit_tree };

inline const char* plan_kind_name(PlanKind k) {
  switch (k) {
    case PlanKind::chain: return "chain";
    case PlanKind::balanced: return "balanced";
    case PlanKind::explicit_tree: return "explicit";
  }
  return "?";
}

/// Binary elimination tree over the leaves f_lo..f_hi = f_2..f_{n-1}.
/// A node joining [lo..mid] and [mid+1..hi] eliminates x_mid, which is the
/// shared boundary: the left span is linear in it, the right span quadratic
/// per leaf and doubling per merge.
struct PlanNode {
  int lo = 0, hi = 0;
  int elim = -1;            // split point (internal nodes only)
  int left = -1, right = -1;  // indices into EliminationPlan::nodes
  bool is_leaf() const { return left < 0; }
};

/// Nested-span description used to load explicit plans.
struct SpanTree {
  int leaf = -1;  // >= 0 for a leaf f_<leaf>
  std::unique_ptr<SpanTree> left, right;
};

struct EliminationPlan {
  int n = 0;
  PlanKind kind = PlanKind::balanced;
  std::vector<PlanNode> nodes;
  int root = -1;

  std::string signature() const {
    std::string s = "n" + std::to_string(n) + ":";
    append_sig(s, root);
    return s;
  }

  u64 fingerprint() const { return fnv1a64(signature()); }

 private:
  void append_sig(std::string& s, int idx) const {
    const PlanNode& nd = nodes[size_t(idx)];
    if (nd.is_leaf()) {
      s += std::to_string(nd.lo);
      return;
    }
    s += "(";
    append_sig(s, nd.left);
    s += " ";
    append_sig(s, nd.right);
    s += ")x" + std::to_string(nd.elim);
  }
};

namespace plan_detail {

inline int build_span(EliminationPlan& plan, int lo, int hi, PlanKind kind) {
  if (lo == hi) {
    plan.nodes.push_back({lo, hi, -1, -1, -1});
    return int(plan.nodes.size()) - 1;
  }
  int len = hi - lo + 1;
  // chain peels one leaf; balanced splits at the midpoint, extra leaf left
  int mid = (kind == PlanKind::chain) ? lo : lo + (len + 1) / 2 - 1;
  int l = build_span(plan, lo, mid, kind);
  int r = build_span(plan, mid + 1, hi, kind);
  plan.nodes.push_back({lo, hi, mid, l, r});
  return int(plan.nodes.size()) - 1;
}

inline int build_from_tree(EliminationPlan& plan, const SpanTree& t) {
  if (t.leaf >= 0) {
    if (t.left || t.right) raise(errc::bad_plan, "leaf node with children");
    plan.nodes.push_back({t.leaf, t.leaf, -1, -1, -1});
    return int(plan.nodes.size()) - 1;
  }
  if (!t.left || !t.right) raise(errc::bad_plan, "internal node must have two children");
  int l = build_from_tree(plan, *t.left);
  int r = build_from_tree(plan, *t.right);
  const PlanNode& ln = plan.nodes[size_t(l)];
  const PlanNode& rn = plan.nodes[size_t(r)];
  if (ln.hi + 1 != rn.lo)
    raise(errc::bad_plan, "plan spans must be contiguous: [" + std::to_string(ln.lo) + ".." +
                              std::to_string(ln.hi) + "] then [" + std::to_string(rn.lo) + ".." +
                              std::to_string(rn.hi) + "]");
  plan.nodes.push_back({ln.lo, rn.hi, ln.hi, l, r});
  return int(plan.nodes.size()) - 1;
}

}  // namespace plan_detail

/// CHAIN (the comb that peels f_lo first, matching the descending-index
/// walkthrough restricted to f_2..f_{n-1}) or BALANCED (minimum height,
/// odd spans give the extra leaf to the left subtree).
inline EliminationPlan build_plan(int n, PlanKind kind) {
  if (n < 4) raise(errc::bad_n, "plans need n >= 4 (leaves f_2..f_{n-1})");
  if (kind == PlanKind::explicit_tree) raise(errc::bad_plan, "explicit plans are built from a span tree");
  EliminationPlan plan;
  plan.n = n;
  plan.kind = kind;
  plan.root = plan_detail::build_span(plan, 2, n - 1, kind);
  return plan;
}

inline EliminationPlan build_explicit_plan(int n, const SpanTree& tree) {
  if (n < 4) raise(errc::bad_n, "plans need n >= 4 (leaves f_2..f_{n-1})");
  EliminationPlan plan;
  plan.n = n;
  plan.kind = PlanKind::explicit_tree;
  plan.root = plan_detail::build_from_tree(plan, tree);
  const PlanNode& r = plan.nodes[size_t(plan.root)];
  if (r.lo != 2 || r.hi != n - 1)
    raise(errc::bad_plan, "plan must cover exactly f_2..f_" + std::to_string(n - 1));
  return plan;
}

/// All variables eliminated by the plan (the multiset of split points).
inline std::vector<int> eliminated_variables(const EliminationPlan& plan) {
  std::vector<int> v;
  for (const auto& nd : plan.nodes)
    if (!nd.is_leaf()) v.push_back(nd.elim);
  std::sort(v.begin(), v.end());
  return v;
}

inline int plan_height(const EliminationPlan& plan, int idx = -2) {
  if (idx == -2) idx = plan.root;
  const PlanNode& nd = plan.nodes[size_t(idx)];
  if (nd.is_leaf()) return 0;
  return 1 + std::max(plan_height(plan, nd.left), plan_height(plan, nd.right));
}

}  // namespace gmv
