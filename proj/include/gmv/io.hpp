#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gmv/plan.hpp"
#include "gmv/solver.hpp"
#include "gmv/system.hpp"

namespace gmv {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out << data;
  if (!out) raise(errc::io_error, "write failed for " + path);
}

// ---- system file: {"p": "<dec>", "n": N, "t": "<dec>", "a": [...], "b": [...]} ----

template <class W>
std::string system_to_json(const GmvSystem<W>& sys) {
  nlohmann::json j;
  j["p"] = to_decimal(u128(sys.F().modulus()));
  j["n"] = sys.n;
  j["t"] = to_decimal(u128(sys.t));
  nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
  for (W v : sys.a) a.push_back(to_decimal(u128(v)));
  for (W v : sys.b) b.push_back(to_decimal(u128(v)));
  j["a"] = a;
  j["b"] = b;
  return j.dump(2) + "\n";
}

inline u128 system_json_modulus(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return parse_decimal_u128(j.at("p").get<std::string>());
}

/// Field must outlive the system (the CLI keeps it alongside).
template <class W>
GmvSystem<W> system_from_json(const PrimeField<W>& F, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    raise(errc::io_error, std::string("bad system file: ") + e.what());
  }
  if (u128(F.modulus()) != parse_decimal_u128(j.at("p").get<std::string>()))
    raise(errc::io_error, "system file modulus does not match field");
  GmvSystem<W> sys;
  sys.field = &F;
  sys.n = j.at("n").get<int>();
  if (sys.n < 4) raise(errc::bad_n, "system file has n < 4");
  sys.t = W(parse_decimal_u128(j.at("t").get<std::string>()) % u128(F.modulus()));
  for (auto& v : j.at("a")) sys.a.push_back(W(parse_decimal_u128(v.get<std::string>()) % u128(F.modulus())));
  for (auto& v : j.at("b")) sys.b.push_back(W(parse_decimal_u128(v.get<std::string>()) % u128(F.modulus())));
  if (sys.a.size() != size_t(sys.n) || sys.b.size() != size_t(sys.n))
    raise(errc::io_error, "system file constant arrays must have length n");
  if (sys.b[1] == 0) raise(errc::bad_shape, "system file has b1 = 0");
  rebuild_polys(sys);
  return sys;
}

// ---- solutions file: one JSON object per line, x0..xn as decimal strings ----

template <class W>
std::string solutions_to_jsonl(const std::vector<Solution<W>>& sols) {
  std::string out;
  for (const auto& s : sols) {
    nlohmann::json j;
    for (size_t k = 0; k < s.x.size(); ++k) j["x" + std::to_string(k)] = to_decimal(u128(s.x[k]));
    out += j.dump() + "\n";
  }
  return out;
}

// ---- constants hash (t deliberately excluded: Part 1 is t-independent) ----

template <class W>
u64 constants_hash(const PrimeField<W>& F, int n, const std::vector<W>& a,
                   const std::vector<W>& b) {
  std::string s = to_decimal(u128(F.modulus())) + "|" + std::to_string(n) + "|";
  for (W v : a) s += to_decimal(u128(v)) + ",";
  s += "|";
  for (W v : b) s += to_decimal(u128(v)) + ",";
  return fnv1a64(s);
}

// ---- precompute cache ----
// Text format, fully deterministic. The trailing hash line covers every
// preceding byte; loading rejects any mismatch.

template <class W>
std::string cache_to_text(const GmvSystem<W>& sys, const PrecomputedState<W>& st) {
  std::string s;
  s += "gmvcache 1\n";
  s += "p " + to_decimal(u128(sys.F().modulus())) + "\n";
  s += "n " + std::to_string(sys.n) + "\n";
  s += "plan " + hex64(st.plan_fingerprint) + " " + st.plan_signature + "\n";
  s += "constants " + hex64(constants_hash(sys.F(), sys.n, sys.a, sys.b)) + "\n";
  s += "a";
  for (W v : sys.a) s += " " + to_decimal(u128(v));
  s += "\nb";
  for (W v : sys.b) s += " " + to_decimal(u128(v));
  s += "\nlead_c " + to_decimal(u128(st.init.lead_c)) + "\n";
  s += "poly g3\n" + to_text(st.g3);
  s += "poly f1\n" + to_text(st.init.f1);
  s += "poly r\n" + to_text(st.init.rule.r());
  s += "content " + hex64(st.content_hash) + "\n";
  s += "hash " + hex64(fnv1a64(s)) + "\n";
  return s;
}

template <class W>
struct LoadedCache {
  GmvSystem<W> sys;  // t = 0 placeholder; Part 2 supplies t values
  PrecomputedState<W> state;
};

template <class W>
LoadedCache<W> cache_from_text(const PrimeField<W>& F, const std::string& text) {
  size_t last_nl = text.rfind('\n', text.size() - 2);
  if (text.empty() || last_nl == std::string::npos || text.compare(last_nl + 1, 5, "hash ") != 0)
    raise(errc::cache_integrity, "cache file is truncated or missing its hash line");
  std::string body = text.substr(0, last_nl + 1);
  std::string hash_line = text.substr(last_nl + 1);
  if (hash_line != "hash " + hex64(fnv1a64(body)) + "\n")
    raise(errc::cache_integrity, "cache hash mismatch: file was modified or corrupted");

  std::istringstream in(body);
  auto expect = [&](const std::string& prefix) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
      raise(errc::cache_integrity, "cache missing field " + prefix);
    return line.substr(prefix.size());
  };
  if (expect("gmvcache ") != "1") raise(errc::cache_integrity, "unknown cache version");
  u128 p = parse_decimal_u128(expect("p "));
  if (p != u128(F.modulus())) raise(errc::cache_integrity, "cache modulus does not match field");
  int n = std::stoi(expect("n "));
  std::string plan_line = expect("plan ");
  std::string const_line = expect("constants ");
  std::string a_line = expect("a");
  std::string b_line = expect("b");
  W lead_c = W(parse_decimal_u128(expect("lead_c ")));

  LoadedCache<W> lc;
  lc.sys.field = &F;
  lc.sys.n = n;
  lc.sys.t = 0;
  auto parse_list = [&](const std::string& line, std::vector<W>& out) {
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(W(parse_decimal_u128(tok)));
  };
  parse_list(a_line, lc.sys.a);
  parse_list(b_line, lc.sys.b);
  if (lc.sys.a.size() != size_t(n) || lc.sys.b.size() != size_t(n))
    raise(errc::cache_integrity, "cache constant arrays must have length n");
  if (hex64(constants_hash(F, n, lc.sys.a, lc.sys.b)) != const_line)
    raise(errc::cache_integrity, "cache constants hash mismatch");
  rebuild_polys(lc.sys);

  // remaining body: three labelled polynomial blocks + content line
  std::string rest(body.substr(size_t(in.tellg())));
  auto take_poly = [&](const std::string& name) {
    std::string head = "poly " + name + "\n";
    if (rest.rfind(head, 0) != 0) raise(errc::cache_integrity, "cache missing poly " + name);
    rest = rest.substr(head.size());
    size_t used = 0;
    MultiPoly<W> poly = from_text(F, rest, &used);
    rest = rest.substr(used);
    return poly;
  };
  MultiPoly<W> g3 = take_poly("g3");
  MultiPoly<W> f1 = take_poly("f1");
  MultiPoly<W> r = take_poly("r");
  if (rest.rfind("content ", 0) != 0) raise(errc::cache_integrity, "cache missing content hash");
  std::string content_hex = rest.substr(8, 16);

  auto& st = lc.state;
  st.n = n;
  st.g3 = std::move(g3);
  st.init.f1 = std::move(f1);
  st.init.lead_c = lead_c;
  st.init.rule = ReductionRule<W>(std::move(r), 1, VarId(n));
  {
    std::istringstream ps(plan_line);
    std::string fp;
    ps >> fp >> st.plan_signature;
    st.plan_fingerprint = std::stoull(fp, nullptr, 16);
  }
  st.content_hash =
      state_content_hash(F, n, st.plan_fingerprint, st.g3, st.init.f1, st.init.rule.r());
  if (hex64(st.content_hash) != content_hex)
    raise(errc::cache_integrity, "cache content hash mismatch");
  if (st.init.f1.coeff_of(Monomial{{1, 3}}) != lead_c)
    raise(errc::cache_integrity, "cache lead_c does not match f1");
  return lc;
}

/// Cross-check a cache against an independently loaded system file.
template <class W>
void validate_cache_matches(const LoadedCache<W>& lc, const GmvSystem<W>& sys) {
  if (lc.sys.n != sys.n || lc.sys.a != sys.a || lc.sys.b != sys.b)
    raise(errc::cache_integrity, "cache was built for different system constants");
}

// ---- explicit plan file: nested JSON arrays of leaf indices ----
// example (n = 7): [[[2,3],4],[5,6]]

inline SpanTree span_tree_from_json(const nlohmann::json& j) {
  SpanTree t;
  if (j.is_number_integer()) {
    t.leaf = j.get<int>();
    return t;
  }
  if (!j.is_array() || j.size() != 2)
    raise(errc::bad_plan, "explicit plan nodes must be leaf integers or two-element arrays");
  t.left = std::make_unique<SpanTree>(span_tree_from_json(j[0]));
  t.right = std::make_unique<SpanTree>(span_tree_from_json(j[1]));
  return t;
}

inline EliminationPlan plan_from_json_text(int n, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    raise(errc::bad_plan, std::string("bad plan file: ") + e.what());
  }
  SpanTree tree = span_tree_from_json(j);
  return build_explicit_plan(n, tree);
}

}  // namespace gmv
