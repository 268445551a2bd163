// gmvsolver: generate, precompute, solve, validate and benchmark the
// structured chain system over F_p via successive resultant elimination.
//
// Exit codes: 0 success, 1 check/selftest failure, 2 usage, 3 field error,
// 4 polynomial shape error, 5 plan/solver error, 6 oracle guard,
// 7 cache integrity, 8 I/O, 9 internal.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmv/example_case.hpp"
#include "gmv/io.hpp"
#include "gmv/solver.hpp"

namespace {

using namespace gmv;

int exit_code_for(errc c) {
  switch (c) {
    case errc::invalid_modulus:
    case errc::composite_modulus:
    case errc::field_mismatch:
    case errc::division_by_zero:
      return 3;
    case errc::missing_variable:
    case errc::not_univariate:
    case errc::not_linear:
    case errc::trivial_dense:
    case errc::zero_degree:
    case errc::zero_polynomial:
    case errc::zero_modulus:
    case errc::both_zero:
    case errc::bad_shape:
    case errc::exponent_overflow:
      return 4;
    case errc::bad_n:
    case errc::bad_plan:
    case errc::degenerate_leading_coefficient:
    case errc::degenerate_system:
    case errc::empty_ideal:
      return 5;
    case errc::oracle_too_large:
      return 6;
    case errc::cache_integrity:
      return 7;
    case errc::io_error:
      return 8;
    case errc::internal:
      return 9;
  }
  return 9;
}

struct Args {
  std::string p_str, system_path, cache_path, out_path, solutions_path, plan_str = "balanced";
  std::string t_list;
  int n = 0;
  u64 seed = 1, root_seed = 1;
  int random_t = 0;
  int threads = 1;
  bool low_mem = false;
  std::vector<int> bench_n;
};

template <class W>
EliminationPlan make_plan(int n, const std::string& spec) {
  if (spec == "chain") return build_plan(n, PlanKind::chain);
  if (spec == "balanced") return build_plan(n, PlanKind::balanced);
  if (spec.rfind("explicit:", 0) == 0)
    return plan_from_json_text(n, read_file(spec.substr(9)));
  raise(errc::bad_plan, "unknown plan '" + spec + "' (chain, balanced, explicit:<file>)");
}

template <class W>
void print_degree_table(const GmvSystem<W>& sys, const InitializedSystem<W>& init) {
  auto row = [&](const std::string& name, const MultiPoly<W>& f) {
    std::string s = name + " | (";
    for (int v = 1; v <= sys.n; ++v) {
      if (v > 1) s += ",";
      s += std::to_string(std::max(0LL, f.degree_in(v)));
    }
    std::printf("%s)\n", s.c_str());
  };
  std::printf("pol | (deg_x1,...,deg_x%d)\n", sys.n);
  row("f_1", init.f1);
  for (int i = 2; i <= sys.n; ++i) row("f_" + std::to_string(i), sys.f[size_t(i)]);
}

template <class W>
void print_banner(const PrimeField<W>& F, int n) {
  std::printf("System initialized: n=%d, p has %d bits\n", n, F.bits());
}

template <class W>
int cmd_gen(const Args& a) {
  PrimeField<W> F(W(parse_decimal_u128(a.p_str)));
  if (a.n < 4) raise(errc::bad_n, "--n must be at least 4");
  SplitMix64 rng(a.seed);
  GmvSystem<W> sys = generate(F, a.n, rng);
  if (!a.t_list.empty()) sys = with_t(sys, W(parse_decimal_u128(a.t_list) % u128(F.modulus())));
  InitializedSystem<W> init = initialize(sys);
  print_banner(F, a.n);
  print_degree_table(sys, init);
  if (!a.out_path.empty()) {
    write_file(a.out_path, system_to_json(sys));
    std::printf("system written to %s\n", a.out_path.c_str());
  }
  return 0;
}

template <class W>
int cmd_precompute(const Args& a) {
  std::string text = read_file(a.system_path);
  PrimeField<W> F(W(system_json_modulus(text)));
  GmvSystem<W> sys = system_from_json(F, text);
  InitializedSystem<W> init = initialize(sys);
  EliminationPlan plan = make_plan<W>(sys.n, a.plan_str);
  print_banner(F, sys.n);
  SolveOptions opts;
  opts.threads = a.threads;
  opts.low_mem = a.low_mem;
  PrecomputedState<W> st = precompute(sys, init, plan, opts);
  for (const auto& an : st.anomalies) std::fprintf(stderr, "warning: %s\n", an.c_str());
  write_file(a.cache_path, cache_to_text(sys, st));
  std::printf("packing sparse resultants done in %s seconds\n",
              format_seconds(st.part1_seconds).c_str());
  logf(1, "g3: %zu terms, peak %zu terms, cache %s", st.g3.term_count(), st.peak_terms,
       hex64(st.content_hash).c_str());
  return 0;
}

template <class W>
std::vector<W> parse_t_values(const Args& a, const PrimeField<W>& F) {
  std::vector<W> ts;
  if (!a.t_list.empty()) {
    size_t pos = 0;
    while (pos <= a.t_list.size()) {
      size_t comma = a.t_list.find(',', pos);
      if (comma == std::string::npos) comma = a.t_list.size();
      ts.push_back(W(parse_decimal_u128(a.t_list.substr(pos, comma - pos)) % u128(F.modulus())));
      pos = comma + 1;
    }
  }
  if (a.random_t > 0) {
    SplitMix64 rng(a.seed);
    for (int i = 0; i < a.random_t; ++i) ts.push_back(F.sample(rng));
  }
  if (ts.empty()) raise(errc::bad_shape, "solve needs --t or --random-t");
  return ts;
}

template <class W>
int cmd_solve(const Args& a) {
  std::string text = read_file(a.cache_path);
  // cache line 2 is "p <dec>"
  size_t pl = text.find("\np ");
  if (pl == std::string::npos) raise(errc::cache_integrity, "cache missing modulus line");
  size_t pe = text.find('\n', pl + 3);
  PrimeField<W> F(W(parse_decimal_u128(text.substr(pl + 3, pe - pl - 3))));
  LoadedCache<W> lc = cache_from_text(F, text);
  if (!a.system_path.empty()) {
    GmvSystem<W> filesys = system_from_json(F, read_file(a.system_path));
    validate_cache_matches(lc, filesys);
  }
  SolveOptions opts;
  opts.threads = a.threads;
  opts.low_mem = a.low_mem;
  opts.root_seed = a.root_seed;
  std::vector<W> ts = parse_t_values(a, F);

  nlohmann::json jout;
  jout["p"] = to_decimal(u128(F.modulus()));
  jout["n"] = lc.sys.n;
  jout["plan"] = lc.state.plan_signature;
  jout["cache"] = hex64(lc.state.content_hash);
  nlohmann::json blocks = nlohmann::json::array();
  std::vector<Solution<W>> all_solutions;

  for (W t : ts) {
    SolveReport<W> rep = solve_for_t(lc.state, lc.sys, t, opts);
    std::printf("g2 has %zu terms\n", rep.g2_terms);
    if (rep.empty_ideal) {
      std::printf("univariate polynomial vanished identically for t=%s\n",
                  to_decimal(u128(rep.t)).c_str());
    } else {
      std::printf("Roots of univariate polynomial of degree %lld for t=%s:\n", rep.deg_u,
                  to_decimal(u128(rep.t)).c_str());
      if (rep.roots.empty()) std::printf("no roots\n");
      for (W r : rep.roots) std::printf("x%d = %s\n", lc.sys.n, to_decimal(u128(r)).c_str());
    }
    std::printf("solution found in %s seconds\n", format_seconds(rep.total_seconds).c_str());

    nlohmann::json jb;
    jb["t"] = to_decimal(u128(rep.t));
    jb["deg_u"] = rep.empty_ideal ? -1 : rep.deg_u;
    jb["g2_terms"] = rep.g2_terms;
    jb["empty_ideal"] = rep.empty_ideal;
    nlohmann::json roots = nlohmann::json::array();
    for (W r : rep.roots) roots.push_back(to_decimal(u128(r)));
    jb["roots"] = roots;
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& s : rep.solutions) {
      nlohmann::json one = nlohmann::json::array();
      for (W x : s.x) one.push_back(to_decimal(u128(x)));
      sols.push_back(one);
    }
    jb["solutions"] = sols;
    jb["seconds"] = rep.total_seconds;
    blocks.push_back(jb);
    for (const auto& s : rep.solutions) all_solutions.push_back(s);
  }
  jout["blocks"] = blocks;
  if (!a.out_path.empty()) write_file(a.out_path, jout.dump(2) + "\n");
  if (!a.solutions_path.empty()) write_file(a.solutions_path, solutions_to_jsonl(all_solutions));
  return 0;
}

template <class W>
int cmd_check(const Args& a) {
  PrimeField<W>* Fp = nullptr;
  GmvSystem<W> sys;
  std::unique_ptr<PrimeField<W>> field_holder;
  if (!a.system_path.empty()) {
    std::string text = read_file(a.system_path);
    field_holder = std::make_unique<PrimeField<W>>(W(system_json_modulus(text)));
    Fp = field_holder.get();
    sys = system_from_json(*Fp, text);
  } else {
    field_holder = std::make_unique<PrimeField<W>>(W(parse_decimal_u128(a.p_str)));
    Fp = field_holder.get();
    SplitMix64 rng(a.seed);
    sys = generate(*Fp, a.n, rng);
  }
  if (Fp->modulus() > (u128(1) << 16) || sys.n > 8)
    raise(errc::oracle_too_large, "check is guarded to p <= 2^16 and n <= 8");

  InitializedSystem<W> init = initialize(sys);
  EliminationPlan plan = make_plan<W>(sys.n, a.plan_str);
  SolveOptions opts;
  opts.threads = a.threads;
  opts.root_seed = a.root_seed;
  PrecomputedState<W> st = precompute(sys, init, plan, opts);
  SolveReport<W> rep = solve_for_t(st, sys, sys.t, opts);
  std::vector<Solution<W>> oracle = brute_force_solve(sys);
  bool pass = rep.solutions == oracle;
  std::printf("pipeline solutions: %zu, brute-force solutions: %zu\n", rep.solutions.size(),
              oracle.size());
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::printf("%s %s\n", ok ? "ok  " : "FAIL", name.c_str());
    if (!ok) ++failures;
  };

  // published pair resultants, bit-exact
  try {
    const auto& ex = ExampleCase::get();
    ReductionRule<u64> rule = ex.recover_rule();
    auto raw1 = sparse_resultant(ex.f5, ex.f6, 5);
    report("pair-1 resultant matches the published polynomial",
           reduce_x1(raw1, rule) == ex.res_f6_f5);
    auto raw2 = sparse_resultant(ex.f3, ex.f4, 3);
    report("pair-2 resultant matches the published polynomial",
           reduce_x1(raw2, rule) == ex.res_f4_f3);
    report("sparse kernel agrees with cofactor determinant on pair 1",
           raw1 == resultant_cofactor(ex.f5, ex.f6, 5));
  } catch (const error& e) {
    report(std::string("example case: ") + e.what(), false);
  }

  // degree law sweep
  PrimeField<u64> F(8380417);
  for (int n = 5; n <= 12; ++n) {
    SplitMix64 rng(u64(1000 + n));
    auto sys = generate(F, n, rng);
    auto init = initialize(sys);
    auto st = precompute(sys, init, build_plan(n, PlanKind::balanced));
    SolveOptions opts;
    opts.find_roots = false;
    auto rep = solve_for_t(st, sys, sys.t, opts);
    long long expect = 3 * ((1LL << n) - 1);
    report("deg(u) = " + std::to_string(expect) + " at n = " + std::to_string(n),
           rep.deg_u == expect);
  }

  // multiplication bound on a chain precompute
  {
    SplitMix64 rng(99);
    auto sys = generate(F, 10, rng);
    auto init = initialize(sys);
    auto st = precompute(sys, init, build_plan(10, PlanKind::chain));
    bool ok = true;
    for (const auto& ns : st.stats)
      if (ns.muls > 4ULL * (unsigned long long)std::max(1LL, ns.h)) ok = false;
    report("multiplication count <= 4h at every chain node", ok);
    auto walk = run_walkthrough_chain(sys, init);
    bool wok = true;
    for (const auto& stp : walk.steps)
      if (stp.muls > 4ULL * (unsigned long long)std::max(1LL, stp.h)) wok = false;
    report("multiplication count <= 4h along the descending chain", wok);
  }

  std::printf("%s\n", failures == 0 ? "selftest PASS" : "selftest FAIL");
  return failures == 0 ? 0 : 1;
}

template <class W>
int cmd_bench(const Args& a) {
  PrimeField<W> F(W(parse_decimal_u128(a.p_str)));
  std::string csv = "n,p_bits,plan,part1_s,part2_s,deg_u,g2_terms,peak_terms\n";
  for (int n : a.bench_n) {
    SplitMix64 rng(a.seed);
    auto sys = generate(F, n, rng);
    auto init = initialize(sys);
    EliminationPlan plan = make_plan<W>(n, a.plan_str);
    SolveOptions opts;
    opts.threads = a.threads;
    opts.low_mem = a.low_mem;
    opts.root_seed = a.root_seed;
    auto st = precompute(sys, init, plan, opts);
    auto rep = solve_for_t(st, sys, sys.t, opts);
    char line[256];
    std::snprintf(line, sizeof line, "%d,%d,%s,%.3f,%.3f,%lld,%zu,%zu\n", n, F.bits(),
                  a.plan_str.c_str(), st.part1_seconds, rep.total_seconds, rep.deg_u,
                  rep.g2_terms, st.peak_terms);
    csv += line;
    std::fputs(line, stderr);
  }
  if (!a.out_path.empty())
    write_file(a.out_path, csv);
  else
    std::fputs(csv.c_str(), stdout);
  return 0;
}

bool wide_modulus(const std::string& p_str) { return bit_length(parse_decimal_u128(p_str)) > 64; }

std::string peek_modulus_for(const Args& a, const std::string& cmd) {
  if (cmd == "gen" || cmd == "bench" || (cmd == "check" && a.system_path.empty())) return a.p_str;
  if (cmd == "precompute" || (cmd == "check" && !a.system_path.empty()))
    return to_decimal(system_json_modulus(read_file(a.system_path)));
  if (cmd == "solve") {
    std::string text = read_file(a.cache_path);
    size_t pl = text.find("\np ");
    if (pl == std::string::npos) raise(errc::cache_integrity, "cache missing modulus line");
    size_t pe = text.find('\n', pl + 3);
    return text.substr(pl + 3, pe - pl - 3);
  }
  return a.p_str;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solves the structured chain system over F_p by successive resultant elimination:\n"
      "a t-independent precomputation reduces f_2..f_{n-1} to one polynomial, then each t\n"
      "costs two more resultants plus univariate root finding. Roots print in ascending\n"
      "order (the reference printouts are unsorted). GMV_LOG=1|2 enables diagnostics."};
  app.require_subcommand(1);
  Args a;

  auto* gen = app.add_subcommand("gen", "generate a system file and print its degree table");
  gen->add_option("--p", a.p_str, "field modulus (decimal, odd prime)")->required();
  gen->add_option("--n", a.n, "number of chain variables (>= 4)")->required();
  gen->add_option("--seed", a.seed, "sampling seed");
  gen->add_option("--t", a.t_list, "override the sampled t");
  gen->add_option("--out", a.out_path, "system file to write");

  auto* pre = app.add_subcommand("precompute", "run Part 1 and write the t-independent cache");
  pre->add_option("--system", a.system_path, "system file")->required();
  pre->add_option("--plan", a.plan_str, "chain | balanced | explicit:<file>");
  pre->add_option("--cache", a.cache_path, "cache file to write")->required();
  pre->add_option("--threads", a.threads, "worker threads (default 1)");
  pre->add_flag("--low-mem", a.low_mem, "re-derive power ladders instead of caching them");

  auto* sol = app.add_subcommand("solve", "run Part 2 against a cache for one or more t");
  sol->add_option("--cache", a.cache_path, "cache file")->required();
  sol->add_option("--system", a.system_path, "optional system file to cross-check");
  sol->add_option("--t", a.t_list, "comma-separated t values");
  sol->add_option("--random-t", a.random_t, "number of random t values to sample");
  sol->add_option("--seed", a.seed, "seed for --random-t");
  sol->add_option("--root-seed", a.root_seed, "root-finding seed");
  sol->add_option("--out", a.out_path, "machine-readable JSON report");
  sol->add_option("--solutions", a.solutions_path, "solutions file (one JSON object per line)");
  sol->add_option("--threads", a.threads, "worker threads (default 1)");
  sol->add_flag("--low-mem", a.low_mem, "re-derive power ladders instead of caching them");

  auto* chk = app.add_subcommand("check", "full pipeline vs brute force (p <= 2^16, n <= 8)");
  chk->add_option("--system", a.system_path, "system file");
  chk->add_option("--p", a.p_str, "field modulus (with --n/--seed)");
  chk->add_option("--n", a.n, "chain length");
  chk->add_option("--seed", a.seed, "sampling seed");
  chk->add_option("--plan", a.plan_str, "chain | balanced | explicit:<file>");
  chk->add_option("--root-seed", a.root_seed, "root-finding seed");
  chk->add_option("--threads", a.threads, "worker threads");

  auto* st = app.add_subcommand("selftest", "published vectors, degree laws, 4h bound");
  (void)st;

  auto* ben = app.add_subcommand("bench", "CSV timings per n");
  ben->add_option("--n", a.bench_n, "n values")->required()->delimiter(',');
  ben->add_option("--p", a.p_str, "field modulus")->default_val("8380417");
  ben->add_option("--plan", a.plan_str, "chain | balanced | explicit:<file>");
  ben->add_option("--seed", a.seed, "sampling seed");
  ben->add_option("--root-seed", a.root_seed, "root-finding seed");
  ben->add_option("--threads", a.threads, "worker threads");
  ben->add_flag("--low-mem", a.low_mem, "re-derive power ladders instead of caching them");
  ben->add_option("--out", a.out_path, "CSV file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "selftest") return cmd_selftest();
    if (cmd == "check" && a.system_path.empty() && a.p_str.empty())
      raise(errc::bad_shape, "check needs --system or --p/--n/--seed");
    bool wide = wide_modulus(peek_modulus_for(a, cmd));
    if (cmd == "gen") return wide ? cmd_gen<u128>(a) : cmd_gen<u64>(a);
    if (cmd == "precompute") return wide ? cmd_precompute<u128>(a) : cmd_precompute<u64>(a);
    if (cmd == "solve") return wide ? cmd_solve<u128>(a) : cmd_solve<u64>(a);
    if (cmd == "check") return wide ? cmd_check<u128>(a) : cmd_check<u64>(a);
    if (cmd == "bench") return wide ? cmd_bench<u128>(a) : cmd_bench<u64>(a);
    raise(errc::internal, "unhandled command " + cmd);
  } catch (const gmv::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 9;
  }
  return 0;
}
