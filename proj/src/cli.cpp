#include "mbs/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <ostream>

#include "mbs/bench.hpp"
#include "mbs/elimination.hpp"
#include "mbs/generators.hpp"
#include "mbs/heuristic.hpp"
#include "mbs/ordering.hpp"
#include "mbs/propagation.hpp"
#include "mbs/search.hpp"

namespace mbs {

namespace {

struct GenOptions {
  std::string problem = "coding";
  CodingSpec coding;
  NoisyOrSpec noisy_or;
  RandomNetSpec random;
  std::uint64_t seed = 0;
  std::uint64_t sim_seed = 0;
  int evidence_count = -1;
  std::string out_prefix;
};

struct SolveOptions {
  std::string network;
  std::string evidence;
  std::string truth;
  std::string algorithm = "bbmb";
  int i_bound = 2;
  double time_bound = 30.0;
  std::size_t memory_cap = std::size_t{4} << 20;
  std::uint64_t seed = 0;
};

struct BenchOptions {
  std::string problem = "coding";
  std::vector<std::string> algorithms{"bbmb", "bfmb"};
  std::string reference = "proof";
  std::string out_dir = ".";
  std::vector<std::string> networks;
  std::vector<std::string> evidence;
  std::vector<std::string> truths;
  int evidence_count = -1;
};

struct VerifyOptions {
  std::string network;
  std::string evidence;
  std::vector<int> i_bounds;
  double max_completions = 1 << 22;
};

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j) s += ' ';
    s += std::to_string(v[j]);
  }
  return s;
}

void write_instance(const GenOptions& g, std::ostream& out) {
  const std::string& prefix = g.out_prefix;
  const std::string net_path = prefix + ".bayes";
  const std::string ev_path = prefix + ".evid";
  const ProblemClass problem = parse_problem_class(g.problem);
  if (problem == ProblemClass::kCoding) {
    CodingSpec spec = g.coding;
    spec.structure_seed = g.seed;
    spec.simulation_seed = g.sim_seed;
    const CodingInstance inst = gen_coding(spec);
    save_network(inst.network, net_path);
    save_evidence(Evidence{}, ev_path);
    save_truth(inst.true_input, prefix + ".truth");
    out << "wrote " << net_path << ", " << ev_path << ", " << prefix << ".truth\n";
    return;
  }
  GeneratedInstance inst;
  if (problem == ProblemClass::kNoisyOr) {
    NoisyOrSpec spec = g.noisy_or;
    spec.seed = g.seed;
    if (g.evidence_count >= 0) spec.n_evidence = g.evidence_count;
    inst = gen_noisy_or(spec);
  } else if (problem == ProblemClass::kRandom) {
    RandomNetSpec spec = g.random;
    spec.seed = g.seed;
    if (g.evidence_count >= 0) spec.n_evidence = g.evidence_count;
    inst = gen_random_network(spec);
  } else {
    throw std::invalid_argument("gen does not support class 'file'");
  }
  save_network(inst.network, net_path);
  save_evidence(inst.evidence, ev_path);
  out << "wrote " << net_path << ", " << ev_path << '\n';
}

void print_value(std::ostream& out, const std::string& key, double log_value) {
  out << key << ": " << format_double(log_value) << '\n';
}

int solve(const SolveOptions& s, std::ostream& out) {
  const BeliefNetwork net = load_network(s.network);
  const Evidence ev = s.evidence.empty() ? Evidence{} : load_evidence(s.evidence, net);
  const Ordering order = min_degree_ordering(moralize(net));
  const Algorithm alg = parse_algorithm(s.algorithm);
  out << "algorithm: " << to_string(alg) << '\n';

  std::vector<int> assignment;
  switch (alg) {
    case Algorithm::kElim: {
      const MpeSolution sol = elim_mpe(net, order, ev);
      out << "status: OPTIMAL\n";
      print_value(out, "log_value", sol.log_value);
      print_value(out, "probability", std::exp(sol.log_value));
      assignment = sol.assignment.values();
      break;
    }
    case Algorithm::kMb: {
      const AugmentedBuckets ab = approx_mpe(net, order, ev, s.i_bound);
      out << "status: " << (std::abs(ab.upper_bound - ab.lower_bound) <= 1e-9 ? "OPTIMAL" : "APPROX") << '\n';
      print_value(out, "log_value", ab.lower_bound);
      print_value(out, "probability", std::exp(ab.lower_bound));
      print_value(out, "log_upper", ab.upper_bound);
      assignment = ab.mb_assignment.values();
      break;
    }
    case Algorithm::kIbp: {
      const IbpResult res = ibp(build_factor_graph(net, ev));
      const double lv = joint_log_probability(net, Assignment(res.bit_decisions), ev);
      out << "status: APPROX\n";
      print_value(out, "log_value", lv);
      print_value(out, "probability", std::exp(lv));
      out << "iterations: " << res.iterations_run << "\nconverged: " << (res.converged ? "yes" : "no") << '\n';
      assignment = res.bit_decisions;
      break;
    }
    case Algorithm::kBbmb:
    case Algorithm::kBfmb: {
      SearchConfig cfg;
      cfg.i_bound = s.i_bound;
      cfg.time_bound = s.time_bound;
      cfg.memory_cap = s.memory_cap;
      cfg.seed = s.seed;
      const SearchResult res = alg == Algorithm::kBbmb ? bbmb(net, order, ev, cfg) : bfmb(net, order, ev, cfg);
      out << "status: " << to_string(res.status) << '\n';
      print_value(out, "log_value", res.best_log_prob);
      print_value(out, "probability", std::exp(res.best_log_prob));
      print_value(out, "log_upper", res.upper_bound);
      print_value(out, "mb_log_lower", res.mb_lower_bound);
      out << "nodes: " << res.nodes_expanded << '\n';
      print_value(out, "preprocess_s", res.preprocess_seconds);
      print_value(out, "search_s", res.search_seconds);
      assignment = res.best_assignment.values();
      break;
    }
  }
  out << "assignment: " << join(assignment) << '\n';
  if (!s.truth.empty()) {
    const std::vector<int> truth = load_truth(s.truth);
    if (truth.size() > assignment.size()) throw std::invalid_argument("truth file is longer than the assignment");
    print_value(out, "ber", bit_error_rate(std::span<const int>(assignment.data(), truth.size()), truth));
  }
  return 0;
}

int bench(BenchConfig cfg, const BenchOptions& b, std::ostream& out) {
  cfg.problem = parse_problem_class(b.problem);
  cfg.reference = parse_reference_policy(b.reference);
  cfg.algorithms.clear();
  for (const std::string& a : b.algorithms) cfg.algorithms.push_back(parse_algorithm(a));
  if (cfg.problem == ProblemClass::kFile) {
    if (!b.evidence.empty() && b.evidence.size() != b.networks.size())
      throw std::invalid_argument("--evidence must be given once per --network");
    if (!b.truths.empty() && b.truths.size() != b.networks.size())
      throw std::invalid_argument("--truth must be given once per --network");
    for (std::size_t j = 0; j < b.networks.size(); ++j)
      cfg.files.push_back(FileInstance{b.networks[j], b.evidence.empty() ? "" : b.evidence[j],
                                       b.truths.empty() ? "" : b.truths[j]});
  }
  const BenchReport report = run_suite(cfg);
  emit_csv(report, b.out_dir);

  for (const BinRow& row : report.bins) {
    if (row.bin != 0) continue;
    std::size_t optimal = 0;
    std::size_t total = 0;
    for (const RunRecord& r : report.runs)
      if (r.algorithm == row.algorithm && r.i_bound == row.i_bound) {
        ++total;
        optimal += r.status == "OPTIMAL" ? 1 : 0;
      }
    out << to_string(row.algorithm) << " i=" << row.i_bound << ": optimal " << optimal << '/' << total
        << ", opt>=0.95 " << row.count << '\n';
  }
  out << "wrote runs.csv, bins.csv, curves.csv to " << b.out_dir << '\n';
  return 0;
}

int verify(const VerifyOptions& v, std::ostream& out) {
  const BeliefNetwork net = load_network(v.network);
  const Evidence ev = v.evidence.empty() ? Evidence{} : load_evidence(v.evidence, net);
  const MoralGraph g = moralize(net);
  const Ordering order = min_degree_ordering(g);
  const MpeSolution truth = brute_force_mpe(net, ev, v.max_completions);
  print_value(out, "brute_force_log_value", truth.log_value);
  out << "induced_width: " << induced_width(g, order) << '\n';

  bool ok = true;
  auto check = [&](const std::string& name, bool pass) {
    out << (pass ? "PASS " : "FAIL ") << name << '\n';
    ok = ok && pass;
  };
  auto same = [](double a, double b) { return a == b || std::abs(a - b) <= 1e-9; };

  check("elim", same(elim_mpe(net, order, ev).log_value, truth.log_value));
  std::vector<int> bounds = v.i_bounds;
  if (bounds.empty())
    for (int i = 1; i <= static_cast<int>(net.size()); ++i) bounds.push_back(i);
  for (int i : bounds) {
    const std::string tag = " i=" + std::to_string(i);
    const AugmentedBuckets ab = approx_mpe(net, order, ev, i);
    check("mb-bounds" + tag, ab.lower_bound <= truth.log_value + 1e-9 && truth.log_value <= ab.upper_bound + 1e-9);
    SearchConfig cfg;
    cfg.i_bound = i;
    cfg.time_bound = 3600.0;
    check("bbmb" + tag, verify_optimal(bbmb(net, order, ev, cfg), net, ev, v.max_completions));
    check("bfmb" + tag, verify_optimal(bfmb(net, order, ev, cfg), net, ev, v.max_completions));
  }
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mini-bucket heuristic search for MPE in belief networks", "mbs"};
  app.require_subcommand(1);

  GenOptions g;
  auto* gen = app.add_subcommand("gen", "Generate an instance (BAYES network, evidence, truth bits)");
  gen->add_option("--class", g.problem, "coding | noisy-or | random");
  gen->add_option("--k", g.coding.k, "Information bits (coding)");
  gen->add_option("--parents", g.coding.parents, "Parents per parity bit or noisy-OR child");
  gen->add_option("--sigma", g.coding.sigma, "Channel noise standard deviation");
  gen->add_option("--seed", g.seed, "Structure seed");
  gen->add_option("--sim-seed", g.sim_seed, "Simulation seed (coding)");
  gen->add_option("--n", g.noisy_or.n, "Variables (noisy-or, random)");
  gen->add_option("--c", g.noisy_or.c, "Noisy-OR children");
  gen->add_option("--p-noise", g.noisy_or.p_noise);
  gen->add_option("--p-leak", g.noisy_or.p_leak);
  gen->add_option("--max-domain", g.random.max_domain, "Largest domain (random)");
  gen->add_option("--evidence-count", g.evidence_count, "Observed variables (noisy-or, random)");
  gen->add_option("--out", g.out_prefix, "Output path prefix")->required();

  SolveOptions s;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance with one algorithm");
  solve_cmd->add_option("--network", s.network, "BAYES network file")->required();
  solve_cmd->add_option("--evidence", s.evidence, "Evidence file");
  solve_cmd->add_option("--truth", s.truth, "Truth bits; prints the bit error rate");
  solve_cmd->add_option("--alg", s.algorithm, "mb | bbmb | bfmb | ibp | elim-mpe");
  solve_cmd->add_option("--i", s.i_bound, "Mini-bucket i-bound");
  solve_cmd->add_option("--time-bound", s.time_bound, "Seconds");
  solve_cmd->add_option("--memory-cap", s.memory_cap, "Best-first node limit");
  solve_cmd->add_option("--seed", s.seed, "Best-first tie-breaking seed");

  BenchConfig cfg;
  cfg.i_bounds = {2};
  BenchOptions b;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite and write CSV reports");
  bench_cmd->add_option("--class", b.problem, "coding | noisy-or | random | file");
  bench_cmd->add_option("--k", cfg.coding.k);
  bench_cmd->add_option("--sigma", cfg.coding.sigma);
  bench_cmd->add_option("--p-noise", cfg.noisy_or.p_noise);
  bench_cmd->add_option("--p-leak", cfg.noisy_or.p_leak);
  bench_cmd->add_option("--c", cfg.noisy_or.c);
  bench_cmd->add_option("--n", cfg.noisy_or.n, "Variables (noisy-or, random)");
  bench_cmd->add_option("--parents", cfg.coding.parents);
  bench_cmd->add_option("--evidence-count", b.evidence_count, "Observed variables (noisy-or, random)");
  bench_cmd->add_option("--i", cfg.i_bounds, "Comma-separated i-bounds")->delimiter(',');
  bench_cmd->add_option("--alg", b.algorithms, "Comma-separated algorithms")->delimiter(',');
  bench_cmd->add_option("--time-bound", cfg.time_bound);
  bench_cmd->add_option("--samples", cfg.samples);
  bench_cmd->add_option("--seed", cfg.seed);
  bench_cmd->add_option("--workers", cfg.workers);
  bench_cmd->add_option("--out-dir", b.out_dir);
  bench_cmd->add_option("--memory-cap", cfg.memory_cap, "Best-first node limit");
  bench_cmd->add_option("--reference", b.reference, "exact | proof");
  bench_cmd->add_option("--sims-per-structure", cfg.simulations_per_structure);
  bench_cmd->add_option("--network", b.networks, "Network file (class file; repeatable)");
  bench_cmd->add_option("--evidence", b.evidence, "Evidence file per network");
  bench_cmd->add_option("--truth", b.truths, "Truth file per network");

  VerifyOptions v;
  auto* verify_cmd = app.add_subcommand("verify", "Check every solver against brute-force enumeration");
  verify_cmd->add_option("--network", v.network, "BAYES network file")->required();
  verify_cmd->add_option("--evidence", v.evidence, "Evidence file");
  verify_cmd->add_option("--i", v.i_bounds, "Comma-separated i-bounds (default 1..n)")->delimiter(',');
  verify_cmd->add_option("--max-completions", v.max_completions);

  std::vector<std::string> storage{"mbs"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      g.random.n = g.noisy_or.n;
      g.noisy_or.parents = g.coding.parents;
      write_instance(g, out);
      return 0;
    }
    if (*solve_cmd) return solve(s, out);
    if (*bench_cmd) {
      cfg.noisy_or.parents = cfg.coding.parents;
      cfg.random.n = cfg.noisy_or.n;
      if (b.evidence_count >= 0) cfg.noisy_or.n_evidence = cfg.random.n_evidence = b.evidence_count;
      return bench(cfg, b, out);
    }
    if (*verify_cmd) return verify(v, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace mbs
