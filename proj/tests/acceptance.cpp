// Acceptance run: one PASS/FAIL line per criterion. Criterion 9 repeats every
// other criterion with the same seeds and compares the non-timing output.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mbs/bench.hpp"
#include "mbs/elimination.hpp"
#include "mbs/heuristic.hpp"
#include "mbs/ordering.hpp"
#include "mbs/search.hpp"
#include "support.hpp"

using namespace mbs;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool close(double a, double b) { return a == b || std::abs(a - b) <= 1e-9; }

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string record;  // non-timing output, compared across repetitions
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

SearchConfig search_config(int i, double time_bound) {
  SearchConfig cfg;
  cfg.i_bound = i;
  cfg.time_bound = time_bound;
  return cfg;
}

// The 200 random networks shared by criteria 1, 2 and 7.
GeneratedInstance oracle_network(std::uint64_t k) {
  RandomNetSpec spec;
  spec.n = 6 + static_cast<int>(k % 7);
  spec.min_domain = 2;
  spec.max_domain = 3;
  spec.max_parents = 3;
  spec.n_evidence = static_cast<int>(k % 3);
  spec.deterministic_rows = 0.05;
  spec.seed = mix_seed(1000, k);
  return gen_random_network(spec);
}

constexpr std::uint64_t kOracleNetworks = 200;

Outcome criterion1() {
  const auto start = Clock::now();
  std::ostringstream rec;
  int failures = 0;
  for (std::uint64_t k = 0; k < kOracleNetworks; ++k) {
    const auto inst = oracle_network(k);
    const int n = static_cast<int>(inst.network.size());
    const Ordering d = min_degree_ordering(moralize(inst.network));
    const double exact = oracle::mpe(inst.network, inst.evidence);
    const MpeSolution elim = elim_mpe(inst.network, d, inst.evidence);
    bool ok = close(elim.log_value, exact);
    rec << k << ' ' << format_double(exact) << ' ' << format_double(elim.log_value);
    for (int i : {2, 1 + static_cast<int>(k % static_cast<std::uint64_t>(n))}) {
      const SearchResult bb = bbmb(inst.network, d, inst.evidence, search_config(i, 600));
      const SearchResult bf = bfmb(inst.network, d, inst.evidence, search_config(i, 600));
      for (const SearchResult* r : {&bb, &bf}) {
        ok = ok && r->status == SearchStatus::kOptimal && close(r->best_log_prob, exact);
        rec << ' ' << to_string(r->status) << ' ' << format_double(r->best_log_prob) << ' ' << r->nodes_expanded;
      }
    }
    rec << '\n';
    failures += ok ? 0 : 1;
  }
  const double secs = since(start);
  return {failures == 0 && secs < 120.0,
          std::to_string(kOracleNetworks) + " networks, " + std::to_string(failures) + " mismatches, " +
              fmt("%.1f s", secs),
          rec.str()};
}

Outcome criterion2() {
  const auto start = Clock::now();
  std::ostringstream rec;
  int violations = 0;
  int exact_checked = 0;
  int equal_at_w = 0;
  int checked_at_w = 0;
  for (std::uint64_t k = 0; k < kOracleNetworks; ++k) {
    const auto inst = oracle_network(k);
    const int n = static_cast<int>(inst.network.size());
    const MoralGraph g = moralize(inst.network);
    const Ordering d = min_degree_ordering(g);
    const int w = induced_width(g, d);
    const double exact = oracle::mpe(inst.network, inst.evidence);
    rec << k << " w=" << w;
    for (int i = 1; i <= n; ++i) {
      const AugmentedBuckets ab = approx_mpe(inst.network, d, inst.evidence, i);
      if (!(ab.lower_bound <= exact + 1e-9 && exact <= ab.upper_bound + 1e-9)) ++violations;
      if (i == w + 1) {
        ++exact_checked;
        if (!(close(ab.upper_bound, exact) && close(ab.lower_bound, exact))) ++violations;
      }
      if (i == w) {
        ++checked_at_w;
        equal_at_w += close(ab.upper_bound, exact) ? 1 : 0;
      }
      rec << ' ' << format_double(ab.lower_bound) << '/' << format_double(ab.upper_bound);
    }
    rec << '\n';
  }
  const double secs = since(start);
  return {violations == 0 && exact_checked > 0 && secs < 300.0,
          std::to_string(violations) + " violations, exact at i=w*+1 on " + std::to_string(exact_checked) +
              " networks (upper exact at i=w* on " + std::to_string(equal_at_w) + "/" +
              std::to_string(checked_at_w) + "), " + fmt("%.1f s", secs),
          rec.str()};
}

// Walks the full expansion tree, returning the best joint value below the
// node (f*) and checking f at every node.
struct TreeCheck {
  const BeliefNetwork& net;
  const HeuristicTables& t;
  std::vector<int> ev;
  Assignment a;
  std::size_t nodes = 0;
  std::size_t monotone_violations = 0;
  std::size_t admissible_violations = 0;

  double visit(const NodeScore& s) {
    ++nodes;
    if (static_cast<std::size_t>(s.depth) == net.size()) {
      const double value = oracle::joint(net, a.values());
      if (s.log_f() + 1e-9 < value) ++admissible_violations;
      return value;
    }
    const int var = t.ordering.variable_at(static_cast<std::size_t>(s.depth));
    std::vector<NodeScore> kids;
    expand_scores(t, s, a, kids, net.domain(var));
    double best = kNegInf;
    const int forced = ev[static_cast<std::size_t>(var)];
    for (int v = 0; v < net.domain(var); ++v) {
      if (forced != kUnassigned && forced != v) continue;
      if (kids[static_cast<std::size_t>(v)].log_f() > s.log_f() + 1e-9) ++monotone_violations;
      a[static_cast<std::size_t>(var)] = v;
      best = std::max(best, visit(kids[static_cast<std::size_t>(v)]));
      a[static_cast<std::size_t>(var)] = kUnassigned;
    }
    if (s.log_f() + 1e-9 < best) ++admissible_violations;
    return best;
  }
};

Outcome criterion3() {
  const auto start = Clock::now();
  std::ostringstream rec;
  std::size_t nodes = 0, monotone = 0, admissible = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    RandomNetSpec spec;
    spec.n = 6 + static_cast<int>(k % 5);
    spec.n_evidence = static_cast<int>(k % 2);
    spec.deterministic_rows = 0.05;
    spec.seed = mix_seed(3000, k);
    const auto inst = gen_random_network(spec);
    const Ordering d = min_degree_ordering(moralize(inst.network));
    const double exact = oracle::mpe(inst.network, inst.evidence);
    for (int i = 1; i <= spec.n; ++i) {
      const HeuristicTables t = build_tables(approx_mpe(inst.network, d, inst.evidence, i));
      TreeCheck check{inst.network, t, inst.evidence.dense(inst.network.size()), Assignment(inst.network.size())};
      const double root_best = check.visit(t.root());
      if (!close(root_best, exact)) ++admissible;
      nodes += check.nodes;
      monotone += check.monotone_violations;
      admissible += check.admissible_violations;
      rec << k << ' ' << i << ' ' << check.nodes << ' ' << format_double(t.root().log_f()) << '\n';
    }
  }
  const double secs = since(start);
  return {monotone == 0 && admissible == 0 && secs < 300.0,
          std::to_string(nodes) + " nodes, " + std::to_string(monotone) + " monotonicity and " +
              std::to_string(admissible) + " admissibility violations, " + fmt("%.1f s", secs),
          rec.str()};
}

Outcome criterion7() {
  std::ostringstream rec;
  int wins = 0;
  int total = 0;
  for (std::uint64_t k = 0; k < kOracleNetworks; ++k) {
    const auto inst = oracle_network(k);
    const Ordering d = min_degree_ordering(moralize(inst.network));
    const SearchResult bb = bbmb(inst.network, d, inst.evidence, search_config(2, 600));
    const SearchResult bf = bfmb(inst.network, d, inst.evidence, search_config(2, 600));
    if (bb.status != SearchStatus::kOptimal || bf.status != SearchStatus::kOptimal) continue;
    ++total;
    wins += bf.nodes_expanded <= bb.nodes_expanded ? 1 : 0;
    rec << k << ' ' << bf.nodes_expanded << ' ' << bb.nodes_expanded << '\n';
  }
  const double share = total ? static_cast<double>(wins) / total : 0.0;
  return {total == static_cast<int>(kOracleNetworks) && share >= 0.8,
          std::to_string(wins) + "/" + std::to_string(total) + " instances with BFMB nodes <= BBMB nodes (" +
              fmt("%.1f%%", 100 * share) + ")",
          rec.str()};
}

// runs.csv with the two timing columns removed.
std::string untimed(const std::string& runs) {
  std::istringstream in(runs);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::size_t from = 0;
    while (true) {
      const std::size_t comma = line.find(',', from);
      cols.push_back(line.substr(from, comma - from));
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (c != 7 && c != 8) out += cols[c] + (c + 1 < cols.size() ? "," : "");
    out += '\n';
  }
  return out;
}

std::string bin_counts(const BenchReport& r) {
  std::string out;
  for (const BinRow& b : r.bins)
    out += std::string(to_string(b.algorithm)) + ',' + std::to_string(b.i_bound) + ',' + std::string(bin_label(b.bin)) +
           ',' + std::to_string(b.count) + '\n';
  return out;
}

struct Suites {
  BenchReport coding;       // BFMB over i in {2, 6, 10, 14} plus IBP, sigma 0.22
  BenchReport coding_bbmb;  // BBMB(6), sigma 0.22
  BenchReport coding_high;  // BFMB(10) and IBP, sigma 0.51
  BenchReport noisy_or;     // BBMB(10), BFMB(10)
  double seconds = 0.0;
};

BenchConfig coding_config(double sigma, double time_bound) {
  BenchConfig cfg;
  cfg.problem = ProblemClass::kCoding;
  cfg.coding.k = 50;
  cfg.coding.parents = 4;
  cfg.coding.sigma = sigma;
  cfg.simulations_per_structure = 10;
  cfg.samples = 100;
  cfg.time_bound = time_bound;
  cfg.seed = 2024;
  cfg.reference = ReferencePolicy::kBfmbProof;
  return cfg;
}

Suites run_suites(const std::filesystem::path& dir) {
  const auto start = Clock::now();
  Suites s;
  BenchConfig cfg = coding_config(0.22, 30.0);
  cfg.algorithms = {Algorithm::kBfmb, Algorithm::kIbp};
  cfg.i_bounds = {2, 6, 10, 14};
  s.coding = run_suite(cfg);
  emit_csv(s.coding, (dir / "coding").string());

  cfg.algorithms = {Algorithm::kBbmb};
  cfg.i_bounds = {6};
  s.coding_bbmb = run_suite(cfg);
  emit_csv(s.coding_bbmb, (dir / "coding_bbmb").string());

  cfg = coding_config(0.51, 60.0);
  cfg.algorithms = {Algorithm::kBfmb, Algorithm::kIbp};
  cfg.i_bounds = {10};
  s.coding_high = run_suite(cfg);
  emit_csv(s.coding_high, (dir / "coding_sigma051").string());

  BenchConfig nor;
  nor.problem = ProblemClass::kNoisyOr;
  nor.noisy_or.n = 128;
  nor.noisy_or.c = 85;
  nor.noisy_or.parents = 4;
  nor.noisy_or.p_noise = 0.2;
  nor.noisy_or.p_leak = 0.01;
  nor.noisy_or.n_evidence = 10;
  nor.samples = 30;
  nor.time_bound = 30.0;
  nor.seed = 77;
  nor.algorithms = {Algorithm::kBbmb, Algorithm::kBfmb};
  nor.i_bounds = {10};
  s.noisy_or = run_suite(nor);
  emit_csv(s.noisy_or, (dir / "noisy_or").string());
  s.seconds = since(start);
  return s;
}

std::vector<const RunRecord*> cell(const BenchReport& r, Algorithm alg, int i) {
  std::vector<const RunRecord*> out;
  for (const RunRecord& rec : r.runs)
    if (rec.algorithm == alg && rec.i_bound == i) out.push_back(&rec);
  return out;
}

std::size_t optimal_count(const std::vector<const RunRecord*>& rows) {
  std::size_t n = 0;
  for (const RunRecord* r : rows) n += r->status == "OPTIMAL" ? 1 : 0;
  return n;
}

double mean_ber(const std::vector<const RunRecord*>& rows) {
  double sum = 0.0;
  for (const RunRecord* r : rows) sum += r->ber.value_or(1.0);
  return rows.empty() ? 1.0 : sum / static_cast<double>(rows.size());
}

double mean_total(const std::vector<const RunRecord*>& rows) {
  double sum = 0.0;
  for (const RunRecord* r : rows) sum += r->total_seconds();
  return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
}

Outcome criterion4(const Suites& s) {
  const std::size_t bf = optimal_count(cell(s.coding, Algorithm::kBfmb, 6));
  const std::size_t bb = optimal_count(cell(s.coding_bbmb, Algorithm::kBbmb, 6));
  return {bf >= 90 && bb >= 90,
          "BFMB(6) optimal " + std::to_string(bf) + "/100, BBMB(6) optimal " + std::to_string(bb) + "/100",
          untimed(runs_csv(s.coding)) + bin_counts(s.coding) + untimed(runs_csv(s.coding_bbmb))};
}

Outcome criterion5(const Suites& s) {
  const double low = mean_ber(cell(s.coding, Algorithm::kBfmb, 6));
  const double bf = mean_ber(cell(s.coding_high, Algorithm::kBfmb, 10));
  const double ibp = mean_ber(cell(s.coding_high, Algorithm::kIbp, 0));
  return {low <= 0.005 && bf <= ibp + 0.02,
          "BFMB(6) BER " + fmt("%.4f", low) + " at sigma 0.22; sigma 0.51: BFMB(10) BER " + fmt("%.4f", bf) +
              ", IBP BER " + fmt("%.4f", ibp) + " (BFMB optimal " +
              std::to_string(optimal_count(cell(s.coding_high, Algorithm::kBfmb, 10))) + "/100)",
          untimed(runs_csv(s.coding_high))};
}

Outcome criterion6(const Suites& s) {
  const std::size_t bb = optimal_count(cell(s.noisy_or, Algorithm::kBbmb, 10));
  const std::size_t bf = optimal_count(cell(s.noisy_or, Algorithm::kBfmb, 10));
  return {bb >= 27 && bf >= 27,
          "BBMB(10) optimal " + std::to_string(bb) + "/30, BFMB(10) optimal " + std::to_string(bf) + "/30",
          untimed(runs_csv(s.noisy_or))};
}

Outcome criterion8(const Suites& s) {
  std::string detail = "BFMB mean total s:";
  double means[4] = {};
  const int is[4] = {2, 6, 10, 14};
  for (int k = 0; k < 4; ++k) {
    means[k] = mean_total(cell(s.coding, Algorithm::kBfmb, is[k]));
    detail += " i=" + std::to_string(is[k]) + " " + fmt("%.5f", means[k]);
  }
  return {means[3] > means[1], detail, ""};
}

struct Criterion {
  int id;
  std::string name;
  Outcome outcome;
};

std::vector<Criterion> run_all(const std::filesystem::path& dir, bool verbose) {
  auto log = [&](const std::string& m) {
    if (verbose) std::cerr << m << std::endl;
  };
  std::vector<Criterion> out;
  log("criterion 1");
  out.push_back({1, "oracle equivalence", criterion1()});
  log("criterion 2");
  out.push_back({2, "bound sandwich", criterion2()});
  log("criterion 3");
  out.push_back({3, "heuristic monotone and admissible", criterion3()});
  log("benchmark suites");
  const Suites s = run_suites(dir);
  log("suites took " + fmt("%.1f s", s.seconds));
  out.push_back({4, "coding solve rate (K=50, sigma 0.22)", criterion4(s)});
  out.push_back({5, "coding BER trend", criterion5(s)});
  out.push_back({6, "noisy-OR solve rate", criterion6(s)});
  log("criterion 7");
  out.push_back({7, "best-first node dominance at i=2", criterion7()});
  out.push_back({8, "i-bound tradeoff (mean time i=14 > i=6)", criterion8(s)});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out_dir = "acceptance_out";
  bool verbose = false;
  app.add_option("--out-dir", out_dir, "Directory for the benchmark CSV files");
  app.add_flag("--verbose", verbose, "Progress on stderr");
  CLI11_PARSE(app, argc, argv);

  const auto start = Clock::now();
  const std::filesystem::path dir(out_dir);
  std::vector<Criterion> first = run_all(dir / "run1", verbose);
  const std::vector<Criterion> second = run_all(dir / "run2", verbose);

  std::size_t differing = 0;
  std::string which;
  for (std::size_t k = 0; k < first.size(); ++k)
    if (first[k].outcome.record != second[k].outcome.record) {
      ++differing;
      which += " " + std::to_string(first[k].id);
    }
  first.push_back({9, "determinism",
                   {differing == 0,
                    differing == 0 ? "all criterion outputs byte-identical on rerun"
                                   : std::to_string(differing) + " criteria differ on rerun:" + which,
                    ""}});

  bool all = true;
  for (const Criterion& c : first) {
    std::cout << (c.outcome.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
              << "): " << c.outcome.detail << '\n';
    all = all && c.outcome.pass;
  }
  std::cout << "total " << fmt("%.1f s", since(start)) << '\n';
  return all ? 0 : 1;
}
