#include "mbs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mbs/elimination.hpp"
#include "mbs/heuristic.hpp"
#include "mbs/ordering.hpp"
#include "mbs/propagation.hpp"
#include "mbs/rng.hpp"
#include "mbs/search.hpp"

namespace mbs {

std::string_view to_string(ProblemClass c) {
  switch (c) {
    case ProblemClass::kCoding:
      return "coding";
    case ProblemClass::kNoisyOr:
      return "noisy-or";
    case ProblemClass::kRandom:
      return "random";
    case ProblemClass::kFile:
      return "file";
  }
  return "unknown";
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMb:
      return "mb";
    case Algorithm::kBbmb:
      return "bbmb";
    case Algorithm::kBfmb:
      return "bfmb";
    case Algorithm::kIbp:
      return "ibp";
    case Algorithm::kElim:
      return "elim";
  }
  return "unknown";
}

std::string_view to_string(ReferencePolicy p) {
  return p == ReferencePolicy::kExactOracle ? "exact" : "proof";
}

ProblemClass parse_problem_class(std::string_view s) {
  if (s == "coding") return ProblemClass::kCoding;
  if (s == "noisy-or" || s == "noisyor") return ProblemClass::kNoisyOr;
  if (s == "random") return ProblemClass::kRandom;
  if (s == "file") return ProblemClass::kFile;
  throw std::invalid_argument("unknown problem class '" + std::string(s) + "'");
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "mb") return Algorithm::kMb;
  if (s == "bbmb") return Algorithm::kBbmb;
  if (s == "bfmb") return Algorithm::kBfmb;
  if (s == "ibp") return Algorithm::kIbp;
  if (s == "elim" || s == "elim-mpe") return Algorithm::kElim;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

ReferencePolicy parse_reference_policy(std::string_view s) {
  if (s == "exact" || s == "exact-oracle") return ReferencePolicy::kExactOracle;
  if (s == "proof" || s == "bfmb-proof") return ReferencePolicy::kBfmbProof;
  throw std::invalid_argument("unknown reference policy '" + std::string(s) + "'");
}

bool ignores_i_bound(Algorithm a) { return a == Algorithm::kIbp || a == Algorithm::kElim; }

void BenchConfig::validate() const {
  if (algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  const bool needs_i = std::any_of(algorithms.begin(), algorithms.end(), [](Algorithm a) { return !ignores_i_bound(a); });
  if (needs_i && i_bounds.empty()) throw std::invalid_argument("no i-bounds selected");
  for (int i : i_bounds)
    if (i < 1) throw std::invalid_argument("i-bound " + std::to_string(i) + " is not positive");
  if (!(time_bound > 0.0)) throw std::invalid_argument("time bound must be positive");
  if (workers < 1) throw std::invalid_argument("worker count must be positive");
  if (memory_cap < 1) throw std::invalid_argument("memory cap must be positive");
  if (curve_points < 1) throw std::invalid_argument("curve needs at least one point");
  if (problem == ProblemClass::kFile) {
    if (files.empty()) throw std::invalid_argument("file class needs at least one network");
  } else if (samples < 1) {
    throw std::invalid_argument("sample count must be positive");
  }
  if (problem == ProblemClass::kCoding && simulations_per_structure < 1)
    throw std::invalid_argument("simulations per structure must be positive");
}

std::string_view bin_label(std::size_t bin) {
  static constexpr std::string_view labels[kBinCount] = {">=0.95", ">=0.5", ">=0.2", ">=0.01", "<0.01"};
  return labels[bin];
}

std::size_t bin_of(double opt_ratio) {
  for (std::size_t b = 0; b + 1 < kBinCount; ++b)
    if (opt_ratio >= kBinEdges[b]) return b;
  return kBinCount - 1;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct BenchInstance {
  BeliefNetwork network;
  Evidence evidence;
  std::vector<int> truth;
};

BenchInstance make_instance(const BenchConfig& cfg, std::size_t index) {
  BenchInstance inst;
  switch (cfg.problem) {
    case ProblemClass::kCoding: {
      CodingSpec spec = cfg.coding;
      const auto structure = index / static_cast<std::size_t>(cfg.simulations_per_structure);
      spec.structure_seed = mix_seed(mix_seed(cfg.seed, 0), structure);
      spec.simulation_seed = mix_seed(mix_seed(cfg.seed, 1), index);
      CodingInstance c = gen_coding(spec);
      inst.network = std::move(c.network);
      inst.truth = std::move(c.true_input);
      break;
    }
    case ProblemClass::kNoisyOr: {
      NoisyOrSpec spec = cfg.noisy_or;
      spec.seed = mix_seed(cfg.seed, index);
      GeneratedInstance g = gen_noisy_or(spec);
      inst.network = std::move(g.network);
      inst.evidence = std::move(g.evidence);
      break;
    }
    case ProblemClass::kRandom: {
      RandomNetSpec spec = cfg.random;
      spec.seed = mix_seed(cfg.seed, index);
      GeneratedInstance g = gen_random_network(spec);
      inst.network = std::move(g.network);
      inst.evidence = std::move(g.evidence);
      break;
    }
    case ProblemClass::kFile: {
      const FileInstance& f = cfg.files[index];
      inst.network = load_network(f.network);
      if (!f.evidence.empty()) inst.evidence = load_evidence(f.evidence, inst.network);
      if (!f.truth.empty()) inst.truth = load_truth(f.truth);
      break;
    }
  }
  return inst;
}

struct Preprocessed {
  std::optional<AugmentedBuckets> ab;
  std::optional<HeuristicTables> tables;
  double seconds = 0.0;
};

void fill_ber(RunRecord& r, const BenchInstance& inst) {
  if (inst.truth.empty() || r.assignment.size() < inst.truth.size()) return;
  r.ber = bit_error_rate(std::span<const int>(r.assignment.data(), inst.truth.size()), inst.truth);
}

struct InstanceOutcome {
  std::vector<RunRecord> runs;
  std::optional<double> oracle;
};

InstanceOutcome run_instance(const BenchConfig& cfg, std::size_t index) {
  const BenchInstance inst = make_instance(cfg, index);
  const BeliefNetwork& net = inst.network;
  const Evidence& ev = inst.evidence;
  const Ordering order = min_degree_ordering(moralize(net));
  EliminationOptions elim_opts;
  elim_opts.max_table_entries = cfg.max_table_entries;

  std::map<int, Preprocessed> cache;
  auto preprocess = [&](int i) -> const Preprocessed& {
    auto it = cache.find(i);
    if (it != cache.end()) return it->second;
    Preprocessed p;
    const auto start = Clock::now();
    try {
      p.ab = approx_mpe(net, order, ev, i, elim_opts);
      p.tables = build_tables(*p.ab);
    } catch (const MemoryCapExceeded&) {
      p.ab.reset();
    }
    p.seconds = since(start);
    return cache.emplace(i, std::move(p)).first->second;
  };

  std::vector<RunRecord> out;
  auto run = [&](Algorithm alg, int i) {
    RunRecord r;
    r.instance_id = static_cast<int>(index);
    r.algorithm = alg;
    r.i_bound = i;
    if (alg == Algorithm::kIbp) {
      const auto start = Clock::now();
      try {
        const FactorGraph fg = build_factor_graph(net, ev);
        IbpOptions opts;
        opts.max_iterations = cfg.ibp_iterations;
        const IbpResult res = ibp(fg, opts);
        r.search_seconds = since(start);
        r.status = "APPROX";
        r.assignment = res.bit_decisions;
        r.log_value = joint_log_probability(net, Assignment(res.bit_decisions), ev);
        r.nodes = static_cast<std::size_t>(res.iterations_run);
      } catch (const std::invalid_argument&) {
        r.status = "UNSUPPORTED";
      }
    } else if (alg == Algorithm::kElim) {
      const auto start = Clock::now();
      try {
        const MpeSolution s = elim_mpe(net, order, ev, elim_opts);
        r.status = "OPTIMAL";
        r.log_value = s.log_value;
        r.log_upper = s.log_value;
        r.assignment = s.assignment.values();
      } catch (const MemoryCapExceeded&) {
        r.status = "MEMORY_OUT";
      }
      r.preprocess_seconds = since(start);
    } else {
      const Preprocessed& pre = preprocess(i);
      r.preprocess_seconds = pre.seconds;
      if (!pre.ab) {
        r.status = "MEMORY_OUT";
      } else if (alg == Algorithm::kMb) {
        const AugmentedBuckets& ab = *pre.ab;
        const bool proved = ab.upper_bound == ab.lower_bound || std::abs(ab.upper_bound - ab.lower_bound) <= 1e-9;
        r.status = proved ? "OPTIMAL" : "APPROX";
        r.log_value = ab.lower_bound;
        r.log_upper = ab.upper_bound;
        r.assignment = ab.mb_assignment.values();
      } else {
        SearchConfig sc;
        sc.i_bound = i;
        sc.time_bound = cfg.time_bound;
        sc.memory_cap = cfg.memory_cap;
        sc.seed = mix_seed(cfg.seed ^ 0xB1F5ULL, index);
        sc.elimination = elim_opts;
        const SearchResult res = alg == Algorithm::kBbmb ? bbmb(net, ev, *pre.ab, *pre.tables, sc, pre.seconds)
                                                         : bfmb(net, ev, *pre.ab, *pre.tables, sc, pre.seconds);
        r.status = std::string(to_string(res.status));
        r.log_value = res.best_log_prob;
        r.log_upper = res.upper_bound;
        r.search_seconds = res.search_seconds;
        r.nodes = res.nodes_expanded;
        r.assignment = res.best_assignment.values();
      }
    }
    fill_ber(r, inst);
    out.push_back(std::move(r));
  };

  for (Algorithm alg : cfg.algorithms) {
    if (ignores_i_bound(alg)) {
      run(alg, 0);
    } else {
      for (int i : cfg.i_bounds) run(alg, i);
    }
  }

  InstanceOutcome outcome{std::move(out), std::nullopt};
  if (cfg.reference == ReferencePolicy::kExactOracle) {
    try {
      outcome.oracle = elim_mpe(net, order, ev, elim_opts).log_value;
    } catch (const MemoryCapExceeded&) {
    }
  }
  return outcome;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

BenchReport run_suite(const BenchConfig& cfg) {
  cfg.validate();
  const std::size_t count =
      cfg.problem == ProblemClass::kFile ? cfg.files.size() : static_cast<std::size_t>(cfg.samples);

  std::vector<InstanceOutcome> per_instance(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < count; idx = next++) {
      try {
        per_instance[idx] = run_instance(cfg, idx);
      } catch (...) {
        failures[idx] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  BenchReport report;
  report.instance_count = count;
  report.references.assign(count, std::nullopt);
  for (std::size_t idx = 0; idx < count; ++idx) {
    auto& runs = per_instance[idx].runs;
    std::optional<double> ref = per_instance[idx].oracle;
    std::optional<double> proved;
    for (const RunRecord& r : runs) {
      if (r.status != "OPTIMAL" || !r.log_value) continue;
      if (!proved) {
        proved = r.log_value;
      } else if (*proved != *r.log_value && !(std::abs(*proved - *r.log_value) <= 1e-9)) {
        ++report.reference_conflicts;
      }
    }
    if (cfg.reference == ReferencePolicy::kBfmbProof) ref = proved;
    // A zero-probability optimum gives no usable ratio.
    if (ref && *ref == kNegInf) ref.reset();
    report.references[idx] = ref;
    for (RunRecord& r : runs) {
      if (ref && r.log_value) r.opt_ratio = *r.log_value == kNegInf ? 0.0 : std::exp(*r.log_value - *ref);
      report.runs.push_back(std::move(r));
    }
  }

  std::vector<std::pair<Algorithm, int>> cells;
  for (Algorithm alg : cfg.algorithms) {
    if (ignores_i_bound(alg)) {
      cells.emplace_back(alg, 0);
    } else {
      for (int i : cfg.i_bounds) cells.emplace_back(alg, i);
    }
  }

  std::vector<double> grid;
  for (int k = 1; k <= cfg.curve_points; ++k) grid.push_back(cfg.time_bound * k / cfg.curve_points);

  for (const auto& [alg, i] : cells) {
    std::vector<const RunRecord*> rows;
    for (const RunRecord& r : report.runs)
      if (r.algorithm == alg && r.i_bound == i) rows.push_back(&r);

    std::size_t counts[kBinCount] = {};
    double times[kBinCount] = {};
    for (const RunRecord* r : rows) {
      if (!r->opt_ratio) continue;
      const std::size_t b = bin_of(*r->opt_ratio);
      ++counts[b];
      times[b] += r->total_seconds();
    }
    for (std::size_t b = 0; b < kBinCount; ++b) {
      std::optional<double> mean;
      if (counts[b] > 0) mean = times[b] / static_cast<double>(counts[b]);
      report.bins.push_back(BinRow{alg, i, b, counts[b], mean});
    }

    std::vector<double> solved;
    for (const RunRecord* r : rows)
      if (r->status == "OPTIMAL") solved.push_back(r->total_seconds());
    std::sort(solved.begin(), solved.end());
    std::vector<double> ts = grid;
    if (!solved.empty() && solved.back() > ts.back()) ts.push_back(solved.back());
    for (double t : ts) {
      const auto within = static_cast<double>(std::upper_bound(solved.begin(), solved.end(), t) - solved.begin());
      report.curves.push_back(CurvePoint{alg, i, t, count ? within / static_cast<double>(count) : 0.0});
    }
  }
  return report;
}

std::string runs_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "instance_id,algorithm,i_bound,status,log_value,log_upper,opt_ratio,preprocess_s,search_s,nodes,ber\n";
  for (const RunRecord& r : report.runs) {
    out << r.instance_id << ',' << to_string(r.algorithm) << ',' << r.i_bound << ',' << r.status << ','
        << cell(r.log_value) << ',' << cell(r.log_upper) << ',' << cell(r.opt_ratio) << ','
        << format_double(r.preprocess_seconds) << ',' << format_double(r.search_seconds) << ',' << r.nodes << ','
        << cell(r.ber) << '\n';
  }
  return out.str();
}

std::string bins_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "algorithm,i_bound,bin,count,mean_total_s\n";
  for (const BinRow& b : report.bins)
    out << to_string(b.algorithm) << ',' << b.i_bound << ',' << bin_label(b.bin) << ',' << b.count << ','
        << cell(b.mean_total_seconds) << '\n';
  return out.str();
}

std::string curves_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "algorithm,i_bound,t_seconds,fraction_solved\n";
  for (const CurvePoint& c : report.curves)
    out << to_string(c.algorithm) << ',' << c.i_bound << ',' << format_double(c.t_seconds) << ','
        << format_double(c.fraction_solved) << '\n';
  return out.str();
}

void emit_csv(const BenchReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const std::pair<const char*, std::string> files[] = {
      {"runs.csv", runs_csv(report)}, {"bins.csv", bins_csv(report)}, {"curves.csv", curves_csv(report)}};
  for (const auto& [name, body] : files) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << body;
    if (!out) throw IoError("write failed for " + path);
  }
}

}  // namespace mbs
