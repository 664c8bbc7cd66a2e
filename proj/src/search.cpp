#include "mbs/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "mbs/rng.hpp"

namespace mbs {

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::kOptimal:
      return "OPTIMAL";
    case SearchStatus::kTimeout:
      return "TIMEOUT";
    case SearchStatus::kMemoryOut:
      return "MEMORY_OUT";
  }
  return "UNKNOWN";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Wall-clock bookkeeping shared by both searches. `start` is backdated by the
// preprocessing time so that elapsed() covers the whole call.
class Stopwatch {
 public:
  Stopwatch(double preprocess_seconds, double time_bound, double trace_interval)
      : start_(Clock::now() - std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(preprocess_seconds))),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(time_bound))),
        interval_(trace_interval),
        next_sample_(preprocess_seconds + trace_interval) {}

  bool expired() const { return Clock::now() >= deadline_; }
  double elapsed() const { return seconds_since(start_); }

  // Appends a periodic sample if one is due.
  void sample(std::vector<TracePoint>& trace, double value) {
    const double now = elapsed();
    if (now < next_sample_) return;
    record(trace, now, value);
    next_sample_ = now + interval_;
  }

  static void record(std::vector<TracePoint>& trace, double now, double value) {
    if (!trace.empty()) {
      now = std::max(now, trace.back().seconds);
      value = std::max(value, trace.back().log_value);
    }
    trace.push_back({now, value});
  }

 private:
  Clock::time_point start_;
  Clock::time_point deadline_;
  double interval_;
  double next_sample_;
};

SearchResult start_result(const AugmentedBuckets& ab, double preprocess_seconds) {
  SearchResult r;
  r.upper_bound = ab.upper_bound;
  r.mb_lower_bound = ab.lower_bound;
  r.best_assignment = ab.mb_assignment;
  r.best_log_prob = ab.lower_bound;
  r.preprocess_seconds = preprocess_seconds;
  r.anytime_trace.push_back({preprocess_seconds, ab.lower_bound});
  return r;
}

struct Candidate {
  double log_f;
  int value;
  NodeScore score;
};

}  // namespace

SearchResult bbmb(const BeliefNetwork& net, const Evidence& e, const AugmentedBuckets& ab, const HeuristicTables& t,
                  const SearchConfig& cfg, double preprocess_seconds, const SearchHooks& hooks) {
  const std::size_t n = net.size();
  SearchResult result = start_result(ab, preprocess_seconds);
  Stopwatch clock(preprocess_seconds, cfg.time_bound, cfg.trace_interval);
  const std::vector<int> ev = e.dense(n);

  double lower = kNegInf;  // L
  Assignment incumbent;
  Assignment a(n);
  std::vector<std::vector<Candidate>> frames(n);
  std::vector<std::size_t> cursor(n, 0);
  std::vector<NodeScore> children;
  bool exhausted = false;

  auto prune = [&](std::size_t depth, const Candidate& c) {
    if (!hooks.on_prune) return;
    const auto var = static_cast<std::size_t>(t.ordering.variable_at(depth));
    a[var] = c.value;
    hooks.on_prune(a, c.log_f, lower);
    a[var] = kUnassigned;
  };

  // Generates and orders the children of the node at `depth`; false on timeout.
  auto expand = [&](std::size_t depth, const NodeScore& score) {
    if (clock.expired()) return false;
    clock.sample(result.anytime_trace, std::max(lower, ab.lower_bound));
    ++result.nodes_expanded;
    const int var = t.ordering.variable_at(depth);
    expand_scores(t, score, a, children, net.domain(var));
    auto& frame = frames[depth];
    frame.clear();
    cursor[depth] = 0;
    const int forced = ev[static_cast<std::size_t>(var)];
    for (int v = 0; v < net.domain(var); ++v) {
      if (forced != kUnassigned && v != forced) continue;
      const NodeScore& s = children[static_cast<std::size_t>(v)];
      Candidate c{s.log_f(), v, s};
      if (c.log_f <= lower) {
        prune(depth, c);
        continue;
      }
      frame.push_back(c);
    }
    std::stable_sort(frame.begin(), frame.end(), [](const Candidate& x, const Candidate& y) { return x.log_f > y.log_f; });
    return true;
  };

  if (n == 0) {
    exhausted = true;
    incumbent = a;
    lower = 0.0;
  } else if (expand(0, t.root())) {
    std::size_t depth = 0;
    while (true) {
      auto& frame = frames[depth];
      std::size_t& k = cursor[depth];
      // Forward: skip values whose bound no longer beats L.
      while (k < frame.size() && frame[k].log_f <= lower) prune(depth, frame[k++]);
      const auto var = static_cast<std::size_t>(t.ordering.variable_at(depth));
      if (k == frame.size()) {
        a[var] = kUnassigned;
        if (depth == 0) {
          exhausted = true;
          break;
        }
        --depth;
        continue;
      }
      const Candidate& c = frame[k++];
      a[var] = c.value;
      if (depth + 1 == n) {
        lower = c.score.log_g;
        incumbent = a;
        if (lower > ab.lower_bound) Stopwatch::record(result.anytime_trace, clock.elapsed(), lower);
        continue;
      }
      if (!expand(depth + 1, c.score)) break;
      ++depth;
    }
  }

  result.search_seconds = std::max(0.0, clock.elapsed() - preprocess_seconds);
  result.status = exhausted ? SearchStatus::kOptimal : SearchStatus::kTimeout;
  // Without an incumbent (interrupted early, or every completion has
  // probability zero) the mini-bucket assignment stands.
  if (lower != kNegInf && (exhausted || lower > result.best_log_prob)) {
    result.best_assignment = incumbent;
    result.best_log_prob = lower;
  }
  Stopwatch::record(result.anytime_trace, clock.elapsed(), result.best_log_prob);
  return result;
}

namespace {

struct OpenEntry {
  double log_f;
  int depth;
  std::uint64_t tie;
  double log_g;
  double log_H;
  std::uint32_t node;
};

// Max-heap order: larger f, then deeper, then larger random key.
struct OpenLess {
  bool operator()(const OpenEntry& x, const OpenEntry& y) const {
    if (x.log_f != y.log_f) return x.log_f < y.log_f;
    if (x.depth != y.depth) return x.depth < y.depth;
    return x.tie < y.tie;
  }
};

struct TreeNode {
  std::int32_t parent;
  std::int32_t value;
};

}  // namespace

SearchResult bfmb(const BeliefNetwork& net, const Evidence& e, const AugmentedBuckets& ab, const HeuristicTables& t,
                  const SearchConfig& cfg, double preprocess_seconds) {
  const std::size_t n = net.size();
  SearchResult result = start_result(ab, preprocess_seconds);
  Stopwatch clock(preprocess_seconds, cfg.time_bound, cfg.trace_interval);
  const std::vector<int> ev = e.dense(n);
  Rng rng(cfg.seed);

  std::vector<TreeNode> tree;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenLess> open;
  const NodeScore root = t.root();
  tree.push_back({-1, 0});
  open.push({root.log_f(), 0, rng.next(), root.log_g, root.log_H, 0});

  Assignment a(n);
  std::vector<NodeScore> children;
  SearchStatus status = SearchStatus::kOptimal;

  auto load_path = [&](std::uint32_t node, int depth) {
    for (std::size_t p = 0; p < n; ++p) a[static_cast<std::size_t>(t.ordering.variable_at(p))] = kUnassigned;
    for (int p = depth; p-- > 0;) {
      a[static_cast<std::size_t>(t.ordering.variable_at(static_cast<std::size_t>(p)))] = tree[node].value;
      node = static_cast<std::uint32_t>(tree[node].parent);
    }
  };

  if (cfg.memory_cap < 1) status = SearchStatus::kMemoryOut;
  while (status == SearchStatus::kOptimal && !open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (static_cast<std::size_t>(top.depth) == n) {
      load_path(top.node, top.depth);
      result.best_assignment = a;
      result.best_log_prob = top.log_g;
      break;
    }
    if (clock.expired()) {
      status = SearchStatus::kTimeout;
      break;
    }
    clock.sample(result.anytime_trace, ab.lower_bound);
    ++result.nodes_expanded;
    load_path(top.node, top.depth);
    const auto depth = static_cast<std::size_t>(top.depth);
    const int var = t.ordering.variable_at(depth);
    expand_scores(t, NodeScore{top.depth, top.log_g, top.log_H}, a, children, net.domain(var));
    const int forced = ev[static_cast<std::size_t>(var)];
    for (int v = 0; v < net.domain(var); ++v) {
      if (forced != kUnassigned && v != forced) continue;
      const NodeScore& s = children[static_cast<std::size_t>(v)];
      if (s.log_f() == kNegInf) continue;
      if (tree.size() >= cfg.memory_cap) {
        status = SearchStatus::kMemoryOut;
        break;
      }
      tree.push_back({static_cast<std::int32_t>(top.node), v});
      open.push({s.log_f(), s.depth, rng.next(), s.log_g, s.log_H, static_cast<std::uint32_t>(tree.size() - 1)});
    }
  }

  result.status = status;
  result.search_seconds = std::max(0.0, clock.elapsed() - preprocess_seconds);
  // Interrupted, or every completion has probability zero: the mini-bucket
  // assignment already in the result stands.
  Stopwatch::record(result.anytime_trace, clock.elapsed(), result.best_log_prob);
  return result;
}

namespace {

struct Preprocessed {
  AugmentedBuckets ab;
  HeuristicTables tables;
  double seconds;
};

Preprocessed preprocess(const BeliefNetwork& net, const Ordering& d, const Evidence& e, const SearchConfig& cfg) {
  const auto start = Clock::now();
  AugmentedBuckets ab = approx_mpe(net, d, e, cfg.i_bound, cfg.elimination);
  HeuristicTables tables = build_tables(ab);
  return Preprocessed{std::move(ab), std::move(tables), seconds_since(start)};
}

}  // namespace

SearchResult bbmb(const BeliefNetwork& net, const Ordering& d, const Evidence& e, const SearchConfig& cfg,
                  const SearchHooks& hooks) {
  const Preprocessed pre = preprocess(net, d, e, cfg);
  return bbmb(net, e, pre.ab, pre.tables, cfg, pre.seconds, hooks);
}

SearchResult bfmb(const BeliefNetwork& net, const Ordering& d, const Evidence& e, const SearchConfig& cfg) {
  const Preprocessed pre = preprocess(net, d, e, cfg);
  return bfmb(net, e, pre.ab, pre.tables, cfg, pre.seconds);
}

bool verify_optimal(const SearchResult& result, const BeliefNetwork& net, const Evidence& e,
                    double max_completions) {
  if (result.status != SearchStatus::kOptimal) return false;
  const MpeSolution truth = brute_force_mpe(net, e, max_completions);
  if (truth.log_value == kNegInf || result.best_log_prob == kNegInf)
    return truth.log_value == result.best_log_prob;
  return std::abs(truth.log_value - result.best_log_prob) <= 1e-9;
}

}  // namespace mbs
