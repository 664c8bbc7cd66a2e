#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "mbs/elimination.hpp"
#include "mbs/heuristic.hpp"
#include "mbs/network.hpp"
#include "mbs/ordering.hpp"

namespace mbs {

enum class SearchStatus { kOptimal, kTimeout, kMemoryOut };

std::string_view to_string(SearchStatus status);

struct SearchConfig {
  int i_bound = 2;
  // Wall-clock budget in seconds, measured from the start of the call
  // (mini-bucket preprocessing included).
  double time_bound = 30.0;
  // Best-first only: maximum number of stored search nodes.
  std::size_t memory_cap = std::size_t{4} << 20;
  // Seconds between periodic anytime-trace samples.
  double trace_interval = 0.5;
  // Seeds the best-first tie-breaking keys.
  std::uint64_t seed = 0;
  EliminationOptions elimination;
};

struct TracePoint {
  double seconds = 0.0;
  double log_value = kNegInf;
};

struct SearchResult {
  SearchStatus status = SearchStatus::kTimeout;
  Assignment best_assignment;
  double best_log_prob = kNegInf;  // lower bound L
  double upper_bound = 0.0;        // mini-bucket upper bound
  double mb_lower_bound = kNegInf;
  std::size_t nodes_expanded = 0;
  double preprocess_seconds = 0.0;
  double search_seconds = 0.0;
  // (elapsed seconds since the call started, best value reportable then);
  // nondecreasing in both coordinates.
  std::vector<TracePoint> anytime_trace;

  double total_seconds() const { return preprocess_seconds + search_seconds; }
};

// Observers used by tests; both are optional.
struct SearchHooks {
  // Called when branch-and-bound discards a child: (partial assignment
  // including the child, child log f, current log L).
  std::function<void(const Assignment&, double, double)> on_prune;
};

// Depth-first branch-and-bound guided by the mini-bucket heuristic.
SearchResult bbmb(const BeliefNetwork& net, const Ordering& d, const Evidence& e, const SearchConfig& cfg,
                  const SearchHooks& hooks = {});

// Best-first (A*) search guided by the mini-bucket heuristic.
SearchResult bfmb(const BeliefNetwork& net, const Ordering& d, const Evidence& e, const SearchConfig& cfg);

// Variants over a precomputed heuristic, so several searches can share one
// preprocessing run. preprocess_seconds is copied into the result and counts
// against the time bound.
SearchResult bbmb(const BeliefNetwork& net, const Evidence& e, const AugmentedBuckets& ab, const HeuristicTables& t,
                  const SearchConfig& cfg, double preprocess_seconds, const SearchHooks& hooks = {});
SearchResult bfmb(const BeliefNetwork& net, const Evidence& e, const AugmentedBuckets& ab, const HeuristicTables& t,
                  const SearchConfig& cfg, double preprocess_seconds);

// True iff the result is OPTIMAL and matches brute-force enumeration within
// 1e-9. Throws std::length_error when the network is too large to enumerate.
bool verify_optimal(const SearchResult& result, const BeliefNetwork& net, const Evidence& e,
                    double max_completions = 1 << 24);

}  // namespace mbs
