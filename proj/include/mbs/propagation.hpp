#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mbs/network.hpp"

namespace mbs {

using LogPair = std::array<double, 2>;

// Bipartite graph of binary variables and factors, with evidence already
// substituted. Evidence variables carry no variable node.
struct FactorGraph {
  std::vector<int> variables;          // network variable of each variable node
  std::vector<int> node_of;            // per network variable: node index, or -1 if observed
  std::vector<int> clamped;            // per network variable: evidence value or kUnassigned
  std::vector<Factor> factors;         // scopes in network variable indices
  std::vector<std::vector<int>> factor_nodes;  // variable nodes of each factor, in scope order
  std::vector<std::size_t> edge_offset;        // first edge index of each factor

  std::size_t edge_count() const;
  bool is_acyclic() const;
};

struct IbpOptions {
  int max_iterations = 30;
  double tolerance = 1e-8;  // on the max absolute change of any log message
};

struct IbpResult {
  std::vector<int> bit_decisions;  // per network variable
  std::vector<LogPair> beliefs;    // normalized log beliefs per network variable
  int iterations_run = 0;
  bool converged = false;
  // Largest |logsumexp(message)| seen over all iterations.
  double max_normalization_error = 0.0;
};

// Throws std::invalid_argument if a variable is not binary.
FactorGraph build_factor_graph(const BeliefNetwork& net, const Evidence& e = {});

// Sum-product loopy belief propagation with a synchronous flooding schedule.
IbpResult ibp(const FactorGraph& fg, const IbpOptions& options = {});

}  // namespace mbs
