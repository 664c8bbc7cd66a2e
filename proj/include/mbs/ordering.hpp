#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "mbs/network.hpp"

namespace mbs {

// Undirected graph with symmetric neighbor sets and no self-loops.
class MoralGraph {
 public:
  explicit MoralGraph(std::size_t n = 0) : adjacency_(n) {}

  std::size_t size() const { return adjacency_.size(); }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  const std::set<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  std::size_t edge_count() const;

 private:
  std::vector<std::set<int>> adjacency_;
};

// A permutation of the variables. order[0] is processed first in the forward
// direction (and its bucket last during elimination).
class Ordering {
 public:
  Ordering() = default;
  explicit Ordering(std::vector<int> order);

  std::size_t size() const { return order_.size(); }
  int variable_at(std::size_t pos) const { return order_[pos]; }
  int position_of(int var) const { return position_[static_cast<std::size_t>(var)]; }
  const std::vector<int>& order() const { return order_; }
  const std::vector<int>& positions() const { return position_; }

 private:
  std::vector<int> order_;
  std::vector<int> position_;
};

MoralGraph moralize(const BeliefNetwork& net);

// Repeatedly removes a minimum-degree node, placing it at the end of the
// ordering and connecting its neighbors. Ties go to the lowest variable index
// unless tie_seed is given, in which case they are broken uniformly at random.
Ordering min_degree_ordering(const MoralGraph& g, std::optional<std::uint64_t> tie_seed = std::nullopt);

// Maximum number of earlier neighbors of any node before fill-in.
int width(const MoralGraph& g, const Ordering& d);

// Maximum earlier-neighbor count in the induced graph, built by processing
// nodes last to first and connecting the earlier neighbors of each.
int induced_width(const MoralGraph& g, const Ordering& d);

}  // namespace mbs
