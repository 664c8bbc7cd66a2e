#include "mbs/ordering.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "mbs/rng.hpp"

namespace mbs {

void MoralGraph::add_edge(int u, int v) {
  if (u == v) return;
  adjacency_[static_cast<std::size_t>(u)].insert(v);
  adjacency_[static_cast<std::size_t>(v)].insert(u);
}

bool MoralGraph::has_edge(int u, int v) const { return adjacency_[static_cast<std::size_t>(u)].count(v) > 0; }

std::size_t MoralGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency_) twice += nb.size();
  return twice / 2;
}

Ordering::Ordering(std::vector<int> order) : order_(std::move(order)), position_(order_.size(), -1) {
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const int v = order_[p];
    if (v < 0 || static_cast<std::size_t>(v) >= order_.size() || position_[static_cast<std::size_t>(v)] != -1)
      throw std::invalid_argument("ordering is not a permutation");
    position_[static_cast<std::size_t>(v)] = static_cast<int>(p);
  }
}

MoralGraph moralize(const BeliefNetwork& net) {
  MoralGraph g(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& pa = net.parents()[i];
    for (std::size_t a = 0; a < pa.size(); ++a) {
      g.add_edge(pa[a], static_cast<int>(i));
      for (std::size_t b = a + 1; b < pa.size(); ++b) g.add_edge(pa[a], pa[b]);
    }
  }
  return g;
}

Ordering min_degree_ordering(const MoralGraph& g, std::optional<std::uint64_t> tie_seed) {
  const std::size_t n = g.size();
  std::vector<std::set<int>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v] = g.neighbors(static_cast<int>(v));
  std::vector<bool> removed(n, false);
  std::vector<int> order(n);
  std::optional<Rng> rng;
  if (tie_seed) rng.emplace(*tie_seed);

  std::vector<int> tied;
  for (std::size_t slot = n; slot-- > 0;) {
    std::size_t best_degree = n + 1;
    tied.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (removed[v]) continue;
      if (adj[v].size() < best_degree) {
        best_degree = adj[v].size();
        tied.assign(1, static_cast<int>(v));
      } else if (adj[v].size() == best_degree) {
        tied.push_back(static_cast<int>(v));
      }
    }
    const int pick = rng ? tied[rng->below(tied.size())] : tied.front();
    order[slot] = pick;
    removed[static_cast<std::size_t>(pick)] = true;

    const std::vector<int> nb(adj[static_cast<std::size_t>(pick)].begin(), adj[static_cast<std::size_t>(pick)].end());
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(pick);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        adj[static_cast<std::size_t>(nb[a])].insert(nb[b]);
        adj[static_cast<std::size_t>(nb[b])].insert(nb[a]);
      }
    adj[static_cast<std::size_t>(pick)].clear();
  }
  return Ordering(std::move(order));
}

int width(const MoralGraph& g, const Ordering& d) {
  int w = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const int pos = d.position_of(static_cast<int>(v));
    const auto earlier = std::count_if(g.neighbors(static_cast<int>(v)).begin(), g.neighbors(static_cast<int>(v)).end(),
                                       [&](int u) { return d.position_of(u) < pos; });
    w = std::max(w, static_cast<int>(earlier));
  }
  return w;
}

int induced_width(const MoralGraph& g, const Ordering& d) {
  const std::size_t n = g.size();
  // earlier[v]: neighbors of v that precede it in d, grown by fill-in.
  std::vector<std::set<int>> earlier(n);
  for (std::size_t v = 0; v < n; ++v)
    for (int u : g.neighbors(static_cast<int>(v)))
      if (d.position_of(u) < d.position_of(static_cast<int>(v))) earlier[v].insert(u);

  int w = 0;
  for (std::size_t pos = n; pos-- > 0;) {
    const int v = d.variable_at(pos);
    const auto& parents = earlier[static_cast<std::size_t>(v)];
    w = std::max(w, static_cast<int>(parents.size()));
    for (auto a = parents.begin(); a != parents.end(); ++a)
      for (auto b = std::next(a); b != parents.end(); ++b) {
        if (d.position_of(*a) < d.position_of(*b))
          earlier[static_cast<std::size_t>(*b)].insert(*a);
        else
          earlier[static_cast<std::size_t>(*a)].insert(*b);
      }
  }
  return w;
}

}  // namespace mbs
