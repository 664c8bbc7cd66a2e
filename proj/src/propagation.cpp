#include "mbs/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mbs {

std::size_t FactorGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nodes : factor_nodes) total += nodes.size();
  return total;
}

bool FactorGraph::is_acyclic() const {
  // Union-find over variable nodes [0, V) and factor nodes [V, V + F).
  const std::size_t v_count = variables.size();
  std::vector<std::size_t> parent(v_count + factors.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t f = 0; f < factors.size(); ++f)
    for (int node : factor_nodes[f]) {
      const std::size_t a = find(static_cast<std::size_t>(node));
      const std::size_t b = find(v_count + f);
      if (a == b) return false;
      parent[a] = b;
    }
  return true;
}

FactorGraph build_factor_graph(const BeliefNetwork& net, const Evidence& e) {
  const std::size_t n = net.size();
  for (std::size_t v = 0; v < n; ++v)
    if (net.domains()[v] != 2) throw std::invalid_argument("belief propagation needs binary variables; variable " +
                                                           std::to_string(v) + " has domain " +
                                                           std::to_string(net.domains()[v]));
  FactorGraph fg;
  fg.clamped = e.dense(n);
  fg.node_of.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v)
    if (fg.clamped[v] == kUnassigned) {
      fg.node_of[v] = static_cast<int>(fg.variables.size());
      fg.variables.push_back(static_cast<int>(v));
    }

  std::size_t offset = 0;
  for (const Factor& original : net.all_factors()) {
    Factor f = original;
    for (const auto& [var, value] : e.pairs()) f = f.restrict(var, value);
    if (f.arity() == 0) continue;
    std::vector<int> nodes;
    for (int var : f.scope()) nodes.push_back(fg.node_of[static_cast<std::size_t>(var)]);
    fg.edge_offset.push_back(offset);
    offset += nodes.size();
    fg.factor_nodes.push_back(std::move(nodes));
    fg.factors.push_back(std::move(f));
  }
  return fg;
}

namespace {

double normalize(LogPair& m) {
  const double z = log_add(m[0], m[1]);
  if (z == kNegInf) {
    m = {std::log(0.5), std::log(0.5)};
    return 0.0;
  }
  m[0] -= z;
  m[1] -= z;
  return std::abs(log_add(m[0], m[1]));
}

double change(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b);
}

}  // namespace

IbpResult ibp(const FactorGraph& fg, const IbpOptions& options) {
  const std::size_t edges = fg.edge_count();
  const double half = std::log(0.5);
  std::vector<LogPair> to_var(edges, {half, half});
  std::vector<LogPair> to_factor(edges, {half, half});
  std::vector<LogPair> next(edges);

  // Edges incident to each variable node.
  std::vector<std::vector<std::size_t>> var_edges(fg.variables.size());
  for (std::size_t f = 0; f < fg.factors.size(); ++f)
    for (std::size_t slot = 0; slot < fg.factor_nodes[f].size(); ++slot)
      var_edges[static_cast<std::size_t>(fg.factor_nodes[f][slot])].push_back(fg.edge_offset[f] + slot);

  IbpResult result;
  std::vector<int> values;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Factor to variable.
    for (std::size_t f = 0; f < fg.factors.size(); ++f) {
      const Factor& factor = fg.factors[f];
      const std::size_t k = factor.arity();
      const std::size_t base = fg.edge_offset[f];
      for (std::size_t slot = 0; slot < k; ++slot) next[base + slot] = {kNegInf, kNegInf};
      for (std::size_t idx = 0; idx < factor.table_size(); ++idx) {
        values = factor.decode(idx);
        const double fv = factor.log_values()[idx];
        if (fv == kNegInf) continue;
        for (std::size_t slot = 0; slot < k; ++slot) {
          double sum = fv;
          for (std::size_t other = 0; other < k; ++other)
            if (other != slot) sum += to_factor[base + other][static_cast<std::size_t>(values[other])];
          auto& out = next[base + slot][static_cast<std::size_t>(values[slot])];
          out = log_add(out, sum);
        }
      }
    }
    double delta = 0.0;
    for (std::size_t edge = 0; edge < edges; ++edge) {
      result.max_normalization_error = std::max(result.max_normalization_error, normalize(next[edge]));
      delta = std::max({delta, change(next[edge][0], to_var[edge][0]), change(next[edge][1], to_var[edge][1])});
    }
    to_var.swap(next);

    // Variable to factor: product of the other incoming messages.
    for (const auto& incident : var_edges)
      for (std::size_t edge : incident) {
        LogPair m{0.0, 0.0};
        for (std::size_t other : incident)
          if (other != edge) {
            m[0] += to_var[other][0];
            m[1] += to_var[other][1];
          }
        result.max_normalization_error = std::max(result.max_normalization_error, normalize(m));
        to_factor[edge] = m;
      }

    result.iterations_run = iter + 1;
    if (delta < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  const std::size_t n = fg.node_of.size();
  result.beliefs.assign(n, {half, half});
  result.bit_decisions.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (fg.clamped[v] != kUnassigned) {
      result.beliefs[v] = fg.clamped[v] == 0 ? LogPair{0.0, kNegInf} : LogPair{kNegInf, 0.0};
      result.bit_decisions[v] = fg.clamped[v];
      continue;
    }
    LogPair b{0.0, 0.0};
    for (std::size_t edge : var_edges[static_cast<std::size_t>(fg.node_of[v])]) {
      b[0] += to_var[edge][0];
      b[1] += to_var[edge][1];
    }
    normalize(b);
    result.beliefs[v] = b;
    result.bit_decisions[v] = b[1] > b[0] ? 1 : 0;
  }
  return result;
}

}  // namespace mbs
