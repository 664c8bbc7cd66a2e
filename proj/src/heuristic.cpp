#include "mbs/heuristic.hpp"

#include <stdexcept>

namespace mbs {

NodeScore HeuristicTables::root() const {
  NodeScore s;
  for (const Factor& c : root_constants) s.log_H += c.log_values()[0];
  return s;
}

HeuristicTables build_tables(const AugmentedBuckets& ab) {
  const std::size_t n = ab.buckets.size();
  HeuristicTables t;
  t.ordering = ab.ordering;
  t.cpts_here.resize(n);
  t.h_into.resize(n);
  t.h_outof.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Bucket& b = ab.buckets[p];
    t.cpts_here[p] = b.original_factors;
    for (const GeneratedFunction& g : b.generated) {
      t.h_into[p].push_back(g.factor);
      t.h_outof[static_cast<std::size_t>(g.origin)].push_back(g.factor);
    }
  }
  for (const GeneratedFunction& g : ab.constants) {
    t.root_constants.push_back(g.factor);
    t.h_outof[static_cast<std::size_t>(g.origin)].push_back(g.factor);
  }
  return t;
}

namespace {

double sum_at(const std::vector<Factor>& fs, const Assignment& a) {
  double total = 0.0;
  for (const Factor& f : fs) total += f.value(a);
  return total;
}

// One recursive g/H update, given the precomputed divisor (sum of h_outof at
// this depth).
NodeScore step(const HeuristicTables& t, const NodeScore& s, const Assignment& a, double divisor) {
  const auto p = static_cast<std::size_t>(s.depth);
  NodeScore out;
  out.depth = s.depth + 1;
  out.log_g = s.log_g + sum_at(t.cpts_here[p], a);
  // A zero divisor means every completion through this node has probability
  // zero; the product form gives 0 where the ratio form is undefined.
  if (divisor == kNegInf || s.log_H == kNegInf) {
    out.log_H = kNegInf;
  } else {
    out.log_H = s.log_H + sum_at(t.h_into[p], a) - divisor;
  }
  // H of a full assignment is the empty product; drop telescoping round-off.
  if (static_cast<std::size_t>(out.depth) == t.depth() && out.log_H != kNegInf) out.log_H = 0.0;
  return out;
}

}  // namespace

void expand_scores(const HeuristicTables& t, const NodeScore& s, Assignment& a, std::vector<NodeScore>& children,
                   int domain) {
  const auto p = static_cast<std::size_t>(s.depth);
  const auto var = static_cast<std::size_t>(t.ordering.variable_at(p));
  // h_outof[p] functions do not mention the variable at p.
  const double divisor = sum_at(t.h_outof[p], a);
  children.clear();
  for (int v = 0; v < domain; ++v) {
    a[var] = v;
    children.push_back(step(t, s, a, divisor));
  }
  a[var] = kUnassigned;
}

NodeScore extend_score(const HeuristicTables& t, const NodeScore& s, const Assignment& a) {
  return step(t, s, a, sum_at(t.h_outof[static_cast<std::size_t>(s.depth)], a));
}

NodeScore evaluate_score(const AugmentedBuckets& ab, const Assignment& a, int depth) {
  NodeScore s;
  s.depth = depth;
  for (int p = 0; p < depth; ++p) {
    const Bucket& b = ab.buckets[static_cast<std::size_t>(p)];
    for (const Factor& f : b.original_factors) s.log_g += f.value(a);
    for (const GeneratedFunction& g : b.generated)
      if (g.origin >= depth) s.log_H += g.factor.value(a);
  }
  for (const GeneratedFunction& g : ab.constants)
    if (g.origin >= depth) s.log_H += g.factor.log_values()[0];
  return s;
}

namespace {

MpeSolution best_completion(const BeliefNetwork& net, const Evidence& e, const Assignment& partial,
                            double max_completions) {
  const std::size_t n = net.size();
  if (partial.size() != n) throw std::invalid_argument("partial assignment has the wrong length");
  Assignment a = partial;
  for (const auto& [var, value] : e.pairs()) {
    const auto v = static_cast<std::size_t>(var);
    if (a.assigned(v) && a[v] != value) return MpeSolution{kNegInf, partial};
    a[v] = value;
  }
  std::vector<std::size_t> free;
  double count = 1.0;
  for (std::size_t v = 0; v < n; ++v)
    if (!a.assigned(v)) {
      free.push_back(v);
      a[v] = 0;
      count *= net.domains()[v];
    }
  if (count > max_completions)
    throw std::length_error("completion space of " + format_double(count) + " assignments exceeds the guard");

  const std::vector<Factor> factors = net.all_factors();
  MpeSolution best{kNegInf, a};
  while (true) {
    double total = 0.0;
    for (const Factor& f : factors) total += f.value(a);
    if (total > best.log_value) best = MpeSolution{total, a};
    std::size_t k = free.size();
    while (k > 0) {
      const std::size_t v = free[k - 1];
      if (++a[v] < net.domains()[v]) break;
      a[v] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return best;
}

}  // namespace

double exact_extension_value(const BeliefNetwork& net, const Evidence& e, const Assignment& partial,
                             double max_completions) {
  return best_completion(net, e, partial, max_completions).log_value;
}

MpeSolution brute_force_mpe(const BeliefNetwork& net, const Evidence& e, double max_completions) {
  return best_completion(net, e, Assignment(net.size()), max_completions);
}

}  // namespace mbs
