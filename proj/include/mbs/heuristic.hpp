#pragma once

#include <cstddef>
#include <vector>

#include "mbs/elimination.hpp"
#include "mbs/network.hpp"

namespace mbs {

// Score of a search node at depth p (the first p variables of the ordering
// are assigned): f = g * H in log space.
struct NodeScore {
  int depth = 0;
  double log_g = 0.0;
  double log_H = 0.0;
  double log_f() const { return log_g + log_H; }
};

// Per-position function lists of the mini-bucket heuristic.
//   cpts_here[p]: input functions whose latest variable is at position p.
//   h_into[p]:    generated functions residing in bucket p (all produced by
//                 later buckets).
//   h_outof[p]:   functions produced by bucket p, wherever they reside.
// Empty-scope functions are carried by root_constants and contribute to the
// root score, so their producing bucket still divides them out.
struct HeuristicTables {
  Ordering ordering;
  std::vector<std::vector<Factor>> cpts_here;
  std::vector<std::vector<Factor>> h_into;
  std::vector<std::vector<Factor>> h_outof;
  std::vector<Factor> root_constants;

  std::size_t depth() const { return cpts_here.size(); }
  // Score of the empty assignment: the product of the constants, i.e. the
  // mini-bucket upper bound.
  NodeScore root() const;
};

HeuristicTables build_tables(const AugmentedBuckets& ab);

// Scores of every value of the variable at position s.depth. `a` must assign
// the first s.depth variables; the variable at s.depth is overwritten and
// restored to kUnassigned.
void expand_scores(const HeuristicTables& t, const NodeScore& s, Assignment& a, std::vector<NodeScore>& children,
                   int domain);

// Score of assigning value v to the variable at position s.depth. `a` must
// already hold that value.
NodeScore extend_score(const HeuristicTables& t, const NodeScore& s, const Assignment& a);

// Score at the given depth computed directly from the product definition:
// input functions in buckets 1..depth times generated functions produced
// after depth that reside at or before it.
NodeScore evaluate_score(const AugmentedBuckets& ab, const Assignment& a, int depth);

// Best joint probability over completions of `partial` consistent with e, by
// enumeration. Throws std::length_error if more than max_completions
// completions would be visited.
double exact_extension_value(const BeliefNetwork& net, const Evidence& e, const Assignment& partial,
                             double max_completions = 1 << 24);

// Brute-force MPE: exact_extension_value of the empty assignment.
MpeSolution brute_force_mpe(const BeliefNetwork& net, const Evidence& e, double max_completions = 1 << 24);

}  // namespace mbs
