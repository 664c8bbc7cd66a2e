#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mbs/network.hpp"
#include "mbs/ordering.hpp"

namespace mbs {

// A function recorded by the backward pass, with the bucket that produced it.
struct GeneratedFunction {
  Factor factor;
  int origin = 0;      // position (in the ordering) of the producing bucket
  int minibucket = 0;  // index of the mini-bucket (or evidence-restricted function) within that bucket
};

struct Bucket {
  int variable = 0;
  std::vector<Factor> original_factors;
  std::vector<GeneratedFunction> generated;
};

// Output of the mini-bucket scheme: the processed buckets in ordering
// position order, plus bounds and the greedy forward-pass assignment.
struct AugmentedBuckets {
  Ordering ordering;
  std::vector<Bucket> buckets;
  // Generated functions with an empty scope. Their product is the upper bound.
  std::vector<GeneratedFunction> constants;
  int i_bound = 0;
  double upper_bound = 0.0;
  Assignment mb_assignment;
  double lower_bound = kNegInf;
};

// A combined table would exceed the configured entry budget.
class MemoryCapExceeded : public std::runtime_error {
 public:
  MemoryCapExceeded(std::size_t scope_size, double entries, std::size_t cap);
  std::size_t scope_size() const { return scope_size_; }

 private:
  std::size_t scope_size_;
};

struct EliminationOptions {
  // Largest table (number of entries) a mini-bucket may materialize.
  std::size_t max_table_entries = std::size_t{1} << 24;
};

// Places every input factor in the bucket of its latest scope variable.
std::vector<Bucket> place_factors(const BeliefNetwork& net, const Ordering& d);

// Greedy first-fit i-partitioning: factors sorted by descending scope size
// (stable), each placed into the first mini-bucket whose variable union,
// including bucket_var, stays within i. Returns indices into `factors`.
std::vector<std::vector<std::size_t>> partition_bucket(const std::vector<const Factor*>& factors, int bucket_var,
                                                       int i_bound);

// Approx-MPE(i). Throws std::invalid_argument if i_bound < 1.
AugmentedBuckets approx_mpe(const BeliefNetwork& net, const Ordering& d, const Evidence& e, int i_bound,
                            const EliminationOptions& options = {});

struct MpeSolution {
  double log_value = kNegInf;
  Assignment assignment;
};

// Exact bucket elimination: approx_mpe with one mini-bucket per bucket.
MpeSolution elim_mpe(const BeliefNetwork& net, const Ordering& d, const Evidence& e,
                     const EliminationOptions& options = {});

}  // namespace mbs
