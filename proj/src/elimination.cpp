#include "mbs/elimination.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mbs {

MemoryCapExceeded::MemoryCapExceeded(std::size_t scope_size, double entries, std::size_t cap)
    : std::runtime_error("refusing to build a table over " + std::to_string(scope_size) + " variables (" +
                         format_double(entries) + " entries, cap " + std::to_string(cap) + ")"),
      scope_size_(scope_size) {}

std::vector<Bucket> place_factors(const BeliefNetwork& net, const Ordering& d) {
  std::vector<Bucket> buckets(net.size());
  for (std::size_t p = 0; p < net.size(); ++p) buckets[p].variable = d.variable_at(p);
  for (Factor& f : net.all_factors()) {
    int latest = 0;
    for (int v : f.scope()) latest = std::max(latest, d.position_of(v));
    buckets[static_cast<std::size_t>(latest)].original_factors.push_back(std::move(f));
  }
  return buckets;
}

std::vector<std::vector<std::size_t>> partition_bucket(const std::vector<const Factor*>& factors, int bucket_var,
                                                       int i_bound) {
  std::vector<std::size_t> by_size(factors.size());
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return factors[a]->arity() > factors[b]->arity(); });

  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::vector<int>> unions;  // sorted variable sets, each containing bucket_var
  for (std::size_t idx : by_size) {
    std::vector<int> scope = factors[idx]->scope();
    scope.push_back(bucket_var);
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());

    bool placed = false;
    for (std::size_t m = 0; m < parts.size() && !placed; ++m) {
      std::vector<int> merged;
      std::set_union(unions[m].begin(), unions[m].end(), scope.begin(), scope.end(), std::back_inserter(merged));
      if (merged.size() <= static_cast<std::size_t>(i_bound)) {
        parts[m].push_back(idx);
        unions[m] = std::move(merged);
        placed = true;
      }
    }
    if (!placed) {
      parts.push_back({idx});
      unions.push_back(std::move(scope));
    }
  }
  return parts;
}

AugmentedBuckets approx_mpe(const BeliefNetwork& net, const Ordering& d, const Evidence& e, int i_bound,
                            const EliminationOptions& options) {
  if (i_bound < 1) throw std::invalid_argument("i-bound must be at least 1");
  const std::size_t n = net.size();

  AugmentedBuckets out;
  out.ordering = d;
  out.i_bound = i_bound;
  out.buckets = place_factors(net, d);
  const std::vector<int> ev = e.dense(n);

  auto emit = [&](Factor f, int origin, int minibucket) {
    GeneratedFunction g{std::move(f), origin, minibucket};
    if (g.factor.arity() == 0) {
      out.constants.push_back(std::move(g));
      return;
    }
    int latest = 0;
    for (int v : g.factor.scope()) latest = std::max(latest, d.position_of(v));
    out.buckets[static_cast<std::size_t>(latest)].generated.push_back(std::move(g));
  };

  for (std::size_t p = n; p-- > 0;) {
    Bucket& bucket = out.buckets[p];
    const int var = bucket.variable;
    std::vector<const Factor*> funcs;
    for (const Factor& f : bucket.original_factors) funcs.push_back(&f);
    for (const GeneratedFunction& g : bucket.generated) funcs.push_back(&g.factor);

    // Everything emitted lands in a strictly earlier bucket, so `funcs` stays valid.
    if (ev[static_cast<std::size_t>(var)] != kUnassigned) {
      for (std::size_t j = 0; j < funcs.size(); ++j)
        emit(funcs[j]->restrict(var, ev[static_cast<std::size_t>(var)]), static_cast<int>(p), static_cast<int>(j));
      continue;
    }

    const auto parts = partition_bucket(funcs, var, i_bound);
    for (std::size_t l = 0; l < parts.size(); ++l) {
      std::vector<const Factor*> members;
      std::vector<int> vars;
      for (std::size_t idx : parts[l]) {
        members.push_back(funcs[idx]);
        vars.insert(vars.end(), funcs[idx]->scope().begin(), funcs[idx]->scope().end());
      }
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      double entries = 1.0;
      for (int v : vars)
        if (v != var) entries *= net.domain(v);
      if (entries > static_cast<double>(options.max_table_entries))
        throw MemoryCapExceeded(vars.size(), entries, options.max_table_entries);
      emit(combine_max(std::span<const Factor* const>(members), var), static_cast<int>(p), static_cast<int>(l));
    }
  }

  out.upper_bound = 0.0;
  for (const GeneratedFunction& g : out.constants) out.upper_bound += g.factor.log_values()[0];

  Assignment a(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Bucket& bucket = out.buckets[p];
    const auto var = static_cast<std::size_t>(bucket.variable);
    if (ev[var] != kUnassigned) {
      a[var] = ev[var];
      continue;
    }
    int best_value = 0;
    double best = kNegInf;
    for (int v = 0; v < net.domain(bucket.variable); ++v) {
      a[var] = v;
      double sum = 0.0;
      for (const Factor& f : bucket.original_factors) sum += f.value(a);
      for (const GeneratedFunction& g : bucket.generated) sum += g.factor.value(a);
      if (sum > best) {
        best = sum;
        best_value = v;
      }
    }
    a[var] = best_value;
  }
  out.lower_bound = joint_log_probability(net, a, e);
  out.mb_assignment = std::move(a);
  return out;
}

MpeSolution elim_mpe(const BeliefNetwork& net, const Ordering& d, const Evidence& e,
                     const EliminationOptions& options) {
  const int i_bound = std::max(1, static_cast<int>(net.size()));
  AugmentedBuckets ab = approx_mpe(net, d, e, i_bound, options);
  return MpeSolution{ab.lower_bound, std::move(ab.mb_assignment)};
}

}  // namespace mbs
