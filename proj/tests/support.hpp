#pragma once

// Brute-force reference computations for tests. These deliberately avoid the
// library's factor indexing and enumeration helpers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mbs/generators.hpp"
#include "mbs/network.hpp"
#include "mbs/rng.hpp"

namespace oracle {

using mbs::BeliefNetwork;
using mbs::Evidence;
using mbs::Factor;

inline constexpr double kNegInf = mbs::kNegInf;

// Table lookup computed with explicit strides.
inline double lookup(const Factor& f, const std::vector<int>& values) {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (std::size_t k = f.scope().size(); k-- > 0;) {
    idx += stride * static_cast<std::size_t>(values[static_cast<std::size_t>(f.scope()[k])]);
    stride *= static_cast<std::size_t>(f.cards()[k]);
  }
  return f.log_values()[idx];
}

inline double joint(const BeliefNetwork& net, const std::vector<int>& values) {
  double total = 0.0;
  for (const Factor& f : net.cpts()) total += lookup(f, values);
  for (const Factor& f : net.likelihoods()) total += lookup(f, values);
  return total;
}

// Visits every full assignment that agrees with `fixed` (entries >= 0).
inline void for_each_completion(const std::vector<int>& domains, const std::vector<int>& fixed,
                                const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> values(domains.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t v) {
    if (v == domains.size()) {
      visit(values);
      return;
    }
    if (fixed[v] >= 0) {
      values[v] = fixed[v];
      rec(v + 1);
      return;
    }
    for (int x = 0; x < domains[v]; ++x) {
      values[v] = x;
      rec(v + 1);
    }
  };
  rec(0);
}

inline std::vector<int> fixed_from(const BeliefNetwork& net, const Evidence& e) {
  std::vector<int> fixed(net.size(), -1);
  for (const auto& [var, value] : e.pairs()) fixed[static_cast<std::size_t>(var)] = value;
  return fixed;
}

// Best completion of `partial` (entries >= 0 are fixed) consistent with e.
inline double best_extension(const BeliefNetwork& net, const Evidence& e, const std::vector<int>& partial) {
  std::vector<int> fixed = fixed_from(net, e);
  for (std::size_t v = 0; v < partial.size(); ++v) {
    if (partial[v] < 0) continue;
    if (fixed[v] >= 0 && fixed[v] != partial[v]) return kNegInf;
    fixed[v] = partial[v];
  }
  double best = kNegInf;
  for_each_completion(net.domains(), fixed, [&](const std::vector<int>& a) { best = std::max(best, joint(net, a)); });
  return best;
}

inline double mpe(const BeliefNetwork& net, const Evidence& e = {}) {
  return best_extension(net, e, std::vector<int>(net.size(), -1));
}

// Posterior marginals P(x_v = 1 | e) of a binary network, by summation.
inline std::vector<double> marginals_of_one(const BeliefNetwork& net, const Evidence& e = {}) {
  std::vector<double> ones(net.size(), 0.0);
  double z = 0.0;
  for_each_completion(net.domains(), fixed_from(net, e), [&](const std::vector<int>& a) {
    const double p = std::exp(joint(net, a));
    z += p;
    for (std::size_t v = 0; v < a.size(); ++v)
      if (a[v] == 1) ones[v] += p;
  });
  for (double& x : ones) x /= z;
  return ones;
}

// Fig 1 topology: A=0, B=1, C=2, D=3, E=4 with A->B, A->C, {B,A}->D,
// {C,B}->E and CPT rows drawn from the seed.
inline BeliefNetwork fig1_network(std::uint64_t seed) {
  const std::vector<int> domains(5, 2);
  const std::vector<std::vector<int>> parents = {{}, {0}, {0}, {1, 0}, {2, 1}};
  mbs::Rng rng(seed);
  std::vector<Factor> cpts;
  for (int v = 0; v < 5; ++v) {
    std::vector<double> probs;
    const std::size_t rows = std::size_t{1} << parents[static_cast<std::size_t>(v)].size();
    for (std::size_t r = 0; r < rows; ++r) {
      const double p = 0.05 + 0.9 * rng.uniform();
      probs.push_back(p);
      probs.push_back(1.0 - p);
    }
    cpts.push_back(mbs::make_cpt(domains, parents[static_cast<std::size_t>(v)], v, probs));
  }
  return BeliefNetwork(domains, parents, std::move(cpts));
}

// P(A=1) = 0.6, P(B=1|A=1) = 0.9, P(B=1|A=0) = 0.2.
inline BeliefNetwork two_var_network() {
  const std::vector<int> domains{2, 2};
  std::vector<Factor> cpts;
  const double pa[] = {0.4, 0.6};
  const double pb[] = {0.8, 0.2, 0.1, 0.9};
  cpts.push_back(mbs::make_cpt(domains, {}, 0, pa));
  cpts.push_back(mbs::make_cpt(domains, {0}, 1, pb));
  return BeliefNetwork(domains, {{}, {0}}, std::move(cpts));
}

inline mbs::GeneratedInstance random_instance(std::uint64_t seed, int n, int n_evidence = 0,
                                              double deterministic_rows = 0.0) {
  mbs::RandomNetSpec spec;
  spec.n = n;
  spec.n_evidence = n_evidence;
  spec.deterministic_rows = deterministic_rows;
  spec.seed = seed;
  return mbs::gen_random_network(spec);
}

}  // namespace oracle
