#include "mbs/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "mbs/rng.hpp"

namespace mbs {

namespace {

// k distinct values from [0, n), uniformly, returned sorted.
std::vector<int> sample_distinct(Rng& rng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int j = 0; j < k; ++j) {
    const auto pick = static_cast<std::size_t>(j) + rng.below(static_cast<std::uint64_t>(n - j));
    std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::size_t row_count(const std::vector<int>& domains, const std::vector<int>& parents) {
  std::size_t rows = 1;
  for (int p : parents) rows *= static_cast<std::size_t>(domains[static_cast<std::size_t>(p)]);
  return rows;
}

Factor uniform_prior(const std::vector<int>& domains, int var) {
  const int d = domains[static_cast<std::size_t>(var)];
  const std::vector<double> probs(static_cast<std::size_t>(d), 1.0 / d);
  return make_cpt(domains, {}, var, probs);
}

}  // namespace

CodingInstance gen_coding(const CodingSpec& spec) {
  if (spec.parents < 1 || spec.k < spec.parents)
    throw std::invalid_argument("coding spec needs K >= P >= 1");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  const int k = spec.k;
  const int n = 2 * k;
  const std::vector<int> domains(static_cast<std::size_t>(n), 2);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
  std::vector<Factor> cpts;

  Rng structure(spec.structure_seed);
  for (int u = 0; u < k; ++u) cpts.push_back(uniform_prior(domains, u));
  for (int j = 0; j < k; ++j) {
    const int x = k + j;
    auto& pa = parents[static_cast<std::size_t>(x)];
    pa = sample_distinct(structure, k, spec.parents);
    std::vector<double> probs;
    for (std::size_t row = 0; row < row_count(domains, pa); ++row) {
      const int parity = std::popcount(row) & 1;
      probs.push_back(parity == 0 ? 1.0 : 0.0);
      probs.push_back(parity == 1 ? 1.0 : 0.0);
    }
    cpts.push_back(make_cpt(domains, pa, x, probs));
  }

  CodingInstance inst;
  Rng sim(spec.simulation_seed);
  for (int u = 0; u < k; ++u) inst.true_input.push_back(static_cast<int>(sim.below(2)));
  inst.codeword = inst.true_input;
  for (int j = 0; j < k; ++j) {
    int bit = 0;
    for (int p : parents[static_cast<std::size_t>(k + j)]) bit ^= inst.true_input[static_cast<std::size_t>(p)];
    inst.codeword.push_back(bit);
  }

  std::vector<Factor> likelihoods;
  for (int v = 0; v < n; ++v) {
    const int bit = inst.codeword[static_cast<std::size_t>(v)];
    const double y = bit + spec.sigma * sim.gaussian();
    inst.observed.push_back(y);
    std::vector<double> logs(2);
    if (spec.sigma == 0.0) {
      logs[0] = bit == 0 ? 0.0 : kNegInf;
      logs[1] = bit == 1 ? 0.0 : kNegInf;
    } else {
      for (int b = 0; b < 2; ++b) logs[static_cast<std::size_t>(b)] = -(y - b) * (y - b) / (2 * spec.sigma * spec.sigma);
      const double z = log_add(logs[0], logs[1]);
      logs[0] -= z;
      logs[1] -= z;
    }
    likelihoods.emplace_back(std::vector<int>{v}, std::vector<int>{2}, std::move(logs));
  }
  inst.network = BeliefNetwork(domains, std::move(parents), std::move(cpts), std::move(likelihoods));
  return inst;
}

GeneratedInstance gen_noisy_or(const NoisyOrSpec& spec) {
  const int n = spec.n;
  if (n < 1) throw std::invalid_argument("noisy-OR network needs at least one variable");
  if (spec.parents < 0 || spec.parents >= n) throw std::invalid_argument("noisy-OR parents must satisfy 0 <= P < N");
  if (spec.c < 0 || spec.c > n - spec.parents)
    throw std::invalid_argument("cannot place " + std::to_string(spec.c) + " noisy-OR children with " +
                                std::to_string(spec.parents) + " preceding parents among " + std::to_string(n) +
                                " variables");
  for (double p : {spec.p_noise, spec.p_leak})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noisy-OR probabilities must lie in [0, 1]");
  if (spec.n_evidence < 0 || spec.n_evidence > n) throw std::invalid_argument("evidence count out of range");

  Rng rng(spec.seed);
  const std::vector<int> domains(static_cast<std::size_t>(n), 2);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
  // Children are drawn from the variables that have at least P predecessors.
  std::vector<int> children = sample_distinct(rng, n - spec.parents, spec.c);
  for (int& child : children) child += spec.parents;
  for (int child : children) parents[static_cast<std::size_t>(child)] = sample_distinct(rng, child, spec.parents);

  std::vector<Factor> cpts;
  for (int v = 0; v < n; ++v) {
    const auto& pa = parents[static_cast<std::size_t>(v)];
    if (!std::binary_search(children.begin(), children.end(), v)) {
      cpts.push_back(uniform_prior(domains, v));
      continue;
    }
    std::vector<double> probs;
    for (std::size_t row = 0; row < row_count(domains, pa); ++row) {
      const double p0 = spec.p_leak * std::pow(spec.p_noise, std::popcount(row));
      probs.push_back(p0);
      probs.push_back(1.0 - p0);
    }
    cpts.push_back(make_cpt(domains, pa, v, probs));
  }

  GeneratedInstance out;
  std::vector<std::pair<int, int>> pairs;
  for (int var : sample_distinct(rng, n, spec.n_evidence)) pairs.emplace_back(var, static_cast<int>(rng.below(2)));
  out.evidence = Evidence(std::move(pairs), domains);
  out.network = BeliefNetwork(domains, std::move(parents), std::move(cpts));
  return out;
}

GeneratedInstance gen_random_network(const RandomNetSpec& spec) {
  const int n = spec.n;
  if (n < 1 || spec.min_domain < 1 || spec.max_domain < spec.min_domain || spec.max_parents < 0 ||
      spec.n_evidence < 0 || spec.n_evidence > n)
    throw std::invalid_argument("invalid random network spec");
  Rng rng(spec.seed);
  std::vector<int> domains;
  for (int v = 0; v < n; ++v)
    domains.push_back(spec.min_domain + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_domain - spec.min_domain + 1))));
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
  std::vector<Factor> cpts;
  std::vector<std::vector<double>> tables;
  for (int v = 0; v < n; ++v) {
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(spec.max_parents, v) + 1)));
    auto& pa = parents[static_cast<std::size_t>(v)];
    pa = sample_distinct(rng, v, k);
    const auto d = static_cast<std::size_t>(domains[static_cast<std::size_t>(v)]);
    std::vector<double> probs;
    for (std::size_t row = 0; row < row_count(domains, pa); ++row) {
      std::vector<double> w(d, 0.0);
      if (rng.uniform() < spec.deterministic_rows) {
        w[rng.below(d)] = 1.0;
      } else {
        for (double& x : w) x = 0.05 + rng.uniform();
      }
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double x : w) probs.push_back(x / total);
    }
    cpts.push_back(make_cpt(domains, pa, v, probs));
    tables.push_back(std::move(probs));
  }

  // Ancestral sample; index order is topological.
  std::vector<int> sample(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::size_t row = 0;
    for (int p : parents[static_cast<std::size_t>(v)])
      row = row * static_cast<std::size_t>(domains[static_cast<std::size_t>(p)]) +
            static_cast<std::size_t>(sample[static_cast<std::size_t>(p)]);
    const auto d = static_cast<std::size_t>(domains[static_cast<std::size_t>(v)]);
    const double u = rng.uniform();
    double acc = 0.0;
    int value = -1;
    for (std::size_t x = 0; x < d; ++x) {
      const double p = tables[static_cast<std::size_t>(v)][row * d + x];
      acc += p;
      if (p > 0.0) value = static_cast<int>(x);
      if (u < acc && p > 0.0) break;
    }
    sample[static_cast<std::size_t>(v)] = value;
  }

  GeneratedInstance out;
  std::vector<std::pair<int, int>> pairs;
  for (int var : sample_distinct(rng, n, spec.n_evidence)) pairs.emplace_back(var, sample[static_cast<std::size_t>(var)]);
  out.evidence = Evidence(std::move(pairs), domains);
  out.network = BeliefNetwork(domains, std::move(parents), std::move(cpts));
  return out;
}

double bit_error_rate(std::span<const int> decoded, std::span<const int> truth) {
  if (decoded.size() != truth.size())
    throw std::invalid_argument("bit vectors differ in length (" + std::to_string(decoded.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  if (truth.empty()) throw std::invalid_argument("bit error rate of an empty vector");
  std::size_t errors = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) errors += decoded[j] != truth[j] ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

void save_truth(const std::vector<int>& bits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t j = 0; j < bits.size(); ++j) out << (j ? " " : "") << bits[j];
  out << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<int> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<int> bits;
  std::string token;
  while (in >> token) {
    if (token != "0" && token != "1") throw std::invalid_argument(path + ": truth file holds non-bit token '" + token + "'");
    bits.push_back(token == "1" ? 1 : 0);
  }
  return bits;
}

}  // namespace mbs
