#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbs/network.hpp"

namespace mbs {

// Rate-1/2 linear block code: K information bits, K parity bits, each parity
// bit the XOR of `parents` distinct information bits.
struct CodingSpec {
  int k = 50;
  int parents = 4;
  double sigma = 0.22;
  std::uint64_t structure_seed = 0;   // parity parent sets
  std::uint64_t simulation_seed = 0;  // input bits and channel noise
};

struct CodingInstance {
  // Variables 0..K-1 are information bits, K..2K-1 parity bits. Channel
  // outputs are absorbed as one normalized unary likelihood per bit.
  BeliefNetwork network;
  std::vector<int> true_input;     // K bits
  std::vector<int> codeword;       // 2K transmitted bits
  std::vector<double> observed;    // 2K channel outputs
};

CodingInstance gen_coding(const CodingSpec& spec);

struct NoisyOrSpec {
  int n = 128;
  int c = 85;  // number of noisy-OR children
  int parents = 4;
  double p_noise = 0.2;
  double p_leak = 0.01;
  int n_evidence = 10;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  BeliefNetwork network;
  Evidence evidence;
};

GeneratedInstance gen_noisy_or(const NoisyOrSpec& spec);

// Random DAG over index order with random CPTs. Evidence values come from an
// ancestral sample, so the evidence always has positive probability.
struct RandomNetSpec {
  int n = 10;
  int min_domain = 2;
  int max_domain = 3;
  int max_parents = 3;
  int n_evidence = 0;
  double deterministic_rows = 0.0;  // probability that a CPT row is 0/1
  std::uint64_t seed = 0;
};

GeneratedInstance gen_random_network(const RandomNetSpec& spec);

// Fraction of positions that differ. Throws std::invalid_argument on a length
// mismatch or empty input.
double bit_error_rate(std::span<const int> decoded, std::span<const int> truth);

// Truth file: whitespace-separated bits.
void save_truth(const std::vector<int>& bits, const std::string& path);
std::vector<int> load_truth(const std::string& path);

}  // namespace mbs
