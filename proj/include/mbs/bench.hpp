#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbs/generators.hpp"
#include "mbs/network.hpp"

namespace mbs {

enum class ProblemClass { kCoding, kNoisyOr, kRandom, kFile };
enum class Algorithm { kMb, kBbmb, kBfmb, kIbp, kElim };
enum class ReferencePolicy { kExactOracle, kBfmbProof };

std::string_view to_string(ProblemClass c);
std::string_view to_string(Algorithm a);
std::string_view to_string(ReferencePolicy p);
// Accepted names: coding, noisy-or, random, file / mb, bbmb, bfmb, ibp,
// elim (or elim-mpe) / exact, proof. Throw std::invalid_argument otherwise.
ProblemClass parse_problem_class(std::string_view s);
Algorithm parse_algorithm(std::string_view s);
ReferencePolicy parse_reference_policy(std::string_view s);

// Algorithms whose result does not depend on the i-bound.
bool ignores_i_bound(Algorithm a);

struct FileInstance {
  std::string network;
  std::string evidence;  // optional
  std::string truth;     // optional; enables BER
};

struct BenchConfig {
  ProblemClass problem = ProblemClass::kCoding;
  CodingSpec coding;     // seeds are derived per instance
  int simulations_per_structure = 10;
  NoisyOrSpec noisy_or;  // seed derived per instance
  RandomNetSpec random;  // seed derived per instance
  std::vector<FileInstance> files;

  std::vector<Algorithm> algorithms;
  std::vector<int> i_bounds;
  double time_bound = 30.0;
  int samples = 10;
  std::uint64_t seed = 0;
  ReferencePolicy reference = ReferencePolicy::kBfmbProof;
  int workers = 1;
  std::size_t memory_cap = std::size_t{4} << 20;
  std::size_t max_table_entries = std::size_t{1} << 24;
  int ibp_iterations = 30;
  int curve_points = 20;

  // Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

struct RunRecord {
  int instance_id = 0;
  Algorithm algorithm = Algorithm::kMb;
  int i_bound = 0;
  std::string status;  // OPTIMAL, TIMEOUT, MEMORY_OUT, APPROX
  std::optional<double> log_value;
  std::optional<double> log_upper;
  std::optional<double> opt_ratio;
  double preprocess_seconds = 0.0;
  double search_seconds = 0.0;
  std::size_t nodes = 0;
  std::optional<double> ber;
  std::vector<int> assignment;

  double total_seconds() const { return preprocess_seconds + search_seconds; }
};

inline constexpr std::size_t kBinCount = 5;
// Lower edges of the accuracy bins; the last bin is opt < 0.01.
inline constexpr double kBinEdges[kBinCount - 1] = {0.95, 0.5, 0.2, 0.01};
std::string_view bin_label(std::size_t bin);
std::size_t bin_of(double opt_ratio);

struct BinRow {
  Algorithm algorithm;
  int i_bound;
  std::size_t bin;
  std::size_t count;
  std::optional<double> mean_total_seconds;
};

struct CurvePoint {
  Algorithm algorithm;
  int i_bound;
  double t_seconds;
  double fraction_solved;
};

struct BenchReport {
  std::vector<RunRecord> runs;  // instance, then algorithm, then i order
  std::vector<BinRow> bins;
  std::vector<CurvePoint> curves;
  std::vector<std::optional<double>> references;  // per instance
  std::size_t instance_count = 0;
  // OPTIMAL results on one instance disagreeing by more than 1e-9.
  std::size_t reference_conflicts = 0;
};

BenchReport run_suite(const BenchConfig& cfg);

// Writes runs.csv, bins.csv and curves.csv into dir (created if missing).
// Throws IoError naming the failing path.
void emit_csv(const BenchReport& report, const std::string& dir);

std::string runs_csv(const BenchReport& report);
std::string bins_csv(const BenchReport& report);
std::string curves_csv(const BenchReport& report);

}  // namespace mbs
