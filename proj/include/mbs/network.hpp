#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbs {

// Log-space representation of probability zero.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr int kUnassigned = -1;

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : values_(n, kUnassigned) {}
  explicit Assignment(std::vector<int> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t var) const { return values_[var]; }
  int& operator[](std::size_t var) { return values_[var]; }
  bool assigned(std::size_t var) const { return values_[var] != kUnassigned; }
  bool complete() const;
  const std::vector<int>& values() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> values_;
};

// A function over an ordered scope, stored as a dense table of natural-log
// values. The last scope variable varies fastest.
class Factor {
 public:
  // Constant factor with value log 1.
  Factor() : log_values_{0.0} {}
  Factor(std::vector<int> scope, std::vector<int> cards, std::vector<double> log_values);

  static Factor constant(double log_value);
  // Uniform-in-value table of the given log value over the scope.
  static Factor filled(std::vector<int> scope, std::vector<int> cards, double log_value);

  const std::vector<int>& scope() const { return scope_; }
  const std::vector<int>& cards() const { return cards_; }
  const std::vector<double>& log_values() const { return log_values_; }
  std::vector<double>& log_values() { return log_values_; }
  std::size_t arity() const { return scope_.size(); }
  std::size_t table_size() const { return log_values_.size(); }
  bool contains(int var) const;

  // Table index of the scope projection of a. Unchecked: every scope
  // variable must be assigned (factor_value is the checked form).
  std::size_t index_of(const Assignment& a) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < scope_.size(); ++k)
      idx = idx * static_cast<std::size_t>(cards_[k]) + static_cast<std::size_t>(a[scope_[k]]);
    return idx;
  }
  double value(const Assignment& a) const { return log_values_[index_of(a)]; }

  // Decodes a table index into per-scope-variable values.
  std::vector<int> decode(std::size_t index) const;

  // Fixes var to value; the result's scope drops var. Returns a copy if var
  // is not in scope.
  Factor restrict(int var, int value) const;

 private:
  std::vector<int> scope_;
  std::vector<int> cards_;
  std::vector<double> log_values_;
};

class Evidence {
 public:
  Evidence() = default;
  Evidence(std::vector<std::pair<int, int>> pairs, std::span<const int> domains);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  std::optional<int> value_of(int var) const;
  // Per-variable lookup table: evidence value or kUnassigned.
  std::vector<int> dense(std::size_t n) const;

 private:
  std::vector<std::pair<int, int>> pairs_;
};

// A discrete belief network: one CPT per variable plus optional unary
// likelihood factors (soft observations over a single variable).
class BeliefNetwork {
 public:
  BeliefNetwork() = default;
  // Validates every structural invariant; throws std::invalid_argument.
  BeliefNetwork(std::vector<int> domains, std::vector<std::vector<int>> parents, std::vector<Factor> cpts,
                std::vector<Factor> likelihoods = {});

  std::size_t size() const { return domains_.size(); }
  const std::vector<int>& domains() const { return domains_; }
  int domain(int var) const { return domains_[static_cast<std::size_t>(var)]; }
  const std::vector<int>& parents(int var) const { return parents_[static_cast<std::size_t>(var)]; }
  const std::vector<std::vector<int>>& parents() const { return parents_; }
  const Factor& cpt(int var) const { return cpts_[static_cast<std::size_t>(var)]; }
  const std::vector<Factor>& cpts() const { return cpts_; }
  const std::vector<Factor>& likelihoods() const { return likelihoods_; }

  // CPTs followed by likelihood factors: every input function of the model.
  std::vector<Factor> all_factors() const;

 private:
  std::vector<int> domains_;
  std::vector<std::vector<int>> parents_;
  std::vector<Factor> cpts_;
  std::vector<Factor> likelihoods_;
};

// Builds a CPT from linear-space probabilities (child varies fastest).
Factor make_cpt(const std::vector<int>& domains, const std::vector<int>& parents, int child,
                std::span<const double> probabilities);

// Checked lookup; throws std::invalid_argument on an unassigned scope variable.
double factor_value(const Factor& f, const Assignment& a);

// Sum of every factor of the network at a full assignment consistent with e.
double joint_log_probability(const BeliefNetwork& net, const Assignment& a, const Evidence& e = {});

// Sums the factors and maximizes out `eliminate`. The result scope is the
// sorted union of the input scopes minus the eliminated variable.
Factor combine_max(std::span<const Factor> factors, int eliminate);
// Same, over pointers into existing storage.
Factor combine_max(std::span<const Factor* const> factors, int eliminate);

// Numerically safe log(exp(a) + exp(b)).
double log_add(double a, double b);

// ---------------------------------------------------------------------------
// BAYES text format

class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    kHeader,
    kTruncated,
    kBadToken,
    kIndexRange,
    kDomain,
    kStructure,
    kCycle,
    kNormalization,
    kEvidence,
  };
  ParseError(Kind kind, int line, const std::string& what);
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BeliefNetwork parse_network(std::istream& in);
BeliefNetwork parse_network(const std::string& text);
void serialize_network(const BeliefNetwork& net, std::ostream& out);
std::string serialize_network(const BeliefNetwork& net);

Evidence parse_evidence(std::istream& in, const BeliefNetwork& net);
void serialize_evidence(const Evidence& e, std::ostream& out);

BeliefNetwork load_network(const std::string& path);
Evidence load_evidence(const std::string& path, const BeliefNetwork& net);
void save_network(const BeliefNetwork& net, const std::string& path);
void save_evidence(const Evidence& e, const std::string& path);

// Shortest round-trip decimal rendering of a double ("-inf" for kNegInf).
std::string format_double(double v);

}  // namespace mbs
