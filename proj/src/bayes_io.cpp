#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mbs/network.hpp"

namespace mbs {

ParseError::ParseError(Kind kind, int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

namespace {

using Kind = ParseError::Kind;

// Whitespace tokenizer that remembers the line of each token.
class TokenStream {
 public:
  explicit TokenStream(std::istream& in) : in_(in) {}

  bool next(std::string& token) {
    token.clear();
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') ++line_;
      if (!std::isspace(c)) break;
    }
    if (c == EOF) return false;
    token_line_ = line_;
    token.push_back(static_cast<char>(c));
    while ((c = in_.peek()) != EOF && !std::isspace(c)) token.push_back(static_cast<char>(in_.get()));
    return true;
  }

  std::string expect(const char* what) {
    std::string token;
    if (!next(token)) throw ParseError(Kind::kTruncated, line_, std::string("unexpected end of input, expected ") + what);
    return token;
  }

  long long integer(const char* what) {
    const std::string token = expect(what);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (errno != 0 || end == token.c_str() || *end != '\0')
      throw ParseError(Kind::kBadToken, token_line_, std::string("expected integer ") + what + ", got '" + token + "'");
    return v;
  }

  double real(const char* what) {
    const std::string token = expect(what);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || std::isnan(v))
      throw ParseError(Kind::kBadToken, token_line_, std::string("expected number ") + what + ", got '" + token + "'");
    return v;
  }

  int line() const { return token_line_; }

 private:
  std::istream& in_;
  int line_ = 1;
  int token_line_ = 1;
};

}  // namespace

BeliefNetwork parse_network(std::istream& in) {
  TokenStream ts(in);
  std::string token;
  if (!ts.next(token) || token != "BAYES") throw ParseError(Kind::kHeader, ts.line(), "missing BAYES header");

  long long n_raw;
  try {
    n_raw = ts.integer("variable count");
  } catch (const ParseError& err) {
    throw ParseError(Kind::kHeader, err.line(), "malformed variable count");
  }
  if (n_raw < 0) throw ParseError(Kind::kHeader, ts.line(), "negative variable count");
  const auto n = static_cast<std::size_t>(n_raw);

  std::vector<int> domains(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long long d = ts.integer("domain size");
    if (d < 1 || d > (1 << 20))
      throw ParseError(Kind::kDomain, ts.line(), "variable " + std::to_string(i) + " has invalid domain size " +
                                                     std::to_string(d));
    domains[i] = static_cast<int>(d);
  }

  // Scope blocks: the last listed variable is the child.
  std::vector<int> block_child(n);
  std::vector<std::vector<int>> parents(n);
  std::vector<int> child_line(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    const long long k = ts.integer("scope size");
    const int line = ts.line();
    if (k < 1 || static_cast<std::size_t>(k) > n)
      throw ParseError(Kind::kStructure, line, "scope size " + std::to_string(k) + " out of range");
    std::vector<int> scope;
    for (long long j = 0; j < k; ++j) {
      const long long v = ts.integer("variable index");
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw ParseError(Kind::kIndexRange, ts.line(), "variable index " + std::to_string(v) + " out of range [0, " +
                                                           std::to_string(n) + ")");
      for (int seen : scope)
        if (seen == v) throw ParseError(Kind::kStructure, ts.line(), "variable " + std::to_string(v) + " repeated in scope");
      scope.push_back(static_cast<int>(v));
    }
    const int child = scope.back();
    if (child_line[static_cast<std::size_t>(child)] != 0)
      throw ParseError(Kind::kStructure, line, "variable " + std::to_string(child) + " has two CPTs");
    child_line[static_cast<std::size_t>(child)] = line;
    scope.pop_back();
    parents[static_cast<std::size_t>(child)] = std::move(scope);
    block_child[b] = child;
  }

  // Cycle check before reading tables so the diagnostic points at structure.
  {
    std::vector<int> indeg(n);
    std::vector<std::vector<int>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
      indeg[i] = static_cast<int>(parents[i].size());
      for (int p : parents[i]) children[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));
    }
    std::vector<int> stack;
    for (std::size_t i = 0; i < n; ++i)
      if (indeg[i] == 0) stack.push_back(static_cast<int>(i));
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int c : children[static_cast<std::size_t>(v)])
        if (--indeg[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (indeg[i] > 0)
        throw ParseError(Kind::kCycle, child_line[i], "cyclic parent structure through variable " + std::to_string(i));
  }

  std::vector<Factor> cpts(n);
  for (std::size_t b = 0; b < n; ++b) {
    const int child = block_child[b];
    const auto& pa = parents[static_cast<std::size_t>(child)];
    std::size_t size = static_cast<std::size_t>(domains[static_cast<std::size_t>(child)]);
    for (int p : pa) size *= static_cast<std::size_t>(domains[static_cast<std::size_t>(p)]);
    const auto child_card = static_cast<std::size_t>(domains[static_cast<std::size_t>(child)]);

    std::vector<double> probs(size);
    for (std::size_t row = 0; row < size; row += child_card) {
      double sum = 0.0;
      int row_line = 0;
      for (std::size_t x = 0; x < child_card; ++x) {
        const double p = ts.real("probability");
        if (x == 0) row_line = ts.line();
        if (p < 0.0 || p > 1.0 + 1e-6)
          throw ParseError(Kind::kNormalization, ts.line(),
                           "variable " + std::to_string(child) + ": probability " + format_double(p) + " outside [0, 1]");
        probs[row + x] = p;
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw ParseError(Kind::kNormalization, row_line,
                         "CPT of variable " + std::to_string(child) + " row " + std::to_string(row / child_card) +
                             " sums to " + format_double(sum));
      if (std::abs(sum - 1.0) > 1e-9)
        for (std::size_t x = 0; x < child_card; ++x) probs[row + x] /= sum;
    }
    cpts[static_cast<std::size_t>(child)] = make_cpt(domains, pa, child, probs);
  }

  std::vector<Factor> likelihoods;
  if (ts.next(token)) {
    if (token != "LIKELIHOODS")
      throw ParseError(Kind::kBadToken, ts.line(), "unexpected trailing token '" + token + "'");
    const long long m = ts.integer("likelihood count");
    if (m < 0) throw ParseError(Kind::kStructure, ts.line(), "negative likelihood count");
    for (long long j = 0; j < m; ++j) {
      const long long v = ts.integer("likelihood variable");
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw ParseError(Kind::kIndexRange, ts.line(), "likelihood variable " + std::to_string(v) + " out of range");
      const int card = domains[static_cast<std::size_t>(v)];
      std::vector<double> logs(static_cast<std::size_t>(card));
      for (auto& l : logs) {
        l = ts.real("log likelihood");
        if (l > 0.0) throw ParseError(Kind::kNormalization, ts.line(), "log likelihood must be <= 0");
      }
      likelihoods.emplace_back(std::vector<int>{static_cast<int>(v)}, std::vector<int>{card}, std::move(logs));
    }
    if (ts.next(token)) throw ParseError(Kind::kBadToken, ts.line(), "unexpected trailing token '" + token + "'");
  }

  return BeliefNetwork(std::move(domains), std::move(parents), std::move(cpts), std::move(likelihoods));
}

BeliefNetwork parse_network(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

void serialize_network(const BeliefNetwork& net, std::ostream& out) {
  const std::size_t n = net.size();
  out << "BAYES\n" << n << '\n';
  for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << net.domains()[i];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pa = net.parents()[i];
    out << pa.size() + 1;
    for (int p : pa) out << ' ' << p;
    out << ' ' << i << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    out << '\n';
    const Factor& cpt = net.cpts()[i];
    const auto child_card = static_cast<std::size_t>(net.domains()[i]);
    for (std::size_t k = 0; k < cpt.table_size(); ++k) {
      out << format_double(std::exp(cpt.log_values()[k]));
      out << ((k + 1) % child_card == 0 ? '\n' : ' ');
    }
  }
  if (!net.likelihoods().empty()) {
    out << "\nLIKELIHOODS " << net.likelihoods().size() << '\n';
    for (const Factor& f : net.likelihoods()) {
      out << f.scope()[0];
      for (double l : f.log_values()) out << ' ' << format_double(l);
      out << '\n';
    }
  }
}

std::string serialize_network(const BeliefNetwork& net) {
  std::ostringstream out;
  serialize_network(net, out);
  return out.str();
}

Evidence parse_evidence(std::istream& in, const BeliefNetwork& net) {
  TokenStream ts(in);
  std::string token;
  if (!ts.next(token)) return Evidence();
  char* end = nullptr;
  const long long count = std::strtoll(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0' || count < 0)
    throw ParseError(Kind::kEvidence, ts.line(), "malformed evidence count '" + token + "'");
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> seen(net.size(), false);
  for (long long j = 0; j < count; ++j) {
    const long long var = ts.integer("evidence variable");
    if (var < 0 || static_cast<std::size_t>(var) >= net.size())
      throw ParseError(Kind::kEvidence, ts.line(), "evidence variable " + std::to_string(var) + " out of range");
    const long long value = ts.integer("evidence value");
    if (value < 0 || value >= net.domain(static_cast<int>(var)))
      throw ParseError(Kind::kEvidence, ts.line(),
                       "evidence value " + std::to_string(value) + " out of domain of variable " + std::to_string(var));
    if (seen[static_cast<std::size_t>(var)])
      throw ParseError(Kind::kEvidence, ts.line(), "evidence variable " + std::to_string(var) + " repeated");
    seen[static_cast<std::size_t>(var)] = true;
    pairs.emplace_back(static_cast<int>(var), static_cast<int>(value));
  }
  if (ts.next(token)) throw ParseError(Kind::kEvidence, ts.line(), "unexpected trailing token '" + token + "'");
  return Evidence(std::move(pairs), net.domains());
}

void serialize_evidence(const Evidence& e, std::ostream& out) {
  out << e.size() << '\n';
  for (const auto& [var, value] : e.pairs()) out << var << ' ' << value << '\n';
}

BeliefNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file " + path);
  return parse_network(in);
}

Evidence load_evidence(const std::string& path, const BeliefNetwork& net) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open evidence file " + path);
  return parse_evidence(in, net);
}

void save_network(const BeliefNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  serialize_network(net, out);
  if (!out) throw IoError("write failed for " + path);
}

void save_evidence(const Evidence& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  serialize_evidence(e, out);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace mbs
