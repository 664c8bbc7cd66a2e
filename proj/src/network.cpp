#include "mbs/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace mbs {

namespace {

std::size_t table_size_of(const std::vector<int>& cards) {
  std::size_t size = 1;
  for (int c : cards) size *= static_cast<std::size_t>(c);
  return size;
}

}  // namespace

bool Assignment::complete() const {
  return std::none_of(values_.begin(), values_.end(), [](int v) { return v == kUnassigned; });
}

Factor::Factor(std::vector<int> scope, std::vector<int> cards, std::vector<double> log_values)
    : scope_(std::move(scope)), cards_(std::move(cards)), log_values_(std::move(log_values)) {
  if (scope_.size() != cards_.size()) throw std::invalid_argument("factor scope/cardinality length mismatch");
  for (int c : cards_)
    if (c < 1) throw std::invalid_argument("factor cardinality must be >= 1");
  if (log_values_.size() != table_size_of(cards_))
    throw std::invalid_argument("factor table length " + std::to_string(log_values_.size()) +
                                " does not match scope size " + std::to_string(table_size_of(cards_)));
}

Factor Factor::constant(double log_value) { return Factor({}, {}, {log_value}); }

Factor Factor::filled(std::vector<int> scope, std::vector<int> cards, double log_value) {
  const std::size_t size = table_size_of(cards);
  return Factor(std::move(scope), std::move(cards), std::vector<double>(size, log_value));
}

bool Factor::contains(int var) const { return std::find(scope_.begin(), scope_.end(), var) != scope_.end(); }

std::vector<int> Factor::decode(std::size_t index) const {
  std::vector<int> values(scope_.size());
  for (std::size_t k = scope_.size(); k-- > 0;) {
    const auto card = static_cast<std::size_t>(cards_[k]);
    values[k] = static_cast<int>(index % card);
    index /= card;
  }
  return values;
}

Factor Factor::restrict(int var, int value) const {
  const auto it = std::find(scope_.begin(), scope_.end(), var);
  if (it == scope_.end()) return *this;
  const auto pos = static_cast<std::size_t>(it - scope_.begin());
  if (value < 0 || value >= cards_[pos]) throw std::invalid_argument("restrict: value out of domain");

  std::vector<int> scope = scope_;
  std::vector<int> cards = cards_;
  scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
  cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));

  // Old index = high * (card * low_size) + value * low_size + low.
  std::size_t low_size = 1;
  for (std::size_t k = pos + 1; k < cards_.size(); ++k) low_size *= static_cast<std::size_t>(cards_[k]);
  const auto card = static_cast<std::size_t>(cards_[pos]);
  const std::size_t high_size = log_values_.size() / (card * low_size);

  std::vector<double> values;
  values.reserve(high_size * low_size);
  for (std::size_t high = 0; high < high_size; ++high) {
    const std::size_t base = high * card * low_size + static_cast<std::size_t>(value) * low_size;
    for (std::size_t low = 0; low < low_size; ++low) values.push_back(log_values_[base + low]);
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

Evidence::Evidence(std::vector<std::pair<int, int>> pairs, std::span<const int> domains) : pairs_(std::move(pairs)) {
  std::vector<bool> seen(domains.size(), false);
  for (const auto& [var, value] : pairs_) {
    if (var < 0 || static_cast<std::size_t>(var) >= domains.size())
      throw std::invalid_argument("evidence variable " + std::to_string(var) + " out of range");
    if (value < 0 || value >= domains[static_cast<std::size_t>(var)])
      throw std::invalid_argument("evidence value " + std::to_string(value) + " out of domain of variable " +
                                  std::to_string(var));
    if (seen[static_cast<std::size_t>(var)])
      throw std::invalid_argument("evidence variable " + std::to_string(var) + " repeated");
    seen[static_cast<std::size_t>(var)] = true;
  }
}

std::optional<int> Evidence::value_of(int var) const {
  for (const auto& [v, value] : pairs_)
    if (v == var) return value;
  return std::nullopt;
}

std::vector<int> Evidence::dense(std::size_t n) const {
  std::vector<int> out(n, kUnassigned);
  for (const auto& [var, value] : pairs_) out[static_cast<std::size_t>(var)] = value;
  return out;
}

BeliefNetwork::BeliefNetwork(std::vector<int> domains, std::vector<std::vector<int>> parents,
                             std::vector<Factor> cpts, std::vector<Factor> likelihoods)
    : domains_(std::move(domains)),
      parents_(std::move(parents)),
      cpts_(std::move(cpts)),
      likelihoods_(std::move(likelihoods)) {
  const std::size_t n = domains_.size();
  if (parents_.size() != n || cpts_.size() != n)
    throw std::invalid_argument("network needs one parent list and one CPT per variable");
  for (std::size_t i = 0; i < n; ++i)
    if (domains_[i] < 1) throw std::invalid_argument("variable " + std::to_string(i) + " has an empty domain");

  auto check_values = [](const Factor& f, const std::string& what) {
    for (double v : f.log_values())
      if (std::isnan(v) || v > 0.0) throw std::invalid_argument(what + " has a value outside [0, 1]");
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "CPT of variable " + std::to_string(i);
    std::vector<int> expected_scope = parents_[i];
    for (int p : parents_[i]) {
      if (p < 0 || static_cast<std::size_t>(p) >= n || p == static_cast<int>(i))
        throw std::invalid_argument(name + ": bad parent index " + std::to_string(p));
      if (std::count(parents_[i].begin(), parents_[i].end(), p) != 1)
        throw std::invalid_argument(name + ": repeated parent " + std::to_string(p));
    }
    expected_scope.push_back(static_cast<int>(i));
    const Factor& cpt = cpts_[i];
    if (cpt.scope() != expected_scope) throw std::invalid_argument(name + ": scope must be parents followed by child");
    for (std::size_t k = 0; k < cpt.arity(); ++k)
      if (cpt.cards()[k] != domains_[static_cast<std::size_t>(cpt.scope()[k])])
        throw std::invalid_argument(name + ": cardinality does not match domain");
    check_values(cpt, name);

    const auto child_card = static_cast<std::size_t>(domains_[i]);
    for (std::size_t row = 0; row < cpt.table_size(); row += child_card) {
      double sum = 0.0;
      for (std::size_t x = 0; x < child_card; ++x) sum += std::exp(cpt.log_values()[row + x]);
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(name + ": row " + std::to_string(row / child_card) + " sums to " +
                                    format_double(sum));
    }
  }

  for (const Factor& f : likelihoods_) {
    if (f.arity() != 1) throw std::invalid_argument("likelihood factors must be unary");
    const int var = f.scope()[0];
    if (var < 0 || static_cast<std::size_t>(var) >= n || f.cards()[0] != domains_[static_cast<std::size_t>(var)])
      throw std::invalid_argument("likelihood factor over invalid variable " + std::to_string(var));
    check_values(f, "likelihood of variable " + std::to_string(var));
  }

  // Kahn's algorithm over parent -> child edges.
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = static_cast<int>(parents_[i].size());
    for (int p : parents_[i]) children[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));
  }
  std::queue<int> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  std::size_t visited = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop();
    ++visited;
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (visited != n) throw std::invalid_argument("parent structure is cyclic");
}

std::vector<Factor> BeliefNetwork::all_factors() const {
  std::vector<Factor> out = cpts_;
  out.insert(out.end(), likelihoods_.begin(), likelihoods_.end());
  return out;
}

Factor make_cpt(const std::vector<int>& domains, const std::vector<int>& parents, int child,
                std::span<const double> probabilities) {
  std::vector<int> scope = parents;
  scope.push_back(child);
  std::vector<int> cards;
  for (int v : scope) cards.push_back(domains[static_cast<std::size_t>(v)]);
  std::vector<double> logs(probabilities.size());
  std::transform(probabilities.begin(), probabilities.end(), logs.begin(),
                 [](double p) { return p > 0.0 ? std::log(p) : kNegInf; });
  return Factor(std::move(scope), std::move(cards), std::move(logs));
}

double factor_value(const Factor& f, const Assignment& a) {
  for (std::size_t k = 0; k < f.arity(); ++k) {
    const int var = f.scope()[k];
    if (static_cast<std::size_t>(var) >= a.size() || !a.assigned(static_cast<std::size_t>(var)))
      throw std::invalid_argument("factor_value: scope variable " + std::to_string(var) + " is unassigned");
    if (a[static_cast<std::size_t>(var)] >= f.cards()[k])
      throw std::invalid_argument("factor_value: value of variable " + std::to_string(var) + " out of domain");
  }
  return f.value(a);
}

double joint_log_probability(const BeliefNetwork& net, const Assignment& a, const Evidence& e) {
  if (a.size() != net.size() || !a.complete())
    throw std::invalid_argument("joint_log_probability needs a complete assignment");
  for (const auto& [var, value] : e.pairs())
    if (a[static_cast<std::size_t>(var)] != value)
      throw std::invalid_argument("assignment is inconsistent with evidence on variable " + std::to_string(var));
  double total = 0.0;
  for (const Factor& f : net.cpts()) total += factor_value(f, a);
  for (const Factor& f : net.likelihoods()) total += factor_value(f, a);
  return total;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

Factor combine_max(std::span<const Factor> factors, int eliminate) {
  std::vector<const Factor*> ptrs;
  ptrs.reserve(factors.size());
  for (const Factor& f : factors) ptrs.push_back(&f);
  return combine_max(std::span<const Factor* const>(ptrs), eliminate);
}

Factor combine_max(std::span<const Factor* const> factors, int eliminate) {
  if (factors.empty()) return Factor::constant(0.0);

  // Sorted union of scopes with cardinalities.
  std::vector<std::pair<int, int>> vars;
  for (const Factor* f : factors)
    for (std::size_t k = 0; k < f->arity(); ++k) vars.emplace_back(f->scope()[k], f->cards()[k]);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
             vars.end());

  int elim_card = 1;
  std::vector<int> out_scope;
  std::vector<int> out_cards;
  for (const auto& [var, card] : vars) {
    if (var == eliminate) {
      elim_card = card;
    } else {
      out_scope.push_back(var);
      out_cards.push_back(card);
    }
  }

  // stride[f][k]: stride of output variable k in factor f's table (0 if absent).
  const std::size_t nf = factors.size();
  const std::size_t nk = out_scope.size();
  std::vector<std::size_t> stride(nf * nk, 0);
  std::vector<std::size_t> elim_stride(nf, 0);
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const Factor& f = *factors[fi];
    std::size_t s = 1;
    for (std::size_t k = f.arity(); k-- > 0;) {
      const int var = f.scope()[k];
      if (var == eliminate) {
        elim_stride[fi] = s;
      } else {
        const auto pos = static_cast<std::size_t>(std::lower_bound(out_scope.begin(), out_scope.end(), var) -
                                                  out_scope.begin());
        stride[fi * nk + pos] = s;
      }
      s *= static_cast<std::size_t>(f.cards()[k]);
    }
  }

  const std::size_t out_size = table_size_of(out_cards);
  std::vector<double> out(out_size, kNegInf);
  std::vector<std::size_t> base(nf, 0);
  std::vector<int> digit(nk, 0);

  for (std::size_t o = 0; o < out_size; ++o) {
    double best = kNegInf;
    for (int x = 0; x < elim_card; ++x) {
      double sum = 0.0;
      for (std::size_t fi = 0; fi < nf; ++fi)
        sum += factors[fi]->log_values()[base[fi] + static_cast<std::size_t>(x) * elim_stride[fi]];
      if (sum > best) best = sum;
    }
    out[o] = best;

    // Odometer step, last output variable fastest.
    for (std::size_t k = nk; k-- > 0;) {
      if (++digit[k] < out_cards[k]) {
        for (std::size_t fi = 0; fi < nf; ++fi) base[fi] += stride[fi * nk + k];
        break;
      }
      for (std::size_t fi = 0; fi < nf; ++fi)
        base[fi] -= stride[fi * nk + k] * static_cast<std::size_t>(out_cards[k] - 1);
      digit[k] = 0;
    }
  }
  return Factor(std::move(out_scope), std::move(out_cards), std::move(out));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace mbs
