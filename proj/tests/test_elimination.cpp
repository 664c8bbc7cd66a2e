#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mbs/elimination.hpp"
#include "mbs/ordering.hpp"
#include "support.hpp"

using namespace mbs;

namespace {

constexpr int A = 0, B = 1, C = 2, D = 3, E = 4;
const Ordering kFig1Order({A, E, D, C, B});

std::vector<int> children_of(const std::vector<Factor>& fs) {
  std::vector<int> out;
  for (const Factor& f : fs) out.push_back(f.scope().back());
  std::sort(out.begin(), out.end());
  return out;
}

bool close(double a, double b) { return a == b || std::abs(a - b) <= 1e-9; }

BeliefNetwork copy_chain(int n) {
  const std::vector<int> domains(static_cast<std::size_t>(n), 2);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
  std::vector<Factor> cpts;
  const double root[] = {0.0, 1.0};
  const double copy[] = {1.0, 0.0, 0.0, 1.0};
  cpts.push_back(make_cpt(domains, {}, 0, root));
  for (int v = 1; v < n; ++v) {
    parents[static_cast<std::size_t>(v)] = {v - 1};
    cpts.push_back(make_cpt(domains, {v - 1}, v, copy));
  }
  return BeliefNetwork(domains, parents, cpts);
}

}  // namespace

TEST_SUITE("elimination") {

TEST_CASE("place_factors on Fig 1") {
  const auto buckets = place_factors(oracle::fig1_network(2), kFig1Order);
  REQUIRE(buckets.size() == 5);
  CHECK(buckets[4].variable == B);
  CHECK(children_of(buckets[4].original_factors) == std::vector<int>{B, D, E});
  CHECK(children_of(buckets[3].original_factors) == std::vector<int>{C});
  CHECK(buckets[2].original_factors.empty());
  CHECK(buckets[1].original_factors.empty());
  CHECK(children_of(buckets[0].original_factors) == std::vector<int>{A});
}

TEST_CASE("place_factors on a single variable") {
  const std::vector<int> d{3};
  const double p[] = {0.2, 0.3, 0.5};
  const BeliefNetwork net(d, {{}}, {make_cpt(d, {}, 0, p)});
  const auto buckets = place_factors(net, Ordering({0}));
  REQUIRE(buckets.size() == 1);
  CHECK(buckets[0].original_factors.size() == 1);
}

TEST_CASE("fully observed network reduces to constants") {
  const BeliefNetwork net = oracle::fig1_network(4);
  const Evidence e({{A, 1}, {B, 0}, {C, 1}, {D, 0}, {E, 1}}, net.domains());
  const AugmentedBuckets ab = approx_mpe(net, kFig1Order, e, 2);
  for (const Bucket& b : ab.buckets)
    for (const GeneratedFunction& g : b.generated) CHECK(g.factor.arity() > 0);
  CHECK_FALSE(ab.constants.empty());
  const double joint = oracle::joint(net, {1, 0, 1, 0, 1});
  CHECK(close(ab.upper_bound, joint));
  CHECK(close(ab.lower_bound, joint));
}

TEST_CASE("partition of bucket B with i = 3") {
  const auto buckets = place_factors(oracle::fig1_network(2), kFig1Order);
  std::vector<const Factor*> fs;
  for (const Factor& f : buckets[4].original_factors) fs.push_back(&f);
  const auto parts = partition_bucket(fs, B, 3);
  REQUIRE(parts.size() == 2);
  std::set<std::vector<int>> got;
  for (const auto& part : parts) {
    std::vector<int> kids;
    for (std::size_t idx : part) kids.push_back(fs[idx]->scope().back());
    std::sort(kids.begin(), kids.end());
    got.insert(kids);
  }
  CHECK(got == std::set<std::vector<int>>{{E}, {B, D}});

  CHECK(partition_bucket(fs, B, 5).size() == 1);
  CHECK(partition_bucket({}, B, 3).empty());
}

TEST_CASE("oversized factors form singleton mini-buckets") {
  const Factor big = Factor::filled({0, 1, 2, 3}, {2, 2, 2, 2}, 0.0);
  const Factor small = Factor::filled({0, 1}, {2, 2}, 0.0);
  const std::vector<const Factor*> fs{&small, &big};
  const auto parts = partition_bucket(fs, 0, 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == std::vector<std::size_t>{1});
  CHECK(parts[1] == std::vector<std::size_t>{0});
}

TEST_CASE("Fig 1 upper bound at i = 3") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BeliefNetwork net = oracle::fig1_network(seed);
    auto P = [&](int var, int a, int b, int c, int d, int e) {
      return std::exp(oracle::lookup(net.cpt(var), {a, b, c, d, e}));
    };
    double hD[2] = {}, hE[2] = {};
    for (int a = 0; a < 2; ++a) {
      for (int d = 0; d < 2; ++d) {
        double h2 = 0.0;  // max_b P(d|a,b) P(b|a)
        for (int b = 0; b < 2; ++b) h2 = std::max(h2, P(D, a, b, 0, d, 0) * P(B, a, b, 0, 0, 0));
        hD[a] = std::max(hD[a], h2);
      }
      for (int e = 0; e < 2; ++e) {
        double hC = 0.0;  // max_c P(c|a) max_b P(e|b,c)
        for (int c = 0; c < 2; ++c) {
          double h1 = 0.0;
          for (int b = 0; b < 2; ++b) h1 = std::max(h1, P(E, 0, b, c, 0, e));
          hC = std::max(hC, P(C, a, 0, c, 0, 0) * h1);
        }
        hE[a] = std::max(hE[a], hC);
      }
    }
    double upper = 0.0;
    for (int a = 0; a < 2; ++a) upper = std::max(upper, P(A, a, 0, 0, 0, 0) * hE[a] * hD[a]);

    const AugmentedBuckets ab = approx_mpe(net, kFig1Order, {}, 3);
    CHECK(ab.upper_bound == doctest::Approx(std::log(upper)).epsilon(1e-12));
    CHECK(ab.buckets[4].generated.empty());
    std::size_t from_b = 0;
    for (const Bucket& b : ab.buckets)
      for (const GeneratedFunction& g : b.generated) from_b += g.origin == 4 ? 1 : 0;
    CHECK(from_b == 2);
  }
}

TEST_CASE("exact at i >= w* + 1") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = oracle::random_instance(seed, 9, static_cast<int>(seed % 3));
    const MoralGraph g = moralize(inst.network);
    const Ordering d = min_degree_ordering(g);
    const int w = induced_width(g, d);
    const double exact = oracle::mpe(inst.network, inst.evidence);
    for (int i = w + 1; i <= 9; ++i) {
      const AugmentedBuckets ab = approx_mpe(inst.network, d, inst.evidence, i);
      CHECK(close(ab.upper_bound, exact));
      CHECK(close(ab.lower_bound, exact));
    }
  }
}

TEST_CASE("unique-support chain") {
  const BeliefNetwork net = copy_chain(6);
  const Ordering d = min_degree_ordering(moralize(net));
  // The upper bound is exact for every i. At i = 1 the greedy forward pass
  // can stall on ties between values the split buckets cannot tell apart.
  CHECK(approx_mpe(net, d, {}, 1).upper_bound == 0.0);
  for (int i = 2; i <= 6; ++i) {
    const AugmentedBuckets ab = approx_mpe(net, d, {}, i);
    CHECK(ab.upper_bound == 0.0);
    CHECK(ab.lower_bound == 0.0);
    CHECK(ab.mb_assignment.values() == std::vector<int>(6, 1));
  }
}

TEST_CASE("elim_mpe") {
  SUBCASE("two variables") {
    const BeliefNetwork net = oracle::two_var_network();
    const MpeSolution s = elim_mpe(net, min_degree_ordering(moralize(net)), {});
    CHECK(s.log_value == doctest::Approx(std::log(0.54)).epsilon(1e-14));
    CHECK(s.assignment.values() == std::vector<int>{1, 1});
  }
  SUBCASE("Fig 1 with E = 0") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const BeliefNetwork net = oracle::fig1_network(seed);
      const Evidence e({{E, 0}}, net.domains());
      const MpeSolution s = elim_mpe(net, kFig1Order, e);
      CHECK(close(s.log_value, oracle::mpe(net, e)));
      CHECK(s.assignment[E] == 0);
      CHECK(close(oracle::joint(net, s.assignment.values()), s.log_value));
    }
  }
  SUBCASE("uniform independent") {
    const std::vector<int> d(3, 2);
    const double p[] = {0.5, 0.5};
    const BeliefNetwork net(d, std::vector<std::vector<int>>(3),
                            {make_cpt(d, {}, 0, p), make_cpt(d, {}, 1, p), make_cpt(d, {}, 2, p)});
    CHECK(elim_mpe(net, Ordering({0, 1, 2}), {}).log_value == doctest::Approx(std::log(0.125)));
  }
  SUBCASE("memory cap") {
    const BeliefNetwork net = oracle::fig1_network(1);
    EliminationOptions opts;
    opts.max_table_entries = 4;
    try {
      elim_mpe(net, kFig1Order, {}, opts);
      FAIL("expected a refusal");
    } catch (const MemoryCapExceeded& err) {
      CHECK(err.scope_size() == 5);
      CHECK(std::string(err.what()).find("5 variables") != std::string::npos);
    }
  }
}

TEST_CASE("i must be positive") {
  CHECK_THROWS_AS(approx_mpe(oracle::two_var_network(), Ordering({0, 1}), {}, 0), std::invalid_argument);
}

TEST_CASE("bound sandwich, MB joint and provenance") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto inst = oracle::random_instance(seed, 8, static_cast<int>(seed % 4), 0.1);
    const BeliefNetwork& net = inst.network;
    const Ordering d = min_degree_ordering(moralize(net));
    const double exact = oracle::mpe(net, inst.evidence);
    for (int i = 1; i <= 8; ++i) {
      const AugmentedBuckets ab = approx_mpe(net, d, inst.evidence, i);
      CHECK(ab.lower_bound <= exact + 1e-9);
      CHECK(exact <= ab.upper_bound + 1e-9);
      CHECK(ab.mb_assignment.complete());
      for (const auto& [var, value] : inst.evidence.pairs()) CHECK(ab.mb_assignment[static_cast<std::size_t>(var)] == value);
      CHECK(ab.lower_bound == joint_log_probability(net, ab.mb_assignment, inst.evidence));
      for (std::size_t p = 0; p < ab.buckets.size(); ++p)
        for (const GeneratedFunction& g : ab.buckets[p].generated) {
          CHECK(g.origin > static_cast<int>(p));
          for (int v : g.factor.scope()) CHECK(d.position_of(v) <= static_cast<int>(p));
        }
    }
  }
}

}
