#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "core/errors.hpp"
#include "core/json_io.hpp"
#include "core/network.hpp"
#include "support/fixtures.hpp"

using namespace entroflow;
using fixtures::edge;

namespace {

std::vector<std::string> names(const std::vector<VariableRef>& order) {
  std::vector<std::string> out;
  for (const auto& v : order) out.push_back(v.name());
  return out;
}

// Minimum over all s-t cuts (node bipartitions), by enumeration.
Capacity brute_force_cut(const NetworkProblem& p, const std::string& from, const std::string& to) {
  std::vector<std::string> others;
  for (const auto& n : p.network.nodes)
    if (n != from && n != to) others.push_back(n);
  bool best_set = false;
  Capacity best = Capacity::unbounded();
  for (std::uint32_t m = 0; m < (1U << others.size()); ++m) {
    std::set<std::string> side{from};
    for (std::size_t i = 0; i < others.size(); ++i)
      if ((m >> i) & 1U) side.insert(others[i]);
    bool unbounded = false;
    Rational total = 0;
    for (const auto& e : p.network.edges) {
      if (side.count(e.tail) && !side.count(e.head)) {
        if (e.capacity.is_unbounded()) {
          unbounded = true;
        } else {
          total += e.capacity.value();
        }
      }
    }
    if (unbounded) continue;
    if (!best_set || total < best.value()) {
      best = Capacity(total);
      best_set = true;
    }
  }
  return best;
}

NetworkProblem random_dag(std::mt19937_64& rng, int nodes, int edges, bool allow_unbounded) {
  NetworkProblem p;
  for (int i = 0; i < nodes; ++i) p.network.nodes.push_back("n" + std::to_string(i));
  std::uniform_int_distribution<int> node(0, nodes - 1), cap(0, 6), den(1, 3), coin(0, 9);
  for (int k = 0; k < edges; ++k) {
    int a = node(rng), b = node(rng);
    if (a == b) b = (a + 1) % nodes;
    if (a > b) std::swap(a, b);
    Capacity c = Capacity(Rational(cap(rng), den(rng)));
    if (allow_unbounded && coin(rng) == 0) c = Capacity::unbounded();
    p.network.edges.push_back(edge("e" + std::to_string(k), p.network.nodes[a], p.network.nodes[b], c));
  }
  p.requirement.sessions = {{"X", Rational(1), p.network.nodes.front(), {p.network.nodes.back()}}};
  return p;
}

}  // namespace

TEST(Validate, SingleEdgeIsValid) { EXPECT_TRUE(validate(fixtures::single_edge()).empty()); }

TEST(Validate, DetectsCycle) {
  NetworkProblem p;
  p.network.nodes = {"a", "b"};
  p.network.edges = {edge("e1", "a", "b", Rational(1)), edge("e2", "b", "a", Rational(1))};
  auto errors = validate(p);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0], "cycle detected: a,b");
  EXPECT_THROW(ancestral_order(p), std::invalid_argument);
}

TEST(Validate, UnknownOriginNode) {
  auto p = fixtures::single_edge();
  p.requirement.sessions[0].origin = "nowhere";
  auto errors = validate(p);
  ASSERT_FALSE(errors.empty());
  EXPECT_EQ(errors[0].rfind("unknown node", 0), 0u) << errors[0];
}

TEST(Validate, OtherStructuralErrors) {
  auto p = fixtures::single_edge();
  p.network.edges[0].capacity = Capacity(Rational(-1));
  p.requirement.sessions[0].sinks = {"s"};
  p.wiretaps.taps.push_back({{"Y"}, {"zz"}});
  p.network.edges.push_back(edge("e", "s", "t", Rational(1)));
  auto errors = validate(p);
  auto has = [&](const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("negative capacity"));
  EXPECT_TRUE(has("co-located"));
  EXPECT_TRUE(has("unknown session Y"));
  EXPECT_TRUE(has("unknown edge zz"));
  EXPECT_TRUE(has("duplicate edge id"));
}

TEST(Validate, ForwardingMustEnterTail) {
  NetworkProblem p = fixtures::relay();
  p.network.nodes.push_back("u");
  Edge f = edge("f", "a", "u", Capacity::unbounded());
  f.forwards = "e1";
  p.network.edges.push_back(f);
  EXPECT_TRUE(validate(p).empty());
  p.network.edges.back().forwards = "e2";  // e2 leaves a
  EXPECT_FALSE(validate(p).empty());
}

TEST(Validate, IncrementalOrder) {
  NetworkProblem p;
  p.network.nodes = {"s", "t"};
  p.network.edges = {edge("e", "s", "t", Rational(2))};
  p.requirement.sessions = {{"S0", Rational(1), "s", {"t"}}, {"S1", Rational(1), "s", {"t"}}};
  p.requirement.incremental_order = {"S0", "S1"};
  EXPECT_TRUE(validate(p).empty());
  p.requirement.incremental_order = {"S0"};
  EXPECT_FALSE(validate(p).empty());
  p.requirement.incremental_order = {"S0", "S1", "S1"};
  EXPECT_FALSE(validate(p).empty());
}

TEST(Demands, IncrementalExpansion) {
  NetworkProblem p;
  p.network.nodes = {"s", "t0", "t1"};
  p.network.edges = {edge("a", "s", "t0", Rational(1)), edge("b", "s", "t1", Rational(2))};
  p.requirement.sessions = {{"S0", Rational(1), "s", {"t0"}}, {"S1", Rational(1), "s", {"t1"}}};
  p.requirement.incremental_order = {"S0", "S1"};
  ProblemIndex index(p);
  EXPECT_EQ(index.demands().at("t0"), (std::vector<std::string>{"S0"}));
  EXPECT_EQ(index.demands().at("t1"), (std::vector<std::string>{"S0", "S1"}));
}

TEST(AncestralOrder, Path) {
  EXPECT_EQ(names(ancestral_order(fixtures::relay())), (std::vector<std::string>{"T_X", "W_e1", "W_e2"}));
}

TEST(AncestralOrder, Diamond) {
  NetworkProblem p;
  p.network.nodes = {"s", "a", "b", "t"};
  p.network.edges = {edge("at", "a", "t", Rational(1)), edge("sa", "s", "a", Rational(1)),
                     edge("bt", "b", "t", Rational(1)), edge("sb", "s", "b", Rational(1))};
  p.requirement.sessions = {{"X", Rational(1), "s", {"t"}}};
  auto order = names(ancestral_order(p));
  auto pos = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
  EXPECT_LT(pos("W_sa"), pos("W_at"));
  EXPECT_LT(pos("W_sb"), pos("W_bt"));
}

TEST(AncestralOrder, ParallelEdgesTieBreak) {
  NetworkProblem p;
  p.network.nodes = {"s", "t"};
  p.network.edges = {edge("e2", "s", "t", Rational(1)), edge("e1", "s", "t", Rational(1))};
  p.requirement.sessions = {{"T", Rational(1), "s", {"t"}}};
  EXPECT_EQ(names(ancestral_order(p)), (std::vector<std::string>{"T_T", "W_e1", "W_e2"}));
}

TEST(AncestralOrder, IsTopologicalOnRandomDags) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_dag(rng, 6, 10, true);
    auto order = ancestral_order(p);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i].name()] = i;
    for (const auto& e : p.network.edges)
      for (const auto& f : p.network.edges)
        if (f.head == e.tail) EXPECT_LT(pos["W_" + f.id], pos["W_" + e.id]);
    EXPECT_EQ(ancestral_order(p), order);  // deterministic
  }
}

TEST(MinCut, Examples) {
  EXPECT_EQ(min_cut(fixtures::single_edge(1, Rational(3, 2)), "s", "t"), Capacity(Rational(3, 2)));
  auto b = fixtures::butterfly();
  EXPECT_EQ(min_cut(b, "s", "t1"), Capacity(Rational(2)));
  EXPECT_EQ(min_cut(b, "s", "t2"), Capacity(Rational(2)));
  EXPECT_EQ(min_cut(b, "t1", "s"), Capacity(Rational(0)));
}

TEST(MinCut, Unbounded) {
  NetworkProblem p = fixtures::relay();
  p.network.edges[0].capacity = Capacity::unbounded();
  EXPECT_EQ(min_cut(p, "s", "t"), Capacity(Rational(1)));
  p.network.edges[1].capacity = Capacity::unbounded();
  EXPECT_TRUE(min_cut(p, "s", "t").is_unbounded());
  EXPECT_TRUE(min_cut(p, "s", "s").is_unbounded());
  EXPECT_THROW(min_cut(p, "s", "zz"), std::invalid_argument);
}

TEST(MinCut, MatchesCutEnumeration) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = random_dag(rng, 3 + trial % 5, 1 + trial % 10, trial % 3 == 0);
    const auto& s = p.network.nodes.front();
    const auto& t = p.network.nodes.back();
    Capacity flow = min_cut(p, s, t);
    Capacity cut = brute_force_cut(p, s, t);
    ASSERT_EQ(flow.is_unbounded(), cut.is_unbounded()) << serialize(p);
    if (!flow.is_unbounded()) EXPECT_EQ(flow.value(), cut.value()) << serialize(p);
  }
}

TEST(Json, ParsesMinimalProblem) {
  auto p = parse_problem(R"({"nodes":["s","t"],
    "edges":[{"id":"e","tail":"s","head":"t","capacity":"3/2"}],
    "sessions":[{"id":"X","rate":"1","origin":"s","sinks":["t"]}]})");
  EXPECT_TRUE(validate(p).empty());
  EXPECT_EQ(p.network.edges[0].capacity.value(), Rational(3, 2));
  EXPECT_TRUE(p.wiretaps.taps.empty());
}

TEST(Json, RoundTrip) {
  NetworkProblem p = fixtures::butterfly();
  p.network.edges[0].capacity = Capacity::unbounded();
  p.wiretaps.taps.push_back({{"X"}, {"cd"}});
  p.randomness_nodes = {"a"};
  p.requirement.incremental_order = {"X"};
  std::string text = serialize(p);
  EXPECT_EQ(parse_problem(text), p);
  EXPECT_EQ(serialize(parse_problem(text)), text);
}

TEST(Json, CanonicalForm) {
  auto p = parse_problem(R"({"sessions":[{"sinks":["t"],"origin":"s","rate":"2/4","id":"X"}],
    "nodes":["s","t"],"edges":[{"head":"t","tail":"s","id":"e","capacity":2}]})");
  std::string canon = serialize(p);
  EXPECT_NE(canon.find("\"rate\": \"1/2\""), std::string::npos);
  EXPECT_NE(canon.find("\"capacity\": \"2\""), std::string::npos);
  EXPECT_EQ(serialize(parse_problem(canon)), canon);
}

TEST(Json, Diagnostics) {
  try {
    parse_problem("{\"nodes\": [\"s\"],\n \"edges\": [{\"id\": \"e\", \"tail\": \"s\", \"head\": \"s\", \"capacity\": \"x\"}], \"sessions\": []}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "edges[0].capacity");
  }
  try {
    parse_problem("{\"nodes\": [\"s\"],\n  \"edges\": [,]}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_problem(R"({"nodes":[],"edges":[],"sessions":[],"colour":1})"), ParseError);
  EXPECT_THROW(parse_problem(R"({"nodes":[],"edges":[]})"), ParseError);
}

TEST(RateCapacity, TupleRoundTrip) {
  auto p = fixtures::butterfly();
  auto t = rate_capacity_tuple(p);
  EXPECT_EQ(t.rates.at("X"), Rational(2));
  EXPECT_EQ(with_tuple(p, t), p);
  t.capacities.erase("cd");
  EXPECT_THROW(with_tuple(p, t), std::invalid_argument);
}
