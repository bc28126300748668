#include <gtest/gtest.h>

#include <random>

#include "core/code.hpp"
#include "core/errors.hpp"
#include "core/json_io.hpp"
#include "support/fixtures.hpp"

using namespace entroflow;
using fixtures::edge;
using fixtures::table_encoder;

namespace {

NetworkCode identity_relay_code(const NetworkProblem& p, int alphabet = 2) {
  ProblemIndex index(p);
  NetworkCode code;
  code.source_alphabets = {{"X", alphabet}};
  std::vector<int> id(alphabet);
  for (int i = 0; i < alphabet; ++i) id[i] = i;
  for (const auto& e : index.edge_order()) {
    code.edge_alphabets[e] = alphabet;
    code.encoders.push_back(table_encoder(index, e, id));
  }
  return code;
}

// s -> u (carries g(T)), u -> t (carries f(W_e0, V_u)).
NetworkProblem relay_network() {
  NetworkProblem p;
  p.network.nodes = {"s", "u", "t"};
  p.network.edges = {edge("e0", "s", "u", Capacity::unbounded()), edge("e1", "u", "t", Capacity::unbounded())};
  p.requirement.sessions = {{"T", Rational(0), "s", {}}};
  p.randomness_nodes = {"u"};
  return p;
}

NetworkCode relay_code(const NetworkProblem& p, int t_alph, std::vector<int> g, int x_alph,
                       std::vector<Rational> v_pmf, std::vector<int> f, int w_alph) {
  ProblemIndex index(p);
  NetworkCode code;
  code.source_alphabets = {{"T", t_alph}};
  code.edge_alphabets = {{"e0", x_alph}, {"e1", w_alph}};
  code.randomness = {{"u", std::move(v_pmf)}};
  code.encoders = {table_encoder(index, "e0", std::move(g)), table_encoder(index, "e1", std::move(f), true)};
  return code;
}

bool brute_force_exists(const NetworkProblem& p, const NetworkCode& shape) {
  // every full table assignment with the shape's alphabets
  std::vector<const LocalEncoder*> encs;
  for (const auto& e : shape.encoders) encs.push_back(&e);
  NetworkCode code = shape;
  std::vector<std::size_t> sizes;
  std::size_t total_bits = 0;
  for (const auto& e : shape.encoders) {
    sizes.push_back(e.table.size());
    total_bits += e.table.size();
  }
  if (total_bits > 18) throw std::logic_error("oracle instance too large");
  for (std::uint64_t m = 0; m < (1ULL << total_bits); ++m) {
    std::size_t bit = 0;
    for (auto& enc : code.encoders)
      for (auto& v : enc.table) v = static_cast<int>((m >> bit++) & 1ULL) % code.edge_alphabets.at(enc.edge);
    if (check_admissible(p, code).admissible) return true;
  }
  return false;
}

}  // namespace

TEST(Evaluate, IdentityRelay) {
  auto p = fixtures::relay();
  auto out = evaluate(p, identity_relay_code(p), {1});
  EXPECT_EQ(out.at("e1"), 1);
  EXPECT_EQ(out.at("e2"), 1);
}

TEST(Evaluate, ButterflyXor) {
  auto p = fixtures::butterfly();
  auto code = fixtures::butterfly_xor_code(p);
  auto out = evaluate(p, code, {2});  // (b1, b2) = (1, 0)
  EXPECT_EQ(out.at("cd"), 1);
  EXPECT_EQ(out.at("dt1"), 1);
  EXPECT_EQ(out.at("at1"), 1);
  EXPECT_EQ(out.at("bt2"), 0);
  EXPECT_THROW(evaluate(p, code, {4}), std::invalid_argument);
}

TEST(Evaluate, ForwardingEdgesCopyTheirRoot) {
  auto p = fixtures::relay();
  p.network.nodes.push_back("u");
  Edge f = edge("f", "a", "u", Capacity::unbounded());
  f.forwards = "e1";
  p.network.edges.push_back(f);
  auto code = identity_relay_code(fixtures::relay());
  auto out = evaluate(p, code, {1});
  EXPECT_EQ(out.at("f"), 1);
}

TEST(Evaluate, CausalityOnRandomCodes) {
  // changing the source only changes edges downstream of the source node
  auto p = fixtures::butterfly();
  p.network.nodes.push_back("z");
  p.network.edges.push_back(edge("zt", "z", "t1", Rational(1)));
  ProblemIndex index(p);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkCode code;
    code.source_alphabets = {{"X", 4}};
    for (const auto& e : index.edge_order()) {
      code.edge_alphabets[e] = 2;
      auto inputs = encoder_inputs(index, e, false);
      std::size_t size = 1;
      for (const auto& v : inputs) size *= v.kind == VariableRef::Kind::kSession ? 4 : 2;
      std::vector<int> table(size);
      for (auto& x : table) x = static_cast<int>(rng() % 2);
      code.encoders.push_back({e, inputs, table});
    }
    auto a = evaluate(p, code, {0});
    auto b = evaluate(p, code, {3});
    EXPECT_EQ(a.at("zt"), b.at("zt"));
    EXPECT_EQ(evaluate(p, code, {1}), evaluate(p, code, {1}));
  }
}

TEST(Induced, SingleBitIdentity) {
  auto p = fixtures::single_edge();
  auto d = induced_joint_distribution(p, identity_relay_code(p));
  EXPECT_EQ(d.support_size(), 2u);
  EXPECT_EQ(d.variables()[0].name, "T_X");
  EXPECT_EQ(d.variables()[1].name, "W_e");
  EXPECT_EQ(d.probability({1, 1}), Rational(1, 2));
}

TEST(Induced, DeterministicCodesHaveProductSupport) {
  auto p = fixtures::butterfly();
  auto d = induced_joint_distribution(p, fixtures::butterfly_xor_code(p));
  EXPECT_EQ(d.support_size(), 4u);
  std::vector<std::string> t{"T_X"};
  for (const auto& e : p.network.edges)
    EXPECT_TRUE(check_functional_dependency(d, std::vector<std::string>{"W_" + e.id}, t));
}

TEST(Induced, Budget) {
  auto p = fixtures::single_edge();
  EXPECT_THROW(induced_joint_distribution(p, identity_relay_code(p), 1), BudgetExceeded);
}

TEST(ZeroError, Examples) {
  auto p = fixtures::relay();
  EXPECT_TRUE(check_zero_error(p, identity_relay_code(p)).ok);

  auto code = identity_relay_code(p);
  code.encoders[0].table = {0, 0};
  auto r = check_zero_error(p, code);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0], (DecodingFailure{"t", "X"}));

  auto b = fixtures::butterfly();
  EXPECT_TRUE(check_zero_error(b, fixtures::butterfly_xor_code(b)).ok);
}

TEST(Secrecy, Examples) {
  auto p = fixtures::relay();
  EXPECT_TRUE(check_secrecy(p, identity_relay_code(p)).ok);
  p.wiretaps.taps.push_back({{"X"}, {"e1"}});
  auto r = check_secrecy(p, identity_relay_code(p));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.leaking_taps, std::vector<int>{0});
}

TEST(Admissible, Examples) {
  auto p = fixtures::single_edge();
  auto v = check_admissible(p, identity_relay_code(p));
  EXPECT_TRUE(v.admissible);
  EXPECT_TRUE(v.reasons.empty());

  auto half = fixtures::single_edge(1, Rational(1, 2));
  auto bad = check_admissible(half, identity_relay_code(half));
  EXPECT_FALSE(bad.admissible);
  ASSERT_EQ(bad.reasons.size(), 1u);
  EXPECT_EQ(bad.reasons[0].kind, Reason::Kind::kCapacity);

  auto fast = fixtures::single_edge(2, 2);
  auto slow = check_admissible(fast, identity_relay_code(fast));
  EXPECT_FALSE(slow.admissible);
  EXPECT_EQ(slow.reasons[0].kind, Reason::Kind::kRate);
}

TEST(Admissible, ExactPowerComparisons) {
  // 3 symbols fit 2^(log2 3) only from above: 3 <= 2^(8/5) since 3^5 = 243 <= 256
  auto p = fixtures::single_edge(Rational(8, 5), Rational(8, 5));
  EXPECT_FALSE(check_admissible(p, identity_relay_code(p, 3)).admissible);  // rate: 243 < 256
  auto q = fixtures::single_edge(Rational(3, 2), Rational(8, 5));
  EXPECT_TRUE(check_admissible(q, identity_relay_code(q, 3)).admissible);  // 9 >= 8, 243 <= 256
}

TEST(Validation, RejectsMalformedCodes) {
  auto p = fixtures::relay();
  auto code = identity_relay_code(p);
  code.encoders[0].table = {0, 1, 0};
  EXPECT_THROW(validate_code(p, code), std::invalid_argument);
  code = identity_relay_code(p);
  code.encoders[1].inputs = {{VariableRef::Kind::kSession, "X"}};
  EXPECT_THROW(validate_code(p, code), std::invalid_argument);
  code = identity_relay_code(p);
  code.encoders[0].table = {0, 2};
  EXPECT_THROW(validate_code(p, code), std::invalid_argument);
  code = identity_relay_code(p);
  code.randomness = {{"a", {Rational(1)}}};
  EXPECT_THROW(validate_code(p, code), std::invalid_argument);  // not permitted by the problem
  code = identity_relay_code(p);
  code.encoders.pop_back();
  EXPECT_THROW(validate_code(p, code), std::invalid_argument);
}

TEST(Derandomize, IgnoredRandomness) {
  auto p = relay_network();
  // W = X regardless of V
  auto code = relay_code(p, 2, {0, 1}, 2, {Rational(1, 2), Rational(1, 2)}, {0, 0, 1, 1}, 2);
  auto r = derandomize(p, code, "e1");
  ASSERT_TRUE(r.ok) << r.reason;
  EXPECT_EQ(r.encoder->table, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.encoder->inputs.size(), 1u);
  auto replaced = with_encoder(code, *r.encoder);
  EXPECT_EQ(induced_joint_distribution(p, replaced), induced_joint_distribution(p, code));
}

TEST(Derandomize, XorWithFairBitViolatesPremise) {
  auto p = relay_network();
  auto code = relay_code(p, 2, {0, 1}, 2, {Rational(1, 2), Rational(1, 2)}, {0, 1, 1, 0}, 2);
  auto r = derandomize(p, code, "e1");
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("not independent"), std::string::npos);
}

TEST(Derandomize, ConstantInVForEachX) {
  auto p = relay_network();
  // V has three symbols; table depends on V only through unreachable masses
  auto code = relay_code(p, 3, {0, 1, 2}, 3, {Rational(1, 2), Rational(1, 2), Rational(0)},
                         {1, 1, 0, 0, 0, 1, 1, 1, 1}, 2);
  auto r = derandomize(p, code, "e1");
  ASSERT_TRUE(r.ok) << r.reason;
  EXPECT_EQ(r.encoder->table, (std::vector<int>{1, 0, 1}));
}

TEST(Derandomize, DeterministicEdgeIsItsOwnProjection) {
  auto p = relay_network();
  auto code = relay_code(p, 2, {1, 0}, 2, {Rational(1)}, {0, 1}, 2);
  auto r = derandomize(p, code, "e0");
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.encoder->table, (std::vector<int>{1, 0}));
}

TEST(CodeJson, RoundTrip) {
  auto p = fixtures::butterfly();
  auto code = fixtures::butterfly_xor_code(p);
  Json j = to_json(code, p);
  EXPECT_EQ(j["encoders"][6]["edge"], "cd");
  EXPECT_EQ(j["encoders"][6]["table"], Json::parse("[[0,1],[1,0]]"));
  NetworkCode back = code_from_json(j, p);
  EXPECT_EQ(induced_joint_distribution(p, back), induced_joint_distribution(p, code));
  EXPECT_EQ(to_json(back, p), j);
}

TEST(CodeJson, RandomizedAndErrors) {
  auto p = relay_network();
  auto code = relay_code(p, 2, {0, 1}, 2, {Rational(1, 3), Rational(2, 3)}, {0, 1, 1, 0}, 2);
  Json j = to_json(code, p);
  EXPECT_EQ(j["randomness"][0]["pmf"][0], "1/3");
  EXPECT_EQ(code_from_json(j, p), code);
  j["encoders"][1]["table"] = Json::parse("[[0,1],[1]]");
  EXPECT_THROW(code_from_json(j, p), ParseError);
  j = to_json(code, p);
  j["encoders"][1]["inputs"] = Json::parse(R"(["Q_x"])");
  EXPECT_THROW(code_from_json(j, p), ParseError);
}

TEST(Search, SingleEdgeIdentity) {
  auto p = fixtures::single_edge();
  auto r = exhaustive_search(p);
  ASSERT_EQ(r.status, SearchResult::Status::kFound);
  EXPECT_EQ(r.code->encoders[0].table, (std::vector<int>{0, 1}));
  EXPECT_TRUE(check_admissible(p, *r.code).admissible);
}

TEST(Search, ButterflyFindsNetworkCode) {
  auto p = fixtures::butterfly();
  auto r = exhaustive_search(p);
  ASSERT_EQ(r.status, SearchResult::Status::kFound);
  EXPECT_TRUE(check_admissible(p, *r.code).admissible);
  // the middle edge must mix both halves
  auto d = induced_joint_distribution(p, *r.code);
  EXPECT_FALSE(check_functional_dependency(d, std::vector<std::string>{"W_cd"}, std::vector<std::string>{"W_sa"}));
  EXPECT_FALSE(check_functional_dependency(d, std::vector<std::string>{"W_cd"}, std::vector<std::string>{"W_sb"}));
}

TEST(Search, InfeasibleInstancesReportNone) {
  auto p = fixtures::single_edge(2, 1);
  auto r = exhaustive_search(p);
  EXPECT_EQ(r.status, SearchResult::Status::kNone);
  EXPECT_DOUBLE_EQ(r.fraction_searched, 1.0);
  auto tapped = fixtures::relay();
  tapped.wiretaps.taps.push_back({{"X"}, {"e1"}});
  EXPECT_EQ(exhaustive_search(tapped).status, SearchResult::Status::kNone);
}

TEST(Search, BudgetExceededReportsFraction) {
  auto p = fixtures::butterfly();
  p.network.edges[4].capacity = Capacity(Rational(0));  // cd dead; no code exists
  auto r = exhaustive_search(p, {2, false, 5, 1});
  EXPECT_EQ(r.status, SearchResult::Status::kBudgetExceeded);
  EXPECT_GE(r.fraction_searched, 0.0);
  EXPECT_LT(r.fraction_searched, 1.0);
  auto full = exhaustive_search(p);
  EXPECT_EQ(full.status, SearchResult::Status::kNone);
}

TEST(Search, ResultIndependentOfThreadCount) {
  auto p = fixtures::butterfly();
  auto one = exhaustive_search(p, {2, false, 10'000'000, 1});
  auto three = exhaustive_search(p, {2, false, 10'000'000, 3});
  ASSERT_EQ(one.status, SearchResult::Status::kFound);
  ASSERT_EQ(three.status, SearchResult::Status::kFound);
  EXPECT_EQ(*one.code, *three.code);
  auto again = exhaustive_search(p);
  EXPECT_EQ(*again.code, *one.code);
}

TEST(Search, RandomizedModeUsesPermittedNodes) {
  // a key must be generated at a to hide X on the tapped edge; t also sees it directly
  NetworkProblem p;
  p.network.nodes = {"s", "a", "t"};
  p.network.edges = {edge("x", "s", "t", Rational(1)), edge("k1", "a", "s", Rational(1)),
                     edge("k2", "a", "t", Rational(1)), edge("c", "s", "t", Rational(1))};
  p.requirement.sessions = {{"X", Rational(1), "s", {"t"}}};
  p.wiretaps.taps.push_back({{"X"}, {"c"}});
  p.randomness_nodes = {"a"};
  p.network.edges.erase(p.network.edges.begin());  // only c carries data
  EXPECT_EQ(exhaustive_search(p, {2, false, 1'000'000, 1}).status, SearchResult::Status::kNone);
  auto r = exhaustive_search(p, {2, true, 1'000'000, 1});
  ASSERT_EQ(r.status, SearchResult::Status::kFound);
  EXPECT_FALSE(r.code->randomness.empty());
  EXPECT_TRUE(check_admissible(p, *r.code).admissible);
}

TEST(Search, AgreesWithFullEnumerationOnTinyInstances) {
  std::mt19937_64 rng(12);
  int found = 0, none = 0;
  for (int trial = 0; trial < 40; ++trial) {
    NetworkProblem p;
    p.network.nodes = {"s", "a", "t"};
    std::uniform_int_distribution<int> cap(0, 1), pick(0, 2);
    const std::vector<std::pair<std::string, std::string>> arcs{{"s", "a"}, {"a", "t"}, {"s", "t"}};
    int edges = 2 + trial % 2;
    for (int k = 0; k < edges; ++k) {
      auto [u, v] = arcs[pick(rng)];
      p.network.edges.push_back(edge("e" + std::to_string(k), u, v, Rational(cap(rng))));
    }
    p.requirement.sessions = {{"X", Rational(1), "s", {"t"}}};
    if (trial % 3 == 0) p.wiretaps.taps.push_back({{"X"}, {"e0"}});
    ProblemIndex index(p);
    NetworkCode shape;
    shape.source_alphabets = {{"X", 2}};
    // capacity 0 links carry a single symbol
    for (const auto& e : index.edge_order()) shape.edge_alphabets[e] = index.edge(e).capacity.value() == 0 ? 1 : 2;
    bool small = true;
    for (const auto& e : index.edge_order()) {
      auto inputs = encoder_inputs(index, e, false);
      std::size_t size = 1;
      for (const auto& v : inputs) size *= v.kind == VariableRef::Kind::kSession ? 2 : shape.edge_alphabets.at(v.id);
      if (size > 8) small = false;
      shape.encoders.push_back({e, inputs, std::vector<int>(size, 0)});
    }
    if (!small) continue;
    bool oracle = brute_force_exists(p, shape);
    auto r = exhaustive_search(p);
    EXPECT_EQ(r.status == SearchResult::Status::kFound, oracle) << serialize(p);
    (oracle ? found : none)++;
  }
  EXPECT_GT(found, 0);
  EXPECT_GT(none, 0);
}

TEST(Search, RandomRestartOracleNeverBeatsSearch) {
  // random full tables on the butterfly with a dead link: none should exist,
  // and on the intact butterfly any sampled success implies search success
  auto p = fixtures::butterfly();
  ProblemIndex index(p);
  std::mt19937_64 rng(99);
  bool sampled = false;
  for (int trial = 0; trial < 3000 && !sampled; ++trial) {
    NetworkCode code;
    code.source_alphabets = {{"X", 4}};
    for (const auto& e : index.edge_order()) {
      code.edge_alphabets[e] = 2;
      auto inputs = encoder_inputs(index, e, false);
      std::size_t size = 1;
      for (const auto& v : inputs) size *= v.kind == VariableRef::Kind::kSession ? 4 : 2;
      std::vector<int> table(size);
      for (auto& x : table) x = static_cast<int>(rng() % 2);
      code.encoders.push_back({e, inputs, table});
    }
    sampled = check_admissible(p, code).admissible;
  }
  if (sampled) EXPECT_EQ(exhaustive_search(p).status, SearchResult::Status::kFound);
}
