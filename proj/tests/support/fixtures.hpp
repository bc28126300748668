#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "core/code.hpp"
#include "core/network.hpp"

namespace entroflow::fixtures {

inline Edge edge(std::string id, std::string tail, std::string head, Capacity cap) {
  return Edge{std::move(id), std::move(tail), std::move(head), std::move(cap), std::nullopt};
}

inline NetworkProblem single_edge(Rational rate = 1, Rational capacity = 1) {
  NetworkProblem p;
  p.network.nodes = {"s", "t"};
  p.network.edges = {edge("e", "s", "t", capacity)};
  p.requirement.sessions = {{"X", rate, "s", {"t"}}};
  return p;
}

inline NetworkProblem relay(Rational rate = 1) {
  NetworkProblem p;
  p.network.nodes = {"s", "a", "t"};
  p.network.edges = {edge("e1", "s", "a", Rational(1)), edge("e2", "a", "t", Rational(1))};
  p.requirement.sessions = {{"X", rate, "s", {"t"}}};
  return p;
}

// Classic butterfly: one rate-2 session multicast to t1 and t2, unit links.
inline NetworkProblem butterfly(Rational rate = 2) {
  NetworkProblem p;
  p.network.nodes = {"s", "a", "b", "c", "d", "t1", "t2"};
  p.network.edges = {edge("sa", "s", "a", Rational(1)),  edge("sb", "s", "b", Rational(1)),
                     edge("ac", "a", "c", Rational(1)),  edge("bc", "b", "c", Rational(1)),
                     edge("cd", "c", "d", Rational(1)),  edge("at1", "a", "t1", Rational(1)),
                     edge("bt2", "b", "t2", Rational(1)), edge("dt1", "d", "t1", Rational(1)),
                     edge("dt2", "d", "t2", Rational(1))};
  p.requirement.sessions = {{"X", rate, "s", {"t1", "t2"}}};
  return p;
}

inline LocalEncoder table_encoder(const ProblemIndex& index, const std::string& edge, std::vector<int> table,
                                  bool randomized = false) {
  return LocalEncoder{edge, encoder_inputs(index, edge, randomized), std::move(table)};
}

// X = (b1, b2) as 2*b1 + b2; a gets b1, b gets b2, c sends b1 xor b2.
inline NetworkCode butterfly_xor_code(const NetworkProblem& p) {
  ProblemIndex index(p);
  NetworkCode code;
  code.source_alphabets = {{"X", 4}};
  for (const auto& e : p.network.edges) code.edge_alphabets[e.id] = 2;
  code.encoders.push_back(table_encoder(index, "sa", {0, 0, 1, 1}));
  code.encoders.push_back(table_encoder(index, "sb", {0, 1, 0, 1}));
  code.encoders.push_back(table_encoder(index, "ac", {0, 1}));
  code.encoders.push_back(table_encoder(index, "at1", {0, 1}));
  code.encoders.push_back(table_encoder(index, "bc", {0, 1}));
  code.encoders.push_back(table_encoder(index, "bt2", {0, 1}));
  code.encoders.push_back(table_encoder(index, "cd", {0, 1, 1, 0}));
  code.encoders.push_back(table_encoder(index, "dt1", {0, 1}));
  code.encoders.push_back(table_encoder(index, "dt2", {0, 1}));
  return code;
}

// Random rational pmf with denominators up to `den` (some masses may be zero).
inline std::vector<Rational> random_pmf(std::mt19937_64& rng, int size, int den = 6) {
  std::uniform_int_distribution<int> w(0, den);
  std::vector<int> weights(size);
  int total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : weights) {
      x = w(rng);
      total += x;
    }
  }
  std::vector<Rational> out;
  for (int x : weights) out.emplace_back(Rational(x, total));
  for (auto& q : out) q.canonicalize();
  return out;
}

}  // namespace entroflow::fixtures
