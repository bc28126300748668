#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "core/rational.hpp"

namespace entroflow {

// Exact nonnegative capacity, or Unbounded for lossless forwarding links.
class Capacity {
 public:
  Capacity() = default;
  Capacity(Rational value) : value_(std::move(value)) { value_->canonicalize(); }  // NOLINT: implicit by design of the schema
  static Capacity unbounded() {
    Capacity c;
    c.value_.reset();
    return c;
  }

  bool is_unbounded() const { return !value_.has_value(); }
  const Rational& value() const { return value_.value(); }

  friend bool operator==(const Capacity&, const Capacity&) = default;

 private:
  std::optional<Rational> value_ = Rational(0);
};

std::string to_string(const Capacity& c);

struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  Capacity capacity;
  // Duplicator edge: carries the same message as the named edge, which must
  // enter this edge's tail.
  std::optional<std::string> forwards;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Network {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  friend bool operator==(const Network&, const Network&) = default;
};

struct Session {
  std::string id;
  Rational rate;
  std::string origin;
  std::vector<std::string> sinks;
  friend bool operator==(const Session&, const Session&) = default;
};

struct ConnectionRequirement {
  std::vector<Session> sessions;
  // Optional total order; a sink demanding a session also demands every
  // session earlier in this order.
  std::vector<std::string> incremental_order;
  friend bool operator==(const ConnectionRequirement&, const ConnectionRequirement&) = default;
};

struct Tap {
  std::vector<std::string> sources;  // A_r: sessions the adversary must not learn about
  std::vector<std::string> edges;    // B_r: observed links
  friend bool operator==(const Tap&, const Tap&) = default;
};

struct WiretapPattern {
  std::vector<Tap> taps;
  friend bool operator==(const WiretapPattern&, const WiretapPattern&) = default;
};

struct RateCapacityTuple {
  std::map<std::string, Rational> rates;        // per session
  std::map<std::string, Capacity> capacities;   // per edge
  friend bool operator==(const RateCapacityTuple&, const RateCapacityTuple&) = default;
};

struct NetworkProblem {
  Network network;
  ConnectionRequirement requirement;
  WiretapPattern wiretaps;
  // Nodes allowed to hold private randomness (probabilistic codes).
  std::vector<std::string> randomness_nodes;
  friend bool operator==(const NetworkProblem&, const NetworkProblem&) = default;
};

RateCapacityTuple rate_capacity_tuple(const NetworkProblem& p);
// Copy of p with rates and capacities replaced; keys must match.
NetworkProblem with_tuple(NetworkProblem p, const RateCapacityTuple& t);

// Structural errors; empty means valid.
std::vector<std::string> validate(const NetworkProblem& p);
// Throws std::invalid_argument listing the errors if any.
void require_valid(const NetworkProblem& p);

// Message variable: a session source T_s, an edge message W_e, or a node's
// private randomness V_u.
struct VariableRef {
  enum class Kind { kSession, kEdge, kRandomness };
  Kind kind;
  std::string id;
  std::string name() const;  // "T_<id>", "W_<id>" or "V_<id>"
  friend bool operator==(const VariableRef&, const VariableRef&) = default;
  friend auto operator<=>(const VariableRef&, const VariableRef&) = default;
};

// Sessions in declaration order, then edges in topological order; ready edges
// are taken in lexicographic id order. Throws on cyclic input.
std::vector<VariableRef> ancestral_order(const NetworkProblem& p);

// Exact max-flow value. Unbounded edges count as (sum of finite capacities + 1)
// inside the flow; a path made only of unbounded edges yields Unbounded.
Capacity min_cut(const NetworkProblem& p, const std::string& from, const std::string& to);

// Precomputed adjacency for a validated problem.
class ProblemIndex {
 public:
  explicit ProblemIndex(const NetworkProblem& p);

  const NetworkProblem& problem() const { return *problem_; }
  const Edge& edge(const std::string& id) const;
  const Session& session(const std::string& id) const;
  bool has_edge(const std::string& id) const { return edge_pos_.count(id) > 0; }
  bool has_session(const std::string& id) const { return session_pos_.count(id) > 0; }

  // Edge ids in ancestral order.
  const std::vector<std::string>& edge_order() const { return edge_order_; }
  const std::vector<std::string>& incoming(const std::string& node) const;
  const std::vector<std::string>& outgoing(const std::string& node) const;
  // Sessions originating at node, in declaration order.
  const std::vector<std::string>& sessions_at(const std::string& node) const;
  // Root of the forwarding chain (the edge itself for ordinary edges).
  const std::string& root(const std::string& edge_id) const;
  bool is_forwarding(const std::string& edge_id) const { return edge(edge_id).forwards.has_value(); }
  bool has_randomness(const std::string& node) const { return randomness_.count(node) > 0; }

  // Expanded demands: sink node -> demanded sessions (incremental order applied).
  const std::map<std::string, std::vector<std::string>>& demands() const { return demands_; }

 private:
  const NetworkProblem* problem_;
  std::map<std::string, std::size_t> edge_pos_;
  std::map<std::string, std::size_t> session_pos_;
  std::vector<std::string> edge_order_;
  std::map<std::string, std::vector<std::string>> incoming_, outgoing_, sessions_at_;
  std::map<std::string, std::string> root_;
  std::set<std::string> randomness_;
  std::map<std::string, std::vector<std::string>> demands_;
};

}  // namespace entroflow
