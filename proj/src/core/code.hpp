#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/entropy.hpp"
#include "core/network.hpp"

namespace entroflow {

inline constexpr std::uint64_t kDistributionBudget = 10'000'000;

struct NodeRandomness {
  std::string node;
  std::vector<Rational> pmf;  // over symbols 0..size-1
  int alphabet() const { return static_cast<int>(pmf.size()); }
  friend bool operator==(const NodeRandomness&, const NodeRandomness&) = default;
};

// Output of one edge as a function of the variables incident to its tail.
// The table is flat, indexed by the input tuple in mixed radix with the first
// input most significant.
struct LocalEncoder {
  std::string edge;
  std::vector<VariableRef> inputs;
  std::vector<int> table;
  friend bool operator==(const LocalEncoder&, const LocalEncoder&) = default;
};

struct NetworkCode {
  std::map<std::string, int> source_alphabets;  // session id -> |T_s|
  std::map<std::string, int> edge_alphabets;    // non-forwarding edges
  std::vector<NodeRandomness> randomness;
  std::vector<LocalEncoder> encoders;  // one per non-forwarding edge

  const LocalEncoder* encoder(const std::string& edge) const;
  LocalEncoder* encoder(const std::string& edge);
  const NodeRandomness* randomness_at(const std::string& node) const;
  bool is_deterministic() const { return randomness.empty(); }
  friend bool operator==(const NetworkCode&, const NetworkCode&) = default;
};

// Inputs an encoder on `edge` must take: sessions at the tail (declaration
// order), incoming edges at the tail (ancestral order), then V_tail if the
// tail has randomness.
std::vector<VariableRef> encoder_inputs(const ProblemIndex& index, const std::string& edge, bool tail_randomized);

// Alphabet of an edge's message; forwarding edges inherit from their root.
int edge_alphabet(const ProblemIndex& index, const NetworkCode& code, const std::string& edge);

// Structural checks (encoders present, inputs causal, tables total and in
// range). Throws std::invalid_argument.
void validate_code(const NetworkProblem& problem, const NetworkCode& code);

// Forward pass. `sources` is indexed by session declaration order,
// `randomness` follows code.randomness. Returns every edge's symbol.
std::map<std::string, int> evaluate(const NetworkProblem& problem, const NetworkCode& code,
                                    const std::vector<int>& sources, const std::vector<int>& randomness = {});

// Exact pmf over T_<session> (declaration order), V_<node> (code order) and
// W_<edge> (ancestral order). Sources uniform and independent.
JointDistribution induced_joint_distribution(const NetworkProblem& problem, const NetworkCode& code,
                                             std::uint64_t budget = kDistributionBudget);

struct DecodingFailure {
  std::string sink;
  std::string session;
  friend bool operator==(const DecodingFailure&, const DecodingFailure&) = default;
};

struct ZeroErrorReport {
  bool ok = true;
  std::vector<DecodingFailure> failures;
};

// Every sink recovers every demanded session from its incoming messages and
// the sessions it originates.
ZeroErrorReport check_zero_error(const NetworkProblem& problem, const JointDistribution& dist);
ZeroErrorReport check_zero_error(const NetworkProblem& problem, const NetworkCode& code);

struct SecrecyReport {
  bool ok = true;
  std::vector<int> leaking_taps;
};

SecrecyReport check_secrecy(const NetworkProblem& problem, const JointDistribution& dist);
SecrecyReport check_secrecy(const NetworkProblem& problem, const NetworkCode& code);

struct Reason {
  enum class Kind { kCapacity, kRate, kDecoding, kLeakage };
  Kind kind;
  std::string detail;
  friend bool operator==(const Reason&, const Reason&) = default;
};

std::string to_string(Reason::Kind k);

struct Verdict {
  bool admissible = true;
  std::vector<Reason> reasons;
};

Verdict check_admissible(const NetworkProblem& problem, const NetworkCode& code,
                         std::uint64_t budget = kDistributionBudget);

struct DerandomizeResult {
  bool ok = false;
  std::optional<LocalEncoder> encoder;  // randomness input removed
  std::string reason;                   // why the premise fails, when !ok
};

// If V_tail is independent of (non-random inputs, W_edge) jointly, returns an
// encoder without the randomness input that reproduces W_edge on every
// support point.
DerandomizeResult derandomize(const NetworkProblem& problem, const NetworkCode& code, const std::string& edge);

// The code with `edge`'s encoder replaced (inputs may drop the randomness).
NetworkCode with_encoder(NetworkCode code, LocalEncoder encoder);

// --- bounded exhaustive search ---------------------------------------------

struct SearchOptions {
  int alphabet_max = 2;         // bound on edge and randomness alphabets
  bool allow_randomness = false;
  std::uint64_t budget = 10'000'000;  // complete encoder tables tried
  int threads = 1;
};

struct SearchResult {
  enum class Status { kFound, kNone, kBudgetExceeded };
  Status status = Status::kNone;
  std::optional<NetworkCode> code;
  std::uint64_t nodes = 0;         // encoder tables tried
  double fraction_searched = 0.0;  // of the canonical search tree
  double raw_space = 0.0;          // product of table spaces, before pruning
  std::vector<std::string> notes;
};

// Sources use the smallest alphabet meeting their rate; every edge uses the
// largest alphabet its capacity and alphabet_max allow. Encoder tables are
// enumerated lexicographically over reachable input tuples, restricted to
// canonical symbol numbering (first uses in increasing order); unreachable
// entries are 0. Returns the first admissible code in that order.
SearchResult exhaustive_search(const NetworkProblem& problem, const SearchOptions& options = {});

}  // namespace entroflow
