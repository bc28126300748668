#pragma once

#include <string>
#include <vector>

#include "core/code.hpp"
#include "core/entropy.hpp"
#include "core/lp.hpp"
#include "core/network.hpp"

namespace entroflow {

// Machine-checkable statements about a constructed gadget. Cut obligations
// are checked on the graph; LP obligations name a claim of `chain`.
struct Obligation {
  enum class Kind { kCut, kLp };
  std::string name;
  Kind kind = Kind::kLp;
  std::string claim;                // kLp: claim text as it appears in the chain
  std::vector<std::string> edges;   // kCut: removing these separates from -> to
  std::string from, to;
};

struct ReconstructionContract {
  std::vector<std::string> decisions;  // how the topology was pinned down
  Aliases aliases;                     // short names used by the claims
  std::vector<Obligation> obligations;
  ProofChain chain;
};

struct Gadget {
  NetworkProblem problem;
  ReconstructionContract contract;
  RateCapacityTuple tuple() const { return rate_capacity_tuple(problem); }
};

struct ObligationResult {
  std::string name;
  bool ok = false;
  std::string detail;
};
struct ContractReport {
  bool ok = true;
  std::vector<ObligationResult> results;
  ChainReport chain;
};
ContractReport check_contract(const Gadget& gadget);

// True when every from -> to path uses one of `edges`.
bool is_cut(const NetworkProblem& p, const std::string& from, const std::string& to,
            const std::vector<std::string>& edges);

// --- incremental multicast gadget --------------------------------------

// Two sessions S0 (rate sum_i h(i)) and S1 (rate h(N)) at node s, with the
// incremental order S0 before S1. Element i of h's ground set (0-based) is
// named i+1 in node, edge and variable ids (U1, V1, ...). Throws
// invalid_argument when N < 2 or a derived capacity is negative.
Gadget build_incremental(const RationalVector& h);

// Subset label used in ids: "12" for {1,2} (ground sizes up to 9), else "1_2".
std::string subset_label(SubsetIndex alpha, int n);

// A distribution of (V_1..V_N) certified quasi-uniform.
struct QuasiUniformSpec {
  JointDistribution dist;
};
// PreconditionError unless quasi-uniform.
QuasiUniformSpec make_quasi_uniform_spec(JointDistribution dist);

// log2 of the marginal support sizes as exact rationals; PreconditionError
// unless every support size is a power of two.
RationalVector exact_entropy_vector(const QuasiUniformSpec& q);

// Explicit code for build_incremental(exact_entropy_vector(q)).
NetworkCode thm2_code(const QuasiUniformSpec& q);

// --- secure multicast gadget ------------------------------------------------

// Nodes s, a, m, b, t; W1 on e1 (s->a, c), W2 on e2 (s->t, d-c), W3 on e3
// (a->b, c, wiretapped against X), K on eK (m->a, c), W4 on e4 (m->b, c),
// W5 on e5 (b->t, c). Session X (rate d) from s to t. The only randomness
// is at m, which has no inputs.
// Throws invalid_argument unless 0 < c < d.
Gadget build_secure(const Rational& c, const Rational& d);

// One-time pad: W1, W2 split X, K uniform from m's randomness, W3 = W1 + K,
// W4 = K, W5 = W3 - W4 (mod 2^c). Requires integer c and d (so 2^c and 2^d
// are integers); throws PreconditionError otherwise.
NetworkCode otp_code(const Rational& c, const Rational& d);

// --- adhesion ---------------------------------------------------------------

// For each inner session s and each sink d of s, a copy of the secure gadget
// with c = rate(s) and d-parameter 2 rate(s) whose key path is replaced by
// the inner network: a shared key node key:s (randomness, no inputs) sends
// K_s to every copy's mixer a:s:d and into the inner network at the origin
// of s; the mixer emits W3 and the copy's relay b:s:d hears the inner sink d. Inner
// sessions and demands are removed. Throws invalid_argument for invalid
// inners, inners with wiretaps, or id clashes.
Gadget adhere(const NetworkProblem& inner);

// Composition of a deterministic inner multicast code with one-time pads.
// Requires integer session rates and inner source alphabets 2^rate.
NetworkCode adhere_code(const NetworkProblem& inner, const NetworkCode& inner_code);

}  // namespace entroflow
