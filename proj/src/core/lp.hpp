#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/entropy.hpp"
#include "core/network.hpp"

namespace entroflow {

inline constexpr int kGroundLimit = 14;

struct Provenance {
  std::string family;  // elemental, independence, causality, capacity, rate, decoding, secrecy, axiom, user
  std::string detail;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Constraint {
  LinearFunctional functional;  // >= 0 or == 0
  Provenance origin;
};

// Shannon outer bound over the entropy coordinates of `ground`.
struct ShannonLP {
  GroundSet ground;
  std::vector<Constraint> constraints;

  void add(LinearFunctional f, std::string family, std::string detail);
};

struct LPOptions {
  bool include_randomness = true;  // V_u for the problem's randomness nodes
  bool include_rates = true;       // h(T_s) >= rate; off when maximizing rates
  // Restrict to a subnetwork: only these variable names (T_/W_/V_), and only
  // constraints whose variables all lie inside. Empty means every variable.
  std::vector<std::string> ground;
  int ground_limit = kGroundLimit;
};

// Variable names in LP order: sessions, root edge messages (ancestral order;
// forwarding edges collapse onto their root), randomness nodes.
std::vector<std::string> lp_variables(const NetworkProblem& problem, bool include_randomness);

// Throws CapacityError when the ground exceeds the limit, invalid_argument on
// unknown subnetwork variables or an invalid problem.
ShannonLP build_shannon_lp(const NetworkProblem& problem, const LPOptions& options = {});

// Elemental inequalities alone over `ground`.
ShannonLP polymatroid_lp(const GroundSet& ground, int ground_limit = kGroundLimit);

// --- information expressions ------------------------------------------

// A linear combination of H(..|..) and I(..;..|..) terms plus a constant.
// Tracks whether every term's coefficient is nonnegative, which makes the
// expression nonnegative on every polymatroid.
struct InfoExpr {
  LinearFunctional functional;  // sense unused
  bool elemental_nonnegative = true;
  std::string text;
};

// Name resolution: aliases first, then exact ground labels, then the T_, W_
// and V_ prefixed forms.
using Aliases = std::map<std::string, std::string>;

// Grammar: sum of [coef [*]] H(A[|B]) | [coef [*]] I(A;B[|C]) | coef, with
// A, B, C comma-separated names. Throws ParseError.
InfoExpr parse_info_expr(std::string_view text, const GroundSet& ground, const Aliases& aliases = {});

enum class Relation { kEq, kGe, kLe };

// "lhs REL rhs" with REL one of =, >=, <=; both sides are expressions.
struct Claim {
  std::string text;
  InfoExpr difference;  // lhs - rhs
  Relation relation = Relation::kEq;
};
Claim parse_claim(std::string_view text, const GroundSet& ground, const Aliases& aliases = {});

// Constraint form of a claim, for importing proven facts as axioms.
LinearFunctional to_constraint(const Claim& claim);
void add_axiom(ShannonLP& lp, const Claim& claim, std::string detail);

// --- solving -------------------------------------------------------------

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };
std::string to_string(LPStatus s);

// Multipliers refer to lp.constraints, then to `derived` (equalities
// h(a) = h(closure(a)) implied by functional-dependence constraints).
struct Certificate {
  LPStatus status = LPStatus::kInfeasible;
  bool maximize = true;
  Rational value;                          // optimal value of the objective
  std::optional<RationalVector> point;     // optimal or feasible point
  std::optional<RationalVector> ray;       // unbounded direction
  std::vector<Rational> multipliers;       // per constraint, then per derived
  std::vector<Constraint> derived;
  std::size_t pivots = 0;
  std::vector<std::pair<int, int>> pivot_sequence;
};

// Exact optimum of the objective's linear part plus its constant.
Certificate maximize(const ShannonLP& lp, const LinearFunctional& objective);
Certificate minimize(const ShannonLP& lp, const LinearFunctional& objective);
Certificate feasibility(const ShannonLP& lp);

// Rational substitution: the point satisfies every constraint and attains
// the value; the multipliers prove the bound (or infeasibility) using the
// constraints, the derived equalities and h >= 0.
bool verify_certificate(const ShannonLP& lp, const LinearFunctional& objective, const Certificate& c);

struct ForcedResult {
  bool forced = false;
  Certificate certificate;  // the maximization certificate
};

// Forced <=> max f == 0 exactly; requires f recognized as nonnegative.
// Throws PreconditionError otherwise.
ForcedResult prove_forced_equality(const ShannonLP& lp, const InfoExpr& f);

// Two-sided: max f == min f == value.
struct ForcedValueResult {
  bool forced = false;
  Certificate upper, lower;
};
ForcedValueResult prove_forced_value(const ShannonLP& lp, const InfoExpr& f, const Rational& value);

// --- proof chains -------------------------------------------------------

enum class ClaimVerdict { kForced, kConsistent, kContradicted };
std::string to_string(ClaimVerdict v);

struct ClaimReport {
  std::string text;
  ClaimVerdict verdict = ClaimVerdict::kConsistent;
  std::optional<Rational> min, max;  // nullopt: unbounded in that direction
  bool certificates_verified = false;
};

struct StageReport {
  std::string name;
  bool feasible = true;
  bool skipped = false;  // imports an infeasible stage; not solved
  std::vector<ClaimReport> claims;
  std::vector<std::string> notes;
};

struct ChainReport {
  std::vector<StageReport> stages;
  bool all_forced() const;
};

// A stage solves one LP (the full problem or a subnetwork ground), first
// importing axioms (explicit claims, or every forced claim of an earlier
// stage by name), then judging each claim by exact minimization and
// maximization of lhs - rhs.
struct ChainStage {
  std::string name;
  std::vector<std::string> ground;   // empty: the problem's full ground
  std::vector<std::string> imports;  // "stage:<name>" or claim text
  std::vector<std::string> claims;
};
struct ProofChain {
  Aliases aliases;
  bool include_randomness = true;
  std::vector<ChainStage> stages;
};

ChainReport verify_proof_chain(const NetworkProblem& problem, const ProofChain& chain);
// Claims judged against one already-built LP.
StageReport verify_claims(const ShannonLP& lp, const std::vector<std::string>& claims, const Aliases& aliases = {});

// One constraint per line, coordinates named h{...}:
//   h{T_X,W_e1} - h{T_X} = 0  # causality: e1
std::string export_lp(const ShannonLP& lp);

// "h{A} - 2h{A,B} + 1" (constant last, omitted when zero).
std::string format_functional(const LinearFunctional& f, const GroundSet& ground);

}  // namespace entroflow
