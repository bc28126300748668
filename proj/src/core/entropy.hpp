#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/rational.hpp"
#include "core/subset.hpp"

namespace entroflow {

// A function on the subsets of a ground set with value(empty) = 0.
template <class T>
class SetFunction {
 public:
  SetFunction() = default;
  explicit SetFunction(GroundSet ground) : ground_(std::move(ground)), values_(ground_.subset_count(), T{}) {}

  const GroundSet& ground() const { return ground_; }
  int size() const { return ground_.size(); }

  const T& operator[](SubsetIndex s) const { return values_.at(s.mask()); }
  void set(SubsetIndex s, T value) {
    if (s.empty()) return;  // value(empty) is pinned to zero
    values_.at(s.mask()) = std::move(value);
  }
  const T& at(std::initializer_list<std::string_view> labels) const { return (*this)[ground_.subset(labels)]; }

  friend bool operator==(const SetFunction&, const SetFunction&) = default;

 private:
  GroundSet ground_;
  std::vector<T> values_;
};

// Entropy values in bits. Logarithms are irrational in general, so entropies
// are doubles and every comparison takes an explicit tolerance.
using EntropyVector = SetFunction<double>;
// Exact set functions: user-supplied h, Delta(h) inputs, support-count logs.
using RationalVector = SetFunction<Rational>;

EntropyVector to_double(const RationalVector& h);
// Exact conversion of an EntropyVector whose coordinates are within tol of
// integers; nullopt otherwise.
std::optional<RationalVector> to_integral_rational(const EntropyVector& h, double tol);

// --- linear functionals over subset coordinates -------------------------

enum class Sense { kNonNegative, kZero };

// sum_a coefficient(a) * h(a) + constant, constrained >= 0 or == 0.
struct LinearFunctional {
  std::map<SubsetIndex, Rational> coefficients;
  Rational constant;
  Sense sense = Sense::kNonNegative;

  void add(SubsetIndex s, const Rational& c);
  bool is_trivial() const { return coefficients.empty(); }
  double evaluate(const EntropyVector& h) const;
  Rational evaluate(const RationalVector& h) const;
  bool satisfied_by(const EntropyVector& h, double tol) const;
};

// Default guard against enumerating too many coordinates.
inline constexpr int kElementalLimit = 18;

// H(X_i | rest) >= 0 for each i and I(X_i; X_j | X_K) >= 0 for i < j,
// K subset of the remaining elements. Throws CapacityError above `limit`.
std::vector<LinearFunctional> elemental_inequalities(int n, int limit = kElementalLimit);
// Same with ground labels carried along for reporting.
std::vector<LinearFunctional> elemental_inequalities(const GroundSet& ground, int limit = kElementalLimit);

struct PolymatroidReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Normalization, monotonicity and submodularity within tol.
PolymatroidReport is_polymatroid(const EntropyVector& h, double tol);

// Zhang-Yeung: 2I(C;D) <= I(A;B) + I(A;CD) + 3I(C;D|A) + I(C;D|B) with
// (A,B,C,D) the ground elements in order. Requires exactly four elements.
bool zhang_yeung_check(const EntropyVector& h, double tol);

// --- exact finite distributions -----------------------------------------

struct RandomVariable {
  std::string name;
  int alphabet = 1;
  friend bool operator==(const RandomVariable&, const RandomVariable&) = default;
};

using Outcome = std::vector<int>;

class JointDistribution {
 public:
  JointDistribution() = default;
  // Validates alphabets (>= 1), outcome ranges, nonnegative masses summing to
  // exactly 1. Duplicate outcomes are merged and zero masses dropped.
  JointDistribution(std::vector<RandomVariable> variables, std::vector<std::pair<Outcome, Rational>> pmf);

  static JointDistribution uniform(std::vector<RandomVariable> variables, const std::vector<Outcome>& support);

  const std::vector<RandomVariable>& variables() const { return variables_; }
  int variable_count() const { return static_cast<int>(variables_.size()); }
  // Support points (positive mass) in lexicographic order.
  const std::vector<std::pair<Outcome, Rational>>& pmf() const { return pmf_; }
  std::size_t support_size() const { return pmf_.size(); }

  int index_of(std::string_view name) const;  // throws on unknown names
  std::vector<int> indices_of(std::span<const std::string> names) const;

  std::map<Outcome, Rational> marginal(std::span<const int> indices) const;
  Rational probability(const Outcome& outcome) const;

  friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

 private:
  std::vector<RandomVariable> variables_;
  std::vector<std::pair<Outcome, Rational>> pmf_;
};

struct EntropyProfile {
  EntropyVector entropy;                  // bits, per variable subset
  SetFunction<std::uint64_t> support;     // exact marginal support sizes
  double error_bound = 0.0;               // absolute bound on each coordinate's rounding error
};

// Entropy of every nonempty subset of `variables` (all variables if empty).
// At most GroundSet::kMaxSize variables.
EntropyProfile entropy_vector_of(const JointDistribution& dist, std::span<const std::string> variables = {});

// Exact: every support point of `given` admits exactly one value of `target`.
bool check_functional_dependency(const JointDistribution& dist, std::span<const std::string> target,
                                 std::span<const std::string> given);
// Exact: P(a,b) = P(a) P(b) for all a, b. Groups must be disjoint and nonempty.
bool check_independence(const JointDistribution& dist, std::span<const std::string> group_a,
                        std::span<const std::string> group_b);
bool is_quasi_uniform(const JointDistribution& dist);
// log2 of marginal support sizes; PreconditionError unless quasi-uniform.
EntropyVector quasi_uniform_vector_of(const JointDistribution& dist);
SetFunction<std::uint64_t> support_sizes(const JointDistribution& dist);

// Joint law of the named variables, in the given order.
JointDistribution marginal_distribution(const JointDistribution& dist, std::span<const std::string> names);

// --- bounded constructive search for entropic witnesses -----------------

struct EntropicSearchOptions {
  int max_support = 2;              // per-variable alphabet bound
  double tol = 1e-9;
  std::uint64_t budget = 1'000'000;  // candidate distributions examined
  int grid_resolution = 6;           // 0 disables the pmf grid phase
  int small_n_limit = 3;
};

enum class SearchStatus { kFound, kNotPolymatroid, kExhausted, kBudgetExceeded };

struct EntropicSearchResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::optional<JointDistribution> witness;
  std::uint64_t candidates = 0;
  std::vector<std::string> notes;
};

// Semi-decision procedure: kExhausted means no witness within the given
// alphabet bound and grid, not that h is non-entropic. Witnesses are
// re-verified against h before being returned.
EntropicSearchResult entropic_search(const EntropyVector& h, const EntropicSearchOptions& options = {});

}  // namespace entroflow
