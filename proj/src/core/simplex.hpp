#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "core/rational.hpp"

namespace entroflow::simplex {

enum class RowSense { kLe, kEq, kGe };

struct Row {
  std::vector<std::pair<int, Rational>> coefficients;  // (column, value)
  RowSense sense = RowSense::kGe;
  Rational rhs;
};

// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  int variables = 0;
  std::vector<Row> rows;
  std::vector<Rational> objective;  // size == variables
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  Rational value;
  std::vector<Rational> x;  // optimal: primal point; unbounded: a feasible point
  // Optimal: duals with y.A >= objective, y_i >= 0 on <= rows, y_i <= 0 on
  // >= rows and y.b == value. Infeasible: Farkas multipliers with the same
  // sign pattern, y.A >= 0 and y.b < 0.
  std::vector<Rational> y;
  std::vector<Rational> ray;  // unbounded: r >= 0, A r within senses, objective . r > 0
  std::vector<std::pair<int, int>> pivots;  // (row, entering column), in order
};

// Two-phase tableau simplex with Bland's rule over exact rationals.
Solution solve_exact(const Problem& problem);

// A floating-point revised simplex proposes a final basis; the basis is then
// solved exactly and the result checked by substitution. nullopt when the
// proposal does not verify. Any returned value is exact.
std::optional<Solution> solve_verified(const Problem& problem);

// solve_verified, falling back to solve_exact.
Solution solve(const Problem& problem);

// Same contract as solve(), computed on the dual problem (one row per
// variable), which suits problems with many more rows than columns.
Solution solve_dual(const Problem& problem);
std::optional<Solution> solve_dual_verified(const Problem& problem);

// Independent re-checks by substitution.
bool is_feasible(const Problem& problem, const std::vector<Rational>& x);
bool verifies_bound(const Problem& problem, const std::vector<Rational>& y, const Rational& value);
bool verifies_farkas(const Problem& problem, const std::vector<Rational>& y);
bool verifies_ray(const Problem& problem, const std::vector<Rational>& ray);

}  // namespace entroflow::simplex
