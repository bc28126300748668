#include "core/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace entroflow::simplex {

namespace {

// Standard form shared by both passes. Row i is multiplied by flip_i so its
// rhs is nonnegative; >= rows with zero rhs are flipped too, so that their
// slack can start basic. Rows whose slack cannot get an artificial.
// Columns: structural [0, n), slacks, artificials [first_artificial, cols).
struct StandardForm {
  int n = 0, m = 0, cols = 0, first_artificial = 0;
  std::vector<int> flip, identity;
  std::vector<std::vector<std::pair<int, Rational>>> column;  // (row, value), flipped
  std::vector<Rational> rhs;                                  // flipped, >= 0
};

StandardForm standard_form(const Problem& p) {
  if (static_cast<int>(p.objective.size()) != p.variables) throw std::invalid_argument("objective size mismatch");
  StandardForm s;
  s.n = p.variables;
  s.m = static_cast<int>(p.rows.size());
  s.flip.assign(s.m, 1);
  s.identity.assign(s.m, -1);
  std::vector<int> slack_of(s.m, -1);
  int next = s.n;
  for (int i = 0; i < s.m; ++i)
    if (p.rows[i].sense != RowSense::kEq) slack_of[i] = next++;
  s.first_artificial = next;
  std::vector<bool> artificial(s.m, false);
  for (int i = 0; i < s.m; ++i) {
    const auto& r = p.rows[i];
    if (sgn(r.rhs) < 0 || (sgn(r.rhs) == 0 && r.sense == RowSense::kGe)) s.flip[i] = -1;
    const int slack_coef = (r.sense == RowSense::kLe ? 1 : r.sense == RowSense::kGe ? -1 : 0) * s.flip[i];
    if (slack_coef == 1) {
      s.identity[i] = slack_of[i];
    } else {
      artificial[i] = true;
      s.identity[i] = next++;
    }
  }
  s.cols = next;
  s.column.assign(s.cols, {});
  std::vector<std::map<int, Rational>> structural(s.n);
  for (int i = 0; i < s.m; ++i) {
    const auto& r = p.rows[i];
    for (const auto& [j, v] : r.coefficients) {
      if (j < 0 || j >= s.n) throw std::invalid_argument("row references unknown column");
      structural[j][i] += s.flip[i] * v;
    }
    if (slack_of[i] >= 0)
      s.column[slack_of[i]].emplace_back(i, Rational((r.sense == RowSense::kLe ? 1 : -1) * s.flip[i]));
    if (artificial[i]) s.column[s.identity[i]].emplace_back(i, Rational(1));
    s.rhs.push_back(s.flip[i] * r.rhs);
  }
  for (int j = 0; j < s.n; ++j)
    for (auto& [i, v] : structural[j])
      if (sgn(v) != 0) s.column[j].emplace_back(i, v);
  return s;
}

// --- exact tableau, Bland's rule ---------------------------------------------

class Tableau {
 public:
  explicit Tableau(const Problem& p) : s_(standard_form(p)) {
    a_.assign(s_.m, std::vector<Rational>(s_.cols + 1));
    for (int j = 0; j < s_.cols; ++j)
      for (const auto& [i, v] : s_.column[j]) a_[i][j] = v;
    for (int i = 0; i < s_.m; ++i) a_[i][s_.cols] = s_.rhs[i];
    basis_ = s_.identity;
    cost_.assign(s_.cols, Rational(0));
    z_.assign(s_.cols, Rational(0));
  }

  // maximize -sum(artificials)
  bool phase_one(Solution& out) {
    for (int j = s_.first_artificial; j < s_.cols; ++j) cost_[j] = -1;
    reprice();
    if (!iterate(false, out)) throw std::logic_error("phase one cannot be unbounded");
    if (sgn(value_) < 0) {
      out.y = duals();
      return false;
    }
    drive_out_artificials(out);
    return true;
  }

  void phase_two(const Problem& p, Solution& out) {
    for (int j = 0; j < s_.cols; ++j) cost_[j] = j < s_.n ? p.objective[j] : Rational(0);
    reprice();
    if (!iterate(true, out)) {
      out.status = Status::kUnbounded;
      out.x = primal();
      out.ray = ray_;
      return;
    }
    out.status = Status::kOptimal;
    out.value = value_;
    out.x = primal();
    out.y = duals();
  }

 private:
  void reprice() {
    for (int j = 0; j < s_.cols; ++j) z_[j] = cost_[j];
    value_ = 0;
    for (int i = 0; i < s_.m; ++i) {
      const Rational& cb = cost_[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (int j = 0; j < s_.cols; ++j)
        if (sgn(a_[i][j]) != 0) z_[j] -= cb * a_[i][j];
      value_ += cb * a_[i][s_.cols];
    }
  }

  // Smallest improving column; ratio ties go to the smallest basic column.
  // False on an unbounded direction (ray_ filled).
  bool iterate(bool forbid_artificials, Solution& out) {
    const int limit = forbid_artificials ? s_.first_artificial : s_.cols;
    const int rhs = s_.cols;
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (sgn(z_[j]) > 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < s_.m; ++i) {
        if (sgn(a_[i][enter]) <= 0) continue;
        Rational ratio = a_[i][rhs] / a_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        ray_.assign(s_.n, Rational(0));
        if (enter < s_.n) ray_[enter] = 1;
        for (int i = 0; i < s_.m; ++i)
          if (basis_[i] < s_.n) ray_[basis_[i]] = -a_[i][enter];
        return false;
      }
      pivot(leave, enter);
      out.pivots.emplace_back(leave, enter);
    }
  }

  void pivot(int r, int e) {
    std::vector<Rational>& prow = a_[r];
    const Rational inv = 1 / prow[e];
    std::vector<int> nz;
    for (int j = 0; j <= s_.cols; ++j) {
      if (sgn(prow[j]) == 0) continue;
      prow[j] *= inv;
      nz.push_back(j);
    }
    Rational t;
    for (int i = 0; i < s_.m; ++i) {
      if (i == r || sgn(a_[i][e]) == 0) continue;
      const Rational f = a_[i][e];
      auto& row = a_[i];
      for (int j : nz) {
        mpq_mul(t.get_mpq_t(), f.get_mpq_t(), prow[j].get_mpq_t());
        mpq_sub(row[j].get_mpq_t(), row[j].get_mpq_t(), t.get_mpq_t());
      }
    }
    if (sgn(z_[e]) != 0) {
      const Rational f = z_[e];
      for (int j : nz) {
        if (j == s_.cols) {
          value_ += f * prow[j];
        } else {
          z_[j] -= f * prow[j];
        }
      }
    }
    basis_[r] = e;
  }

  void drive_out_artificials(Solution& out) {
    for (int i = 0; i < s_.m; ++i) {
      if (basis_[i] < s_.first_artificial) continue;
      for (int j = 0; j < s_.first_artificial; ++j) {
        if (sgn(a_[i][j]) != 0) {
          pivot(i, j);
          out.pivots.emplace_back(i, j);
          break;
        }
      }
      // otherwise the row is redundant and its artificial stays at zero
    }
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(s_.n);
    for (int i = 0; i < s_.m; ++i)
      if (basis_[i] < s_.n) x[basis_[i]] = a_[i][s_.cols];
    return x;
  }

  std::vector<Rational> duals() const {
    std::vector<Rational> y(s_.m);
    for (int i = 0; i < s_.m; ++i) {
      const int j = s_.identity[i];
      y[i] = (cost_[j] - z_[j]) * s_.flip[i];
    }
    return y;
  }

  StandardForm s_;
  std::vector<std::vector<Rational>> a_;  // last column is the rhs
  std::vector<int> basis_;
  std::vector<Rational> cost_, z_, ray_;
  Rational value_;
};

// --- floating-point revised simplex --------------------------------------------
//
// Only proposes a final basis. Dense basis inverse, Dantzig pricing, and a
// small deterministic rhs perturbation against stalling.

// Deterministic value in [0, 1) (splitmix64 finalizer).
double unit_hash(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return static_cast<double>(x >> 11) / 9007199254740992.0;
}

struct Guess {
  Status status = Status::kInfeasible;
  std::vector<int> basis;  // column per row
  int entering = -1;       // unbounded: improving column with no ratio
};

class RevisedFloat {
 public:
  RevisedFloat(const StandardForm& s, const Problem& p) : s_(s), m_(s.m) {
    col_.resize(s.cols);
    for (int j = 0; j < s.cols; ++j)
      for (const auto& [i, v] : s.column[j]) col_[j].emplace_back(i, v.get_d());
    b_.resize(m_);
    for (int i = 0; i < m_; ++i)
      b_[i] = s.rhs[i].get_d() + 1e-6 * (1.0 + unit_hash(static_cast<std::uint64_t>(i)));
    objective_.assign(s.cols, 0.0);
    for (int j = 0; j < s.n; ++j) objective_[j] = p.objective[j].get_d();
    basis_ = s.identity;
  }

  std::optional<Guess> run() {
    if (!refactor()) return std::nullopt;
    const std::size_t cap = 50 * static_cast<std::size_t>(m_ + s_.cols) + 1000;
    Guess g;
    int entering = -1;
    if (s_.first_artificial < s_.cols) {
      std::vector<double> phase1(s_.cols, 0.0);
      for (int j = s_.first_artificial; j < s_.cols; ++j) phase1[j] = -1.0;
      auto r = iterate(phase1, false, cap, entering);
      if (!r || !*r) return std::nullopt;
      double infeasibility = 0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= s_.first_artificial) infeasibility += x_[i];
      if (infeasibility > 1e-4) {
        g.status = Status::kInfeasible;
        g.basis = basis_;
        return g;
      }
      if (!drive_out_artificials()) return std::nullopt;
    }
    auto r = iterate(objective_, true, cap, entering);
    if (!r) return std::nullopt;
    g.status = *r ? Status::kOptimal : Status::kUnbounded;
    g.basis = basis_;
    g.entering = entering;
    return g;
  }

 private:
  double& inv(int i, int k) { return binv_[static_cast<std::size_t>(i) * m_ + k]; }

  bool drive_out_artificials() {
    std::vector<char> basic(s_.cols, 0);
    for (int b : basis_) basic[b] = 1;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < s_.first_artificial) continue;
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < s_.first_artificial; ++j) {
        if (basic[j]) continue;
        double v = 0;
        for (const auto& [k, a] : col_[j]) v += inv(i, k) * a;
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = j;
        }
      }
      if (best < 0) continue;
      basic[basis_[i]] = 0;
      basic[best] = 1;
      basis_[i] = best;
      if (!refactor()) return false;
    }
    return true;
  }

  // Gauss-Jordan with partial pivoting; false if numerically singular.
  bool refactor() {
    const std::size_t mm = static_cast<std::size_t>(m_) * m_;
    std::vector<double> b(mm, 0.0), out(mm, 0.0);
    auto at = [this](std::vector<double>& v, int i, int k) -> double& {
      return v[static_cast<std::size_t>(i) * m_ + k];
    };
    for (int c = 0; c < m_; ++c)
      for (const auto& [i, v] : col_[basis_[c]]) at(b, i, c) = v;
    for (int i = 0; i < m_; ++i) at(out, i, i) = 1.0;
    for (int c = 0; c < m_; ++c) {
      int p = -1;
      double best = 1e-11;
      for (int i = c; i < m_; ++i) {
        const double v = std::abs(at(b, i, c));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (p < 0) return false;
      if (p != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(at(b, p, k), at(b, c, k));
          std::swap(at(out, p, k), at(out, c, k));
        }
      }
      const double d = at(b, c, c);
      for (int k = 0; k < m_; ++k) {
        at(b, c, k) /= d;
        at(out, c, k) /= d;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == c) continue;
        const double f = at(b, i, c);
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          at(b, i, k) -= f * at(b, c, k);
          at(out, i, k) -= f * at(out, c, k);
        }
      }
    }
    binv_ = std::move(out);
    x_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double v = 0;
      for (int k = 0; k < m_; ++k) v += inv(i, k) * b_[k];
      x_[i] = v;
    }
    return true;
  }

  // nullopt: numerical trouble or the cap; true: optimal; false: unbounded.
  std::optional<bool> iterate(const std::vector<double>& cost, bool forbid_artificials, std::size_t cap,
                              int& entering) {
    const int limit = forbid_artificials ? s_.first_artificial : s_.cols;
    std::vector<double> y(m_), alpha(m_);
    std::vector<char> basic(s_.cols, 0);
    for (int b : basis_) basic[b] = 1;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > cap) return std::nullopt;
      if (iter > 0 && iter % 128 == 0 && !refactor()) return std::nullopt;
      std::fill(y.begin(), y.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        for (int k = 0; k < m_; ++k) y[k] += cb * inv(i, k);
      }
      int enter = -1;
      double best = 1e-9;
      for (int j = 0; j < limit; ++j) {
        if (basic[j]) continue;
        double d = cost[j];
        for (const auto& [k, v] : col_[j]) d -= y[k] * v;
        if (d > best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return true;
      for (int i = 0; i < m_; ++i) {
        double v = 0;
        for (const auto& [k, a] : col_[enter]) v += inv(i, k) * a;
        alpha[i] = v;
      }
      int leave = -1;
      double ratio = 0;
      for (int i = 0; i < m_; ++i) {
        if (alpha[i] <= 1e-9) continue;
        const double r = std::max(x_[i], 0.0) / alpha[i];
        if (leave < 0 || r < ratio - 1e-12 || (r <= ratio + 1e-12 && alpha[i] > alpha[leave])) {
          leave = i;
          ratio = r;
        }
      }
      if (leave < 0) {
        entering = enter;
        return false;
      }
      const double theta = std::max(x_[leave], 0.0) / alpha[leave];
      for (int i = 0; i < m_; ++i) x_[i] -= theta * alpha[i];
      x_[leave] = theta;
      const double piv = alpha[leave];
      for (int k = 0; k < m_; ++k) inv(leave, k) /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave || alpha[i] == 0.0) continue;
        const double f = alpha[i];
        for (int k = 0; k < m_; ++k) inv(i, k) -= f * inv(leave, k);
      }
      basic[basis_[leave]] = 0;
      basic[enter] = 1;
      basis_[leave] = enter;
    }
  }

  const StandardForm& s_;
  int m_;
  std::vector<std::vector<std::pair<int, double>>> col_;
  std::vector<double> b_, objective_, x_, binv_;
  std::vector<int> basis_;
};

// --- exact solves on a given basis ---------------------------------------------

using SparseRow = std::map<int, Rational>;

// Solves M z = rhs for a square sparse M given by rows; nullopt if singular.
// Pivots on the sparsest remaining row, in its least shared column.
std::optional<std::vector<Rational>> solve_sparse(std::vector<SparseRow> rows, std::vector<Rational> rhs) {
  const int m = static_cast<int>(rows.size());
  std::vector<std::set<int>> rows_of(m);
  for (int i = 0; i < m; ++i)
    for (const auto& [c, v] : rows[i]) rows_of.at(c).insert(i);
  std::set<std::pair<std::size_t, int>> by_size;
  for (int i = 0; i < m; ++i) by_size.emplace(rows[i].size(), i);
  std::vector<std::pair<int, int>> order;
  while (!by_size.empty()) {
    const int r = by_size.begin()->second;
    by_size.erase(by_size.begin());
    if (rows[r].empty()) return std::nullopt;
    int c = -1;
    std::size_t count = 0;
    for (const auto& [col, v] : rows[r]) {
      if (c < 0 || rows_of[col].size() < count) {
        c = col;
        count = rows_of[col].size();
      }
    }
    for (const auto& [col, v] : rows[r]) rows_of[col].erase(r);
    order.emplace_back(r, c);
    const Rational pv = rows[r].at(c);
    const std::vector<int> targets(rows_of[c].begin(), rows_of[c].end());
    for (int i : targets) {
      by_size.erase({rows[i].size(), i});
      const Rational f = rows[i].at(c) / pv;
      for (const auto& [col, v] : rows[r]) {
        auto [it, fresh] = rows[i].try_emplace(col);
        it->second -= f * v;
        if (sgn(it->second) == 0) {
          rows[i].erase(it);
          rows_of[col].erase(i);
        } else if (fresh) {
          rows_of[col].insert(i);
        }
      }
      rhs[i] -= f * rhs[r];
      by_size.emplace(rows[i].size(), i);
    }
  }
  std::vector<Rational> z(m);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto [r, c] = *it;
    Rational v = rhs[r];
    for (const auto& [col, a] : rows[r])
      if (col != c) v -= a * z[col];
    z[c] = v / rows[r].at(c);
  }
  return z;
}

std::vector<SparseRow> basis_rows(const StandardForm& s, const std::vector<int>& basis, bool transposed) {
  std::vector<SparseRow> out(s.m);
  for (int c = 0; c < s.m; ++c) {
    for (const auto& [i, v] : s.column[basis[c]]) {
      if (transposed) {
        out[c][i] = v;
      } else {
        out[i][c] = v;
      }
    }
  }
  return out;
}

std::vector<Rational> row_products(const Problem& p, const std::vector<Rational>& x) {
  std::vector<Rational> out(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i)
    for (const auto& [j, v] : p.rows[i].coefficients) out[i] += v * x.at(j);
  return out;
}

bool dual_combination(const Problem& p, const std::vector<Rational>& y, std::vector<Rational>& ya, Rational& yb);

std::optional<Solution> certify(const Problem& p, const StandardForm& s, const Guess& g);

// Exact revised simplex from a proposed phase-two basis: dual simplex steps
// while the basis is dual feasible, primal steps while it is primal feasible,
// smallest-index choices throughout. Artificial columns are fixed at zero.
// nullopt when the basis is neither or on the iteration cap.
std::optional<Solution> repair(const Problem& p, const StandardForm& s, std::vector<int> basis) {
  std::vector<Rational> cost(s.cols);
  for (int j = 0; j < s.n; ++j) cost[j] = p.objective[j];
  const std::size_t cap = 10 * static_cast<std::size_t>(s.cols) + 100;
  for (std::size_t iter = 0; iter < cap; ++iter) {
    std::vector<char> basic(s.cols, 0);
    for (int b : basis) basic[b] = 1;
    auto xb = solve_sparse(basis_rows(s, basis, false), s.rhs);
    if (!xb) return std::nullopt;
    std::vector<Rational> cb(s.m);
    for (int c = 0; c < s.m; ++c) cb[c] = cost[basis[c]];
    auto y = solve_sparse(basis_rows(s, basis, true), std::move(cb));
    if (!y) return std::nullopt;
    auto dot = [&](const std::vector<Rational>& v, int j) {
      Rational d;
      for (const auto& [i, a] : s.column[j]) d += v[i] * a;
      return d;
    };
    int leave = -1;
    for (int c = 0; c < s.m; ++c) {
      const bool bad = sgn((*xb)[c]) < 0 || (basis[c] >= s.first_artificial && sgn((*xb)[c]) != 0);
      if (bad && (leave < 0 || basis[c] < basis[leave])) leave = c;
    }
    int enter = -1;
    for (int j = 0; j < s.first_artificial && enter < 0; ++j)
      if (!basic[j] && cost[j] > dot(*y, j)) enter = j;
    if (leave < 0 && enter < 0) return certify(p, s, Guess{Status::kOptimal, basis, -1});
    if (leave >= 0 && enter >= 0) return std::nullopt;
    if (leave >= 0) {
      std::vector<Rational> unit(s.m);
      unit[leave] = 1;
      auto rho = solve_sparse(basis_rows(s, basis, true), std::move(unit));
      if (!rho) return std::nullopt;
      const int dir = sgn((*xb)[leave]) < 0 ? -1 : 1;  // sign of alpha that moves x back to range
      int best = -1;
      Rational best_ratio;
      for (int j = 0; j < s.first_artificial; ++j) {
        if (basic[j]) continue;
        const Rational alpha = dot(*rho, j);
        if (sgn(alpha) != dir) continue;
        Rational ratio = (cost[j] - dot(*y, j)) / alpha;
        if (dir > 0) ratio = -ratio;
        if (best < 0 || ratio < best_ratio) {
          best = j;
          best_ratio = ratio;
        }
      }
      if (best < 0) {
        Solution out;
        out.status = Status::kInfeasible;
        out.y.resize(s.m);
        for (int i = 0; i < s.m; ++i) out.y[i] = (dir < 0 ? (*rho)[i] : Rational(-(*rho)[i])) * s.flip[i];
        if (!verifies_farkas(p, out.y)) return std::nullopt;
        return out;
      }
      basis[leave] = best;
    } else {
      std::vector<Rational> ae(s.m);
      for (const auto& [i, v] : s.column[enter]) ae[i] = v;
      auto d = solve_sparse(basis_rows(s, basis, false), std::move(ae));
      if (!d) return std::nullopt;
      int out_row = -1;
      Rational best_ratio;
      for (int c = 0; c < s.m; ++c) {
        Rational ratio;
        if (basis[c] >= s.first_artificial) {
          if (sgn((*d)[c]) == 0) continue;
        } else {
          if (sgn((*d)[c]) <= 0) continue;
          ratio = (*xb)[c] / (*d)[c];
        }
        if (out_row < 0 || ratio < best_ratio || (ratio == best_ratio && basis[c] < basis[out_row])) {
          out_row = c;
          best_ratio = ratio;
        }
      }
      if (out_row < 0) return certify(p, s, Guess{Status::kUnbounded, basis, enter});
      basis[out_row] = enter;
    }
  }
  return std::nullopt;
}

// Turns a floating-point guess into an exact solution, checked by
// substitution; nullopt when the guessed basis does not verify.
std::optional<Solution> certify(const Problem& p, const StandardForm& s, const Guess& g) {
  std::vector<Rational> cb(s.m);
  for (int c = 0; c < s.m; ++c) {
    const int j = g.basis[c];
    if (g.status == Status::kInfeasible) {
      cb[c] = j >= s.first_artificial ? Rational(-1) : Rational(0);
    } else {
      cb[c] = j < s.n ? p.objective[j] : Rational(0);
    }
  }
  auto yf = solve_sparse(basis_rows(s, g.basis, true), std::move(cb));
  if (!yf) return std::nullopt;
  std::vector<Rational> y(s.m);
  for (int i = 0; i < s.m; ++i) y[i] = (*yf)[i] * s.flip[i];
  Solution out;
  if (g.status == Status::kInfeasible) {
    if (!verifies_farkas(p, y)) return std::nullopt;
    out.status = Status::kInfeasible;
    out.y = std::move(y);
    return out;
  }
  auto xb = solve_sparse(basis_rows(s, g.basis, false), s.rhs);
  if (!xb) return std::nullopt;
  std::vector<Rational> x(s.n);
  for (int c = 0; c < s.m; ++c)
    if (g.basis[c] < s.n) x[g.basis[c]] = (*xb)[c];
  if (!is_feasible(p, x)) return std::nullopt;
  out.x = x;
  if (g.status == Status::kUnbounded) {
    std::vector<Rational> ae(s.m);
    for (const auto& [i, v] : s.column[g.entering]) ae[i] = v;
    auto d = solve_sparse(basis_rows(s, g.basis, false), std::move(ae));
    if (!d) return std::nullopt;
    std::vector<Rational> ray(s.n);
    if (g.entering < s.n) ray[g.entering] = 1;
    for (int c = 0; c < s.m; ++c)
      if (g.basis[c] < s.n) ray[g.basis[c]] = -(*d)[c];
    if (!verifies_ray(p, ray)) return std::nullopt;
    out.status = Status::kUnbounded;
    out.ray = std::move(ray);
    return out;
  }
  for (int j = 0; j < s.n; ++j) out.value += p.objective[j] * x[j];
  if (!verifies_bound(p, y, out.value)) return std::nullopt;
  out.status = Status::kOptimal;
  out.y = std::move(y);
  return out;
}

// y.A per column and y.b, or false if a sign condition fails.
bool dual_combination(const Problem& p, const std::vector<Rational>& y, std::vector<Rational>& ya, Rational& yb) {
  if (y.size() != p.rows.size()) return false;
  ya.assign(p.variables, Rational(0));
  yb = 0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    if (r.sense == RowSense::kLe && sgn(y[i]) < 0) return false;
    if (r.sense == RowSense::kGe && sgn(y[i]) > 0) return false;
    if (sgn(y[i]) == 0) continue;
    for (const auto& [j, v] : r.coefficients) ya.at(j) += y[i] * v;
    yb += y[i] * r.rhs;
  }
  return true;
}

// Dual of max c.x, A x (senses) b, x >= 0 over nonnegative columns:
// u = -y on >= rows, u = y on <= rows, y = u+ - u- on equalities.
//   max -b.y  s.t.  y.A_j >= c_j  for every primal column j.
struct DualForm {
  Problem dual;
  std::vector<std::pair<int, int>> column_of;  // per primal row: (column, sign)
  std::vector<int> second;                     // u- column on equalities, else -1
};

DualForm make_dual(const Problem& p, const std::vector<Rational>& objective) {
  DualForm f;
  std::vector<std::vector<std::pair<int, Rational>>> rows(p.variables);
  f.second.assign(p.rows.size(), -1);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    const int sign = r.sense == RowSense::kGe ? -1 : 1;
    const int col = f.dual.variables++;
    f.column_of.emplace_back(col, sign);
    f.dual.objective.push_back(-sign * r.rhs);
    for (const auto& [j, v] : r.coefficients) rows.at(j).emplace_back(col, sign * v);
    if (r.sense == RowSense::kEq) {
      const int neg = f.dual.variables++;
      f.second[i] = neg;
      f.dual.objective.push_back(r.rhs);
      for (const auto& [j, v] : r.coefficients) rows.at(j).emplace_back(neg, -v);
    }
  }
  for (int j = 0; j < p.variables; ++j) f.dual.rows.push_back({std::move(rows[j]), RowSense::kGe, objective.at(j)});
  return f;
}

std::vector<Rational> primal_multipliers(const DualForm& f, const std::vector<Rational>& u) {
  std::vector<Rational> y(f.column_of.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto [col, sign] = f.column_of[i];
    y[i] = sign * u[col];
    if (f.second[i] >= 0) y[i] -= u[f.second[i]];
  }
  return y;
}

std::vector<Rational> negated(std::vector<Rational> v) {
  for (auto& x : v) x = -x;
  return v;
}

template <class Solver>
std::optional<Solution> dual_route(const Problem& problem, Solver&& solver) {
  if (static_cast<int>(problem.objective.size()) != problem.variables)
    throw std::invalid_argument("objective size mismatch");
  Solution out;
  const DualForm f = make_dual(problem, problem.objective);
  std::optional<Solution> d = solver(f.dual);
  if (!d) return std::nullopt;
  out.pivots = d->pivots;
  switch (d->status) {
    case Status::kOptimal:
      out.status = Status::kOptimal;
      out.value = -d->value;
      out.y = primal_multipliers(f, d->x);
      out.x = negated(d->y);
      return out;
    case Status::kUnbounded:
      out.status = Status::kInfeasible;
      out.y = primal_multipliers(f, d->ray);
      return out;
    case Status::kInfeasible:
      break;
  }
  // primal infeasible or unbounded; a zero objective decides
  std::vector<Rational> ray = negated(d->y);
  const DualForm f0 = make_dual(problem, std::vector<Rational>(problem.variables));
  std::optional<Solution> d0 = solver(f0.dual);
  if (!d0) return std::nullopt;
  out.pivots.insert(out.pivots.end(), d0->pivots.begin(), d0->pivots.end());
  if (d0->status == Status::kUnbounded) {
    out.status = Status::kInfeasible;
    out.y = primal_multipliers(f0, d0->ray);
    return out;
  }
  out.status = Status::kUnbounded;
  out.x = negated(d0->y);
  out.ray = std::move(ray);
  return out;
}

}  // namespace

Solution solve_exact(const Problem& problem) {
  Solution out;
  Tableau t(problem);
  if (!t.phase_one(out)) {
    out.status = Status::kInfeasible;
    return out;
  }
  t.phase_two(problem, out);
  return out;
}

std::optional<Solution> solve_verified(const Problem& problem) {
  const StandardForm s = standard_form(problem);
  if (s.m == 0) return std::nullopt;
  std::optional<Guess> g = RevisedFloat(s, problem).run();
  if (!g) return std::nullopt;
  auto out = certify(problem, s, *g);
  if (!out && g->status != Status::kInfeasible) out = repair(problem, s, g->basis);

  if (out)
    for (int i = 0; i < s.m; ++i) out->pivots.emplace_back(i, g->basis[i]);
  return out;
}

Solution solve(const Problem& problem) {
  if (auto fast = solve_verified(problem)) return *fast;
  return solve_exact(problem);
}

Solution solve_dual(const Problem& problem) {
  return *dual_route(problem, [](const Problem& d) { return std::optional<Solution>(solve(d)); });
}

std::optional<Solution> solve_dual_verified(const Problem& problem) {
  return dual_route(problem, [](const Problem& d) { return solve_verified(d); });
}

bool is_feasible(const Problem& p, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != p.variables) return false;
  for (const auto& v : x)
    if (sgn(v) < 0) return false;
  const auto ax = row_products(p, x);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const int c = cmp(ax[i], p.rows[i].rhs);
    switch (p.rows[i].sense) {
      case RowSense::kLe:
        if (c > 0) return false;
        break;
      case RowSense::kGe:
        if (c < 0) return false;
        break;
      case RowSense::kEq:
        if (c != 0) return false;
        break;
    }
  }
  return true;
}

bool verifies_bound(const Problem& p, const std::vector<Rational>& y, const Rational& value) {
  std::vector<Rational> ya;
  Rational yb;
  if (!dual_combination(p, y, ya, yb)) return false;
  for (int j = 0; j < p.variables; ++j)
    if (ya[j] < p.objective[j]) return false;
  return yb == value;
}

bool verifies_farkas(const Problem& p, const std::vector<Rational>& y) {
  std::vector<Rational> ya;
  Rational yb;
  if (!dual_combination(p, y, ya, yb)) return false;
  for (const auto& v : ya)
    if (sgn(v) < 0) return false;
  return sgn(yb) < 0;
}

bool verifies_ray(const Problem& p, const std::vector<Rational>& r) {
  if (static_cast<int>(r.size()) != p.variables) return false;
  for (const auto& v : r)
    if (sgn(v) < 0) return false;
  const auto ar = row_products(p, r);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const int s = sgn(ar[i]);
    switch (p.rows[i].sense) {
      case RowSense::kLe:
        if (s > 0) return false;
        break;
      case RowSense::kGe:
        if (s < 0) return false;
        break;
      case RowSense::kEq:
        if (s != 0) return false;
        break;
    }
  }
  Rational gain;
  for (int j = 0; j < p.variables; ++j) gain += p.objective[j] * r[j];
  return sgn(gain) > 0;
}

}  // namespace entroflow::simplex
