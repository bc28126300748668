#pragma once

// Reference computations used to judge library results. Deliberately naive:
// maps of outcomes, brute-force cuts, direct certificate arithmetic.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "core/entropy.hpp"
#include "core/lp.hpp"
#include "core/rational.hpp"

namespace oracle {

using entroflow::Rational;
using Point = std::vector<int>;
using Pmf = std::map<Point, Rational>;

inline Pmf from(const entroflow::JointDistribution& d) {
  Pmf p;
  for (const auto& [o, pr] : d.pmf()) p[o] += pr;
  return p;
}

inline Pmf marginal(const Pmf& p, const std::vector<int>& idx) {
  Pmf out;
  for (const auto& [o, pr] : p) {
    Point k;
    for (int i : idx) k.push_back(o[i]);
    out[k] += pr;
  }
  return out;
}

inline std::vector<int> bits(std::uint32_t mask) {
  std::vector<int> idx;
  for (int i = 0; i < 32; ++i)
    if (mask >> i & 1U) idx.push_back(i);
  return idx;
}

inline double entropy(const Pmf& p) {
  double h = 0;
  for (const auto& [o, pr] : p) {
    const double x = pr.get_d();
    if (x > 0) h -= x * std::log2(x);
  }
  return h;
}

// Entropies of every subset of the first n coordinates, indexed by mask.
inline std::vector<double> entropies(const Pmf& p, int n) {
  std::vector<double> h(std::size_t{1} << n, 0.0);
  for (std::uint32_t m = 1; m < h.size(); ++m) h[m] = entropy(marginal(p, bits(m)));
  return h;
}

// Minimum over all elemental inequalities of their value at h.
inline double elemental_min(const std::vector<double>& h, int n) {
  const std::uint32_t full = (1U << n) - 1U;
  double worst = 0;
  bool any = false;
  auto take = [&](double v) {
    worst = any ? std::min(worst, v) : v;
    any = true;
  };
  for (int i = 0; i < n; ++i) take(h[full] - h[full & ~(1U << i)]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::uint32_t rest = full & ~(1U << i) & ~(1U << j);
      for (std::uint32_t k = rest;; k = (k - 1) & rest) {
        take(h[k | 1U << i] + h[k | 1U << j] - h[k | 1U << i | 1U << j] - h[k]);
        if (k == 0) break;
      }
    }
  return worst;
}

inline std::size_t elemental_count(int n) {
  std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  return static_cast<std::size_t>(n) + (n >= 2 ? pairs * (std::size_t{1} << (n - 2)) : 0);
}

// Every support point of the marginal has the same mass.
inline bool uniform_on_support(const Pmf& p) {
  if (p.empty()) return false;
  const Rational& first = p.begin()->second;
  for (const auto& [o, pr] : p)
    if (pr != first) return false;
  return true;
}

inline bool quasi_uniform(const Pmf& p, int n) {
  for (std::uint32_t m = 1; m < (1U << n); ++m)
    if (!uniform_on_support(marginal(p, bits(m)))) return false;
  return true;
}

// P(a, b) = P(a) P(b) over the full product of supports.
inline bool independent(const Pmf& p, const std::vector<int>& a, const std::vector<int>& b) {
  auto pa = marginal(p, a), pb = marginal(p, b);
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  auto pab = marginal(p, ab);
  for (const auto& [x, px] : pa)
    for (const auto& [y, py] : pb) {
      Point k = x;
      k.insert(k.end(), y.begin(), y.end());
      auto it = pab.find(k);
      const Rational joint = it == pab.end() ? Rational(0) : it->second;
      if (joint != px * py) return false;
    }
  return true;
}

// On the support, `given` determines `target`.
inline bool function_of(const Pmf& p, const std::vector<int>& target, const std::vector<int>& given) {
  std::map<Point, Point> seen;
  for (const auto& [o, pr] : p) {
    Point g, t;
    for (int i : given) g.push_back(o[i]);
    for (int i : target) t.push_back(o[i]);
    auto [it, fresh] = seen.emplace(g, t);
    if (!fresh && it->second != t) return false;
  }
  return true;
}

// --- cuts ---------------------------------------------------------------

struct Arc {
  std::string tail, head;
  Rational capacity;
};

// Smallest capacity of an edge set whose removal separates s from t, by
// enumerating every edge subset.
inline Rational brute_min_cut(const std::vector<Arc>& arcs, const std::string& s, const std::string& t) {
  const std::size_t m = arcs.size();
  std::optional<Rational> best;
  for (std::uint32_t cut = 0; cut < (1U << m); ++cut) {
    Rational w;
    for (std::size_t e = 0; e < m; ++e)
      if (cut >> e & 1U) w += arcs[e].capacity;
    if (best && w >= *best) continue;
    std::set<std::string> seen{s};
    std::queue<std::string> q;
    q.push(s);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (std::size_t e = 0; e < m; ++e)
        if (!(cut >> e & 1U) && arcs[e].tail == u && seen.insert(arcs[e].head).second) q.push(arcs[e].head);
    }
    if (!seen.count(t)) best = w;
  }
  return *best;
}

// --- LP certificates ------------------------------------------------------

using Row = std::map<std::uint32_t, Rational>;

inline void add_scaled(Row& row, Rational& constant, const entroflow::LinearFunctional& f, const Rational& s) {
  for (const auto& [k, c] : f.coefficients) row[k.mask()] += s * c;
  constant += s * f.constant;
}

inline Rational value_at(const entroflow::LinearFunctional& f, const entroflow::RationalVector& h) {
  Rational v = f.constant;
  for (const auto& [k, c] : f.coefficients) v += c * h[k];
  return v;
}

// Reads a zero-constant equality h(B) - h(A) = 0 (either sign) with A a
// subset of B; a single term h(B) = 0 has A empty.
inline std::optional<std::pair<std::uint32_t, std::uint32_t>> dependency(const entroflow::LinearFunctional& f) {
  if (f.sense != entroflow::Sense::kZero || sgn(f.constant) != 0) return std::nullopt;
  if (f.coefficients.size() == 1) return std::pair{0U, f.coefficients.begin()->first.mask()};
  if (f.coefficients.size() != 2) return std::nullopt;
  auto it = f.coefficients.begin();
  auto [s1, c1] = *it++;
  auto [s2, c2] = *it;
  if (c1 != -c2) return std::nullopt;
  std::uint32_t lo = s1.mask(), hi = s2.mask();
  if ((lo & hi) != lo) std::swap(lo, hi);
  if ((lo & hi) != lo) return std::nullopt;
  return std::pair{lo, hi};
}

// A derived equality h(A) = h(B) is valid when B lies in the closure of A
// under the LP's functional-dependence equalities.
inline bool derived_valid(const entroflow::ShannonLP& lp, const entroflow::LinearFunctional& d) {
  auto ab = dependency(d);
  if (!ab) return false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> fds;
  for (const auto& k : lp.constraints)
    if (auto fd = dependency(k.functional)) fds.push_back(*fd);
  std::uint32_t closure = ab->first;
  for (bool grew = true; grew;) {
    grew = false;
    for (auto [lo, hi] : fds)
      if ((closure & lo) == lo && (closure | hi) != closure) {
        closure |= hi;
        grew = true;
      }
  }
  return (closure & ab->second) == ab->second;
}

inline bool multipliers_ok(const entroflow::ShannonLP& lp, const entroflow::Certificate& c) {
  const std::size_t nc = lp.constraints.size();
  if (c.multipliers.size() != nc + c.derived.size()) return false;
  for (std::size_t i = 0; i < nc; ++i)
    if (lp.constraints[i].functional.sense == entroflow::Sense::kNonNegative && sgn(c.multipliers[i]) < 0) return false;
  for (std::size_t k = 0; k < c.derived.size(); ++k)
    if (sgn(c.multipliers[nc + k]) != 0 && !derived_valid(lp, c.derived[k].functional)) return false;
  return true;
}

inline void combine(const entroflow::ShannonLP& lp, const entroflow::Certificate& c, Row& row, Rational& constant) {
  const std::size_t nc = lp.constraints.size();
  for (std::size_t i = 0; i < nc; ++i) add_scaled(row, constant, lp.constraints[i].functional, c.multipliers[i]);
  for (std::size_t k = 0; k < c.derived.size(); ++k) add_scaled(row, constant, c.derived[k].functional, c.multipliers[nc + k]);
}

// y f with y >= 0 on inequalities has every coefficient <= 0 and a negative
// constant: negative on h >= 0, nonnegative on feasible points.
inline bool farkas(const entroflow::ShannonLP& lp, const entroflow::Certificate& c) {
  if (c.status != entroflow::LPStatus::kInfeasible || !multipliers_ok(lp, c)) return false;
  Row row;
  Rational constant;
  combine(lp, c, row, constant);
  for (const auto& [m, v] : row)
    if (m != 0 && sgn(v) > 0) return false;
  return sgn(constant) < 0;
}

// Primal point feasible and attaining the value; dual combination bounds the
// objective by the value.
inline bool optimum(const entroflow::ShannonLP& lp, const entroflow::LinearFunctional& obj, const entroflow::Certificate& c) {
  if (c.status != entroflow::LPStatus::kOptimal || !c.point || !multipliers_ok(lp, c)) return false;
  for (const auto& k : lp.constraints) {
    const Rational v = value_at(k.functional, *c.point);
    if (k.functional.sense == entroflow::Sense::kZero ? sgn(v) != 0 : sgn(v) < 0) return false;
  }
  for (std::uint32_t m = 1; m < lp.ground.subset_count(); ++m)
    if (sgn((*c.point)[entroflow::SubsetIndex(m)]) < 0) return false;
  if (value_at(obj, *c.point) != c.value) return false;
  Row row;
  Rational constant;
  const Rational s = c.maximize ? 1 : -1;
  add_scaled(row, constant, obj, s);
  combine(lp, c, row, constant);
  for (const auto& [m, v] : row)
    if (m != 0 && sgn(v) > 0) return false;
  return constant == s * c.value;
}

}  // namespace oracle
