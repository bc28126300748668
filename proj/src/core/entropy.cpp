#include "core/entropy.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "core/errors.hpp"

namespace entroflow {

EntropyVector to_double(const RationalVector& h) {
  EntropyVector out(h.ground());
  for (std::uint32_t m = 1; m < h.ground().subset_count(); ++m) out.set(SubsetIndex(m), to_double(h[SubsetIndex(m)]));
  return out;
}

std::optional<RationalVector> to_integral_rational(const EntropyVector& h, double tol) {
  RationalVector out(h.ground());
  for (std::uint32_t m = 1; m < h.ground().subset_count(); ++m) {
    double v = h[SubsetIndex(m)];
    double r = std::round(v);
    if (std::abs(v - r) > tol) return std::nullopt;
    out.set(SubsetIndex(m), Rational(static_cast<long>(r)));
  }
  return out;
}

// --- LinearFunctional ---------------------------------------------------------

void LinearFunctional::add(SubsetIndex s, const Rational& c) {
  if (s.empty()) return;  // h(empty) = 0
  if (sgn(c) == 0) return;
  auto [it, inserted] = coefficients.try_emplace(s, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) coefficients.erase(it);
  }
}

double LinearFunctional::evaluate(const EntropyVector& h) const {
  double total = to_double(constant);
  for (const auto& [s, c] : coefficients) total += to_double(c) * h[s];
  return total;
}

Rational LinearFunctional::evaluate(const RationalVector& h) const {
  Rational total = constant;
  for (const auto& [s, c] : coefficients) total += c * h[s];
  return total;
}

bool LinearFunctional::satisfied_by(const EntropyVector& h, double tol) const {
  double v = evaluate(h);
  return sense == Sense::kZero ? std::abs(v) <= tol : v >= -tol;
}

// --- Shannon cone -------------------------------------------------------------

std::vector<LinearFunctional> elemental_inequalities(int n, int limit) {
  if (n < 1) throw std::invalid_argument("elemental inequalities need n >= 1");
  if (n > limit)
    throw CapacityError("elemental inequalities for n=" + std::to_string(n) + " exceed the limit of " +
                        std::to_string(limit) + " variables");
  std::vector<LinearFunctional> out;
  const SubsetIndex full((1U << n) - 1U);
  for (int i = 0; i < n; ++i) {
    LinearFunctional f;
    f.add(full, 1);
    f.add(full - SubsetIndex::singleton(i), -1);
    out.push_back(std::move(f));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const SubsetIndex ij = SubsetIndex::singleton(i) | SubsetIndex::singleton(j);
      const std::uint32_t rest = full.mask() & ~ij.mask();
      // every subset K of rest, including the empty one
      std::uint32_t k = 0;
      do {
        SubsetIndex K(k);
        LinearFunctional f;
        f.add(K | SubsetIndex::singleton(i), 1);
        f.add(K | SubsetIndex::singleton(j), 1);
        f.add(K | ij, -1);
        f.add(K, -1);
        out.push_back(std::move(f));
        k = (k - rest) & rest;
      } while (k != 0);
    }
  }
  return out;
}

std::vector<LinearFunctional> elemental_inequalities(const GroundSet& ground, int limit) {
  return elemental_inequalities(ground.size(), limit);
}

PolymatroidReport is_polymatroid(const EntropyVector& h, double tol) {
  PolymatroidReport report;
  const GroundSet& g = h.ground();
  const int n = g.size();
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  if (std::abs(h[SubsetIndex()]) > tol) report.violations.push_back("normalization h({}) = 0 violated");
  for (std::uint32_t m = 0; m < g.subset_count(); ++m) {
    SubsetIndex a(m);
    for (int i = 0; i < n; ++i) {
      if (a.has(i)) continue;
      SubsetIndex b = a | SubsetIndex::singleton(i);
      if (h[b] < h[a] - tol)
        report.violations.push_back("monotonicity h(" + g.format(b) + ") >= h(" + g.format(a) + ") violated (" +
                                     num(h[b]) + " < " + num(h[a]) + ")");
    }
  }
  const SubsetIndex full = g.full();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      SubsetIndex si = SubsetIndex::singleton(i), sj = SubsetIndex::singleton(j);
      const std::uint32_t rest = (full - (si | sj)).mask();
      std::uint32_t k = 0;
      do {
        SubsetIndex K(k);
        double lhs = h[K | si] + h[K | sj];
        double rhs = h[K | si | sj] + h[K];
        if (lhs < rhs - tol) {
          if (K.empty())
            report.violations.push_back("subadditivity h(" + g.format(si | sj) + ") <= h(" + g.format(si) +
                                         ") + h(" + g.format(sj) + ") violated");
          else
            report.violations.push_back("submodularity h(" + g.format(K | si) + ") + h(" + g.format(K | sj) +
                                         ") >= h(" + g.format(K | si | sj) + ") + h(" + g.format(K) +
                                         ") violated");
        }
        k = (k - rest) & rest;
      } while (k != 0);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

bool zhang_yeung_check(const EntropyVector& h, double tol) {
  if (h.size() != 4) throw std::invalid_argument("Zhang-Yeung check needs exactly 4 variables");
  const SubsetIndex A(1), B(2), C(4), D(8);
  auto H = [&](SubsetIndex s) { return h[s]; };
  auto I = [&](SubsetIndex x, SubsetIndex y, SubsetIndex z) { return H(x | z) + H(y | z) - H(x | y | z) - H(z); };
  const SubsetIndex none;
  double lhs = 2 * I(C, D, none);
  double rhs = I(A, B, none) + I(A, C | D, none) + 3 * I(C, D, A) + I(C, D, B);
  return lhs <= rhs + tol;
}

// --- JointDistribution --------------------------------------------------------

JointDistribution::JointDistribution(std::vector<RandomVariable> variables,
                                     std::vector<std::pair<Outcome, Rational>> pmf)
    : variables_(std::move(variables)) {
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.alphabet < 1) throw std::invalid_argument("variable '" + v.name + "' has alphabet size < 1");
    if (!names.insert(v.name).second) throw std::invalid_argument("duplicate variable '" + v.name + "'");
  }
  std::map<Outcome, Rational> merged;
  Rational total = 0;
  for (auto& [outcome, p] : pmf) {
    if (outcome.size() != variables_.size())
      throw std::invalid_argument("outcome arity " + std::to_string(outcome.size()) + " != " +
                                  std::to_string(variables_.size()));
    for (std::size_t i = 0; i < outcome.size(); ++i)
      if (outcome[i] < 0 || outcome[i] >= variables_[i].alphabet)
        throw std::invalid_argument("outcome value out of range for '" + variables_[i].name + "'");
    if (sgn(p) < 0) throw std::invalid_argument("negative probability " + to_string(p));
    total += p;
    merged[outcome] += p;
  }
  if (total != 1) throw std::invalid_argument("probabilities sum to " + to_string(total) + ", not 1");
  for (auto& [o, p] : merged)
    if (sgn(p) > 0) pmf_.emplace_back(o, p);
}

JointDistribution JointDistribution::uniform(std::vector<RandomVariable> variables,
                                             const std::vector<Outcome>& support) {
  std::set<Outcome> distinct(support.begin(), support.end());
  if (distinct.empty()) throw std::invalid_argument("uniform distribution needs a nonempty support");
  Rational mass(1, static_cast<unsigned long>(distinct.size()));
  std::vector<std::pair<Outcome, Rational>> pmf;
  for (const auto& o : distinct) pmf.emplace_back(o, mass);
  return JointDistribution(std::move(variables), std::move(pmf));
}

int JointDistribution::index_of(std::string_view name) const {
  for (int i = 0; i < variable_count(); ++i)
    if (variables_[i].name == name) return i;
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

std::vector<int> JointDistribution::indices_of(std::span<const std::string> names) const {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(index_of(n));
  return out;
}

namespace {

Outcome project(const Outcome& o, std::span<const int> indices) {
  Outcome out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(o[i]);
  return out;
}

std::vector<int> mask_indices(std::uint32_t mask, std::span<const int> base) {
  std::vector<int> out;
  for (std::size_t i = 0; i < base.size(); ++i)
    if ((mask >> i) & 1U) out.push_back(base[i]);
  return out;
}

double entropy_bits(const std::map<Outcome, Rational>& marginal) {
  double h = 0.0;
  for (const auto& [o, p] : marginal) {
    double q = to_double(p);
    if (q > 0) h -= q * std::log2(q);
  }
  return h;
}

}  // namespace

std::map<Outcome, Rational> JointDistribution::marginal(std::span<const int> indices) const {
  std::map<Outcome, Rational> out;
  for (const auto& [o, p] : pmf_) out[project(o, indices)] += p;
  return out;
}

JointDistribution marginal_distribution(const JointDistribution& dist, std::span<const std::string> names) {
  auto idx = dist.indices_of(names);
  std::vector<RandomVariable> vars;
  for (int i : idx) vars.push_back(dist.variables()[i]);
  auto m = dist.marginal(idx);
  return JointDistribution(std::move(vars), {m.begin(), m.end()});
}

Rational JointDistribution::probability(const Outcome& outcome) const {
  auto it = std::lower_bound(pmf_.begin(), pmf_.end(), outcome,
                             [](const auto& entry, const Outcome& o) { return entry.first < o; });
  if (it != pmf_.end() && it->first == outcome) return it->second;
  return 0;
}

EntropyProfile entropy_vector_of(const JointDistribution& dist, std::span<const std::string> variables) {
  std::vector<int> base;
  std::vector<std::string> labels;
  if (variables.empty()) {
    for (int i = 0; i < dist.variable_count(); ++i) {
      base.push_back(i);
      labels.push_back(dist.variables()[i].name);
    }
  } else {
    base = dist.indices_of(variables);
    labels.assign(variables.begin(), variables.end());
  }
  GroundSet ground(labels);
  EntropyProfile out{EntropyVector(ground), SetFunction<std::uint64_t>(ground), 0.0};
  for (std::uint32_t m = 1; m < ground.subset_count(); ++m) {
    auto marg = dist.marginal(mask_indices(m, base));
    out.entropy.set(SubsetIndex(m), entropy_bits(marg));
    out.support.set(SubsetIndex(m), marg.size());
  }
  const double s = static_cast<double>(std::max<std::size_t>(dist.support_size(), 2));
  out.error_bound = 8.0 * DBL_EPSILON * s * std::log2(s);
  return out;
}

bool check_functional_dependency(const JointDistribution& dist, std::span<const std::string> target,
                                 std::span<const std::string> given) {
  auto t = dist.indices_of(target);
  auto g = dist.indices_of(given);
  std::map<Outcome, Outcome> seen;
  for (const auto& [o, p] : dist.pmf()) {
    auto [it, inserted] = seen.try_emplace(project(o, g), project(o, t));
    if (!inserted && it->second != project(o, t)) return false;
  }
  return true;
}

bool check_independence(const JointDistribution& dist, std::span<const std::string> group_a,
                        std::span<const std::string> group_b) {
  if (group_a.empty() || group_b.empty()) throw std::invalid_argument("independence groups must be nonempty");
  auto a = dist.indices_of(group_a);
  auto b = dist.indices_of(group_b);
  for (int i : a)
    if (std::find(b.begin(), b.end(), i) != b.end())
      throw std::invalid_argument("independence groups must be disjoint");
  auto pa = dist.marginal(a);
  auto pb = dist.marginal(b);
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  auto pab = dist.marginal(ab);
  if (pab.size() != pa.size() * pb.size()) return false;
  for (const auto& [o, p] : pab) {
    Outcome oa(o.begin(), o.begin() + static_cast<long>(a.size()));
    Outcome ob(o.begin() + static_cast<long>(a.size()), o.end());
    if (p != pa.at(oa) * pb.at(ob)) return false;
  }
  return true;
}

bool is_quasi_uniform(const JointDistribution& dist) {
  const int n = dist.variable_count();
  if (n > GroundSet::kMaxSize) throw std::invalid_argument("too many variables for quasi-uniformity check");
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  for (std::uint32_t m = 1; m < (1U << n); ++m) {
    auto marg = dist.marginal(mask_indices(m, base));
    const Rational& first = marg.begin()->second;
    for (const auto& [o, p] : marg)
      if (p != first) return false;
  }
  return true;
}

SetFunction<std::uint64_t> support_sizes(const JointDistribution& dist) {
  std::vector<std::string> labels;
  for (const auto& v : dist.variables()) labels.push_back(v.name);
  GroundSet ground(labels);
  SetFunction<std::uint64_t> out(ground);
  std::vector<int> base(dist.variable_count());
  std::iota(base.begin(), base.end(), 0);
  for (std::uint32_t m = 1; m < ground.subset_count(); ++m)
    out.set(SubsetIndex(m), dist.marginal(mask_indices(m, base)).size());
  return out;
}

EntropyVector quasi_uniform_vector_of(const JointDistribution& dist) {
  if (!is_quasi_uniform(dist)) throw PreconditionError("distribution is not quasi-uniform");
  auto sizes = support_sizes(dist);
  EntropyVector out(sizes.ground());
  for (std::uint32_t m = 1; m < sizes.ground().subset_count(); ++m)
    out.set(SubsetIndex(m), std::log2(static_cast<double>(sizes[SubsetIndex(m)])));
  return out;
}

// --- entropic_search ------------------------------------------------------------

namespace {

Outcome cell_outcome(int cell, int n, int k) {
  Outcome o(n);
  for (int i = n - 1; i >= 0; --i) {
    o[i] = cell % k;
    cell /= k;
  }
  return o;
}

// Entropy vector of masses w(cell)/total over the n-dimensional grid.
EntropyVector grid_entropy(const GroundSet& ground, int k, const std::vector<int>& cells,
                           const std::vector<long>& weights, long total) {
  const int n = ground.size();
  EntropyVector h(ground);
  std::vector<Outcome> outcomes;
  outcomes.reserve(cells.size());
  for (int c : cells) outcomes.push_back(cell_outcome(c, n, k));
  for (std::uint32_t m = 1; m < ground.subset_count(); ++m) {
    std::map<std::uint32_t, long> marg;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
      std::uint32_t key = 0;
      for (int i = 0; i < n; ++i)
        if ((m >> i) & 1U) key = key * static_cast<std::uint32_t>(k) + static_cast<std::uint32_t>(outcomes[idx][i]);
      marg[key] += weights[idx];
    }
    double e = 0.0;
    for (auto [key, w] : marg) {
      double p = static_cast<double>(w) / static_cast<double>(total);
      if (p > 0) e -= p * std::log2(p);
    }
    h.set(SubsetIndex(m), e);
  }
  return h;
}

bool matches(const EntropyVector& a, const EntropyVector& b, double tol) {
  for (std::uint32_t m = 1; m < a.ground().subset_count(); ++m)
    if (std::abs(a[SubsetIndex(m)] - b[SubsetIndex(m)]) > tol) return false;
  return true;
}

JointDistribution make_witness(const GroundSet& ground, int k, const std::vector<int>& cells,
                               const std::vector<long>& weights, long total) {
  std::vector<RandomVariable> vars;
  for (const auto& l : ground.labels()) vars.push_back({l, k});
  std::vector<std::pair<Outcome, Rational>> pmf;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (weights[i] > 0) pmf.emplace_back(cell_outcome(cells[i], ground.size(), k), Rational(weights[i], total));
  return JointDistribution(std::move(vars), std::move(pmf));
}

}  // namespace

EntropicSearchResult entropic_search(const EntropyVector& h, const EntropicSearchOptions& options) {
  const GroundSet& ground = h.ground();
  const int n = ground.size();
  if (n > options.small_n_limit)
    throw PreconditionError("entropic search supports at most " + std::to_string(options.small_n_limit) +
                            " variables");
  if (options.max_support < 1) throw std::invalid_argument("max_support must be >= 1");
  EntropicSearchResult result;
  auto poly = is_polymatroid(h, options.tol);
  if (!poly.ok) {
    result.status = SearchStatus::kNotPolymatroid;
    result.notes = poly.violations;
    return result;
  }
  const int k = options.max_support;
  const double cap = std::log2(static_cast<double>(k));
  for (int i = 0; i < n; ++i) {
    if (h[SubsetIndex::singleton(i)] > cap + options.tol) {
      result.status = SearchStatus::kExhausted;
      result.notes.push_back("h(" + ground.format(SubsetIndex::singleton(i)) + ") exceeds log2(max_support)");
      return result;
    }
  }
  int cell_count = 1;
  for (int i = 0; i < n; ++i) cell_count *= k;

  auto accept = [&](const std::vector<int>& cells, const std::vector<long>& weights, long total) {
    EntropyVector candidate = grid_entropy(ground, k, cells, weights, total);
    if (!matches(candidate, h, options.tol)) return false;
    JointDistribution w = make_witness(ground, k, cells, weights, total);
    // independent re-verification through the exact-distribution path
    if (!matches(entropy_vector_of(w).entropy, h, options.tol)) return false;
    result.status = SearchStatus::kFound;
    result.witness = std::move(w);
    return true;
  };

  // Phase 1: uniform masses on a support of size 2^h(N).
  const double target_size = std::exp2(h[ground.full()]);
  const long support = std::lround(target_size);
  if (support >= 1 && support <= cell_count && std::abs(std::log2(static_cast<double>(support)) - h[ground.full()]) <= options.tol) {
    std::vector<int> comb(static_cast<std::size_t>(support));
    std::iota(comb.begin(), comb.end(), 0);
    std::vector<long> ones(comb.size(), 1);
    while (true) {
      if (++result.candidates > options.budget) {
        result.status = SearchStatus::kBudgetExceeded;
        return result;
      }
      if (accept(comb, ones, support)) return result;
      int i = static_cast<int>(support) - 1;
      while (i >= 0 && comb[i] == cell_count - static_cast<int>(support) + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < static_cast<int>(support); ++j) comb[j] = comb[j - 1] + 1;
    }
  } else {
    result.notes.push_back("2^h(N) is not an integer within tolerance; uniform-support phase skipped");
  }

  // Phase 2: masses on the 1/g grid.
  const int g = options.grid_resolution;
  if (g > 0) {
    std::vector<int> cells(cell_count);
    std::iota(cells.begin(), cells.end(), 0);
    std::vector<long> w(cell_count, 0);
    // enumerate compositions of g into cell_count parts in lexicographic order
    w[cell_count - 1] = g;
    while (true) {
      if (++result.candidates > options.budget) {
        result.status = SearchStatus::kBudgetExceeded;
        return result;
      }
      if (accept(cells, w, g)) return result;
      // lexicographic successor: bump the rightmost position that has mass to
      // its right, then push the remaining mass to the last position
      const int last = cell_count - 1;
      long suffix = 0;
      int i = last - 1;
      for (; i >= 0; --i) {
        suffix += w[i + 1];
        if (suffix > 0) break;
      }
      if (i < 0) break;
      w[i] += 1;
      for (int j = i + 1; j <= last; ++j) w[j] = 0;
      w[last] = suffix - 1;
    }
  }
  result.status = SearchStatus::kExhausted;
  return result;
}

}  // namespace entroflow
