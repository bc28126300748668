#include "core/lp.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <tuple>

#include "core/errors.hpp"
#include "core/simplex.hpp"

namespace entroflow {

void ShannonLP::add(LinearFunctional f, std::string family, std::string detail) {
  constraints.push_back({std::move(f), {std::move(family), std::move(detail)}});
}

std::vector<std::string> lp_variables(const NetworkProblem& problem, bool include_randomness) {
  require_valid(problem);
  ProblemIndex index(problem);
  std::vector<std::string> out;
  for (const auto& s : problem.requirement.sessions) out.push_back("T_" + s.id);
  for (const auto& e : index.edge_order())
    if (!index.is_forwarding(e)) out.push_back("W_" + e);
  if (include_randomness)
    for (const auto& u : problem.randomness_nodes) out.push_back("V_" + u);
  return out;
}

namespace {

std::string elemental_detail(const LinearFunctional& f, const GroundSet& g) {
  // either h(N) - h(N - i) or h(Ki) + h(Kj) - h(Kij) - h(K)
  std::vector<SubsetIndex> plus, minus;
  for (const auto& [s, c] : f.coefficients) (sgn(c) > 0 ? plus : minus).push_back(s);
  auto names = [&](SubsetIndex s) {
    std::string out;
    for (const auto& l : g.labels_of(s)) out += (out.empty() ? "" : ",") + l;
    return out;
  };
  if (plus.size() == 1) {
    SubsetIndex rest = minus.empty() ? SubsetIndex() : minus[0];
    return "H(" + names(plus[0] - rest) + (rest.empty() ? "" : "|" + names(rest)) + ")";
  }
  SubsetIndex k = plus[0] & plus[1];
  std::string out = "I(" + names(plus[0] - k) + ";" + names(plus[1] - k);
  if (!k.empty()) out += "|" + names(k);
  return out + ")";
}

void add_elemental(ShannonLP& lp, int limit) {
  for (auto& f : elemental_inequalities(lp.ground.size(), limit)) {
    std::string detail = elemental_detail(f, lp.ground);
    lp.add(std::move(f), "elemental", std::move(detail));
  }
}

// h(target | given) == 0
LinearFunctional conditional_zero(SubsetIndex target, SubsetIndex given) {
  LinearFunctional f;
  f.sense = Sense::kZero;
  f.add(target | given, 1);
  f.add(given, -1);
  return f;
}

std::string joined(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

}  // namespace

ShannonLP polymatroid_lp(const GroundSet& ground, int ground_limit) {
  if (ground.size() > ground_limit)
    throw CapacityError("ground of " + std::to_string(ground.size()) + " variables exceeds the limit of " +
                        std::to_string(ground_limit));
  ShannonLP lp;
  lp.ground = ground;
  add_elemental(lp, ground_limit);
  return lp;
}

ShannonLP build_shannon_lp(const NetworkProblem& problem, const LPOptions& options) {
  const bool randomized = options.include_randomness && !problem.randomness_nodes.empty();
  const auto all = lp_variables(problem, randomized);
  std::vector<std::string> names;
  if (options.ground.empty()) {
    names = all;
  } else {
    std::set<std::string> wanted(options.ground.begin(), options.ground.end());
    for (const auto& w : wanted)
      if (std::find(all.begin(), all.end(), w) == all.end())
        throw std::invalid_argument("unknown LP variable: " + w);
    for (const auto& v : all)
      if (wanted.count(v)) names.push_back(v);
  }
  if (static_cast<int>(names.size()) > options.ground_limit)
    throw CapacityError("ground of " + std::to_string(names.size()) + " variables exceeds the limit of " +
                        std::to_string(options.ground_limit) +
                        "; restrict the LP to a subnetwork ground and import proven equalities as axioms");

  ShannonLP lp;
  lp.ground = GroundSet(names);
  const GroundSet& g = lp.ground;
  ProblemIndex index(problem);

  // nullopt when some variable lies outside the ground
  auto subset_of = [&](const std::vector<std::string>& vars) -> std::optional<SubsetIndex> {
    SubsetIndex s;
    for (const auto& v : vars) {
      auto i = g.index_of(v);
      if (!i) return std::nullopt;
      s = s | SubsetIndex::singleton(*i);
    }
    return s;
  };
  auto edge_var = [&](const std::string& e) { return "W_" + index.root(e); };
  auto node_inputs = [&](const std::string& node, bool with_randomness) {
    std::vector<std::string> vars;
    for (const auto& s : index.sessions_at(node)) vars.push_back("T_" + s);
    for (const auto& e : index.incoming(node)) {
      auto v = edge_var(e);
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    if (with_randomness && randomized && index.has_randomness(node)) vars.push_back("V_" + node);
    return vars;
  };

  add_elemental(lp, options.ground_limit);

  {
    std::vector<std::string> sources;
    for (const auto& s : problem.requirement.sessions)
      if (g.index_of("T_" + s.id)) sources.push_back("T_" + s.id);
    if (randomized)
      for (const auto& u : problem.randomness_nodes)
        if (g.index_of("V_" + u)) sources.push_back("V_" + u);
    if (sources.size() >= 2) {
      LinearFunctional f;
      f.sense = Sense::kZero;
      for (const auto& v : sources) f.add(g.element(v), 1);
      f.add(*subset_of(sources), -1);
      lp.add(std::move(f), "independence", joined(sources));
    }
  }

  for (const auto& e : index.edge_order()) {
    if (index.is_forwarding(e)) continue;
    auto target = subset_of({"W_" + e});
    auto given = subset_of(node_inputs(index.edge(e).tail, true));
    if (target && given) lp.add(conditional_zero(*target, *given), "causality", e);
  }

  for (const auto& e : problem.network.edges) {
    if (e.capacity.is_unbounded()) continue;
    auto w = subset_of({edge_var(e.id)});
    if (!w) continue;
    LinearFunctional f;
    f.add(*w, -1);
    f.constant = e.capacity.value();
    lp.add(std::move(f), "capacity", e.id);
  }

  if (options.include_rates) {
    for (const auto& s : problem.requirement.sessions) {
      auto t = subset_of({"T_" + s.id});
      if (!t) continue;
      LinearFunctional f;
      f.add(*t, 1);
      f.constant = -s.rate;
      lp.add(std::move(f), "rate", s.id);
    }
  }

  for (const auto& [sink, sessions] : index.demands()) {
    auto given = subset_of(node_inputs(sink, false));
    if (!given) continue;
    for (const auto& s : sessions) {
      auto t = subset_of({"T_" + s});
      if (t) lp.add(conditional_zero(*t, *given), "decoding", sink + ":" + s);
    }
  }

  for (std::size_t r = 0; r < problem.wiretaps.taps.size(); ++r) {
    const auto& tap = problem.wiretaps.taps[r];
    if (tap.sources.empty() || tap.edges.empty()) continue;
    std::vector<std::string> a, b;
    for (const auto& s : tap.sources) a.push_back("T_" + s);
    for (const auto& e : tap.edges) {
      auto v = edge_var(e);
      if (std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
    }
    auto sa = subset_of(a), sb = subset_of(b);
    if (!sa || !sb) continue;
    LinearFunctional f;
    f.sense = Sense::kZero;
    f.add(*sa, 1);
    f.add(*sb, 1);
    f.add(*sa | *sb, -1);
    lp.add(std::move(f), "secrecy", "tap " + std::to_string(r) + ": I(" + joined(a) + ";" + joined(b) + ")");
  }
  return lp;
}

// --- expressions -------------------------------------------------------------

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const GroundSet& g, const Aliases& aliases)
      : text_(text), g_(g), aliases_(aliases) {}

  // Parses a sum; atom coefficients are multiplied by `sign`.
  void sum(InfoExpr& out, int sign, bool& all_nonneg) {
    skip();
    bool first = true;
    while (pos_ < text_.size()) {
      int s = 1;
      if (peek() == '+' || peek() == '-') {
        s = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected + or -");
      }
      first = false;
      term(out, s * sign, all_nonneg);
      skip();
    }
    if (first) fail("empty expression");
  }

 private:
  void term(InfoExpr& out, int sign, bool& all_nonneg) {
    Rational coef = 1;
    bool has_coef = false;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/' || text_[pos_] == '.'))
        ++pos_;
      try {
        coef = parse_rational(text_.substr(start, pos_ - start));
      } catch (const std::invalid_argument&) {
        fail("bad coefficient");
      }
      has_coef = true;
      skip();
      if (peek() == '*') {
        ++pos_;
        skip();
      }
    }
    coef *= sign;
    if (peek() != 'H' && peek() != 'I') {
      if (!has_coef) fail("expected H(...), I(...) or a number");
      out.functional.constant += coef;
      return;
    }
    const char kind = peek();
    ++pos_;
    expect('(');
    if (sgn(coef) < 0) all_nonneg = false;
    if (kind == 'H') {
      SubsetIndex a = names({'|', ')'});
      SubsetIndex b;
      if (peek() == '|') {
        ++pos_;
        b = names({')'});
      }
      expect(')');
      out.functional.add(a | b, coef);
      out.functional.add(b, -coef);
    } else {
      SubsetIndex a = names({';'});
      expect(';');
      SubsetIndex b = names({'|', ')'});
      SubsetIndex c;
      if (peek() == '|') {
        ++pos_;
        c = names({')'});
      }
      expect(')');
      out.functional.add(a | c, coef);
      out.functional.add(b | c, coef);
      out.functional.add(a | b | c, -coef);
      out.functional.add(c, -coef);
    }
  }

  SubsetIndex names(std::initializer_list<char> stops) {
    SubsetIndex s;
    for (;;) {
      skip();
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' &&
             std::find(stops.begin(), stops.end(), text_[pos_]) == stops.end())
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (name.empty()) fail("expected a variable name");
      s = s | SubsetIndex::singleton(resolve(name));
      if (peek() != ',') break;
      ++pos_;
    }
    return s;
  }

  int resolve(const std::string& name) {
    if (auto it = aliases_.find(name); it != aliases_.end()) {
      if (auto i = g_.index_of(it->second)) return *i;
      fail("alias " + name + " -> " + it->second + " is not an LP variable");
    }
    if (auto i = g_.index_of(name)) return *i;
    for (const char* prefix : {"T_", "W_", "V_"})
      if (auto i = g_.index_of(prefix + name)) return *i;
    fail("unknown variable " + name);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("column " + std::to_string(pos_ + 1), what + " in \"" + std::string(text_) + "\"");
  }

  std::string_view text_;
  const GroundSet& g_;
  const Aliases& aliases_;
  std::size_t pos_ = 0;
};

}  // namespace

InfoExpr parse_info_expr(std::string_view text, const GroundSet& ground, const Aliases& aliases) {
  InfoExpr out;
  out.text = std::string(text);
  bool nonneg = true;
  ExprParser(text, ground, aliases).sum(out, 1, nonneg);
  out.elemental_nonnegative = nonneg && sgn(out.functional.constant) >= 0;
  return out;
}

Claim parse_claim(std::string_view text, const GroundSet& ground, const Aliases& aliases) {
  Claim c;
  c.text = std::string(text);
  std::size_t at = std::string_view::npos, width = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i, 2) == ">=" || text.substr(i, 2) == "<=") {
      at = i;
      width = 2;
      c.relation = text[i] == '>' ? Relation::kGe : Relation::kLe;
      break;
    }
    if (text[i] == '=') {
      at = i;
      width = 1;
      c.relation = Relation::kEq;
      break;
    }
  }
  if (at == std::string_view::npos) throw ParseError("", "claim needs =, >= or <=: \"" + c.text + "\"");
  bool lhs_nonneg = true, rhs_nonneg = true;
  InfoExpr d;
  d.text = c.text;
  ExprParser(text.substr(0, at), ground, aliases).sum(d, 1, lhs_nonneg);
  ExprParser(text.substr(at + width), ground, aliases).sum(d, -1, rhs_nonneg);
  d.elemental_nonnegative = lhs_nonneg && rhs_nonneg && sgn(d.functional.constant) >= 0;
  c.difference = std::move(d);
  return c;
}

LinearFunctional to_constraint(const Claim& claim) {
  LinearFunctional f = claim.difference.functional;
  f.sense = claim.relation == Relation::kEq ? Sense::kZero : Sense::kNonNegative;
  if (claim.relation == Relation::kLe) {
    for (auto& [s, c] : f.coefficients) c = -c;
    f.constant = -f.constant;
  }
  return f;
}

void add_axiom(ShannonLP& lp, const Claim& claim, std::string detail) {
  lp.add(to_constraint(claim), "axiom", detail.empty() ? claim.text : std::move(detail));
}

// --- solving -------------------------------------------------------------

std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

// Coordinates identified through functional dependences: a constraint
// h(A u B) - h(A) == 0 lets every set containing A absorb B.
struct Presolve {
  std::vector<std::uint32_t> closure;  // per mask
  std::vector<int> column;             // per mask; -1 for sets pinned to 0
  std::vector<std::uint32_t> columns;  // closed set of each column
  std::vector<Constraint> derived;
  std::vector<std::uint32_t> derived_mask;  // the coordinate each derived equality moves
};

Presolve presolve(const ShannonLP& lp) {
  const std::uint32_t count = lp.ground.subset_count();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rules;  // given -> adds
  for (const auto& c : lp.constraints) {
    const auto& f = c.functional;
    if (f.sense != Sense::kZero || sgn(f.constant) != 0) continue;
    if (f.coefficients.size() == 1) {
      rules.emplace_back(0U, f.coefficients.begin()->first.mask());
      continue;
    }
    if (f.coefficients.size() != 2) continue;
    auto a = *f.coefficients.begin(), b = *std::next(f.coefficients.begin());
    if (a.second != -b.second) continue;
    SubsetIndex small = a.first, large = b.first;
    if (!large.contains(small)) std::swap(small, large);
    if (!large.contains(small)) continue;
    rules.emplace_back(small.mask(), (large - small).mask());
  }
  Presolve p;
  p.closure.resize(count);
  for (std::uint32_t m = 0; m < count; ++m) {
    std::uint32_t s = m;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [given, adds] : rules) {
        if ((s & given) == given && (s & adds) != adds) {
          s |= adds;
          changed = true;
        }
      }
    }
    p.closure[m] = s;
  }
  const std::uint32_t zero_class = p.closure[0];
  p.column.assign(count, -1);
  std::map<std::uint32_t, int> col_of;
  for (std::uint32_t m = 1; m < count; ++m) {
    const std::uint32_t c = p.closure[m];
    if (c == zero_class) continue;
    auto [it, inserted] = col_of.try_emplace(c, static_cast<int>(p.columns.size()));
    if (inserted) p.columns.push_back(c);
    p.column[m] = it->second;
  }
  for (std::uint32_t m = 1; m < count; ++m) {
    const std::uint32_t c = p.closure[m];
    const bool pinned = c == zero_class;
    if (!pinned && c == m) continue;
    LinearFunctional f;
    f.sense = Sense::kZero;
    f.add(SubsetIndex(m), 1);
    if (!pinned) f.add(SubsetIndex(c), -1);
    std::string detail = pinned ? "h" + lp.ground.format(SubsetIndex(m)) + " = 0"
                                : "h" + lp.ground.format(SubsetIndex(m)) + " = h" + lp.ground.format(SubsetIndex(c));
    p.derived.push_back({std::move(f), {"fd-closure", std::move(detail)}});
    p.derived_mask.push_back(m);
  }
  return p;
}

using DenseRow = std::vector<Rational>;  // per mask

void accumulate(DenseRow& row, const LinearFunctional& f, const Rational& scale) {
  for (const auto& [s, c] : f.coefficients) row[s.mask()] += scale * c;
}

// Moves every coefficient off non-closed coordinates along the derived
// equalities; returns their multipliers.
std::vector<Rational> eliminate_derived(DenseRow& row, const Presolve& p) {
  std::vector<Rational> z(p.derived.size());
  for (std::size_t k = 0; k < p.derived.size(); ++k) {
    const std::uint32_t m = p.derived_mask[k];
    if (sgn(row[m]) == 0) continue;
    z[k] = row[m];
    // row -= z * (h(m) - h(cl m))
    const std::uint32_t c = p.closure[m];
    if (p.column[m] >= 0) row[c] += row[m];
    row[m] = 0;
  }
  return z;
}

bool satisfies(const LinearFunctional& f, const RationalVector& h) {
  Rational v = f.evaluate(h);
  return f.sense == Sense::kZero ? sgn(v) == 0 : sgn(v) >= 0;
}

RationalVector expand(const ShannonLP& lp, const Presolve& p, const std::vector<Rational>& x) {
  RationalVector h(lp.ground);
  for (std::uint32_t m = 1; m < lp.ground.subset_count(); ++m)
    if (p.column[m] >= 0) h.set(SubsetIndex(m), x[p.column[m]]);
  return h;
}

// Direct verified solve first. Otherwise constraint generation: solve over an active subset of rows, then add rows
// the optimum (or an unbounded ray) violates, until none is left. Rows never
// activated get multiplier zero, so the subset's duals certify the full LP.
simplex::Solution solve_by_generation(const simplex::Problem& full, const std::vector<int>& origin, const ShannonLP& lp) {
  if (auto direct = simplex::solve_dual_verified(full)) return *direct;
  constexpr std::size_t kBatch = 400;
  const std::size_t m = full.rows.size();
  std::vector<bool> active(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& c = lp.constraints[origin[r]];
    // everything but the elemental inequalities, plus the monotonicity ones
    if (c.origin.family != "elemental" || c.functional.coefficients.size() <= 2) active[r] = true;
  }
  if (m <= kBatch) std::fill(active.begin(), active.end(), true);
  auto violated = [&](const std::vector<Rational>& x, bool direction) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < m && out.size() < kBatch; ++r) {
      if (active[r]) continue;
      const auto& row = full.rows[r];
      Rational v;
      for (const auto& [j, c] : row.coefficients) v += c * x[j];
      const int cmp_rhs = direction ? sgn(v) : cmp(v, row.rhs);
      const bool bad = row.sense == simplex::RowSense::kEq ? cmp_rhs != 0
                       : row.sense == simplex::RowSense::kGe ? cmp_rhs < 0
                                                              : cmp_rhs > 0;
      if (bad) out.push_back(r);
    }
    return out;
  };
  std::vector<std::pair<int, int>> pivots;
  for (;;) {
    simplex::Problem sub;
    sub.variables = full.variables;
    sub.objective = full.objective;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < m; ++r) {
      if (!active[r]) continue;
      sub.rows.push_back(full.rows[r]);
      rows.push_back(r);
    }
    simplex::Solution sol = simplex::solve_dual(sub);
    pivots.insert(pivots.end(), sol.pivots.begin(), sol.pivots.end());
    std::vector<std::size_t> add;
    if (sol.status == simplex::Status::kOptimal) add = violated(sol.x, false);
    if (sol.status == simplex::Status::kUnbounded) {
      add = violated(sol.x, false);
      if (add.empty()) add = violated(sol.ray, true);
    }
    if (add.empty()) {
      // lift duals back to the full row list
      std::vector<Rational> y(m);
      if (!sol.y.empty())
        for (std::size_t k = 0; k < rows.size(); ++k) y[rows[k]] = sol.y[k];
      sol.y = std::move(y);
      sol.pivots = std::move(pivots);
      return sol;
    }
    for (auto r : add) active[r] = true;
  }
}

Certificate solve(const ShannonLP& lp, const LinearFunctional& objective, bool maximize_sense) {
  Presolve p = presolve(lp);
  const int n = static_cast<int>(p.columns.size());
  simplex::Problem sp;
  sp.variables = n;
  sp.objective.assign(n, Rational(0));
  for (const auto& [s, c] : objective.coefficients)
    if (p.column[s.mask()] >= 0) sp.objective[p.column[s.mask()]] += maximize_sense ? c : Rational(-c);

  Certificate cert;
  cert.maximize = maximize_sense;
  cert.derived = p.derived;
  const std::size_t total = lp.constraints.size() + p.derived.size();
  cert.multipliers.assign(total, Rational(0));

  std::vector<int> origin;  // reduced row -> constraint index
  using Key = std::tuple<int, Rational, std::vector<std::pair<int, Rational>>>;
  std::map<Key, int> seen;
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& f = lp.constraints[i].functional;
    std::map<int, Rational> coeffs;
    for (const auto& [s, c] : f.coefficients) {
      const int col = p.column[s.mask()];
      if (col < 0) continue;
      coeffs[col] += c;
    }
    std::vector<std::pair<int, Rational>> row;
    for (auto& [col, c] : coeffs)
      if (sgn(c) != 0) row.emplace_back(col, c);
    const bool eq = f.sense == Sense::kZero;
    if (row.empty()) {
      const int s = sgn(f.constant);
      if ((eq && s != 0) || (!eq && s < 0)) {
        // 0 >= -constant is violated outright
        cert.status = LPStatus::kInfeasible;
        cert.multipliers[i] = eq && s > 0 ? -1 : 1;
        DenseRow acc(lp.ground.subset_count());
        accumulate(acc, f, cert.multipliers[i]);
        auto z = eliminate_derived(acc, p);
        // derived multipliers enter with the opposite sign of the residual
        for (std::size_t k = 0; k < z.size(); ++k) cert.multipliers[lp.constraints.size() + k] = -z[k];
        if (!verify_certificate(lp, objective, cert)) throw std::logic_error("trivial infeasibility failed to verify");
        return cert;
      }
      continue;
    }
    Key key{eq ? 1 : 0, -f.constant, row};
    if (seen.count(key)) continue;
    seen.emplace(std::move(key), static_cast<int>(i));
    sp.rows.push_back({std::move(row), eq ? simplex::RowSense::kEq : simplex::RowSense::kGe, -f.constant});
    origin.push_back(static_cast<int>(i));
  }

  simplex::Solution sol = solve_by_generation(sp, origin, lp);
  cert.pivots = sol.pivots.size();
  cert.pivot_sequence = sol.pivots;

  // constraint multipliers mu = -y, then derived ones from the residual
  for (std::size_t r = 0; r < origin.size(); ++r) cert.multipliers[origin[r]] = sol.y.empty() ? Rational(0) : Rational(-sol.y[r]);
  auto derive = [&](DenseRow acc) {
    auto z = eliminate_derived(acc, p);
    for (std::size_t k = 0; k < z.size(); ++k) cert.multipliers[lp.constraints.size() + k] = -z[k];
  };
  DenseRow acc(lp.ground.subset_count());
  switch (sol.status) {
    case simplex::Status::kOptimal: {
      cert.status = LPStatus::kOptimal;
      cert.value = (maximize_sense ? sol.value : Rational(-sol.value)) + objective.constant;
      cert.point = expand(lp, p, sol.x);
      // residual of (sense * objective) + sum mu_i f_i
      LinearFunctional signed_obj = objective;
      accumulate(acc, signed_obj, maximize_sense ? Rational(1) : Rational(-1));
      for (std::size_t i = 0; i < lp.constraints.size(); ++i)
        if (sgn(cert.multipliers[i]) != 0) accumulate(acc, lp.constraints[i].functional, cert.multipliers[i]);
      derive(std::move(acc));
      break;
    }
    case simplex::Status::kInfeasible: {
      cert.status = LPStatus::kInfeasible;
      for (std::size_t i = 0; i < lp.constraints.size(); ++i)
        if (sgn(cert.multipliers[i]) != 0) accumulate(acc, lp.constraints[i].functional, cert.multipliers[i]);
      derive(std::move(acc));
      break;
    }
    case simplex::Status::kUnbounded: {
      cert.status = LPStatus::kUnbounded;
      std::fill(cert.multipliers.begin(), cert.multipliers.end(), Rational(0));
      cert.point = expand(lp, p, sol.x);
      cert.ray = expand(lp, p, sol.ray);
      break;
    }
  }
  if (!verify_certificate(lp, objective, cert)) throw std::logic_error("LP certificate failed re-verification");
  return cert;
}

}  // namespace

Certificate maximize(const ShannonLP& lp, const LinearFunctional& objective) { return solve(lp, objective, true); }
Certificate minimize(const ShannonLP& lp, const LinearFunctional& objective) { return solve(lp, objective, false); }
Certificate feasibility(const ShannonLP& lp) { return solve(lp, LinearFunctional{}, true); }

bool verify_certificate(const ShannonLP& lp, const LinearFunctional& objective, const Certificate& c) {
  const std::size_t nc = lp.constraints.size();
  if (c.multipliers.size() != nc + c.derived.size()) return false;
  const std::uint32_t count = lp.ground.subset_count();

  // Sign conditions: inequality multipliers are nonnegative.
  for (std::size_t i = 0; i < nc; ++i)
    if (lp.constraints[i].functional.sense == Sense::kNonNegative && sgn(c.multipliers[i]) < 0) return false;
  // Derived equalities must be of the identification shape; their validity
  // rests on the causality/decoding constraints they were closed under.
  for (const auto& d : c.derived)
    if (d.functional.sense != Sense::kZero || sgn(d.functional.constant) != 0) return false;

  auto point_ok = [&](const RationalVector& h) {
    if (!(h.ground() == lp.ground)) return false;
    for (const auto& k : lp.constraints)
      if (!satisfies(k.functional, h)) return false;
    return true;
  };

  // Combination: sense*objective + sum mu_i f_i + sum z_k g_k
  DenseRow acc(count);
  Rational constant;
  auto combine = [&](bool with_objective) {
    if (with_objective) {
      const Rational s = c.maximize ? 1 : -1;
      accumulate(acc, objective, s);
    }
    for (std::size_t i = 0; i < nc; ++i) {
      if (sgn(c.multipliers[i]) == 0) continue;
      accumulate(acc, lp.constraints[i].functional, c.multipliers[i]);
      constant += c.multipliers[i] * lp.constraints[i].functional.constant;
    }
    for (std::size_t k = 0; k < c.derived.size(); ++k) {
      if (sgn(c.multipliers[nc + k]) == 0) continue;
      accumulate(acc, c.derived[k].functional, c.multipliers[nc + k]);
    }
  };

  switch (c.status) {
    case LPStatus::kOptimal: {
      if (!c.point || !point_ok(*c.point)) return false;
      if (objective.evaluate(*c.point) != c.value) return false;
      // For max: value - obj(h) = sum mu f + sum z g + s.h with s >= 0, so
      // obj(h) + sum mu f + sum z g has linear part -s <= 0 and constant
      // value when the objective's constant is included.
      combine(true);
      for (std::uint32_t m = 1; m < count; ++m)
        if (sgn(acc[m]) > 0) return false;
      const Rational sense_value = c.maximize ? c.value : Rational(-c.value);
      const Rational sense_const = c.maximize ? objective.constant : Rational(-objective.constant);
      return constant + sense_const == sense_value;
    }
    case LPStatus::kInfeasible: {
      // sum mu f + sum z g = -s.h + constant with s >= 0 and constant < 0:
      // negative on every h >= 0, yet each term is >= 0 on feasible points.
      combine(false);
      for (std::uint32_t m = 1; m < count; ++m)
        if (sgn(acc[m]) > 0) return false;
      return sgn(constant) < 0;
    }
    case LPStatus::kUnbounded: {
      if (!c.point || !c.ray || !point_ok(*c.point)) return false;
      const RationalVector& r = *c.ray;
      for (std::uint32_t m = 1; m < count; ++m)
        if (sgn(r[SubsetIndex(m)]) < 0) return false;
      Rational gain;
      for (const auto& k : lp.constraints) {
        Rational v;
        for (const auto& [s, coef] : k.functional.coefficients) v += coef * r[s];
        if (k.functional.sense == Sense::kZero ? sgn(v) != 0 : sgn(v) < 0) return false;
      }
      for (const auto& [s, coef] : objective.coefficients) gain += coef * r[s];
      return c.maximize ? sgn(gain) > 0 : sgn(gain) < 0;
    }
  }
  return false;
}

ForcedResult prove_forced_equality(const ShannonLP& lp, const InfoExpr& f) {
  if (!f.elemental_nonnegative)
    throw PreconditionError("functional is not recognized as nonnegative (a nonnegative combination of "
                            "conditional entropies and mutual informations): " + f.text);
  ForcedResult out;
  out.certificate = maximize(lp, f.functional);
  out.forced = out.certificate.status == LPStatus::kOptimal && sgn(out.certificate.value) == 0;
  return out;
}

ForcedValueResult prove_forced_value(const ShannonLP& lp, const InfoExpr& f, const Rational& value) {
  ForcedValueResult out;
  out.upper = maximize(lp, f.functional);
  out.lower = minimize(lp, f.functional);
  out.forced = out.upper.status == LPStatus::kOptimal && out.lower.status == LPStatus::kOptimal &&
               out.upper.value == value && out.lower.value == value;
  return out;
}

// --- chains ----------------------------------------------------------------

std::string to_string(ClaimVerdict v) {
  switch (v) {
    case ClaimVerdict::kForced:
      return "forced";
    case ClaimVerdict::kConsistent:
      return "consistent";
    case ClaimVerdict::kContradicted:
      return "contradicted";
  }
  return "?";
}

bool ChainReport::all_forced() const {
  for (const auto& s : stages) {
    if (!s.feasible || s.skipped) return false;
    for (const auto& c : s.claims)
      if (c.verdict != ClaimVerdict::kForced) return false;
  }
  return true;
}

StageReport verify_claims(const ShannonLP& lp, const std::vector<std::string>& claims, const Aliases& aliases) {
  StageReport report;
  std::vector<Claim> parsed;
  for (const auto& text : claims) parsed.push_back(parse_claim(text, lp.ground, aliases));
  Certificate f = feasibility(lp);
  if (f.status == LPStatus::kInfeasible) {
    report.feasible = false;
    report.notes.push_back("LP infeasible: every claim holds vacuously");
    const bool farkas = verify_certificate(lp, {}, f);
    for (const auto& c : parsed) report.claims.push_back({c.text, ClaimVerdict::kForced, {}, {}, farkas});
    return report;
  }
  for (const auto& c : parsed) {
    ClaimReport r;
    r.text = c.text;
    const auto& fn = c.difference.functional;
    Certificate hi = maximize(lp, fn);
    Certificate lo = minimize(lp, fn);
    r.certificates_verified = verify_certificate(lp, fn, hi) && verify_certificate(lp, fn, lo);
    if (hi.status == LPStatus::kOptimal) r.max = hi.value;
    if (lo.status == LPStatus::kOptimal) r.min = lo.value;
    auto below = [](const std::optional<Rational>& v, int s) { return v && sgn(*v) * s < 0; };  // v < 0 (s=1)
    switch (c.relation) {
      case Relation::kEq:
        if (r.min && r.max && sgn(*r.min) == 0 && sgn(*r.max) == 0)
          r.verdict = ClaimVerdict::kForced;
        else if (below(r.max, 1) || below(r.min, -1))
          r.verdict = ClaimVerdict::kContradicted;
        break;
      case Relation::kGe:
        if (r.min && sgn(*r.min) >= 0)
          r.verdict = ClaimVerdict::kForced;
        else if (below(r.max, 1))
          r.verdict = ClaimVerdict::kContradicted;
        break;
      case Relation::kLe:
        if (r.max && sgn(*r.max) <= 0)
          r.verdict = ClaimVerdict::kForced;
        else if (below(r.min, -1))
          r.verdict = ClaimVerdict::kContradicted;
        break;
    }
    report.claims.push_back(std::move(r));
  }
  return report;
}

ChainReport verify_proof_chain(const NetworkProblem& problem, const ProofChain& chain) {
  ChainReport report;
  for (const auto& stage : chain.stages) {
    LPOptions options;
    options.include_randomness = chain.include_randomness;
    options.ground = stage.ground;
    ShannonLP lp = build_shannon_lp(problem, options);
    std::vector<std::string> notes;
    std::string blocked;
    auto import_text = [&](const std::string& text, const std::string& from) {
      try {
        add_axiom(lp, parse_claim(text, lp.ground, chain.aliases), from.empty() ? text : from + ": " + text);
      } catch (const ParseError&) {
        notes.push_back("skipped import outside this ground: " + text);
      }
    };
    for (const auto& imp : stage.imports) {
      if (imp.rfind("stage:", 0) == 0) {
        const std::string name = imp.substr(6);
        auto it = std::find_if(report.stages.begin(), report.stages.end(),
                               [&](const StageReport& s) { return s.name == name; });
        if (it == report.stages.end()) throw std::invalid_argument("import of unknown stage " + name);
        if (!it->feasible || it->skipped) {
          blocked = name;
          continue;
        }
        for (const auto& c : it->claims)
          if (c.verdict == ClaimVerdict::kForced) import_text(c.text, "stage " + name);
      } else {
        import_text(imp, "");
      }
    }
    if (!blocked.empty()) {
      StageReport s;
      s.name = stage.name;
      s.skipped = true;
      s.notes.push_back("not run: imports stage " + blocked + ", which is infeasible or not run");
      report.stages.push_back(std::move(s));
      continue;
    }
    StageReport s = verify_claims(lp, stage.claims, chain.aliases);
    s.name = stage.name;
    s.notes.insert(s.notes.begin(), notes.begin(), notes.end());
    report.stages.push_back(std::move(s));
  }
  return report;
}

// --- export ------------------------------------------------------------------

std::string format_functional(const LinearFunctional& f, const GroundSet& ground) {
  std::string out;
  // order by subset size, then mask
  std::vector<std::pair<SubsetIndex, Rational>> terms(f.coefficients.begin(), f.coefficients.end());
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.first.count() < b.first.count(); });
  for (const auto& [s, c] : terms) {
    const bool neg = sgn(c) < 0;
    Rational mag = neg ? Rational(-c) : c;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (mag != 1) out += to_string(mag);
    out += "h" + ground.format(s);
  }
  if (sgn(f.constant) != 0 || out.empty()) {
    const bool neg = sgn(f.constant) < 0;
    Rational mag = neg ? Rational(-f.constant) : f.constant;
    if (out.empty())
      out = (neg ? "-" : "") + to_string(mag);
    else
      out += (neg ? " - " : " + ") + to_string(mag);
  }
  return out;
}

std::string export_lp(const ShannonLP& lp) {
  std::string out = "# variables: ";
  for (int i = 0; i < lp.ground.size(); ++i) out += (i ? " " : "") + lp.ground.label(i);
  out += "\n";
  for (const auto& c : lp.constraints) {
    LinearFunctional lin = c.functional;
    Rational rhs = -lin.constant;
    lin.constant = 0;
    std::string rel = c.functional.sense == Sense::kZero ? "=" : ">=";
    const bool flip = !lin.coefficients.empty() && sgn(lin.coefficients.begin()->second) < 0 &&
                      std::all_of(lin.coefficients.begin(), lin.coefficients.end(),
                                  [](const auto& kv) { return sgn(kv.second) < 0; });
    if (flip) {
      for (auto& [s, v] : lin.coefficients) v = -v;
      rhs = -rhs;
      if (rel == ">=") rel = "<=";
    }
    out += format_functional(lin, lp.ground) + " " + rel + " " + to_string(rhs) + "  # " + c.origin.family + ": " +
           c.origin.detail + "\n";
  }
  return out;
}

}  // namespace entroflow
