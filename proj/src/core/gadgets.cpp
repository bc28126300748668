#include "core/gadgets.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

#include "core/code_internal.hpp"
#include "core/errors.hpp"

namespace entroflow {

namespace {

using Values = std::map<std::string, int>;  // T_s / W_<root> / V_u -> symbol

// Fills an encoder table from a function of the tail's named inputs.
LocalEncoder tabulate(const ProblemIndex& index, const NetworkCode& code, const std::string& edge,
                      const std::function<int(const Values&)>& fn) {
  const bool randomized = code.randomness_at(index.edge(edge).tail) != nullptr;
  LocalEncoder enc{edge, encoder_inputs(index, edge, randomized), {}};
  std::vector<int> alph;
  std::vector<std::string> keys;
  std::size_t total = 1;
  for (const auto& v : enc.inputs) {
    alph.push_back(detail::variable_alphabet(index, code, v));
    keys.push_back(v.kind == VariableRef::Kind::kEdge ? "W_" + index.root(v.id) : v.name());
    total *= static_cast<std::size_t>(alph.back());
  }
  enc.table.resize(total);
  Values values;
  for (std::size_t row = 0; row < total; ++row) {
    std::size_t rest = row;
    for (std::size_t k = enc.inputs.size(); k-- > 0;) {
      values[keys[k]] = static_cast<int>(rest % alph[k]);
      rest /= alph[k];
    }
    enc.table[row] = fn(values);
  }
  return enc;
}

Edge make_edge(std::string id, std::string tail, std::string head, Capacity cap) {
  return Edge{std::move(id), std::move(tail), std::move(head), std::move(cap), std::nullopt};
}

Edge make_edge(std::string id, std::string tail, std::string head, const Rational& cap) {
  return make_edge(std::move(id), std::move(tail), std::move(head), Capacity(cap));
}

Edge forward(std::string id, std::string tail, std::string head, const std::string& root) {
  Edge e = make_edge(std::move(id), std::move(tail), std::move(head), Capacity::unbounded());
  e.forwards = root;
  return e;
}

int pow2(const Rational& exponent, const char* what) {
  if (exponent.get_den() != 1 || sgn(exponent) < 0 || exponent > 30)
    throw PreconditionError(std::string(what) + " must be a nonnegative integer so that 2^" + what +
                            " is an integer, got " + to_string(exponent));
  return 1 << exponent.get_num().get_si();
}

std::vector<std::uint32_t> nonempty_subsets(int n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 1; m < (1U << n); ++m) out.push_back(m);
  return out;
}

}  // namespace

bool is_cut(const NetworkProblem& p, const std::string& from, const std::string& to,
            const std::vector<std::string>& edges) {
  std::set<std::string> removed(edges.begin(), edges.end());
  std::set<std::string> seen{from};
  std::deque<std::string> queue{from};
  while (!queue.empty()) {
    std::string u = queue.front();
    queue.pop_front();
    if (u == to) return false;
    for (const auto& e : p.network.edges)
      if (e.tail == u && !removed.count(e.id) && seen.insert(e.head).second) queue.push_back(e.head);
  }
  return true;
}

ContractReport check_contract(const Gadget& gadget) {
  ContractReport report;
  if (!gadget.contract.chain.stages.empty()) report.chain = verify_proof_chain(gadget.problem, gadget.contract.chain);
  for (const auto& ob : gadget.contract.obligations) {
    ObligationResult r{ob.name, false, ""};
    if (ob.kind == Obligation::Kind::kCut) {
      r.ok = is_cut(gadget.problem, ob.from, ob.to, ob.edges);
      r.detail = r.ok ? "cut" : "not a cut";
    } else {
      r.detail = "claim not found in chain";
      for (std::size_t i = 0; i < report.chain.stages.size(); ++i) {
        const auto& stage = report.chain.stages[i];
        const auto& asked = gadget.contract.chain.stages[i].claims;
        if (stage.skipped && std::find(asked.begin(), asked.end(), ob.claim) != asked.end())
          r.detail = stage.name + ": not run";
        for (const auto& c : stage.claims) {
          if (c.text != ob.claim) continue;
          r.ok = stage.feasible && c.verdict == ClaimVerdict::kForced;
          r.detail = stage.name + ": " + (stage.feasible ? to_string(c.verdict) : std::string("LP infeasible"));
        }
      }
    }
    report.ok = report.ok && r.ok;
    report.results.push_back(std::move(r));
  }
  return report;
}

// --- incremental multicast ----------------------------------------------------

std::string subset_label(SubsetIndex alpha, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (!alpha.has(i)) continue;
    if (n > 9 && !out.empty()) out += "_";
    out += std::to_string(i + 1);
  }
  return out;
}

Gadget build_incremental(const RationalVector& h) {
  const int n = h.size();
  if (n < 2) throw std::invalid_argument("the incremental gadget needs N >= 2");
  const GroundSet& g = h.ground();
  const SubsetIndex full = g.full();
  const Rational hn = h[full];
  auto single = [&](int i) -> const Rational& { return h[SubsetIndex::singleton(i)]; };
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    if (sgn(h[a]) < 0) throw std::invalid_argument("negative capacity h(alpha) for alpha=" + g.format(a));
    if (hn < h[a])
      throw std::invalid_argument("negative capacity h(N) - h(alpha) = " + to_string(hn - h[a]) +
                                  " for alpha=" + g.format(a));
  }
  auto num = [](int i) { return std::to_string(i + 1); };
  auto lab = [&](SubsetIndex a) { return subset_label(a, n); };

  Gadget out;
  NetworkProblem& p = out.problem;
  auto node = [&](const std::string& id) { p.network.nodes.push_back(id); };
  auto add = [&](Edge e) { p.network.edges.push_back(std::move(e)); };

  Rational s0_rate;
  for (int i = 0; i < n; ++i) s0_rate += single(i);
  Session s0{"S0", s0_rate, "s", {}}, s1{"S1", hn, "s", {}};

  // source part
  node("s");
  node("v0");
  node("t0");
  add(make_edge("VB", "s", "v0", hn));
  for (int i = 0; i < n; ++i) {
    node("hU" + num(i));
    node("hV" + num(i));
    add(make_edge("U" + num(i), "s", "hU" + num(i), single(i)));
    add(make_edge("V" + num(i), "v0", "hV" + num(i), single(i)));
    add(forward("fU" + num(i) + "_t0", "hU" + num(i), "t0", "U" + num(i)));
  }
  s0.sinks.push_back("t0");

  // type 1: one per nonempty alpha
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    const std::string tag = "a" + lab(a);
    const std::string mid = "m_" + tag, sink = "t_" + tag;
    node(mid);
    node(sink);
    add(make_edge("D_" + tag, "s", sink, hn - h[a]));
    add(make_edge("M_" + tag, mid, sink, h[a]));
    for (int j = 0; j < n; ++j)
      if (a.has(j)) add(forward("fV" + num(j) + "_" + mid, "hV" + num(j), mid, "V" + num(j)));
    for (int j = 0; j < n; ++j) add(forward("fU" + num(j) + "_" + sink, "hU" + num(j), sink, "U" + num(j)));
    s1.sinks.push_back(sink);
  }

  // type 2: nonempty proper alpha and i outside alpha
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    if (a == full) continue;
    for (int i = 0; i < n; ++i) {
      if (a.has(i)) continue;
      const SubsetIndex ai = a | SubsetIndex::singleton(i);
      const std::string tag = "a" + lab(a) + "_i" + num(i);
      const std::string gn = "g_" + tag, up = "p0_" + tag, low = "p1_" + tag;
      node(gn);
      node(up);
      node(low);
      add(forward("fU" + num(i) + "_" + gn, "hU" + num(i), gn, "U" + num(i)));
      add(forward("fV" + num(i) + "_" + gn, "hV" + num(i), gn, "V" + num(i)));
      add(make_edge("W1_" + tag, gn, up, single(i)));
      add(make_edge("W2_" + tag, gn, up, single(i)));
      add(make_edge("W3_" + tag, gn, low, single(i)));
      add(make_edge("D_" + tag, "s", up, hn - h[ai]));
      for (int j = 0; j < n; ++j)
        if (a.has(j)) add(forward("fV" + num(j) + "_" + up, "hV" + num(j), up, "V" + num(j)));
      for (int j = 0; j < n; ++j) add(forward("fU" + num(j) + "_" + up, "hU" + num(j), up, "U" + num(j)));
      for (int j = 0; j < n; ++j)
        if (j != i) add(forward("fU" + num(j) + "_" + low, "hU" + num(j), low, "U" + num(j)));
      s1.sinks.push_back(up);
      s0.sinks.push_back(low);
    }
  }
  p.requirement.sessions = {s0, s1};
  p.requirement.incremental_order = {"S0", "S1"};
  require_valid(p);

  // contract
  ReconstructionContract& c = out.contract;
  c.decisions = {
      "S0-sink t0 is fed by exactly U_1..U_N",
      "bottleneck edge VB of capacity h(N) precedes the V fan-out",
      "type 1 sinks demand S0 and S1 (incremental order) and receive U_1..U_N as side information",
      "type 2 upper receiver has a direct source edge of capacity h(N) - h(alpha,i) and receives V_alpha and "
      "U_1..U_N; the lower receiver receives U_j for j != i",
  };
  std::vector<std::string> source_ground{"T_S0", "T_S1", "W_VB"};
  for (int i = 0; i < n; ++i) {
    source_ground.push_back("W_U" + num(i));
    source_ground.push_back("W_V" + num(i));
  }
  auto v_set = [&](SubsetIndex a) {
    std::string out;
    for (int j = 0; j < n; ++j)
      if (a.has(j)) out += (out.empty() ? "" : ",") + ("V" + num(j));
    return out;
  };
  auto claim = [&](const std::string& name, std::string text) {
    c.obligations.push_back({name, Obligation::Kind::kLp, text, {}, "", ""});
    return text;
  };
  ChainStage src{"source", source_ground, {}, {}};
  std::string u_all;
  for (int i = 0; i < n; ++i) {
    src.claims.push_back(claim("H(U" + num(i) + ")", "H(U" + num(i) + ") = " + to_string(single(i))));
    u_all += (i ? "," : "") + ("U" + num(i));
  }
  {
    std::string sum;
    for (int i = 0; i < n; ++i) sum += (i ? " + " : "") + ("H(U" + num(i) + ")");
    src.claims.push_back(claim("U independence", "H(" + u_all + ") = " + sum));
  }
  c.chain.stages.push_back(src);
  std::vector<std::string> type1_stages;
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    const std::string tag = "a" + lab(a);
    ChainStage st{"type1 " + tag, source_ground, {}, {}};
    st.ground.push_back("W_D_" + tag);
    st.ground.push_back("W_M_" + tag);
    st.claims.push_back(claim("H(V_" + lab(a) + ") lower", "H(" + v_set(a) + ") >= " + to_string(h[a])));
    if (a == full) st.claims.push_back(claim("H(V_N)", "H(" + v_set(a) + ") = " + to_string(hn)));
    if (a.count() == 1) st.claims.push_back(claim("H(" + v_set(a) + ")", "H(" + v_set(a) + ") = " + to_string(h[a])));
    type1_stages.push_back(st.name);
    c.chain.stages.push_back(std::move(st));
  }
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    if (a == full) continue;
    for (int i = 0; i < n; ++i) {
      if (a.has(i)) continue;
      const SubsetIndex ai = a | SubsetIndex::singleton(i);
      const std::string tag = "a" + lab(a) + "_i" + num(i);
      // P0's decoding argument only needs its own inputs and g's
      ChainStage st{"type2 " + tag, {"T_S0", "T_S1"}, {"stage:source"}, {}};
      for (int j = 0; j < n; ++j) st.ground.push_back("W_U" + num(j));
      for (int j = 0; j < n; ++j)
        if (ai.has(j)) st.ground.push_back("W_V" + num(j));
      for (const char* w : {"W_W1_", "W_W2_", "W_D_"}) st.ground.push_back(w + tag);
      for (const auto& t1 : type1_stages) st.imports.push_back("stage:" + t1);
      st.claims.push_back(claim("increment " + tag, "H(V" + num(i) + "|" + v_set(a) + ") = " + to_string(h[ai] - h[a])));
      c.chain.stages.push_back(std::move(st));
    }
  }
  return out;
}

QuasiUniformSpec make_quasi_uniform_spec(JointDistribution dist) {
  if (dist.variable_count() < 1) throw PreconditionError("a quasi-uniform distribution needs at least one variable");
  if (!is_quasi_uniform(dist)) throw PreconditionError("distribution is not quasi-uniform");
  return {std::move(dist)};
}

RationalVector exact_entropy_vector(const QuasiUniformSpec& q) {
  auto sizes = support_sizes(q.dist);
  RationalVector h(sizes.ground());
  for (std::uint32_t m = 1; m < sizes.ground().subset_count(); ++m) {
    auto k = exact_log2(sizes[SubsetIndex(m)]);
    if (!k)
      throw PreconditionError("support of " + sizes.ground().format(SubsetIndex(m)) + " has size " +
                              std::to_string(sizes[SubsetIndex(m)]) + ", not a power of two");
    h.set(SubsetIndex(m), Rational(*k));
  }
  return h;
}

NetworkCode thm2_code(const QuasiUniformSpec& q) {
  const RationalVector h = exact_entropy_vector(q);
  const int n = h.size();
  Gadget gadget = build_incremental(h);
  ProblemIndex index(gadget.problem);
  const auto& points = q.dist.pmf();
  const int support = static_cast<int>(points.size());

  // integer labels of each V_i's marginal support
  std::vector<std::map<int, int>> label(n);
  std::vector<int> k(n);
  for (int i = 0; i < n; ++i) {
    std::set<int> vals;
    for (const auto& [o, pr] : points) vals.insert(o[i]);
    int next = 0;
    for (int v : vals) label[i][v] = next++;
    k[i] = next;
  }
  const int s0_alph = [&] {
    int t = 1;
    for (int x : k) t *= x;
    return t;
  }();
  auto u_of = [&](int s0, int i) {
    // first coordinate most significant
    for (int j = n - 1; j > i; --j) s0 /= k[j];
    return s0 % k[i];
  };
  auto v_of = [&](int point, int i) { return label[i].at(points[point].first[i]); };
  auto project = [&](int point, SubsetIndex a) {
    std::vector<int> t;
    for (int i = 0; i < n; ++i)
      if (a.has(i)) t.push_back(v_of(point, i));
    return t;
  };
  // index of V_alpha's value within its support, and of the point in its fiber
  std::map<std::uint32_t, std::map<std::vector<int>, int>> tuple_index;
  std::map<std::uint32_t, std::vector<int>> fiber_index;
  for (std::uint32_t m = 1; m < (1U << n); ++m) {
    SubsetIndex a(m);
    auto& ti = tuple_index[m];
    for (int p = 0; p < support; ++p) ti.emplace(project(p, a), 0);
    int next = 0;
    for (auto& [t, idx] : ti) idx = next++;
    std::map<std::vector<int>, int> seen;
    auto& fi = fiber_index[m];
    for (int p = 0; p < support; ++p) fi.push_back(seen[project(p, a)]++);
  }
  auto fiber_size = [&](SubsetIndex a) { return support / static_cast<int>(tuple_index[a.mask()].size()); };

  NetworkCode code;
  code.source_alphabets = {{"S0", s0_alph}, {"S1", support}};
  auto num = [](int i) { return std::to_string(i + 1); };
  auto lab = [&](SubsetIndex a) { return subset_label(a, n); };
  const SubsetIndex full = h.ground().full();
  code.edge_alphabets["VB"] = support;
  for (int i = 0; i < n; ++i) {
    code.edge_alphabets["U" + num(i)] = k[i];
    code.edge_alphabets["V" + num(i)] = k[i];
  }
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    const std::string tag = "a" + lab(a);
    code.edge_alphabets["D_" + tag] = fiber_size(a);
    code.edge_alphabets["M_" + tag] = static_cast<int>(tuple_index[m].size());
    if (a == full) continue;
    for (int i = 0; i < n; ++i) {
      if (a.has(i)) continue;
      const std::string t2 = "a" + lab(a) + "_i" + num(i);
      for (const char* w : {"W1_", "W2_", "W3_"}) code.edge_alphabets[w + t2] = k[i];
      code.edge_alphabets["D_" + t2] = fiber_size(a | SubsetIndex::singleton(i));
    }
  }

  auto at_source = [&](const std::function<int(int, int)>& fn) {
    return [fn](const Values& v) { return fn(v.at("T_S0"), v.at("T_S1")); };
  };
  auto v_tuple = [&](const Values& v, SubsetIndex a) {
    std::vector<int> t;
    for (int j = 0; j < n; ++j)
      if (a.has(j)) t.push_back(v.at("W_V" + num(j)));
    return t;
  };
  code.encoders.push_back(tabulate(index, code, "VB", at_source([](int, int s1) { return s1; })));
  for (int i = 0; i < n; ++i) {
    code.encoders.push_back(tabulate(index, code, "U" + num(i), at_source([&, i](int s0, int) { return u_of(s0, i); })));
    code.encoders.push_back(
        tabulate(index, code, "V" + num(i), [&, i](const Values& v) { return v_of(v.at("W_VB"), i); }));
  }
  for (std::uint32_t m : nonempty_subsets(n)) {
    SubsetIndex a(m);
    const std::string tag = "a" + lab(a);
    code.encoders.push_back(
        tabulate(index, code, "D_" + tag, at_source([&, m](int, int s1) { return fiber_index[m][s1]; })));
    code.encoders.push_back(tabulate(index, code, "M_" + tag, [&, a](const Values& v) {
      auto it = tuple_index[a.mask()].find(v_tuple(v, a));
      return it == tuple_index[a.mask()].end() ? 0 : it->second;  // unreachable inputs map to 0
    }));
    if (a == full) continue;
    for (int i = 0; i < n; ++i) {
      if (a.has(i)) continue;
      const std::string t2 = "a" + lab(a) + "_i" + num(i);
      const std::uint32_t ai = (a | SubsetIndex::singleton(i)).mask();
      const std::string u = "W_U" + num(i), vv = "W_V" + num(i);
      const int ki = k[i];
      code.encoders.push_back(tabulate(index, code, "W1_" + t2, [u](const Values& v) { return v.at(u); }));
      code.encoders.push_back(tabulate(index, code, "W2_" + t2,
                                       [u, vv, ki](const Values& v) { return (v.at(u) + v.at(vv)) % ki; }));
      code.encoders.push_back(tabulate(index, code, "W3_" + t2, [u](const Values& v) { return v.at(u); }));
      code.encoders.push_back(
          tabulate(index, code, "D_" + t2, at_source([&, ai](int, int s1) { return fiber_index[ai][s1]; })));
    }
  }
  validate_code(gadget.problem, code);
  return code;
}

// --- secure multicast -----------------------------------------------------------

Gadget build_secure(const Rational& c, const Rational& d) {
  if (!(sgn(c) > 0 && c < d)) throw std::invalid_argument("secure gadget needs 0 < c < d, got c=" + to_string(c) +
                                                          " d=" + to_string(d));
  Gadget out;
  NetworkProblem& p = out.problem;
  p.network.nodes = {"s", "a", "m", "b", "t"};
  p.network.edges = {make_edge("e1", "s", "a", c),  make_edge("e2", "s", "t", d - c), make_edge("e3", "a", "b", c),
                     make_edge("eK", "m", "a", c), make_edge("e4", "m", "b", c),      make_edge("e5", "b", "t", c)};
  p.requirement.sessions = {{"X", d, "s", {"t"}}};
  p.wiretaps.taps = {{{"X"}, {"e3"}}};
  p.randomness_nodes = {"m"};
  require_valid(p);

  ReconstructionContract& k = out.contract;
  k.decisions = {
      "m holds the only private randomness and has no inputs, so K and W4 never see W1",
      "m sends K to a, where it meets W1, and W4 to b",
      "W3 goes a -> b directly and is the only wiretapped edge",
      "t receives W2 directly from s and W5 from b",
  };
  k.aliases = {{"X", "T_X"},   {"W1", "W_e1"}, {"W2", "W_e2"}, {"W3", "W_e3"},
               {"K", "W_eK"},  {"W4", "W_e4"}, {"W5", "W_e5"}, {"V", "V_m"}};
  k.obligations.push_back({"cut {W1,W2}", Obligation::Kind::kCut, "", {"e1", "e2"}, "s", "t"});
  k.obligations.push_back({"cut {W2,W5}", Obligation::Kind::kCut, "", {"e2", "e5"}, "s", "t"});
  const std::string cs = to_string(c), dc = to_string(d - c);
  const std::vector<std::pair<std::string, std::string>> claims = {
      {"W1 independent of W3", "I(W1;W3) = 0"},
      {"H(W1)", "H(W1) = " + cs},
      {"H(W2)", "H(W2) = " + dc},
      {"H(W5)", "H(W5) = " + cs},
      {"W5 function of X", "H(W5|X) = 0"},
      {"W1 from W3,W4", "H(W1|W3,W4) = 0"},
      {"W1 from K,W3", "H(W1|K,W3) = 0"},
      {"H(K)", "H(K) = " + cs},
      {"H(W4)", "H(W4) = " + cs},
      {"K from W1,W3", "H(K|W1,W3) = 0"},
      {"W4 from W1,W3", "H(W4|W1,W3) = 0"},
      {"H(K,W4)", "H(K,W4) = " + cs},
      {"K function of W4", "H(K|W4) = 0"},
      {"W4 function of K", "H(W4|K) = 0"},
  };
  ChainStage stage{"full", {}, {}, {}};
  for (const auto& [name, text] : claims) {
    k.obligations.push_back({name, Obligation::Kind::kLp, text, {}, "", ""});
    stage.claims.push_back(text);
  }
  k.chain.aliases = k.aliases;
  k.chain.stages = {stage};
  return out;
}

NetworkCode otp_code(const Rational& c, const Rational& d) {
  const int key = pow2(c, "c");
  const int total = pow2(d, "d");
  Gadget g = build_secure(c, d);
  ProblemIndex index(g.problem);
  const int lo = total / key;
  NetworkCode code;
  code.source_alphabets = {{"X", total}};
  code.edge_alphabets = {{"e1", key}, {"e2", lo}, {"e3", key}, {"eK", key}, {"e4", key}, {"e5", key}};
  code.randomness = {{"m", std::vector<Rational>(key, Rational(1, key))}};
  code.encoders = {
      tabulate(index, code, "e1", [lo](const Values& v) { return v.at("T_X") / lo; }),
      tabulate(index, code, "e2", [lo](const Values& v) { return v.at("T_X") % lo; }),
      tabulate(index, code, "e3", [key](const Values& v) { return (v.at("W_e1") + v.at("W_eK")) % key; }),
      tabulate(index, code, "eK", [](const Values& v) { return v.at("V_m"); }),
      tabulate(index, code, "e4", [](const Values& v) { return v.at("V_m"); }),
      tabulate(index, code, "e5", [key](const Values& v) { return (v.at("W_e3") - v.at("W_e4") + key) % key; }),
  };
  validate_code(g.problem, code);
  return code;
}

// --- adhesion -----------------------------------------------------------------------

namespace {

std::string copy_tag(const std::string& s, const std::string& d) { return s + ":" + d; }

}  // namespace

Gadget adhere(const NetworkProblem& inner) {
  require_valid(inner);
  if (!inner.wiretaps.taps.empty()) throw std::invalid_argument("adhere expects an inner problem without wiretaps");
  Gadget out;
  NetworkProblem& p = out.problem;
  p.network = inner.network;
  std::set<std::string> used(inner.network.nodes.begin(), inner.network.nodes.end());
  for (const auto& e : inner.network.edges) used.insert(e.id);
  auto fresh = [&](const std::string& id) {
    if (!used.insert(id).second) throw std::invalid_argument("adhere: id clash on " + id);
    return id;
  };
  for (const auto& s : inner.requirement.sessions) {
    const std::string key = fresh("key:" + s.id);
    p.network.nodes.push_back(key);
    p.randomness_nodes.push_back(key);
    p.network.edges.push_back(make_edge(fresh("k:" + s.id), key, s.origin, s.rate));
    for (const auto& d : s.sinks) {
      const std::string tag = copy_tag(s.id, d);
      const std::string src = fresh("src:" + tag), a = fresh("a:" + tag), b = fresh("b:" + tag), t = fresh("t:" + tag);
      p.network.nodes.insert(p.network.nodes.end(), {src, a, b, t});
      p.network.edges.push_back(make_edge(fresh("e1:" + tag), src, a, s.rate));
      p.network.edges.push_back(make_edge(fresh("e2:" + tag), src, t, s.rate));
      p.network.edges.push_back(make_edge(fresh("K:" + tag), key, a, s.rate));
      p.network.edges.push_back(make_edge(fresh("e3:" + tag), a, b, s.rate));
      p.network.edges.push_back(make_edge(fresh("r:" + tag), d, b, s.rate));
      p.network.edges.push_back(make_edge(fresh("e5:" + tag), b, t, s.rate));
      p.requirement.sessions.push_back({fresh("X:" + tag), 2 * s.rate, src, {t}});
      p.wiretaps.taps.push_back({{"X:" + tag}, {"e3:" + tag}});
      out.contract.obligations.push_back(
          {"cut {W2,W5} " + tag, Obligation::Kind::kCut, "", {"e2:" + tag, "e5:" + tag}, src, t});
    }
  }
  require_valid(p);
  out.contract.decisions = {
      "one secure copy per (session, sink) pair, c = rate and d = 2 rate",
      "copies of one session share the key node key:<session>, which holds the randomness and has no inputs",
      "each copy mixes W1 with the key at a:<session>:<sink>, fed by edge K:<session>:<sink> (capacity rate)",
      "the key enters the inner network at the session's origin on edge k:<session> (capacity rate)",
      "the relay b:<session>:<sink> hears the inner sink on edge r:<session>:<sink> (capacity rate)",
      "inner sessions and demands are dropped; only the copies' messages are demanded",
  };
  return out;
}

NetworkCode adhere_code(const NetworkProblem& inner, const NetworkCode& inner_code) {
  validate_code(inner, inner_code);
  if (!inner_code.is_deterministic()) throw std::invalid_argument("adhere_code expects a deterministic inner code");
  if (!check_zero_error(inner, inner_code).ok) throw std::invalid_argument("inner code is not zero-error");
  Gadget g = adhere(inner);
  ProblemIndex index(g.problem);
  ProblemIndex inner_index(inner);
  const auto& sessions = inner.requirement.sessions;

  NetworkCode code;
  std::map<std::string, int> key_alph;
  for (const auto& s : sessions) {
    const int q = pow2(s.rate, "rate");
    if (inner_code.source_alphabets.at(s.id) != q)
      throw PreconditionError("inner source alphabet of " + s.id + " must be 2^rate");
    key_alph[s.id] = q;
    code.randomness.push_back({"key:" + s.id, std::vector<Rational>(q, Rational(1, q))});
    code.edge_alphabets["k:" + s.id] = q;
  }
  for (const auto& [e, a] : inner_code.edge_alphabets) code.edge_alphabets[e] = a;
  for (const auto& s : sessions) {
    const int q = key_alph[s.id];
    for (const auto& d : s.sinks) {
      const std::string tag = copy_tag(s.id, d);
      code.source_alphabets["X:" + tag] = q * q;
      for (const char* e : {"e1:", "e2:", "K:", "e3:", "r:", "e5:"}) code.edge_alphabets[e + tag] = q;
    }
  }

  // inner encoders with each session input replaced by its key edge
  for (const auto& enc : inner_code.encoders) {
    code.encoders.push_back(tabulate(index, code, enc.edge, [&](const Values& v) {
      std::size_t row = 0;
      for (const auto& in : enc.inputs) {
        const int a = detail::variable_alphabet(inner_index, inner_code, in);
        const int val = in.kind == VariableRef::Kind::kSession ? v.at("W_k:" + in.id) : v.at("W_" + inner_index.root(in.id));
        row = row * a + val;
      }
      return enc.table[row];
    }));
  }

  // what each inner sink hears, as a function of the keys
  std::vector<int> keys(sessions.size(), 0);
  std::map<std::string, std::map<std::vector<int>, std::vector<int>>> heard;  // sink -> input tuple -> keys
  for (;;) {
    auto out = evaluate(inner, inner_code, keys);
    for (const auto& s : sessions) {
      for (const auto& d : s.sinks) {
        std::vector<int> tuple;
        for (const auto& e : index.incoming(d)) {
          const std::string root = index.root(e);
          if (root.rfind("k:", 0) == 0) {
            auto it = std::find_if(sessions.begin(), sessions.end(), [&](const Session& x) { return "k:" + x.id == root; });
            tuple.push_back(keys[it - sessions.begin()]);
          } else {
            tuple.push_back(out.at(root));
          }
        }
        heard[d][tuple] = keys;
      }
    }
    bool more = false;
    for (std::size_t pos = keys.size(); pos-- > 0;) {
      if (++keys[pos] < key_alph[sessions[pos].id]) {
        more = true;
        break;
      }
      keys[pos] = 0;
    }
    if (!more) break;
  }

  for (std::size_t si = 0; si < sessions.size(); ++si) {
    const auto& s = sessions[si];
    const int q = key_alph[s.id];
    const std::string key_var = "V_key:" + s.id;
    code.encoders.push_back(tabulate(index, code, "k:" + s.id, [&](const Values& v) { return v.at(key_var); }));
    for (const auto& d : s.sinks) {
      const std::string tag = copy_tag(s.id, d);
      const std::string x = "T_X:" + tag, w1 = "W_e1:" + tag, k = "W_K:" + tag, w3 = "W_e3:" + tag, r = "W_r:" + tag;
      code.encoders.push_back(tabulate(index, code, "e1:" + tag, [x, q](const Values& v) { return v.at(x) / q; }));
      code.encoders.push_back(tabulate(index, code, "e2:" + tag, [x, q](const Values& v) { return v.at(x) % q; }));
      code.encoders.push_back(tabulate(index, code, "K:" + tag, [&](const Values& v) { return v.at(key_var); }));
      code.encoders.push_back(tabulate(index, code, "e3:" + tag,
                                       [w1, k, q](const Values& v) { return (v.at(w1) + v.at(k)) % q; }));
      code.encoders.push_back(tabulate(index, code, "r:" + tag, [&, d, si](const Values& v) {
        std::vector<int> tuple;
        for (const auto& e : index.incoming(d)) tuple.push_back(v.at("W_" + index.root(e)));
        auto it = heard[d].find(tuple);
        return it == heard[d].end() ? 0 : it->second[si];
      }));
      code.encoders.push_back(
          tabulate(index, code, "e5:" + tag, [w3, r, q](const Values& v) { return (v.at(w3) - v.at(r) + q) % q; }));
    }
  }
  validate_code(g.problem, code);
  return code;
}

}  // namespace entroflow
