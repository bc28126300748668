#include "core/json_io.hpp"

#include <cstdio>
#include <set>

#include "core/code_internal.hpp"
#include "core/errors.hpp"

namespace entroflow {

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

std::string string_field(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string_field(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError(where.empty() ? k : where + "." + k, "unknown field");
}

std::string path(const std::string& base, const std::string& key, std::size_t i) {
  return base + key + "[" + std::to_string(i) + "]";
}

}  // namespace

Json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    auto colon = msg.rfind(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(std::string(what) + " " + line_col(text, e.byte > 0 ? e.byte - 1 : 0), msg);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Rational rational_field(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
  if (!j.is_string()) throw ParseError(where, "expected a rational string such as \"3/2\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where, e.what());
  }
}

RationalVector rational_vector_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("", "entropy vector must be a JSON object");
  reject_unknown(j, {"n", "labels", "values"}, "");
  GroundSet ground;
  if (j.contains("labels")) {
    try {
      ground = GroundSet(string_list(j["labels"], "labels"));
    } catch (const std::invalid_argument& e) {
      throw ParseError("labels", e.what());
    }
    if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<int>() != ground.size()))
      throw ParseError("n", "does not match the number of labels");
  } else {
    const Json& n = field(j, "n", "");
    if (!n.is_number_integer() || n.get<int>() < 1 || n.get<int>() > GroundSet::kMaxSize)
      throw ParseError("n", "expected an integer in [1, " + std::to_string(GroundSet::kMaxSize) + "]");
    ground = GroundSet::numbered(n.get<int>());
  }
  const Json& values = field(j, "values", "");
  if (!values.is_object()) throw ParseError("values", "expected an object keyed by subsets");
  RationalVector h(ground);
  std::set<std::uint32_t> seen;
  for (const auto& [key, v] : values.items()) {
    SubsetIndex s;
    try {
      s = ground.parse(key);
    } catch (const std::invalid_argument& e) {
      throw ParseError("values." + key, e.what());
    }
    if (s.empty()) throw ParseError("values." + key, "the empty set is fixed at 0");
    if (!seen.insert(s.mask()).second) throw ParseError("values." + key, "subset given twice");
    h.set(s, rational_field(v, "values." + key));
  }
  for (std::uint32_t m = 1; m < ground.subset_count(); ++m)
    if (!seen.count(m)) throw ParseError("values", "missing coordinate " + ground.format(SubsetIndex(m)));
  return h;
}

namespace {

template <class T, class F>
Json set_function_json(const SetFunction<T>& h, F value) {
  Json j;
  j["n"] = h.size();
  j["labels"] = h.ground().labels();
  Json values = Json::object();
  // Subsets listed by size, then by mask, for readability.
  for (int k = 1; k <= h.size(); ++k)
    for (std::uint32_t m = 1; m < h.ground().subset_count(); ++m)
      if (__builtin_popcount(m) == k) values[h.ground().format(SubsetIndex(m))] = value(h[SubsetIndex(m)]);
  j["values"] = values;
  return j;
}

}  // namespace

Json to_json(const RationalVector& h) {
  return set_function_json(h, [](const Rational& v) { return to_string(v); });
}

Json to_json(const EntropyVector& h) {
  return set_function_json(h, [](double v) { return v; });
}

JointDistribution distribution_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("", "distribution must be a JSON object");
  reject_unknown(j, {"variables", "pmf"}, "");
  const Json& vars = field(j, "variables", "");
  if (!vars.is_array()) throw ParseError("variables", "expected an array");
  std::vector<RandomVariable> variables;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::string where = path("", "variables", i);
    RandomVariable v;
    v.name = string_field(field(vars[i], "name", where), where + ".name");
    const Json& a = field(vars[i], "alphabet", where);
    if (!a.is_number_integer()) throw ParseError(where + ".alphabet", "expected an integer");
    v.alphabet = a.get<int>();
    variables.push_back(v);
  }
  const Json& pmf = field(j, "pmf", "");
  if (!pmf.is_array()) throw ParseError("pmf", "expected an array of [outcome, probability] pairs");
  std::vector<std::pair<Outcome, Rational>> entries;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    std::string where = path("", "pmf", i);
    const Json& e = pmf[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_array())
      throw ParseError(where, "expected [outcome-tuple, probability]");
    Outcome o;
    for (const auto& x : e[0]) {
      if (!x.is_number_integer()) throw ParseError(where, "outcome symbols must be integers");
      o.push_back(x.get<int>());
    }
    entries.emplace_back(std::move(o), rational_field(e[1], where + "[1]"));
  }
  try {
    return JointDistribution(std::move(variables), std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw ParseError("pmf", e.what());
  }
}

Json to_json(const JointDistribution& d) {
  Json j;
  Json vars = Json::array();
  for (const auto& v : d.variables()) vars.push_back({{"name", v.name}, {"alphabet", v.alphabet}});
  j["variables"] = vars;
  Json pmf = Json::array();
  for (const auto& [o, p] : d.pmf()) pmf.push_back(Json::array({o, to_string(p)}));
  j["pmf"] = pmf;
  return j;
}

Json to_json(const Capacity& c) { return to_string(c); }

Json to_json(const RateCapacityTuple& t) {
  Json j;
  Json rates = Json::object(), caps = Json::object();
  for (const auto& [k, v] : t.rates) rates[k] = to_string(v);
  for (const auto& [k, v] : t.capacities) caps[k] = to_string(v);
  j["rates"] = rates;
  j["capacities"] = caps;
  return j;
}

NetworkProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("", "network problem must be a JSON object");
  reject_unknown(j, {"nodes", "edges", "sessions", "incremental_order", "wiretaps", "randomness"}, "");
  NetworkProblem p;
  p.network.nodes = string_list(field(j, "nodes", ""), "nodes");

  const Json& edges = field(j, "edges", "");
  if (!edges.is_array()) throw ParseError("edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string where = path("", "edges", i);
    const Json& e = edges[i];
    if (!e.is_object()) throw ParseError(where, "expected an object");
    reject_unknown(e, {"id", "tail", "head", "capacity", "forwards"}, where);
    Edge edge;
    edge.id = string_field(field(e, "id", where), where + ".id");
    edge.tail = string_field(field(e, "tail", where), where + ".tail");
    edge.head = string_field(field(e, "head", where), where + ".head");
    const Json& cap = field(e, "capacity", where);
    if (cap.is_string() && cap.get<std::string>() == "unbounded") {
      edge.capacity = Capacity::unbounded();
    } else {
      edge.capacity = Capacity(rational_field(cap, where + ".capacity"));
    }
    if (e.contains("forwards") && !e["forwards"].is_null())
      edge.forwards = string_field(e["forwards"], where + ".forwards");
    p.network.edges.push_back(std::move(edge));
  }

  const Json& sessions = field(j, "sessions", "");
  if (!sessions.is_array()) throw ParseError("sessions", "expected an array");
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    std::string where = path("", "sessions", i);
    const Json& s = sessions[i];
    if (!s.is_object()) throw ParseError(where, "expected an object");
    reject_unknown(s, {"id", "rate", "origin", "sinks"}, where);
    Session session;
    session.id = string_field(field(s, "id", where), where + ".id");
    session.rate = rational_field(field(s, "rate", where), where + ".rate");
    session.origin = string_field(field(s, "origin", where), where + ".origin");
    session.sinks = string_list(field(s, "sinks", where), where + ".sinks");
    p.requirement.sessions.push_back(std::move(session));
  }
  if (j.contains("incremental_order") && !j["incremental_order"].is_null())
    p.requirement.incremental_order = string_list(j["incremental_order"], "incremental_order");

  if (j.contains("wiretaps")) {
    const Json& taps = j["wiretaps"];
    if (!taps.is_array()) throw ParseError("wiretaps", "expected an array");
    for (std::size_t i = 0; i < taps.size(); ++i) {
      std::string where = path("", "wiretaps", i);
      if (!taps[i].is_object()) throw ParseError(where, "expected an object");
      reject_unknown(taps[i], {"sources", "edges"}, where);
      Tap t;
      t.sources = string_list(field(taps[i], "sources", where), where + ".sources");
      t.edges = string_list(field(taps[i], "edges", where), where + ".edges");
      p.wiretaps.taps.push_back(std::move(t));
    }
  }
  if (j.contains("randomness")) p.randomness_nodes = string_list(j["randomness"], "randomness");
  return p;
}

NetworkProblem parse_problem(std::string_view text) { return problem_from_json(parse_json_text(text, "problem")); }

Json to_json(const NetworkProblem& p) {
  Json j;
  j["nodes"] = p.network.nodes;
  Json edges = Json::array();
  for (const auto& e : p.network.edges) {
    Json je;
    je["id"] = e.id;
    je["tail"] = e.tail;
    je["head"] = e.head;
    je["capacity"] = to_string(e.capacity);
    if (e.forwards) je["forwards"] = *e.forwards;
    edges.push_back(je);
  }
  j["edges"] = edges;
  Json sessions = Json::array();
  for (const auto& s : p.requirement.sessions)
    sessions.push_back({{"id", s.id}, {"rate", to_string(s.rate)}, {"origin", s.origin}, {"sinks", s.sinks}});
  j["sessions"] = sessions;
  if (!p.requirement.incremental_order.empty()) j["incremental_order"] = p.requirement.incremental_order;
  Json taps = Json::array();
  for (const auto& t : p.wiretaps.taps) taps.push_back({{"sources", t.sources}, {"edges", t.edges}});
  j["wiretaps"] = taps;
  if (!p.randomness_nodes.empty()) j["randomness"] = p.randomness_nodes;
  return j;
}

std::string serialize(const NetworkProblem& p) { return dump(to_json(p)); }

VariableRef parse_variable_name(const std::string& name) {
  if (name.size() > 2 && name[1] == '_') {
    switch (name[0]) {
      case 'T': return {VariableRef::Kind::kSession, name.substr(2)};
      case 'W': return {VariableRef::Kind::kEdge, name.substr(2)};
      case 'V': return {VariableRef::Kind::kRandomness, name.substr(2)};
      default: break;
    }
  }
  throw std::invalid_argument("variable name '" + name + "' must start with T_, W_ or V_");
}

namespace {

void flatten_table(const Json& j, const std::vector<int>& radix, std::size_t depth, std::vector<int>& out,
                   const std::string& where) {
  if (depth == radix.size()) {
    if (!j.is_number_integer()) throw ParseError(where, "expected an integer symbol");
    out.push_back(j.get<int>());
    return;
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(radix[depth]))
    throw ParseError(where, "expected an array of length " + std::to_string(radix[depth]));
  for (std::size_t i = 0; i < j.size(); ++i) flatten_table(j[i], radix, depth + 1, out, where + "[" + std::to_string(i) + "]");
}

Json nest_table(const std::vector<int>& table, const std::vector<int>& radix, std::size_t depth, std::size_t& pos) {
  if (depth == radix.size()) return table.at(pos++);
  Json arr = Json::array();
  for (int i = 0; i < radix[depth]; ++i) arr.push_back(nest_table(table, radix, depth + 1, pos));
  return arr;
}

std::map<std::string, int> alphabet_map(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object of alphabet sizes");
  std::map<std::string, int> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_integer()) throw ParseError(where + "." + k, "expected an integer");
    out[k] = v.get<int>();
  }
  return out;
}

}  // namespace

NetworkCode code_from_json(const Json& j, const NetworkProblem& problem) {
  if (!j.is_object()) throw ParseError("", "network code must be a JSON object");
  reject_unknown(j, {"source_alphabets", "edge_alphabets", "randomness", "encoders"}, "");
  NetworkCode code;
  code.source_alphabets = alphabet_map(field(j, "source_alphabets", ""), "source_alphabets");
  code.edge_alphabets = alphabet_map(field(j, "edge_alphabets", ""), "edge_alphabets");
  if (j.contains("randomness")) {
    const Json& rs = j["randomness"];
    if (!rs.is_array()) throw ParseError("randomness", "expected an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      std::string where = path("", "randomness", i);
      reject_unknown(rs[i], {"node", "pmf"}, where);
      NodeRandomness r;
      r.node = string_field(field(rs[i], "node", where), where + ".node");
      const Json& pmf = field(rs[i], "pmf", where);
      if (!pmf.is_array()) throw ParseError(where + ".pmf", "expected an array of probabilities");
      for (std::size_t k = 0; k < pmf.size(); ++k) r.pmf.push_back(rational_field(pmf[k], path(where, ".pmf", k)));
      code.randomness.push_back(std::move(r));
    }
  }
  ProblemIndex index(problem);
  const Json& encs = field(j, "encoders", "");
  if (!encs.is_array()) throw ParseError("encoders", "expected an array");
  for (std::size_t i = 0; i < encs.size(); ++i) {
    std::string where = path("", "encoders", i);
    reject_unknown(encs[i], {"edge", "inputs", "table"}, where);
    LocalEncoder enc;
    enc.edge = string_field(field(encs[i], "edge", where), where + ".edge");
    for (const auto& name : string_list(field(encs[i], "inputs", where), where + ".inputs")) {
      try {
        enc.inputs.push_back(parse_variable_name(name));
      } catch (const std::invalid_argument& e) {
        throw ParseError(where + ".inputs", e.what());
      }
    }
    std::vector<int> radix;
    for (const auto& v : enc.inputs) {
      int a = 0;
      try {
        a = detail::variable_alphabet(index, code, v);
      } catch (const std::invalid_argument& e) {
        throw ParseError(where + ".inputs", e.what());
      }
      radix.push_back(a);
    }
    flatten_table(field(encs[i], "table", where), radix, 0, enc.table, where + ".table");
    code.encoders.push_back(std::move(enc));
  }
  try {
    validate_code(problem, code);
  } catch (const std::invalid_argument& e) {
    throw ParseError("", e.what());
  }
  return code;
}

Json to_json(const NetworkCode& code, const NetworkProblem& problem) {
  ProblemIndex index(problem);
  Json j;
  Json src = Json::object(), edges = Json::object();
  for (const auto& s : problem.requirement.sessions)
    if (code.source_alphabets.count(s.id)) src[s.id] = code.source_alphabets.at(s.id);
  for (const auto& e : index.edge_order())
    if (code.edge_alphabets.count(e)) edges[e] = code.edge_alphabets.at(e);
  j["source_alphabets"] = src;
  j["edge_alphabets"] = edges;
  Json rs = Json::array();
  for (const auto& r : code.randomness) {
    Json pmf = Json::array();
    for (const auto& q : r.pmf) pmf.push_back(to_string(q));
    rs.push_back({{"node", r.node}, {"pmf", pmf}});
  }
  j["randomness"] = rs;
  Json encs = Json::array();
  for (const auto& e : index.edge_order()) {
    const LocalEncoder* enc = code.encoder(e);
    if (!enc) continue;
    Json je;
    je["edge"] = enc->edge;
    Json inputs = Json::array();
    std::vector<int> radix;
    for (const auto& v : enc->inputs) {
      inputs.push_back(v.name());
      radix.push_back(detail::variable_alphabet(index, code, v));
    }
    je["inputs"] = inputs;
    std::size_t pos = 0;
    je["table"] = nest_table(enc->table, radix, 0, pos);
    encs.push_back(je);
  }
  j["encoders"] = encs;
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["admissible"] = v.admissible;
  Json reasons = Json::array();
  for (const auto& r : v.reasons) reasons.push_back({{"kind", to_string(r.kind)}, {"detail", r.detail}});
  j["reasons"] = reasons;
  return j;
}

}  // namespace entroflow
