#include "core/code.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "core/code_internal.hpp"
#include "core/errors.hpp"

namespace entroflow {

const LocalEncoder* NetworkCode::encoder(const std::string& edge) const {
  for (const auto& e : encoders)
    if (e.edge == edge) return &e;
  return nullptr;
}

LocalEncoder* NetworkCode::encoder(const std::string& edge) {
  for (auto& e : encoders)
    if (e.edge == edge) return &e;
  return nullptr;
}

const NodeRandomness* NetworkCode::randomness_at(const std::string& node) const {
  for (const auto& r : randomness)
    if (r.node == node) return &r;
  return nullptr;
}

std::vector<VariableRef> encoder_inputs(const ProblemIndex& index, const std::string& edge, bool tail_randomized) {
  const Edge& e = index.edge(edge);
  std::vector<VariableRef> inputs;
  for (const auto& s : index.sessions_at(e.tail)) inputs.push_back({VariableRef::Kind::kSession, s});
  for (const auto& in : index.incoming(e.tail)) inputs.push_back({VariableRef::Kind::kEdge, in});
  if (tail_randomized) inputs.push_back({VariableRef::Kind::kRandomness, e.tail});
  return inputs;
}

int edge_alphabet(const ProblemIndex& index, const NetworkCode& code, const std::string& edge) {
  const std::string& root = index.root(edge);
  auto it = code.edge_alphabets.find(root);
  if (it == code.edge_alphabets.end()) throw std::invalid_argument("code has no alphabet for edge " + root);
  return it->second;
}

namespace detail {

int variable_alphabet(const ProblemIndex& index, const NetworkCode& code, const VariableRef& v) {
  switch (v.kind) {
    case VariableRef::Kind::kSession: {
      auto it = code.source_alphabets.find(v.id);
      if (it == code.source_alphabets.end()) throw std::invalid_argument("code has no alphabet for session " + v.id);
      return it->second;
    }
    case VariableRef::Kind::kEdge:
      return edge_alphabet(index, code, v.id);
    case VariableRef::Kind::kRandomness: {
      const NodeRandomness* r = code.randomness_at(v.id);
      if (!r) throw std::invalid_argument("code has no randomness at node " + v.id);
      return r->alphabet();
    }
  }
  return 0;
}

CompiledCode::CompiledCode(const ProblemIndex& index, const NetworkCode& code) {
  const NetworkProblem& p = index.problem();
  for (const auto& s : p.requirement.sessions) add_variable(index, code, {VariableRef::Kind::kSession, s.id});
  for (const auto& r : code.randomness) add_variable(index, code, {VariableRef::Kind::kRandomness, r.node});
  for (const auto& e : index.edge_order()) add_variable(index, code, {VariableRef::Kind::kEdge, e});
  session_count = static_cast<int>(p.requirement.sessions.size());
  randomness_count = static_cast<int>(code.randomness.size());
  for (const auto& e : index.edge_order()) {
    Step step;
    step.out = column.at({VariableRef::Kind::kEdge, e});
    if (index.is_forwarding(e)) {
      step.copy_from = column.at({VariableRef::Kind::kEdge, *index.edge(e).forwards});
    } else {
      const LocalEncoder* enc = code.encoder(e);
      step.table = &enc->table;
      step.stride.assign(enc->inputs.size(), 1);
      for (int k = static_cast<int>(enc->inputs.size()) - 2; k >= 0; --k)
        step.stride[k] = step.stride[k + 1] * static_cast<std::size_t>(alphabets[column.at(enc->inputs[k + 1])]);
      for (const auto& in : enc->inputs) step.in.push_back(column.at(in));
    }
    steps.push_back(std::move(step));
  }
}

void CompiledCode::add_variable(const ProblemIndex& index, const NetworkCode& code, const VariableRef& v) {
  column[v] = static_cast<int>(variables.size());
  variables.push_back(v);
  alphabets.push_back(variable_alphabet(index, code, v));
}

void CompiledCode::run(std::vector<int>& row) const {
  for (const auto& s : steps) {
    if (s.copy_from >= 0) {
      row[s.out] = row[s.copy_from];
      continue;
    }
    std::size_t idx = 0;
    for (std::size_t k = 0; k < s.in.size(); ++k) idx += static_cast<std::size_t>(row[s.in[k]]) * s.stride[k];
    row[s.out] = (*s.table)[idx];
  }
}

}  // namespace detail

void validate_code(const NetworkProblem& problem, const NetworkCode& code) {
  ProblemIndex index(problem);
  for (const auto& s : problem.requirement.sessions) {
    auto it = code.source_alphabets.find(s.id);
    if (it == code.source_alphabets.end()) throw std::invalid_argument("missing source alphabet for session " + s.id);
    if (it->second < 1) throw std::invalid_argument("source alphabet of " + s.id + " must be >= 1");
  }
  for (const auto& [sid, a] : code.source_alphabets)
    if (!index.has_session(sid)) throw std::invalid_argument("source alphabet for unknown session " + sid);

  std::set<std::string> allowed(problem.randomness_nodes.begin(), problem.randomness_nodes.end());
  std::set<std::string> seen;
  for (const auto& r : code.randomness) {
    if (!allowed.count(r.node))
      throw std::invalid_argument("randomness at node " + r.node + ", which the problem does not permit");
    if (!seen.insert(r.node).second) throw std::invalid_argument("randomness given twice for node " + r.node);
    if (r.pmf.empty()) throw std::invalid_argument("empty randomness pmf at node " + r.node);
    Rational total = 0;
    for (const auto& q : r.pmf) {
      if (sgn(q) < 0) throw std::invalid_argument("negative randomness mass at node " + r.node);
      total += q;
    }
    if (total != 1) throw std::invalid_argument("randomness pmf at node " + r.node + " sums to " + to_string(total));
  }

  for (const auto& [eid, a] : code.edge_alphabets) {
    if (!index.has_edge(eid)) throw std::invalid_argument("alphabet for unknown edge " + eid);
    if (index.is_forwarding(eid)) throw std::invalid_argument("forwarding edge " + eid + " inherits its alphabet");
    if (a < 1) throw std::invalid_argument("alphabet of edge " + eid + " must be >= 1");
  }
  std::set<std::string> encoded;
  for (const auto& enc : code.encoders) {
    if (!index.has_edge(enc.edge)) throw std::invalid_argument("encoder for unknown edge " + enc.edge);
    if (index.is_forwarding(enc.edge))
      throw std::invalid_argument("forwarding edge " + enc.edge + " takes no encoder");
    if (!encoded.insert(enc.edge).second) throw std::invalid_argument("two encoders for edge " + enc.edge);
  }
  for (const auto& eid : index.edge_order()) {
    if (index.is_forwarding(eid)) continue;
    if (!code.edge_alphabets.count(eid)) throw std::invalid_argument("missing alphabet for edge " + eid);
    const LocalEncoder* enc = code.encoder(eid);
    if (!enc) throw std::invalid_argument("missing encoder for edge " + eid);
    const Edge& e = index.edge(eid);
    auto expected = encoder_inputs(index, eid, code.randomness_at(e.tail) != nullptr);
    auto without_v = expected;
    if (code.randomness_at(e.tail)) without_v.pop_back();
    if (enc->inputs != expected && enc->inputs != without_v) {
      std::string want;
      for (const auto& v : expected) want += (want.empty() ? "" : ",") + v.name();
      throw std::invalid_argument("encoder for " + eid + " must take inputs [" + want + "]");
    }
    std::uint64_t size = 1;
    for (const auto& v : enc->inputs) {
      size *= static_cast<std::uint64_t>(detail::variable_alphabet(index, code, v));
      if (size > kDistributionBudget) throw std::invalid_argument("encoder table for " + eid + " is too large");
    }
    if (enc->table.size() != size)
      throw std::invalid_argument("encoder table for " + eid + " has " + std::to_string(enc->table.size()) +
                                  " entries, expected " + std::to_string(size));
    const int alph = code.edge_alphabets.at(eid);
    for (int v : enc->table)
      if (v < 0 || v >= alph) throw std::invalid_argument("encoder table for " + eid + " has symbol out of range");
  }
}

std::map<std::string, int> evaluate(const NetworkProblem& problem, const NetworkCode& code,
                                    const std::vector<int>& sources, const std::vector<int>& randomness) {
  validate_code(problem, code);
  ProblemIndex index(problem);
  detail::CompiledCode cc(index, code);
  if (sources.size() != static_cast<std::size_t>(cc.session_count))
    throw std::invalid_argument("evaluate: expected one symbol per session");
  if (randomness.size() != static_cast<std::size_t>(cc.randomness_count))
    throw std::invalid_argument("evaluate: expected one symbol per randomness node");
  std::vector<int> row(cc.variables.size(), 0);
  for (int i = 0; i < cc.session_count; ++i) {
    if (sources[i] < 0 || sources[i] >= cc.alphabets[i]) throw std::invalid_argument("evaluate: source symbol out of range");
    row[i] = sources[i];
  }
  for (int i = 0; i < cc.randomness_count; ++i) {
    int c = cc.session_count + i;
    if (randomness[i] < 0 || randomness[i] >= cc.alphabets[c])
      throw std::invalid_argument("evaluate: randomness symbol out of range");
    row[c] = randomness[i];
  }
  cc.run(row);
  std::map<std::string, int> out;
  for (std::size_t c = cc.session_count + cc.randomness_count; c < cc.variables.size(); ++c)
    out[cc.variables[c].id] = row[c];
  return out;
}

JointDistribution induced_joint_distribution(const NetworkProblem& problem, const NetworkCode& code,
                                             std::uint64_t budget) {
  validate_code(problem, code);
  ProblemIndex index(problem);
  detail::CompiledCode cc(index, code);

  // randomness symbols with positive mass
  std::vector<std::vector<int>> rand_support;
  std::uint64_t points = 1;
  for (int i = 0; i < cc.session_count; ++i) {
    points *= static_cast<std::uint64_t>(cc.alphabets[i]);
    if (points > budget) throw BudgetExceeded("induced distribution exceeds " + std::to_string(budget) + " outcomes");
  }
  for (const auto& r : code.randomness) {
    std::vector<int> supp;
    for (int v = 0; v < r.alphabet(); ++v)
      if (sgn(r.pmf[v]) > 0) supp.push_back(v);
    points *= supp.size();
    if (points > budget) throw BudgetExceeded("induced distribution exceeds " + std::to_string(budget) + " outcomes");
    rand_support.push_back(std::move(supp));
  }

  Integer source_space = 1;
  for (int i = 0; i < cc.session_count; ++i) source_space *= cc.alphabets[i];
  const Rational source_mass(Integer(1), source_space);

  std::vector<int> row(cc.variables.size(), 0);
  std::vector<int> rpos(rand_support.size(), 0);
  std::map<Outcome, Rational> pmf;
  bool done = false;
  while (!done) {
    Rational mass = source_mass;
    for (std::size_t i = 0; i < rand_support.size(); ++i) {
      row[cc.session_count + i] = rand_support[i][rpos[i]];
      mass *= code.randomness[i].pmf[rand_support[i][rpos[i]]];
    }
    cc.run(row);
    pmf[row] += mass;

    // advance sources (last session fastest), then randomness
    int k = cc.session_count - 1;
    for (; k >= 0; --k) {
      if (++row[k] < cc.alphabets[k]) break;
      row[k] = 0;
    }
    if (k >= 0) continue;
    int r = static_cast<int>(rand_support.size()) - 1;
    for (; r >= 0; --r) {
      if (++rpos[r] < static_cast<int>(rand_support[r].size())) break;
      rpos[r] = 0;
    }
    if (r < 0) done = true;
  }

  std::vector<RandomVariable> vars;
  for (std::size_t c = 0; c < cc.variables.size(); ++c) vars.push_back({cc.variables[c].name(), cc.alphabets[c]});
  std::vector<std::pair<Outcome, Rational>> entries(pmf.begin(), pmf.end());
  return JointDistribution(std::move(vars), std::move(entries));
}

namespace {

std::vector<std::string> decoder_inputs(const ProblemIndex& index, const std::string& sink) {
  std::vector<std::string> given;
  for (const auto& e : index.incoming(sink)) given.push_back("W_" + e);
  for (const auto& s : index.sessions_at(sink)) given.push_back("T_" + s);
  return given;
}

}  // namespace

ZeroErrorReport check_zero_error(const NetworkProblem& problem, const JointDistribution& dist) {
  ProblemIndex index(problem);
  ZeroErrorReport report;
  for (const auto& [sink, sessions] : index.demands()) {
    auto given = decoder_inputs(index, sink);
    for (const auto& s : sessions) {
      std::vector<std::string> target{"T_" + s};
      if (!check_functional_dependency(dist, target, given)) {
        report.ok = false;
        report.failures.push_back({sink, s});
      }
    }
  }
  return report;
}

ZeroErrorReport check_zero_error(const NetworkProblem& problem, const NetworkCode& code) {
  return check_zero_error(problem, induced_joint_distribution(problem, code));
}

SecrecyReport check_secrecy(const NetworkProblem& problem, const JointDistribution& dist) {
  SecrecyReport report;
  for (std::size_t r = 0; r < problem.wiretaps.taps.size(); ++r) {
    const Tap& t = problem.wiretaps.taps[r];
    if (t.sources.empty() || t.edges.empty()) continue;
    std::vector<std::string> a, b;
    for (const auto& s : t.sources) a.push_back("T_" + s);
    for (const auto& e : t.edges) b.push_back("W_" + e);
    if (!check_independence(dist, a, b)) {
      report.ok = false;
      report.leaking_taps.push_back(static_cast<int>(r));
    }
  }
  return report;
}

SecrecyReport check_secrecy(const NetworkProblem& problem, const NetworkCode& code) {
  return check_secrecy(problem, induced_joint_distribution(problem, code));
}

std::string to_string(Reason::Kind k) {
  switch (k) {
    case Reason::Kind::kCapacity: return "capacity";
    case Reason::Kind::kRate: return "rate";
    case Reason::Kind::kDecoding: return "decoding";
    case Reason::Kind::kLeakage: return "leakage";
  }
  return "unknown";
}

Verdict check_admissible(const NetworkProblem& problem, const NetworkCode& code, std::uint64_t budget) {
  validate_code(problem, code);
  ProblemIndex index(problem);
  Verdict v;
  auto fail = [&](Reason::Kind k, std::string detail) {
    v.admissible = false;
    v.reasons.push_back({k, std::move(detail)});
  };
  for (const auto& e : problem.network.edges) {
    if (e.capacity.is_unbounded()) continue;
    int a = edge_alphabet(index, code, e.id);
    if (!alphabet_within(static_cast<std::uint64_t>(a), e.capacity.value()))
      fail(Reason::Kind::kCapacity,
           "edge " + e.id + ": alphabet " + std::to_string(a) + " exceeds 2^" + to_string(e.capacity.value()));
  }
  for (const auto& s : problem.requirement.sessions) {
    int a = code.source_alphabets.at(s.id);
    if (!alphabet_at_least(static_cast<std::uint64_t>(a), s.rate))
      fail(Reason::Kind::kRate,
           "session " + s.id + ": alphabet " + std::to_string(a) + " is below 2^" + to_string(s.rate));
  }
  JointDistribution dist = induced_joint_distribution(problem, code, budget);
  for (const auto& f : check_zero_error(problem, dist).failures)
    fail(Reason::Kind::kDecoding, "sink " + f.sink + " cannot decode session " + f.session);
  for (int r : check_secrecy(problem, dist).leaking_taps)
    fail(Reason::Kind::kLeakage, "wiretap " + std::to_string(r) + " learns about its sources");
  return v;
}

NetworkCode with_encoder(NetworkCode code, LocalEncoder encoder) {
  LocalEncoder* slot = code.encoder(encoder.edge);
  if (!slot) throw std::invalid_argument("no encoder for edge " + encoder.edge);
  *slot = std::move(encoder);
  return code;
}

DerandomizeResult derandomize(const NetworkProblem& problem, const NetworkCode& code, const std::string& edge) {
  validate_code(problem, code);
  ProblemIndex index(problem);
  if (index.is_forwarding(edge)) throw std::invalid_argument("edge " + edge + " is a forwarding edge");
  const LocalEncoder& enc = *code.encoder(edge);
  const std::string tail = index.edge(edge).tail;
  DerandomizeResult result;
  const bool randomized = !enc.inputs.empty() && enc.inputs.back().kind == VariableRef::Kind::kRandomness;
  std::vector<VariableRef> plain(enc.inputs.begin(), enc.inputs.end() - (randomized ? 1 : 0));

  JointDistribution dist = induced_joint_distribution(problem, code);
  if (randomized) {
    std::vector<std::string> v{"V_" + tail};
    std::vector<std::string> rest;
    for (const auto& in : plain) rest.push_back(in.name());
    rest.push_back("W_" + edge);
    if (!check_independence(dist, v, rest)) {
      result.reason = "V_" + tail + " is not independent of its co-inputs and W_" + edge + " jointly";
      return result;
    }
  }

  // project: every support point fixes the message as a function of the plain inputs
  std::vector<int> in_idx;
  std::vector<int> radix;
  for (const auto& in : plain) {
    in_idx.push_back(dist.index_of(in.name()));
    radix.push_back(dist.variables()[in_idx.back()].alphabet);
  }
  const int out_idx = dist.index_of("W_" + edge);
  std::size_t size = 1;
  for (int r : radix) size *= static_cast<std::size_t>(r);
  std::vector<int> table(size, -1);
  for (const auto& [o, p] : dist.pmf()) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < in_idx.size(); ++k) idx = idx * radix[k] + o[in_idx[k]];
    if (table[idx] >= 0 && table[idx] != o[out_idx]) {
      result.reason = "W_" + edge + " is not a function of its non-random inputs";
      return result;
    }
    table[idx] = o[out_idx];
  }
  // unreachable inputs: fall back to the original table at randomness symbol 0
  const int rand_alph = randomized ? code.randomness_at(tail)->alphabet() : 1;
  for (std::size_t idx = 0; idx < size; ++idx)
    if (table[idx] < 0) table[idx] = enc.table[idx * rand_alph];

  result.ok = true;
  result.encoder = LocalEncoder{edge, plain, std::move(table)};
  return result;
}

}  // namespace entroflow
