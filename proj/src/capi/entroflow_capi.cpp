#include "entroflow.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "core/code.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/gadgets.hpp"
#include "core/json_io.hpp"
#include "core/lp.hpp"

using namespace entroflow;

struct ef_problem {
  NetworkProblem value;
};
struct ef_code {
  NetworkCode value;
};
struct ef_gadget {
  Gadget value;
};
struct ef_report {
  std::string json;
  std::string text;
};

namespace {

thread_local std::string last_error;

void set_error(std::string msg) { last_error = std::move(msg); }

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ef_options defaults() {
  ef_options o;
  ef_options_init(&o);
  return o;
}

using Clock = std::chrono::steady_clock;

// Builds the common report envelope.
class ReportBuilder {
 public:
  ReportBuilder(std::string command, const std::string& inputs, const ef_options& opt)
      : start_(Clock::now()), timing_(opt.timing != 0) {
    json_["command"] = std::move(command);
    json_["inputs_digest"] = fnv1a(inputs);
    json_["verdicts"] = Json::object();
    json_["certificates"] = Json::array();
  }
  Json& verdicts() { return json_["verdicts"]; }
  Json& certificates() { return json_["certificates"]; }
  std::ostringstream& text() { return text_; }

  ef_report* finish(ef_status status) {
    json_["exit_code"] = status;
    if (timing_) json_["timing"] = {{"seconds", std::chrono::duration<double>(Clock::now() - start_).count()}};
    return new ef_report{dump(json_), text_.str()};
  }

 private:
  Json json_;
  std::ostringstream text_;
  Clock::time_point start_;
  bool timing_;
};

// Runs body, mapping exceptions to status codes and the thread's last error.
ef_status guarded(const std::function<ef_status()>& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ParseError& e) {
    set_error(std::string("parse error: ") + e.what());
    return EF_USAGE;
  } catch (const PreconditionError& e) {
    set_error(std::string("precondition: ") + e.what());
    return EF_PRECONDITION;
  } catch (const BudgetExceeded& e) {
    set_error(std::string("budget exceeded: ") + e.what());
    return EF_BUDGET;
  } catch (const CapacityError& e) {
    set_error(std::string("capacity: ") + e.what());
    return EF_CAPACITY;
  } catch (const std::invalid_argument& e) {
    set_error(std::string("invalid input: ") + e.what());
    return EF_USAGE;
  } catch (const nlohmann::json::exception& e) {
    set_error(std::string("invalid input: ") + e.what());
    return EF_USAGE;
  } catch (const std::exception& e) {
    set_error(std::string("internal error: ") + e.what());
    return EF_INTERNAL;
  }
}

bool null_args(std::initializer_list<const void*> ptrs) {
  for (const void* p : ptrs)
    if (!p) {
      set_error("null argument");
      return true;
    }
  return false;
}

std::vector<std::string> split_csv(const char* text) {
  std::vector<std::string> out;
  if (!text) return out;
  std::string cur;
  for (const char* c = text;; ++c) {
    if (*c == ',' || *c == '\0') {
      std::size_t a = cur.find_first_not_of(' '), b = cur.find_last_not_of(' ');
      if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
      cur.clear();
      if (*c == '\0') break;
    } else {
      cur += *c;
    }
  }
  return out;
}

// --- JSON renderings -----------------------------------------------------

Json rational_json(const std::optional<Rational>& r) { return r ? Json(to_string(*r)) : Json(nullptr); }

Json certificate_json(const ShannonLP& lp, const Certificate& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["sense"] = c.maximize ? "maximize" : "minimize";
  if (c.status == LPStatus::kOptimal) j["value"] = to_string(c.value);
  auto vec_json = [&](const RationalVector& h) {
    Json o = Json::object();
    for (std::uint32_t m = 1; m < lp.ground.subset_count(); ++m)
      if (sgn(h[SubsetIndex(m)]) != 0) o[lp.ground.format(SubsetIndex(m))] = to_string(h[SubsetIndex(m)]);
    return o;
  };
  constexpr std::uint32_t kPointLimit = 256;
  if (c.point) {
    if (lp.ground.subset_count() <= kPointLimit)
      j["point"] = vec_json(*c.point);
    else
      j["point"] = "omitted (" + std::to_string(lp.ground.subset_count() - 1) + " coordinates)";
  }
  if (c.ray) j["ray"] = vec_json(*c.ray);
  Json mult = Json::array();
  const std::size_t nc = lp.constraints.size();
  for (std::size_t i = 0; i < c.multipliers.size(); ++i) {
    if (sgn(c.multipliers[i]) == 0) continue;
    const Constraint& k = i < nc ? lp.constraints[i] : c.derived[i - nc];
    Json m;
    m["index"] = i;
    m["family"] = k.origin.family;
    m["detail"] = k.origin.detail;
    m["constraint"] = format_functional(k.functional, lp.ground) +
                      (k.functional.sense == Sense::kZero ? " = 0" : " >= 0");
    m["multiplier"] = to_string(c.multipliers[i]);
    mult.push_back(std::move(m));
  }
  j["multipliers"] = std::move(mult);
  j["pivots"] = c.pivots;
  return j;
}

Json stage_json(const StageReport& s) {
  Json j;
  j["name"] = s.name;
  j["feasible"] = s.feasible;
  j["skipped"] = s.skipped;
  j["notes"] = s.notes;
  Json claims = Json::array();
  for (const auto& c : s.claims)
    claims.push_back({{"claim", c.text},
                      {"verdict", to_string(c.verdict)},
                      {"min", rational_json(c.min)},
                      {"max", rational_json(c.max)},
                      {"certificates_verified", c.certificates_verified}});
  j["claims"] = std::move(claims);
  return j;
}

void stage_text(std::ostringstream& out, const StageReport& s) {
  out << "stage " << (s.name.empty() ? "(unnamed)" : s.name) << (s.skipped ? " [not run]" : s.feasible ? "" : " [LP infeasible]")
      << "\n";
  for (const auto& n : s.notes) out << "  note: " << n << "\n";
  for (const auto& c : s.claims) {
    out << "  " << to_string(c.verdict) << ": " << c.text;
    if (s.feasible)
      out << "  (range [" << (c.min ? to_string(*c.min) : "-inf") << ", " << (c.max ? to_string(*c.max) : "inf")
          << "])";
    out << "\n";
  }
}

Json chain_json(const ProofChain& chain) {
  Json j;
  j["aliases"] = Json::object();
  for (const auto& [k, v] : chain.aliases) j["aliases"][k] = v;
  j["include_randomness"] = chain.include_randomness;
  Json stages = Json::array();
  for (const auto& s : chain.stages)
    stages.push_back({{"name", s.name}, {"ground", s.ground}, {"imports", s.imports}, {"claims", s.claims}});
  j["stages"] = std::move(stages);
  return j;
}

ProofChain chain_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("chain", "expected an object");
  ProofChain chain;
  if (j.contains("aliases"))
    for (const auto& [k, v] : j.at("aliases").items()) chain.aliases[k] = v.get<std::string>();
  if (j.contains("include_randomness")) chain.include_randomness = j.at("include_randomness").get<bool>();
  auto strings = [](const Json& o, const char* key) {
    return o.contains(key) ? o.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
  };
  if (j.contains("stages")) {
    for (const auto& s : j.at("stages"))
      chain.stages.push_back({s.value("name", std::string{}), strings(s, "ground"), strings(s, "imports"),
                              strings(s, "claims")});
  } else if (j.contains("claims")) {
    chain.stages.push_back({"claims", strings(j, "ground"), {}, strings(j, "claims")});
  } else {
    throw ParseError("chain", "expected \"stages\" or \"claims\"");
  }
  return chain;
}

Json contract_json(const ReconstructionContract& c) {
  Json j;
  j["decisions"] = c.decisions;
  j["aliases"] = Json::object();
  for (const auto& [k, v] : c.aliases) j["aliases"][k] = v;
  Json obs = Json::array();
  for (const auto& o : c.obligations) {
    if (o.kind == Obligation::Kind::kCut)
      obs.push_back({{"name", o.name}, {"kind", "cut"}, {"edges", o.edges}, {"from", o.from}, {"to", o.to}});
    else
      obs.push_back({{"name", o.name}, {"kind", "lp"}, {"claim", o.claim}});
  }
  j["obligations"] = std::move(obs);
  j["chain"] = chain_json(c.chain);
  return j;
}

// Variables of an objective expression plus the inputs of their encoders,
// capped at the LP limit: a starting point for --ground.
std::vector<std::string> suggest_ground(const NetworkProblem& p, const std::string& objective, int limit) {
  auto all = lp_variables(p, true);
  std::set<std::string> known(all.begin(), all.end());
  std::vector<std::string> picked;
  auto pick = [&](const std::string& v) {
    if (known.count(v) && std::find(picked.begin(), picked.end(), v) == picked.end()) picked.push_back(v);
  };
  static const std::regex token("[A-Za-z_][A-Za-z0-9_:.]*");
  for (auto it = std::sregex_iterator(objective.begin(), objective.end(), token); it != std::sregex_iterator(); ++it) {
    const std::string t = it->str();
    if (t == "H" || t == "I") continue;
    for (const auto& name : {t, "T_" + t, "W_" + t, "V_" + t}) pick(name);
  }
  ProblemIndex index(p);
  const std::size_t direct = picked.size();
  for (std::size_t k = 0; k < direct; ++k) {
    if (picked[k].rfind("W_", 0) != 0) continue;
    const std::string& tail = index.edge(picked[k].substr(2)).tail;
    for (const auto& s : index.sessions_at(tail)) pick("T_" + s);
    for (const auto& e : index.incoming(tail)) pick("W_" + index.root(e));
    pick("V_" + tail);
  }
  if (picked.empty()) picked = all;
  if (static_cast<int>(picked.size()) > limit) picked.resize(limit);
  return picked;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

RationalVector parse_tuple(const std::string& text, int n) {
  auto inner = text;
  if (!inner.empty() && inner.front() == '(') inner = inner.substr(1);
  if (!inner.empty() && inner.back() == ')') inner.pop_back();
  auto parts = split_csv(inner.c_str());
  if (n == 0)  // infer from 2^n - 1 entries
    while (n < 9 && (std::size_t{1} << n) - 1 < parts.size()) ++n;
  if (n < 1 || n > 8) throw std::invalid_argument("n must be between 1 and 8 for a tuple literal");
  RationalVector h(GroundSet::numbered(n));
  if (parts.size() != h.ground().subset_count() - 1)
    throw std::invalid_argument("tuple needs " + std::to_string(h.ground().subset_count() - 1) + " entries for n=" +
                                std::to_string(n));
  for (std::uint32_t m = 1; m < h.ground().subset_count(); ++m) h.set(SubsetIndex(m), parse_rational(parts[m - 1]));
  return h;
}

}  // namespace

// --- basics -------------------------------------------------------------------

extern "C" {

void ef_options_init(ef_options* o) {
  if (!o) return;
  o->max_support = 2;
  o->tol = 1e-9;
  o->budget = 0;
  o->alphabet_max = 2;
  o->randomness = 0;
  o->threads = 1;
  o->seed = 1;
  o->trials = 0;
  o->minimize = 0;
  o->timing = 1;
}

const char* ef_version(void) { return "0.1.0"; }

const char* ef_status_name(ef_status s) {
  switch (s) {
    case EF_OK: return "ok";
    case EF_NEGATIVE: return "negative";
    case EF_PRECONDITION: return "precondition";
    case EF_BUDGET: return "budget";
    case EF_USAGE: return "usage";
    case EF_CAPACITY: return "capacity";
    case EF_INTERNAL: return "internal";
    default: return "unknown";
  }
}

const char* ef_last_error(void) { return last_error.c_str(); }

void ef_string_free(char* text) { std::free(text); }

ef_status ef_problem_from_json(const char* text, ef_problem** out) {
  if (null_args({text, out})) return EF_USAGE;
  *out = nullptr;
  return guarded([&] {
    NetworkProblem parsed = parse_problem(text);
    require_valid(parsed);
    *out = new ef_problem{std::move(parsed)};
    return EF_OK;
  });
}

ef_status ef_problem_to_json(const ef_problem* problem, char** out) {
  if (null_args({problem, out})) return EF_USAGE;
  return guarded([&] {
    *out = copy_string(serialize(problem->value));
    return EF_OK;
  });
}

void ef_problem_free(ef_problem* problem) { delete problem; }

ef_status ef_code_from_json(const ef_problem* problem, const char* text, ef_code** out) {
  if (null_args({problem, text, out})) return EF_USAGE;
  *out = nullptr;
  return guarded([&] {
    *out = new ef_code{code_from_json(parse_json_text(text, "code"), problem->value)};
    return EF_OK;
  });
}

ef_status ef_code_to_json(const ef_problem* problem, const ef_code* code, char** out) {
  if (null_args({problem, code, out})) return EF_USAGE;
  return guarded([&] {
    *out = copy_string(dump(to_json(code->value, problem->value)));
    return EF_OK;
  });
}

void ef_code_free(ef_code* code) { delete code; }

const char* ef_report_json(const ef_report* r) { return r ? r->json.c_str() : ""; }
const char* ef_report_text(const ef_report* r) { return r ? r->text.c_str() : ""; }
void ef_report_free(ef_report* r) { delete r; }

// --- commands -------------------------------------------------------------------

ef_status ef_check_entropic(const char* h_json, const ef_options* options, ef_report** report) {
  if (null_args({h_json, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    RationalVector exact = rational_vector_from_json(parse_json_text(h_json, "entropy vector"));
    EntropyVector h = to_double(exact);
    ReportBuilder rb("check-entropic",
                     dump(to_json(exact)) + "max_support=" + std::to_string(opt.max_support) +
                         " tol=" + std::to_string(opt.tol),
                     opt);
    auto& out = rb.text();
    PolymatroidReport poly = is_polymatroid(h, opt.tol);
    rb.verdicts()["polymatroid"] = poly.ok;
    if (!poly.ok) {
      rb.verdicts()["violations"] = poly.violations;
      out << "not a polymatroid (" << poly.violations.size() << " violated inequalities)\n";
      for (std::size_t i = 0; i < poly.violations.size() && i < 10; ++i) out << "  " << poly.violations[i] << "\n";
      *report = rb.finish(EF_PRECONDITION);
      return EF_PRECONDITION;
    }
    EntropicSearchOptions so;
    so.max_support = opt.max_support;
    so.tol = opt.tol;
    if (opt.budget) so.budget = opt.budget;
    EntropicSearchResult r = entropic_search(h, so);
    const char* status = r.status == SearchStatus::kFound           ? "found"
                         : r.status == SearchStatus::kBudgetExceeded ? "budget_exceeded"
                         : r.status == SearchStatus::kExhausted      ? "not_found"
                                                                     : "not_polymatroid";
    rb.verdicts()["search"] = status;
    rb.verdicts()["candidates"] = r.candidates;
    rb.verdicts()["notes"] = r.notes;
    if (r.witness) rb.certificates().push_back({{"witness", to_json(*r.witness)}});
    ef_status st = EF_BUDGET;
    if (r.status == SearchStatus::kFound) {
      st = EF_OK;
      out << "entropic: witness found after " << r.candidates << " candidates\n";
    } else if (r.status == SearchStatus::kNotPolymatroid) {
      st = EF_PRECONDITION;
      out << "not a polymatroid\n";
    } else if (r.status == SearchStatus::kExhausted) {
      out << "no witness within alphabet bound " << opt.max_support
          << " (search exhausted; this does not show h is non-entropic)\n";
    } else {
      out << "budget exceeded after " << r.candidates << " candidates\n";
    }
    *report = rb.finish(st);
    return st;
  });
}

ef_status ef_lp_bound(const ef_problem* problem, const char* objective, const char* ground,
                      const ef_options* options, ef_report** report) {
  if (null_args({problem, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  const std::string expr = objective ? objective : "";
  return guarded([&] {
    const NetworkProblem& p = problem->value;
    LPOptions lo;
    lo.ground = split_csv(ground);
    ReportBuilder rb("lp-bound",
                     serialize(p) + "objective=" + expr + " ground=" + join(lo.ground, ",") +
                         (opt.minimize ? " minimize" : " maximize"),
                     opt);
    auto& out = rb.text();
    ShannonLP lp;
    try {
      lp = build_shannon_lp(p, lo);
    } catch (const CapacityError& e) {
      auto suggestion = suggest_ground(p, expr, kGroundLimit);
      rb.verdicts()["error"] = e.what();
      rb.verdicts()["suggested_ground"] = suggestion;
      out << e.what() << "\nrestrict to a subnetwork, e.g. --ground " << join(suggestion, ",") << "\n";
      set_error(e.what());
      *report = rb.finish(EF_CAPACITY);
      return EF_CAPACITY;
    }
    rb.verdicts()["ground"] = lp.ground.labels();
    rb.verdicts()["constraints"] = lp.constraints.size();
    Certificate c;
    LinearFunctional f;
    if (expr.empty()) {
      c = feasibility(lp);
    } else {
      f = parse_info_expr(expr, lp.ground).functional;
      c = opt.minimize ? minimize(lp, f) : maximize(lp, f);
    }
    const bool verified = verify_certificate(lp, f, c);
    rb.verdicts()["status"] = to_string(c.status);
    if (!expr.empty()) rb.verdicts()["objective"] = format_functional(f, lp.ground);
    if (c.status == LPStatus::kOptimal && !expr.empty()) rb.verdicts()["value"] = to_string(c.value);
    rb.verdicts()["certificate_verified"] = verified;
    rb.certificates().push_back(certificate_json(lp, c));

    out << "ground: " << join(lp.ground.labels(), " ") << " (" << lp.constraints.size() << " constraints)\n";
    if (c.status == LPStatus::kInfeasible) {
      out << "LP infeasible";
    } else if (expr.empty()) {
      out << "LP feasible";
    } else if (c.status == LPStatus::kUnbounded) {
      out << (opt.minimize ? "min " : "max ") << expr << " is unbounded";
    } else {
      out << (opt.minimize ? "min " : "max ") << expr << " = " << to_string(c.value);
    }
    out << " (certificate " << (verified ? "verified" : "NOT verified") << ")\n";
    if (!verified) {
      set_error("certificate failed verification");
      *report = rb.finish(EF_INTERNAL);
      return EF_INTERNAL;
    }
    const ef_status st = c.status == LPStatus::kInfeasible ? EF_NEGATIVE : EF_OK;
    *report = rb.finish(st);
    return st;
  });
}

ef_status ef_lp_verify_chain(const ef_problem* problem, const char* chain_text, const ef_options* options,
                             ef_report** report) {
  if (null_args({problem, chain_text, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    Json cj = parse_json_text(chain_text, "chain");
    // a gadget contract sidecar carries its chain under "chain"
    ProofChain chain = chain_from_json(cj.contains("chain") ? cj.at("chain") : cj);
    ReportBuilder rb("lp-bound --verify-chain", serialize(problem->value) + dump(chain_json(chain)), opt);
    ChainReport r;
    try {
      r = verify_proof_chain(problem->value, chain);
    } catch (const CapacityError& e) {
      rb.verdicts()["error"] = e.what();
      rb.text() << e.what() << "\ngive each stage a \"ground\" of at most " << kGroundLimit << " variables\n";
      set_error(e.what());
      *report = rb.finish(EF_CAPACITY);
      return EF_CAPACITY;
    }
    Json stages = Json::array();
    std::size_t forced = 0, total = 0;
    bool verified = true;
    for (const auto& s : r.stages) {
      stages.push_back(stage_json(s));
      stage_text(rb.text(), s);
      for (const auto& c : s.claims) {
        ++total;
        forced += c.verdict == ClaimVerdict::kForced;
        verified = verified && c.certificates_verified;
      }
    }
    rb.verdicts()["all_forced"] = r.all_forced();
    rb.verdicts()["forced"] = forced;
    rb.verdicts()["claims"] = total;
    rb.verdicts()["certificates_verified"] = verified;
    rb.certificates() = std::move(stages);
    rb.text() << forced << "/" << total << " claims forced\n";
    const ef_status st = r.all_forced() ? EF_OK : EF_NEGATIVE;
    *report = rb.finish(st);
    return st;
  });
}

ef_status ef_lp_export(const ef_problem* problem, const char* ground, char** out) {
  if (null_args({problem, out})) return EF_USAGE;
  return guarded([&] {
    LPOptions lo;
    lo.ground = split_csv(ground);
    *out = copy_string(export_lp(build_shannon_lp(problem->value, lo)));
    return EF_OK;
  });
}

ef_status ef_search_code(const ef_problem* problem, const ef_options* options, ef_report** report, ef_code** found) {
  if (null_args({problem, report})) return EF_USAGE;
  *report = nullptr;
  if (found) *found = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    SearchOptions so;
    so.alphabet_max = opt.alphabet_max;
    so.allow_randomness = opt.randomness != 0;
    so.threads = opt.threads < 1 ? 1 : opt.threads;
    if (opt.budget) so.budget = opt.budget;
    ReportBuilder rb("search-code",
                     serialize(problem->value) + "alphabet_max=" + std::to_string(so.alphabet_max) +
                         " randomness=" + std::to_string(so.allow_randomness) + " budget=" + std::to_string(so.budget),
                     opt);
    SearchResult r = exhaustive_search(problem->value, so);
    const char* status = r.status == SearchResult::Status::kFound  ? "found"
                         : r.status == SearchResult::Status::kNone ? "none"
                                                                   : "budget_exceeded";
    rb.verdicts()["status"] = status;
    rb.verdicts()["tables_tried"] = r.nodes;
    rb.verdicts()["fraction_searched"] = r.fraction_searched;
    rb.verdicts()["raw_space"] = r.raw_space;
    rb.verdicts()["notes"] = r.notes;
    auto& out = rb.text();
    ef_status st = EF_NEGATIVE;
    if (r.code) {
      rb.certificates().push_back({{"code", to_json(*r.code, problem->value)}});
      if (found) *found = new ef_code{*r.code};
      out << "admissible code found after " << r.nodes << " encoder tables\n" << dump(to_json(*r.code, problem->value));
      st = EF_OK;
    } else if (r.status == SearchResult::Status::kNone) {
      out << "no admissible code with alphabets <= " << so.alphabet_max
          << (so.allow_randomness ? " (randomness allowed)" : " (deterministic)") << "; searched fraction "
          << r.fraction_searched << "\n";
    } else {
      out << "budget exceeded after " << r.nodes << " encoder tables; searched fraction " << r.fraction_searched
          << "\n";
      st = EF_BUDGET;
    }
    for (const auto& n : r.notes) out << "note: " << n << "\n";
    *report = rb.finish(st);
    return st;
  });
}

ef_status ef_check_code(const ef_problem* problem, const ef_code* code, const ef_options* options,
                        ef_report** report) {
  if (null_args({problem, code, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    ReportBuilder rb("check-code", serialize(problem->value) + dump(to_json(code->value, problem->value)), opt);
    Verdict v = opt.budget ? check_admissible(problem->value, code->value, opt.budget)
                           : check_admissible(problem->value, code->value);
    rb.verdicts() = to_json(v);
    auto& out = rb.text();
    out << (v.admissible ? "admissible" : "not admissible") << "\n";
    for (const auto& r : v.reasons) out << "  " << to_string(r.kind) << ": " << r.detail << "\n";
    const ef_status st = v.admissible ? EF_OK : EF_NEGATIVE;
    *report = rb.finish(st);
    return st;
  });
}

ef_status ef_gadget_incremental(const char* h_json, ef_gadget** out) {
  if (null_args({h_json, out})) return EF_USAGE;
  *out = nullptr;
  return guarded([&] {
    *out = new ef_gadget{build_incremental(rational_vector_from_json(parse_json_text(h_json, "entropy vector")))};
    return EF_OK;
  });
}

ef_status ef_gadget_secure(const char* c, const char* d, ef_gadget** out) {
  if (null_args({c, d, out})) return EF_USAGE;
  *out = nullptr;
  return guarded([&] {
    *out = new ef_gadget{build_secure(parse_rational(c), parse_rational(d))};
    return EF_OK;
  });
}

ef_status ef_gadget_adhere(const ef_problem* inner, ef_gadget** out) {
  if (null_args({inner, out})) return EF_USAGE;
  *out = nullptr;
  return guarded([&] {
    *out = new ef_gadget{adhere(inner->value)};
    return EF_OK;
  });
}

ef_status ef_gadget_problem(const ef_gadget* gadget, ef_problem** out) {
  if (null_args({gadget, out})) return EF_USAGE;
  return guarded([&] {
    *out = new ef_problem{gadget->value.problem};
    return EF_OK;
  });
}

ef_status ef_gadget_contract_json(const ef_gadget* gadget, char** out) {
  if (null_args({gadget, out})) return EF_USAGE;
  return guarded([&] {
    *out = copy_string(dump(contract_json(gadget->value.contract)));
    return EF_OK;
  });
}

ef_status ef_gadget_check(const ef_gadget* gadget, const ef_options* options, ef_report** report) {
  if (null_args({gadget, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    ReportBuilder rb("gadget check", serialize(gadget->value.problem) + dump(contract_json(gadget->value.contract)), opt);
    ContractReport c = check_contract(gadget->value);
    Json obs = Json::array();
    auto& out = rb.text();
    for (const auto& r : c.results) {
      obs.push_back({{"name", r.name}, {"ok", r.ok}, {"detail", r.detail}});
      out << (r.ok ? "ok    " : "FAIL  ") << r.name << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
    }
    rb.verdicts()["ok"] = c.ok;
    rb.verdicts()["obligations"] = std::move(obs);
    for (const auto& s : c.chain.stages) rb.certificates().push_back(stage_json(s));
    out << (c.ok ? "contract holds" : "contract violated") << "\n";
    const ef_status st = c.ok ? EF_OK : EF_NEGATIVE;
    *report = rb.finish(st);
    return st;
  });
}

void ef_gadget_free(ef_gadget* gadget) { delete gadget; }

ef_status ef_verify(const char* name, const char* args_json, const ef_options* options, ef_report** report) {
  if (null_args({name, report})) return EF_USAGE;
  *report = nullptr;
  const ef_options opt = options ? *options : defaults();
  return guarded([&] {
    const std::string n = name;
    Json args = args_json && *args_json ? parse_json_text(args_json, "arguments") : Json::object();
    auto trials = [&](int fallback) { return opt.trials > 0 ? opt.trials : fallback; };
    std::string inputs = n + dump(args);
    ExperimentReport r;
    if (n == "prop1") {
      r = run_prop1();
    } else if (n == "thm1") {
      if (!args.contains("h")) throw std::invalid_argument("thm1 needs an entropy vector h");
      RationalVector h = args.at("h").is_string() ? parse_tuple(args.at("h").get<std::string>(), args.value("n", 0))
                                                  : rational_vector_from_json(args.at("h"));
      if (args.contains("n") && args.at("n").get<int>() != h.size())
        throw std::invalid_argument("n does not match the entropy vector");
      inputs = n + dump(to_json(h));
      r = run_thm1(h);
    } else if (n == "thm2") {
      if (!args.contains("q")) throw std::invalid_argument("thm2 needs a distribution q");
      r = run_thm2(distribution_from_json(args.at("q")));
    } else if (n == "thm4-demo") {
      r = run_thm4_demo();
    } else if (n == "soundness") {
      r = run_soundness(opt.seed, trials(1000));
    } else if (n == "derandomize") {
      r = run_derandomize(opt.seed, trials(500));
    } else if (n == "delta-linearity") {
      r = run_delta_linearity(opt.seed, trials(100));
    } else if (n == "min-cut") {
      r = run_min_cut(opt.seed, trials(50));
    } else {
      set_error("unknown experiment: " + n +
                " (expected prop1, thm1, thm2, thm4-demo, soundness, derandomize, delta-linearity, min-cut)");
      return EF_USAGE;
    }
    if (n == "soundness" || n == "derandomize" || n == "delta-linearity" || n == "min-cut")
      inputs += " seed=" + std::to_string(opt.seed) + " trials=" + std::to_string(opt.trials);
    ReportBuilder rb("verify " + n, inputs, opt);
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      rb.text() << (c.pass ? "pass  " : "FAIL  ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    }
    rb.verdicts()["pass"] = r.pass();
    rb.verdicts()["checks"] = std::move(checks);
    rb.text() << n << ": " << (r.pass() ? "pass" : "FAIL") << "\n";
    const ef_status st = r.pass() ? EF_OK : EF_NEGATIVE;
    *report = rb.finish(st);
    return st;
  });
}

}  // extern "C"
