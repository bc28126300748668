#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "entroflow.h"

namespace {

struct Global {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "text";
  bool no_timing = false;
};

class Failure {
 public:
  Failure(int code, std::string msg) : code(code), message(std::move(msg)) {}
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(EF_USAGE, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure(EF_USAGE, "cannot write " + path);
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(p); }
};
using Problem = Owned<ef_problem, ef_problem_free>;
using Code = Owned<ef_code, ef_code_free>;
using Gadget = Owned<ef_gadget, ef_gadget_free>;
using Report = Owned<ef_report, ef_report_free>;

struct String {
  char* p = nullptr;
  ~String() { ef_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

void check(ef_status s) {
  if (s != EF_OK) throw Failure(s, ef_last_error());
}

std::uint64_t env_budget() {
  const char* v = std::getenv("ENTROFLOW_BUDGET");
  if (!v || !*v) return 0;
  char* end = nullptr;
  unsigned long long b = std::strtoull(v, &end, 10);
  if (*end != '\0' || b == 0) throw Failure(EF_USAGE, std::string("ENTROFLOW_BUDGET must be a positive integer, got ") + v);
  return b;
}

ef_options base_options(const Global& g) {
  ef_options o;
  ef_options_init(&o);
  o.seed = g.seed;
  o.threads = g.threads;
  o.timing = g.no_timing ? 0 : 1;
  o.budget = env_budget();
  return o;
}

// Prints the report, passing the command's status through.
int emit(const Global& g, ef_status status, const Report& report) {
  if (!report.p) throw Failure(status, ef_last_error());
  std::cout << (g.format == "json" ? ef_report_json(report.p) : ef_report_text(report.p));
  if (status != EF_OK && *ef_last_error()) std::cerr << "entroflow: " << ef_last_error() << "\n";
  return status;
}

void load_problem(const std::string& path, Problem& p) { check(ef_problem_from_json(read_file(path).c_str(), &p.p)); }

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tools for network coding problems: entropy vectors, Shannon LP bounds, code search"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for randomized property bundles");
  app.add_option("--threads", g.threads, "Bound on search parallelism")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--no-timing", g.no_timing, "Omit the timing field from JSON reports");
  app.set_version_flag("--version", std::string(ef_version()));

  // check-entropic
  std::string h_file;
  int max_support = 2;
  double tol = 1e-9;
  std::optional<std::uint64_t> budget;
  auto* ce = app.add_subcommand("check-entropic", "Polymatroid check, then a bounded search for a witness distribution");
  ce->add_option("h-file", h_file, "Entropy vector JSON")->required();
  ce->add_option("--max-support", max_support, "Per-variable alphabet bound")->check(CLI::PositiveNumber);
  ce->add_option("--tol", tol, "Entropy comparison tolerance");
  ce->add_option("--budget", budget, "Candidate distributions examined");

  // lp-bound
  std::string problem_file, objective, chain_file, ground;
  bool minimize = false, export_only = false;
  auto* lb = app.add_subcommand("lp-bound", "Exact optimum over the Shannon outer bound, or proof-chain verdicts");
  lb->add_option("problem-file", problem_file, "Network problem JSON")->required();
  auto* obj_opt = lb->add_option("--objective", objective, "Information expression, e.g. \"H(X|W1)\"");
  auto* chain_opt = lb->add_option("--verify-chain", chain_file, "Proof chain JSON (or a gadget contract)");
  obj_opt->excludes(chain_opt);
  lb->add_flag("--minimize", minimize, "Minimize instead of maximize");
  lb->add_option("--ground", ground, "Comma-separated subnetwork variables (T_/W_/V_ names)");
  lb->add_flag("--export", export_only, "Print the LP in plain inequality form instead of solving");

  // search-code
  int alphabet_max = 2;
  std::string randomness = "off", code_out;
  auto* sc = app.add_subcommand("search-code", "Bounded exhaustive search for an admissible code");
  sc->add_option("problem-file", problem_file, "Network problem JSON")->required();
  sc->add_option("--alphabet-max", alphabet_max, "Edge and randomness alphabet bound")->check(CLI::PositiveNumber);
  sc->add_option("--randomness", randomness, "Allow private randomness")->check(CLI::IsMember({"on", "off"}));
  sc->add_option("--budget", budget, "Encoder tables tried");
  sc->add_option("--out", code_out, "Write the code found to this file");

  // check-code
  std::string code_file;
  auto* cc = app.add_subcommand("check-code", "Exact admissibility check of a code");
  cc->add_option("problem-file", problem_file, "Network problem JSON")->required();
  cc->add_option("code-file", code_file, "Network code JSON")->required();

  // verify
  std::string experiment, h_arg, q_file;
  std::optional<int> n_arg;
  int trials = 0;
  auto* vf = app.add_subcommand("verify", "Run a named experiment bundle");
  vf->add_option("name", experiment,
                 "prop1 | thm1 | thm2 | thm4-demo | soundness | derandomize | delta-linearity | min-cut")
      ->required();
  vf->set_help_flag("--help", "Print this help message and exit");  // --h is taken
  vf->add_option("--n", n_arg, "Ground size for thm1");
  vf->add_option("--h", h_arg, "thm1 entropy vector: JSON file or tuple such as (1,1,3)");
  vf->add_option("--q", q_file, "thm2 quasi-uniform distribution JSON");
  vf->add_option("--trials", trials, "Instances for the seeded bundles")->check(CLI::NonNegativeNumber);

  // gadget
  std::string c_arg, d_arg, inner_file, out_file, contract_file;
  bool run_check = false;
  auto* gd = app.add_subcommand("gadget", "Construct a gadget network");
  gd->require_subcommand(1);
  auto* gi = gd->add_subcommand("incremental", "Incremental multicast gadget for an entropy vector");
  gi->set_help_flag("--help", "Print this help message and exit");
  gi->add_option("--h", h_file, "Entropy vector JSON")->required();
  auto* gs = gd->add_subcommand("secure", "Secure multicast gadget");
  gs->add_option("--c", c_arg, "Key rate c")->required();
  gs->add_option("--d", d_arg, "Session rate d")->required();
  auto* ga = gd->add_subcommand("adhere", "Adhere secure copies to an inner multicast problem");
  ga->add_option("--inner", inner_file, "Inner network problem JSON")->required();
  for (auto* sub : {gi, gs, ga}) {
    sub->add_option("--out", out_file, "Write the problem here instead of stdout");
    sub->add_option("--contract", contract_file, "Write the contract sidecar JSON here");
    sub->add_flag("--check", run_check, "Check the contract (cut and LP obligations)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : EF_USAGE;
  }

  try {
    ef_options opt = base_options(g);
    if (budget) opt.budget = *budget;
    Report report;

    if (*ce) {
      opt.max_support = max_support;
      opt.tol = tol;
      ef_status s = ef_check_entropic(read_file(h_file).c_str(), &opt, &report.p);
      return emit(g, s, report);
    }
    if (*lb) {
      Problem p;
      load_problem(problem_file, p);
      if (export_only) {
        String text;
        check(ef_lp_export(p.p, ground.empty() ? nullptr : ground.c_str(), &text.p));
        std::cout << text.str();
        return 0;
      }
      if (*chain_opt) return emit(g, ef_lp_verify_chain(p.p, read_file(chain_file).c_str(), &opt, &report.p), report);
      opt.minimize = minimize ? 1 : 0;
      ef_status s = ef_lp_bound(p.p, objective.c_str(), ground.empty() ? nullptr : ground.c_str(), &opt, &report.p);
      return emit(g, s, report);
    }
    if (*sc) {
      Problem p;
      load_problem(problem_file, p);
      opt.alphabet_max = alphabet_max;
      opt.randomness = randomness == "on" ? 1 : 0;
      Code found;
      ef_status s = ef_search_code(p.p, &opt, &report.p, &found.p);
      if (found.p && !code_out.empty()) {
        String text;
        check(ef_code_to_json(p.p, found.p, &text.p));
        write_file(code_out, text.str());
      }
      return emit(g, s, report);
    }
    if (*cc) {
      Problem p;
      load_problem(problem_file, p);
      Code code;
      check(ef_code_from_json(p.p, read_file(code_file).c_str(), &code.p));
      return emit(g, ef_check_code(p.p, code.p, &opt, &report.p), report);
    }
    if (*vf) {
      std::string args = "{";
      if (n_arg) args += "\"n\": " + std::to_string(*n_arg);
      if (!h_arg.empty()) {
        if (args.size() > 1) args += ", ";
        args += "\"h\": " + (h_arg.front() == '(' ? json_quote(h_arg) : read_file(h_arg));
      }
      if (!q_file.empty()) {
        if (args.size() > 1) args += ", ";
        args += "\"q\": " + read_file(q_file);
      }
      args += "}";
      opt.trials = trials;
      ef_status s = ef_verify(experiment.c_str(), args.c_str(), &opt, &report.p);
      if (s == EF_USAGE && !report.p) throw Failure(s, ef_last_error());
      return emit(g, s, report);
    }
    if (*gd) {
      Gadget gadget;
      if (*gi) {
        check(ef_gadget_incremental(read_file(h_file).c_str(), &gadget.p));
      } else if (*gs) {
        check(ef_gadget_secure(c_arg.c_str(), d_arg.c_str(), &gadget.p));
      } else {
        Problem inner;
        load_problem(inner_file, inner);
        check(ef_gadget_adhere(inner.p, &gadget.p));
      }
      Problem p;
      check(ef_gadget_problem(gadget.p, &p.p));
      String problem_json, contract_json;
      check(ef_problem_to_json(p.p, &problem_json.p));
      check(ef_gadget_contract_json(gadget.p, &contract_json.p));
      if (!contract_file.empty()) write_file(contract_file, contract_json.str());
      if (!out_file.empty())
        write_file(out_file, problem_json.str());
      else if (!run_check)
        std::cout << problem_json.str();
      if (run_check) return emit(g, ef_gadget_check(gadget.p, &opt, &report.p), report);
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "entroflow: " << f.message << "\n";
    return f.code;
  }
  return EF_USAGE;
}
