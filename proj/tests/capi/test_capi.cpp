#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "entroflow.h"

#ifndef ENTROFLOW_DATA_DIR
#error "ENTROFLOW_DATA_DIR must be defined"
#endif

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ENTROFLOW_DATA_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ef_options quiet() {
  ef_options o;
  ef_options_init(&o);
  o.timing = 0;
  return o;
}

struct Problem {
  ef_problem* p = nullptr;
  explicit Problem(const std::string& file) {
    EXPECT_EQ(ef_problem_from_json(slurp(file).c_str(), &p), EF_OK) << ef_last_error();
  }
  ~Problem() { ef_problem_free(p); }
};

struct Report {
  ef_report* r = nullptr;
  ~Report() { ef_report_free(r); }
  nlohmann::ordered_json json() const { return nlohmann::ordered_json::parse(ef_report_json(r)); }
};

std::vector<std::string> keys(const nlohmann::ordered_json& j) {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.push_back(it.key());
  return out;
}

}  // namespace

TEST(CApi, Basics) {
  EXPECT_STRNE(ef_version(), "");
  EXPECT_STREQ(ef_status_name(EF_CAPACITY), "capacity");
  ef_options o;
  ef_options_init(&o);
  EXPECT_EQ(o.max_support, 2);
  EXPECT_EQ(o.timing, 1);
  ef_string_free(nullptr);
  ef_report_free(nullptr);
  ef_problem_free(nullptr);
}

TEST(CApi, NullAndMalformed) {
  ef_problem* p = nullptr;
  EXPECT_EQ(ef_problem_from_json(nullptr, &p), EF_USAGE);
  EXPECT_EQ(ef_problem_from_json("{not json", &p), EF_USAGE);
  EXPECT_EQ(p, nullptr);
  EXPECT_STRNE(ef_last_error(), "");
  // a cycle is a model error, also usage
  EXPECT_EQ(ef_problem_from_json(R"({"nodes":["a","b"],"edges":[{"id":"x","tail":"a","head":"b","capacity":"1"},
      {"id":"y","tail":"b","head":"a","capacity":"1"}],"sessions":[]})",
                                 &p),
            EF_USAGE);
}

TEST(CApi, ProblemRoundTrip) {
  Problem a("butterfly.json");
  char* text = nullptr;
  ASSERT_EQ(ef_problem_to_json(a.p, &text), EF_OK);
  ef_problem* b = nullptr;
  ASSERT_EQ(ef_problem_from_json(text, &b), EF_OK);
  char* again = nullptr;
  ASSERT_EQ(ef_problem_to_json(b, &again), EF_OK);
  EXPECT_STREQ(text, again);
  ef_string_free(text);
  ef_string_free(again);
  ef_problem_free(b);
}

TEST(CApi, CheckEntropicStatuses) {
  ef_options o = quiet();
  Report ok, bad;
  EXPECT_EQ(ef_check_entropic(slurp("h_112.json").c_str(), &o, &ok.r), EF_OK);
  EXPECT_EQ(ef_check_entropic(slurp("h_113.json").c_str(), &o, &bad.r), EF_PRECONDITION);
  auto j = bad.json();
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_EQ(ok.json()["exit_code"], 0);
  Report garbage;
  EXPECT_EQ(ef_check_entropic("[1,2", &o, &garbage.r), EF_USAGE);
}

TEST(CApi, ReportEnvelope) {
  Problem p("butterfly.json");
  ef_options o = quiet();
  Report r;
  ASSERT_EQ(ef_lp_bound(p.p, "H(X)", nullptr, &o, &r.r), EF_OK) << ef_last_error();
  auto j = r.json();
  EXPECT_EQ(keys(j), (std::vector<std::string>{"command", "inputs_digest", "verdicts", "certificates", "exit_code"}));
  ef_options t;
  ef_options_init(&t);
  Report timed;
  ASSERT_EQ(ef_lp_bound(p.p, "H(X)", nullptr, &t, &timed.r), EF_OK);
  EXPECT_EQ(keys(timed.json()).back(), "timing");
  EXPECT_STRNE(ef_report_text(r.r), "");
}

TEST(CApi, Deterministic) {
  Problem p("secure_1_2.json");
  ef_options o = quiet();
  std::string first;
  for (int i = 0; i < 3; ++i) {
    Report r;
    ASSERT_EQ(ef_lp_verify_chain(p.p, slurp("secure_1_2.contract.json").c_str(), &o, &r.r), EF_OK) << ef_last_error();
    if (i == 0) first = ef_report_json(r.r);
    EXPECT_EQ(first, ef_report_json(r.r));
  }
}

TEST(CApi, LpBoundStatuses) {
  Problem edge("single_edge_rate2.json");
  ef_options o = quiet();
  Report infeasible;
  EXPECT_EQ(ef_lp_bound(edge.p, nullptr, nullptr, &o, &infeasible.r), EF_NEGATIVE);
  EXPECT_EQ(infeasible.json()["exit_code"], 1);

  Problem b("butterfly.json");
  Report bad_expr, bad_ground;
  EXPECT_EQ(ef_lp_bound(b.p, "H(nope)", nullptr, &o, &bad_expr.r), EF_USAGE);
  EXPECT_EQ(ef_lp_bound(b.p, "H(X)", "T_X,W_zz", &o, &bad_ground.r), EF_USAGE);

  // the adhered butterfly is too large for a single exact LP
  ef_gadget* g = nullptr;
  ASSERT_EQ(ef_gadget_adhere(b.p, &g), EF_OK);
  ef_problem* big = nullptr;
  ASSERT_EQ(ef_gadget_problem(g, &big), EF_OK);
  Report cap;
  EXPECT_EQ(ef_lp_bound(big, nullptr, nullptr, &o, &cap.r), EF_CAPACITY);
  ASSERT_NE(cap.r, nullptr);
  EXPECT_EQ(cap.json()["exit_code"], 65);
  ef_problem_free(big);
  ef_gadget_free(g);
}

TEST(CApi, SearchAndCheck) {
  Problem p("secure_1_2.json");
  ef_options o = quiet();
  Report none;
  ef_code* code = nullptr;
  EXPECT_EQ(ef_search_code(p.p, &o, &none.r, &code), EF_NEGATIVE);
  EXPECT_EQ(code, nullptr);

  o.randomness = 1;
  Report found;
  ASSERT_EQ(ef_search_code(p.p, &o, &found.r, &code), EF_OK);
  ASSERT_NE(code, nullptr);
  Report checked;
  EXPECT_EQ(ef_check_code(p.p, code, &o, &checked.r), EF_OK);

  char* text = nullptr;
  ASSERT_EQ(ef_code_to_json(p.p, code, &text), EF_OK);
  ef_code* back = nullptr;
  ASSERT_EQ(ef_code_from_json(p.p, text, &back), EF_OK);
  Report again;
  EXPECT_EQ(ef_check_code(p.p, back, &o, &again.r), EF_OK);
  ef_string_free(text);
  ef_code_free(back);
  ef_code_free(code);

  o.randomness = 0;
  o.budget = 3;
  Report budget;
  EXPECT_EQ(ef_search_code(p.p, &o, &budget.r, nullptr), EF_BUDGET);
}

TEST(CApi, Gadgets) {
  ef_gadget* g = nullptr;
  EXPECT_EQ(ef_gadget_secure("2", "1", &g), EF_USAGE);
  EXPECT_EQ(ef_gadget_secure("x", "1", &g), EF_USAGE);
  ASSERT_EQ(ef_gadget_secure("1", "2", &g), EF_OK);
  ef_options o = quiet();
  Report r;
  EXPECT_EQ(ef_gadget_check(g, &o, &r.r), EF_OK);
  char* contract = nullptr;
  ASSERT_EQ(ef_gadget_contract_json(g, &contract), EF_OK);
  EXPECT_NE(std::string(contract).find("decisions"), std::string::npos);
  ef_string_free(contract);
  ef_gadget_free(g);

  ef_gadget* inc = nullptr;
  EXPECT_EQ(ef_gadget_incremental(slurp("h_112.json").c_str(), &inc), EF_OK);
  ef_gadget_free(inc);
}

TEST(CApi, Verify) {
  ef_options o = quiet();
  Report unknown;
  EXPECT_EQ(ef_verify("nope", "{}", &o, &unknown.r), EF_USAGE);
  Report demo;
  EXPECT_EQ(ef_verify("thm4-demo", "{}", &o, &demo.r), EF_OK);
  Report q;
  std::string args = "{\"q\": " + slurp("twobits.json") + "}";
  EXPECT_EQ(ef_verify("thm2", args.c_str(), &o, &q.r), EF_OK);
  Report t1;
  EXPECT_EQ(ef_verify("thm1", R"x({"h": "(1,1,3)"})x", &o, &t1.r), EF_OK);
}
