#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "core/code.hpp"
#include "core/entropy.hpp"
#include "core/network.hpp"

namespace entroflow {

using Json = nlohmann::ordered_json;

// Parses text into JSON; syntax errors become ParseError with "line L, column C".
Json parse_json_text(std::string_view text, std::string_view what = "input");
std::string dump(const Json& j);  // two-space indent, trailing newline

// Rationals travel as strings ("3/2", "2", "0.5"); integer numbers are accepted too.
Rational rational_field(const Json& j, const std::string& where);

// {"n": N, "labels": [...], "values": {"{1}": "1", "{1,2}": "2", ...}}
// "n" and "labels" are optional (default labels "1".."n"); every nonempty
// subset must be given.
RationalVector rational_vector_from_json(const Json& j);
Json to_json(const RationalVector& h);
// Entropy vectors are written with decimal doubles.
Json to_json(const EntropyVector& h);

// {"variables": [{"name": "X", "alphabet": 2}], "pmf": [[[0, 1], "1/2"], ...]}
JointDistribution distribution_from_json(const Json& j);
Json to_json(const JointDistribution& d);

NetworkProblem problem_from_json(const Json& j);
NetworkProblem parse_problem(std::string_view text);
Json to_json(const NetworkProblem& p);
std::string serialize(const NetworkProblem& p);

// {"source_alphabets": {"X": 4}, "edge_alphabets": {"e1": 2},
//  "randomness": [{"node": "a", "pmf": ["1/2", "1/2"]}],
//  "encoders": [{"edge": "e1", "inputs": ["T_X"], "table": [0, 0, 1, 1]}]}
// Tables nest one array level per input, first input outermost; an encoder
// without inputs has a bare integer table. The problem supplies alphabets.
NetworkCode code_from_json(const Json& j, const NetworkProblem& problem);
Json to_json(const NetworkCode& code, const NetworkProblem& problem);
VariableRef parse_variable_name(const std::string& name);

Json to_json(const Verdict& v);

Json to_json(const Capacity& c);
Json to_json(const RateCapacityTuple& t);

}  // namespace entroflow
