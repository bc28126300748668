#pragma once

#include <map>
#include <vector>

#include "core/code.hpp"

namespace entroflow::detail {

int variable_alphabet(const ProblemIndex& index, const NetworkCode& code, const VariableRef& v);

// Code lowered to column indices: sessions, then randomness (code order), then
// edges (ancestral order). Assumes a validated code.
struct CompiledCode {
  struct Step {
    int out = -1;
    int copy_from = -1;  // forwarding edge
    std::vector<int> in;
    std::vector<std::size_t> stride;
    const std::vector<int>* table = nullptr;
  };

  CompiledCode(const ProblemIndex& index, const NetworkCode& code);
  void run(std::vector<int>& row) const;

  std::vector<VariableRef> variables;
  std::vector<int> alphabets;
  std::map<VariableRef, int> column;
  std::vector<Step> steps;
  int session_count = 0;
  int randomness_count = 0;

 private:
  void add_variable(const ProblemIndex& index, const NetworkCode& code, const VariableRef& v);
};

}  // namespace entroflow::detail
