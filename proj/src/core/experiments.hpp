#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/entropy.hpp"

namespace entroflow {

struct ExperimentCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string name;
  std::vector<ExperimentCheck> checks;
  bool pass() const;
};

// Forced claims of the secure gadget at c=1, d=2 plus a contradicted control.
ExperimentReport run_prop1();

// Incremental gadget for h: the proof chain forces every claim when h is a
// polymatroid; otherwise some stage LP must be infeasible with a verified
// Farkas certificate.
ExperimentReport run_thm1(const RationalVector& h);

// Explicit code for a quasi-uniform distribution: admissible, induces h on
// the V edges, and a tampered copy fails.
ExperimentReport run_thm2(const JointDistribution& q);

// Adhesion demo: unit edge, half-capacity edge (infeasible LP), butterfly.
ExperimentReport run_thm4_demo();

// Seeded property bundles.
ExperimentReport run_soundness(std::uint64_t seed, int trials);
ExperimentReport run_derandomize(std::uint64_t seed, int trials);
ExperimentReport run_delta_linearity(std::uint64_t seed, int trials);
ExperimentReport run_min_cut(std::uint64_t seed, int trials);

}  // namespace entroflow
