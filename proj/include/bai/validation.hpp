#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bai {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

// Deterministic property suite: Lemma-1 subgradient inequality, k/l inverse
// round-trips, h concavity and the z* balance, F(ybar) in [1, K-1], Lemma-12
// monotonicity of t f_i along BC-TE traces, finite-difference gradient checks
// of f_i, the simplex-grid oracle for T*, and worker-permutation replay
// determinism.
std::vector<CheckResult> run_validation_suite(uint64_t seed = 0x5eedf00d);

}  // namespace bai
