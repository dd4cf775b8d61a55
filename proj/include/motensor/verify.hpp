#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motensor/tensor.hpp"

namespace motensor {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed() const;
};

struct VerifyOptions {
  int dim = 4;
  int order = 4;
  std::uint64_t seed = 42;
  bool inject_fault = false;  // adds one deliberately failing check
};

/// Cross-checks the structural identities of the family on exact or
/// near-exact paths: certificate reconstruction, rank-one vs closed-form
/// entries, the alternating-sign witness value, the integer factorization
/// of the order-2 member, and the chain objective anchor values.
VerifyReport run_verification(const VerifyOptions& options = {});

Json to_json(const VerifyReport& report);

}  // namespace motensor
