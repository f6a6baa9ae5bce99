#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellsim/core.hpp"

namespace bellsim::selftest {

struct Options {
  std::int64_t n_trials = 20000;  ///< per simulated fixture, capped at 100000
  std::uint64_t seed = 20260809;
  NoiseParams noise;              ///< injected into every simulated fixture
  bool list_only = false;
};

std::vector<std::string> check_names();

/// Runs the oracle-vs-simulation invariant suite, printing one PASS/FAIL
/// line per check plus explanatory notes. Returns 0 iff all checks pass.
int run_all(const Options& opts, std::ostream& os);

}  // namespace bellsim::selftest
