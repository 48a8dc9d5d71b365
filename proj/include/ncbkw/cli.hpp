#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncbkw/json_io.hpp"

namespace ncbkw {

// Resolved invocation. `command` is one of: choi, check-map, algebra,
// extend, bkw, spread, popa, hyperrigid, examples.
struct RunConfig {
  std::string command;
  std::optional<std::string> input_path;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::optional<std::string> output;
  std::string format = "json";
  int jobs = 1;
  std::optional<std::string> example_name;
};

// Exit codes: 0 = verdict computed (whatever it is), 1 = example
// corpus mismatch, 2 = input/parse error, 3 = solver UNDECIDED/STALLED.
int run(const RunConfig& config);

// Flag parsing front end for main().
int run_cli(int argc, const char* const* argv);

// Built-in example corpus: problem JSON plus the expected report fields
// (compared exactly by the `examples` command).
struct BundledExample {
  const char* name;
  const char* command;
  const char* input;
  const char* expected;
};
const std::vector<BundledExample>& bundled_examples();

}  // namespace ncbkw
