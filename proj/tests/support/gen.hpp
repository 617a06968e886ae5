#pragma once

#include <random>

#include "blockdbg/core/program.hpp"

namespace blockdbg::testing {

struct GenOptions {
  int max_scripts = 3;
  int max_depth = 3;
  int max_seq = 4;
  bool procedures = true;
};

// Random valid, always-terminating program: no forever, repeat_until loops
// count a private variable up to a bound, procedures never recurse.
Program random_program(std::mt19937& rng, const GenOptions& options = {});

// Every block id in script and procedure bodies.
std::vector<BlockId> all_block_ids(const Program& program);

}  // namespace blockdbg::testing
