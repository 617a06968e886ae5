#pragma once

#include <optional>
#include <string>

#include "blockdbg/core/program.hpp"
#include "blockdbg/log/session_log.hpp"

namespace blockdbg {

struct ReplayDivergence {
  std::size_t log_index = 0;  // index into the original log's events
  std::string expected;       // what the log recorded
  std::string actual;         // what the replayed session produced
};

struct ReplayReport {
  bool reproduced = false;
  std::size_t compared = 0;  // breakpoint_hit/pause/output events checked
  std::optional<ReplayDivergence> divergence;

  std::string describe() const;
};

// Re-drives a fresh debug session with the commands recorded in `log` and
// checks that every breakpoint_hit, pause and output event recurs at the
// same block in the same order (timestamps ignored). Throws
// Error{kHashMismatch} when the log was recorded against another program.
ReplayReport replay(const SessionLog& log, const Program& program);

}  // namespace blockdbg
