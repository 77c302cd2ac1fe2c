#pragma once

// Line-oriented proof traces: one step per line,
//     <idx> <rule> <comma-separated premises or -> <formula>
// Replay validates every step. Kernel rules are always accepted; the
// extended rules used by the paradox reconstruction (assume, ei, reductio,
// taut, qdual, refl, subst_id, ui) are classically admissible and accepted
// whenever `allow_extended` is set; `nbeta` (naive beta-conversion) and `ui`
// with a non-denoting term are unsound for this logic and require
// `enable_unsound`.

#include <optional>
#include <set>
#include <string>

#include "aot/kernel.hpp"

namespace aot::kernel {

std::string serialize_trace(const Trace& t);
Trace parse_trace(const std::string& text);

struct ReplayOptions {
  bool allow_extended = true;
  bool enable_unsound = false;
};

struct ReplayResult {
  bool ok = false;
  std::string error;           // first failure, with step index
  FormulaPtr conclusion;       // last step's formula when ok
  std::set<int> open_hypotheses;  // assume-steps the conclusion depends on
  bool kernel_only = true;     // no extended/unsound rules used
};

ReplayResult replay_trace(const Trace& t, const ReplayOptions& opts = {});

}  // namespace aot::kernel
