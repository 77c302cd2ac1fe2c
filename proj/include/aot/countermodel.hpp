#pragma once

// Bounded countermodel search: models are enumerated in increasing size
// (cells, then urelement counts, then states/worlds); with state-interp
// variation enabled, every assignment of non-classical operator tables to
// the non-actual states is tried in canonical index order. Candidates are
// evaluated in parallel blocks; the lowest-index hit always wins, so results
// are deterministic.

#include <optional>

#include "aot/ast.hpp"
#include "aot/model.hpp"
#include "aot/semantics.hpp"

namespace aot {

struct SearchBounds {
  int max_ordinary = 1;
  int max_special = 1;
  int max_states = 1;
  int max_worlds = 1;
  bool vary_state_interp = false;
  Budget budget;
};

struct Countermodel {
  ModelConfig config;
  Assignment witness;            // falsifying values for the free variables
  int world = 0;                 // world (at the actual state) where it fails
  uint64_t candidates_tried = 0;
  uint64_t skipped_budget = 0;
};

std::optional<Countermodel> countermodel_search(const FormulaPtr& f, const SearchBounds& bounds);

// Per-state table variants in canonical order (index 0..4095):
// not = idx & 3, impl = (idx >> 2) & 15, box = (idx >> 6) & 3,
// forall_ind = (idx >> 8) & 3, forall_rel = (idx >> 10) & 3.
StateTables state_tables_by_index(uint32_t idx);
constexpr uint32_t kStateTableVariants = 4u * 16u * 4u * 4u * 4u;

}  // namespace aot
