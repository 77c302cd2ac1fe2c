#pragma once

// The kernel catalog sample: named theorem instances checked for validity
// across the finite model family. Used by the `axioms` subcommand and the
// acceptance suite.

#include <string>
#include <vector>

#include "aot/kernel.hpp"
#include "aot/model.hpp"

namespace aot {

struct AxiomInstance {
  std::string name;
  kernel::Theorem theorem;
};

// A named instance per schema, >= 20 in total.
std::vector<AxiomInstance> axiom_suite_instances();

// All configurations with ordinary <= max_ordinary, 1 <= special <=
// max_special, states/worlds <= their caps, whose enumerations fit the
// budget (cells, properties, abstract objects).
std::vector<ModelConfig> model_family(int max_ordinary, int max_special, int max_states,
                                      int max_worlds, const Budget& budget);

}  // namespace aot
