#pragma once

// Reconstructions of the Clark-Boolos paradox.
//
// The direct route replays the classical derivation as a checkable trace:
// it needs naive beta-conversion for the banished lambda term (and a
// quantifier instantiation with it), both behind an explicit unsound gate.
// The description route stays semantic: the loophole term
//   [\x. G((the y. y = x & exists F.(x[F] & ~F(x))))]
// passes the legacy propositional classifier, its fiber property agrees
// extensionally with the banished matrix, and beta-conversion for it fails
// in every model with an abstract object that shares its proxy.

#include <string>
#include <vector>

#include "aot/ast.hpp"
#include "aot/kernel.hpp"
#include "aot/model.hpp"
#include "aot/semantics.hpp"

namespace aot {

struct GateError : std::runtime_error {
  explicit GateError(const std::string& m) : std::runtime_error(m) {}
};

enum class ParadoxRoute { Direct, Description };
enum class ParadoxVerdict { ContradictionDerived, BetaCountermodelFound };

struct ParadoxReport {
  ParadoxRoute route;
  ParadoxVerdict verdict;
  std::string model_spec;             // description route
  std::string witness;                // the theta-object (canonical index + encoded codes)
  std::vector<std::string> ledger;    // evaluation ledger lines
  kernel::Trace trace;                // direct route
  std::string summary;
};

// [\x. G((the y. y = x & exists F.(x[F] & ~F(x))))]
TermPtr build_K_via_description(const TermPtr& G);

// The paper's universal property [\z. forall p.(p -> p)].
TermPtr universal_G();

// Checks, for every individual, that the three formulas of the chain
//   G(iy(y = x & exists F(xF & ~Fx)))  ==  exists! y(...)  ==  exists F(xF & ~Fx)
// agree at the actual state and world. Precondition: G is universal in m.
bool verify_equivalence_chain(const AczelModel& m, const TermPtr& G);

ParadoxReport run_clark_boolos_semantic(const AczelModel& m);

// Replays the footnote derivation; requires the unsound gate.
ParadoxReport run_clark_boolos_syntactic(bool enable_unsound_beta);

}  // namespace aot
