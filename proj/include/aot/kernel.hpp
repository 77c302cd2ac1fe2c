#pragma once

// LCF-style proof kernel. Theorem values can only be minted by the rule
// functions in this header (plus an explicitly named unchecked escape hatch
// used by audit tests). The catalog:
//
//   propositional schemata  P1  A -> (B -> A)
//                           P2  (A -> (B -> C)) -> ((A -> B) -> (A -> C))
//                           P3  (~B -> ~A) -> ((~B -> A) -> B)
//   AOT schemata            A1  O!x -> box ~exists F. x[F]
//                           A2  exists x.(A!x & forall F.(x[F] <-> phi)),  x not free in phi
//                           A3  x[F] -> box x[F]
//                           A4o O!x & O!y -> (x = y <-> box forall F.(F(x) <-> F(y)))
//                           A4a A!x & A!y -> (x = y <-> box forall F.(x[F] <-> y[F]))
//   modal schemata          K   box(p -> q) -> (box p -> box q)
//                           T   box p -> p
//                           5   dia p -> box dia p
//   quantifier schemata     UI  forall a. phi -> phi[tau/a]   (tau must denote)
//                           QD  forall a.(phi -> psi) -> (forall a. phi -> forall a. psi)
//                           VQ  phi -> forall a. phi          (a not free in phi)
//   rules                   MP, GEN, RN, BETA (strict matrices only), DF
//                           (definitional interchange up to core expansion)

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aot/ast.hpp"
#include "aot/model.hpp"

namespace aot::kernel {

struct KernelError : std::runtime_error {
  explicit KernelError(const std::string& m) : std::runtime_error(m) {}
};

struct Step {
  std::string rule;           // e.g. "p1", "a2", "mp", "gen", "df", "beta"
  std::vector<int> premises;  // indices of earlier steps
  FormulaPtr formula;
};

using Trace = std::vector<Step>;

class Theorem {
 public:
  const FormulaPtr& formula() const { return f_; }
  const Trace& trace() const { return trace_; }

  // Audit fixture only: wraps a formula without derivation. The trace is
  // marked so replay refuses it.
  static Theorem unchecked(FormulaPtr f);

 private:
  Theorem(FormulaPtr f, Trace t) : f_(std::move(f)), trace_(std::move(t)) {}
  FormulaPtr f_;
  Trace trace_;
  friend struct Mint;
};

// --- axiom schemata ---------------------------------------------------------

Theorem axiom_p1(const FormulaPtr& a, const FormulaPtr& b);
Theorem axiom_p2(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c);
Theorem axiom_p3(const FormulaPtr& a, const FormulaPtr& b);

Theorem axiom_a1(const TermPtr& x);
Theorem axiom_a2(const std::string& x, const std::string& F, const FormulaPtr& phi);
Theorem axiom_a3(const TermPtr& x, const TermPtr& rel);
Theorem axiom_a4o(const TermPtr& x, const TermPtr& y);
Theorem axiom_a4a(const TermPtr& x, const TermPtr& y);

Theorem axiom_k(const FormulaPtr& p, const FormulaPtr& q);
Theorem axiom_t(const FormulaPtr& p);
Theorem axiom_5(const FormulaPtr& p);

// tau must be kernel-certified: variables always denote; lambda terms with a
// strict-propositional, description-free matrix denote; descriptions never.
Theorem axiom_ui(const VarRef& v, const FormulaPtr& body, const TermPtr& tau);
Theorem axiom_qdist(const VarRef& v, const FormulaPtr& a, const FormulaPtr& b);
Theorem axiom_vac(const VarRef& v, const FormulaPtr& a);

// --- inference rules --------------------------------------------------------

Theorem mp(const Theorem& major, const Theorem& minor);
Theorem gen(const Theorem& t, const VarRef& v);
Theorem rn(const Theorem& t);

enum class BetaDir { Equiv, Expand, Contract };
Theorem beta_rule(const TermPtr& lam, const TermPtr& t, BetaDir dir = BetaDir::Equiv);

// Definitional interchange: target and t.formula() have alpha-equal core
// expansions.
Theorem df(const Theorem& t, const FormulaPtr& target);

// --- tautology prover -------------------------------------------------------

struct TautFailure {
  bool is_taut = false;
  std::vector<std::pair<std::string, bool>> falsifying;  // atom text -> value
};

struct NotATautology : std::runtime_error {
  TautFailure failure;
  NotATautology(const std::string& m, TautFailure f)
      : std::runtime_error(m), failure(std::move(f)) {}
};

// Truth-table check over the formula's atoms (maximal non-connective
// subformulas).
TautFailure taut_check(const FormulaPtr& f);

// premises |- conclusion as a propositional tautology.
bool taut_consequence(const std::vector<FormulaPtr>& premises, const FormulaPtr& conclusion);

// Derives any propositional tautology through P1-P3 + MP (Kalmar-style),
// with a final df step when the input uses derived connectives. Throws
// NotATautology with a falsifying valuation otherwise.
Theorem taut_prove(const FormulaPtr& f);

// Short direct derivations for common propositional shapes (the generic
// Kalmar route would also find them, at many times the trace size).
Theorem taut_trans(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c);
Theorem taut_contrap(const FormulaPtr& a, const FormulaPtr& b);  // (a->b)->(~b->~a)
Theorem taut_dn_intro(const FormulaPtr& a);                      // a -> ~~a
Theorem taut_dn_elim(const FormulaPtr& a);                       // ~~a -> a

// --- scripted derivations ---------------------------------------------------

// dia exists x. F(x)  ->  exists x. dia F(x), derived from the catalog.
Theorem derive_barcan_diamond();

// --- audits ------------------------------------------------------------------

struct AuditEntry {
  std::string model;
  bool pass;
};
struct AuditReport {
  std::vector<AuditEntry> entries;
  bool all_pass = true;
};

AuditReport soundness_audit(const Theorem& t, const std::vector<const AczelModel*>& models);

// Bounded exhaustive forward search over the catalog: axiom instances
// restricted to the goal's subformula/term pool, then MP/GEN/RN closure up
// to `depth` rounds (formulas deduplicated up to core expansion). Returns
// true if the goal becomes derivable.
struct FirewallStats {
  uint64_t formulas = 0;
  int rounds = 0;
  bool derived = false;
};
FirewallStats firewall_search(const FormulaPtr& goal, int depth, uint64_t max_formulas = 400000);

}  // namespace aot::kernel
