#pragma once

#include "aot/ast.hpp"

namespace aot {

// Renames bound variables that clash with free variables or with enclosing
// binders (deterministic primes: v, v', v'').
FormulaPtr normalize_bound_names(const FormulaPtr& f);

// Capture-avoiding substitution of `t` for the free variable `v`.
// Throws SortError if t does not fit v's sort/arity.
FormulaPtr substitute(const FormulaPtr& f, const VarRef& v, const TermPtr& t);
FormulaPtr substitute_ind(const FormulaPtr& f, const std::string& var, const TermPtr& t);
FormulaPtr substitute_rel(const FormulaPtr& f, const std::string& var, int arity, const TermPtr& t);

struct UnsupportedArityError : std::runtime_error {
  explicit UnsupportedArityError(const std::string& m) : std::runtime_error(m) {}
};

// Replaces every defined identity by its definiens:
//   x = y   ~>  (O!x & O!y & box forall F.(F(x) <-> F(y)))
//             | (A!x & A!y & box forall F.(x[F] <-> y[F]))
//   F = G   ~>  box forall x.(x[F] <-> x[G])
// Total and idempotent; throws UnsupportedArityError for relation identity
// of arity != 1.
FormulaPtr expand_identity(const FormulaPtr& f);

// Rewrites into the core fragment {Not, Impl, Box, ForallInd, ForallRel,
// Exe, Enc}. Identities are expanded unless keep_identity is set (the
// evaluator keeps them on fully classical models where the definiens
// reduces to value equality).
FormulaPtr expand_core(const FormulaPtr& f, bool keep_identity = false);

enum class ClassifyMode { Legacy, Strict };

// Propositional-formula check for lambda matrices: no encoding subformulas.
// Legacy mode ignores encodings nested inside definite-description matrices;
// strict mode does not. Defined identities are expanded first, since their
// definientia contain encoding clauses.
bool classify_propositional(const FormulaPtr& f, ClassifyMode mode);

// True if the formula contains a Description term anywhere.
bool contains_description(const FormulaPtr& f);

}  // namespace aot
