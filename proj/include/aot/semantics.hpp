#pragma once

// Denotation and truth evaluation over Aczel models.
//
// Propositions are uint64 cell masks (bit = state * n_worlds + world).
// Evaluation first rewrites the formula into the core fragment, then runs a
// compiled form with integer variable slots; quantifiers and lambda fibers
// scan enumerated domains bit-parallel with early exit, and the big scans go
// through OpenMP when available. A slower reference evaluator lives in
// naive_eval.hpp; the two are compared in the test suite.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aot/ast.hpp"
#include "aot/model.hpp"

namespace aot {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& m) : std::runtime_error(m) {}
};

struct SlotVal {
  enum Kind { Ind, Rel0, Rel1, Rel2 } kind = Ind;
  Individual ind;
  uint64_t code = 0;  // Rel0: proposition bits; Rel1/Rel2: table code

  static SlotVal individual(Individual i) { return {Ind, i, 0}; }
  static SlotVal prop(uint64_t bits) { return {Rel0, {}, bits}; }
  static SlotVal rel1(uint64_t code) { return {Rel1, {}, code}; }
  static SlotVal rel2(uint64_t code) { return {Rel2, {}, code}; }
};

class Assignment {
 public:
  Assignment& set_ind(const std::string& name, Individual i) {
    vals_[VarRef{name, false, 1}] = SlotVal::individual(i);
    return *this;
  }
  Assignment& set_prop(const std::string& name, uint64_t bits) {
    vals_[VarRef{name, true, 0}] = SlotVal::prop(bits);
    return *this;
  }
  Assignment& set_rel1(const std::string& name, uint64_t code) {
    vals_[VarRef{name, true, 1}] = SlotVal::rel1(code);
    return *this;
  }
  Assignment& set_rel2(const std::string& name, uint64_t code) {
    vals_[VarRef{name, true, 2}] = SlotVal::rel2(code);
    return *this;
  }
  const SlotVal* find(const VarRef& v) const {
    auto it = vals_.find(v);
    return it == vals_.end() ? nullptr : &it->second;
  }
  const std::map<VarRef, SlotVal>& values() const { return vals_; }

 private:
  std::map<VarRef, SlotVal> vals_;
};

// Denotation of an individual term under free logic.
struct IndTermDen {
  bool proper = false;
  Individual value;
};

class Evaluator {
 public:
  explicit Evaluator(const AczelModel& m) : m_(m) {}

  const AczelModel& model() const { return m_; }

  // Proposition (cell mask) of f under asg. Defined connectives and
  // identities are expanded first.
  uint64_t eval_formula(const Assignment& asg, const FormulaPtr& f);

  // Truth at (s0, w0).
  bool truth_at_actual(const Assignment& asg, const FormulaPtr& f) {
    return (eval_formula(asg, f) >> 0) & 1;
  }

  // Universal closure true at (s0, w) for every world w.
  bool valid(const FormulaPtr& f);
  // As `valid`, but on the closure of f under the given partial assignment.
  bool valid_under(const Assignment& asg, const FormulaPtr& f);

  IndTermDen den_individual_term(const Assignment& asg, const TermPtr& t);

  // Property denoted by a 1-place relation term (fiber semantics for
  // lambdas); returns the canonical property code.
  uint64_t den_rel1(const Assignment& asg, const TermPtr& rel);

  uint64_t exe1(const Assignment& asg, const TermPtr& rel, const TermPtr& t);
  uint64_t enc_prop(const Assignment& asg, const TermPtr& t, const TermPtr& rel);
  uint64_t lambda1(const Assignment& asg, const std::string& x, const FormulaPtr& matrix);

  // tau-down: does the term denote?
  bool denotes(const Assignment& asg, const TermPtr& t);

  // beta-conversion check at the actual state, across all worlds.
  bool beta_check(const Assignment& asg, const TermPtr& lam, const TermPtr& t);

  FormulaPtr universal_closure(const Assignment& asg, const FormulaPtr& f) const;

 private:
  friend class CompiledQuery;
  const AczelModel& m_;
  // Lambda-denotation cache: (term node, values of its free slots) -> code.
  // Retained ASTs keep the node pointers stable for the cache's lifetime.
  std::map<std::pair<const void*, std::vector<uint64_t>>, uint64_t> cache_;
  std::vector<FormulaPtr> retained_;
};

// Compile once, evaluate under many assignments. Used by the hot loops
// (equivalence chain, witness extraction, comprehension conditions) to avoid
// re-expanding and re-compiling per assignment.
class CompiledQuery {
 public:
  CompiledQuery(Evaluator& ev, const FormulaPtr& f);
  ~CompiledQuery();
  CompiledQuery(CompiledQuery&&) noexcept;
  CompiledQuery& operator=(CompiledQuery&&) = delete;

  uint64_t eval(const Assignment& asg);
  bool truth_at_actual(const Assignment& asg) { return eval(asg) & 1; }

 private:
  Evaluator& ev_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aot
