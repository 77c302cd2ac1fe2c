#pragma once

// Reference evaluator: direct recursion over the surface AST, one
// (state, world) cell at a time, no bit-parallelism, no caching, no early
// exit, always serial. Kept deliberately independent of the compiled
// evaluator; the test suite checks the two agree, and the benchmark tool
// compares their speed.

#include "aot/ast.hpp"
#include "aot/model.hpp"
#include "aot/semantics.hpp"

namespace aot {

class NaiveEvaluator {
 public:
  explicit NaiveEvaluator(const AczelModel& m) : m_(m) {}

  bool truth(const Assignment& asg, const FormulaPtr& f, int s, int w) const;
  uint64_t eval_prop(const Assignment& asg, const FormulaPtr& f) const;
  bool valid(const FormulaPtr& f) const;

 private:
  struct Env;
  bool truth_rec(Env& env, const FormulaPtr& f, int s, int w) const;
  IndTermDen den_ind(Env& env, const TermPtr& t) const;
  uint64_t den_rel1(Env& env, const TermPtr& t) const;

  const AczelModel& m_;
};

}  // namespace aot
