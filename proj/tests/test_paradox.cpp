#include <doctest.h>

#include "aot/naive_eval.hpp"
#include "aot/paradox.hpp"
#include "aot/parser.hpp"
#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"
#include "aot/trace.hpp"
#include "testutil.hpp"

using namespace aot;

TEST_SUITE_BEGIN("paradox");

TEST_CASE("build_K_via_description: the paper's loophole term") {
  TermPtr K = build_K_via_description(universal_G());
  REQUIRE(K->kind == TermKind::Lambda);
  CHECK(classify_propositional(K->matrix, ClassifyMode::Legacy));
  CHECK_FALSE(classify_propositional(K->matrix, ClassifyMode::Strict));

  // also with a bare relation variable as G
  TermPtr K2 = build_K_via_description(rel_var(1, "G"));
  CHECK(classify_propositional(K2->matrix, ClassifyMode::Legacy));
  CHECK_FALSE(classify_propositional(K2->matrix, ClassifyMode::Strict));

  CHECK_THROWS_AS(build_K_via_description(rel_var(0, "p")), SortError);
  CHECK_THROWS_AS(build_K_via_description(rel_var(2, "R")), SortError);
}

TEST_CASE("equivalence chain: holds in M0 with universal G") {
  AczelModel m = testutil::m0();
  CHECK(verify_equivalence_chain(m, universal_G()));
}

TEST_CASE("equivalence chain: non-universal G is a precondition error") {
  AczelModel m = testutil::m0();
  TermPtr empty_G = parse_term("[\\z. ~forall p.(p -> p)]");
  CHECK_THROWS_AS(verify_equivalence_chain(m, empty_G), EvalError);
}

TEST_CASE("semantic route: M0 report pins the divergence") {
  AczelModel m = testutil::m0();
  ParadoxReport rep = run_clark_boolos_semantic(m);
  CHECK(rep.route == ParadoxRoute::Description);
  CHECK(rep.verdict == ParadoxVerdict::BetaCountermodelFound);
  CHECK(rep.witness.find("mask 2") != std::string::npos);
  bool has_divergence = false;
  for (auto& line : rep.ledger)
    if (line.find("beta_check(K', theta) = fails") != std::string::npos) has_divergence = true;
  CHECK(has_divergence);
}

TEST_CASE("semantic route: no special urelements means no abstract objects") {
  AczelModel m = AczelModel::build({1, 0, 1, 1, {}, {}});
  CHECK_THROWS_AS(run_clark_boolos_semantic(m), ModelError);
}

TEST_CASE("semantic route: K' agrees extensionally with the banished matrix") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  TermPtr Kp = build_K_via_description(universal_G());
  FormulaPtr banished = parse_formula("exists F.(x[F] & ~F(x))");
  for (uint64_t r = 0; r < m.n_individuals(); ++r) {
    Assignment asg;
    asg.set_ind("x", m.individual_by_rank(r));
    bool via_K = ev.truth_at_actual(asg, exe(Kp, {ind_var("x")}));
    bool direct = ev.truth_at_actual(asg, banished);
    CHECK(via_K == direct);
  }
}

TEST_CASE("syntactic route: gate is mandatory") {
  CHECK_THROWS_AS(run_clark_boolos_syntactic(false), GateError);
}

TEST_CASE("syntactic route: derives bottom in at most 20 steps") {
  ParadoxReport rep = run_clark_boolos_syntactic(true);
  CHECK(rep.route == ParadoxRoute::Direct);
  CHECK(rep.verdict == ParadoxVerdict::ContradictionDerived);
  REQUIRE(rep.trace.size() <= 20);

  const FormulaPtr& last = rep.trace.back().formula;
  REQUIRE(last->kind == FormulaKind::And);
  CHECK(last->b->kind == FormulaKind::Not);
  CHECK(alpha_equal(last->a, last->b->a));  // the p & ~p shape
}

TEST_CASE("syntactic route: replay, gate flag, and step removal") {
  ParadoxReport rep = run_clark_boolos_syntactic(true);

  kernel::ReplayOptions gate_on;
  gate_on.enable_unsound = true;
  kernel::ReplayResult ok = kernel::replay_trace(rep.trace, gate_on);
  REQUIRE(ok.ok);
  CHECK(ok.open_hypotheses.empty());
  CHECK_FALSE(ok.kernel_only);

  kernel::ReplayOptions gate_off;
  gate_off.enable_unsound = false;
  CHECK_FALSE(kernel::replay_trace(rep.trace, gate_off).ok);

  // removing the naive-beta step breaks replay
  kernel::Trace cut;
  for (auto& s : rep.trace)
    if (s.rule != "nbeta") cut.push_back(s);
  CHECK_FALSE(kernel::replay_trace(cut, gate_on).ok);

  // serialization round trip replays too
  kernel::Trace back = kernel::parse_trace(kernel::serialize_trace(rep.trace));
  CHECK(kernel::replay_trace(back, gate_on).ok);
}

TEST_CASE("syntactic route: the contradiction is pinned to naive beta") {
  ParadoxReport rep = run_clark_boolos_syntactic(true);
  int n_unsound = 0;
  for (auto& s : rep.trace) {
    if (s.rule == "nbeta") ++n_unsound;
  }
  CHECK(n_unsound == 1);
}

TEST_SUITE_END();
