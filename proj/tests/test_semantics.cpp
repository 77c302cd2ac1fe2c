#include <doctest.h>

#include "aot/countermodel.hpp"
#include "aot/naive_eval.hpp"
#include "aot/parser.hpp"
#include "aot/printer.hpp"
#include "aot/semantics.hpp"
#include "aot/syntax_ops.hpp"
#include "testutil.hpp"

using namespace aot;

TEST_SUITE_BEGIN("semantics");

namespace {

uint64_t everywhere_true_code(const AczelModel& m) { return m.n_properties_unchecked() - 1; }

// Property true exactly on Special(0), at every state and world.
uint64_t special0_code(const AczelModel& m) {
  uint64_t code = 0;
  int u = m.ur_index({UrKind::Special, 0});
  for (int s = 0; s < m.n_states(); ++s)
    for (int w = 0; w < m.n_worlds(); ++w) code = m.prop_code_set(code, u, s, w, true);
  return code;
}

}  // namespace

TEST_CASE("descriptions: unique satisfier, empty, and non-unique") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  Assignment asg;
  asg.set_ind("x", Individual::make_abstract(5));

  IndTermDen d = ev.den_individual_term(asg, parse_term("(the y. y = x)"));
  REQUIRE(d.proper);
  CHECK(d.value == Individual::make_abstract(5));

  d = ev.den_individual_term(asg, parse_term("(the y. ~(y = y))"));
  CHECK_FALSE(d.proper);

  // 16 abstract objects satisfy A!(y): uniqueness fails
  d = ev.den_individual_term(asg, parse_term("(the y. A!(y))"));
  CHECK_FALSE(d.proper);
}

TEST_CASE("exe1: truth through nu-upsilon; improper terms falsify") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  Assignment asg;
  asg.set_rel1("F", everywhere_true_code(m));
  asg.set_ind("x", Individual::make_ordinary(0));
  CHECK(ev.exe1(asg, rel_var(1, "F"), ind_var("x")) == m.full_prop_mask());

  // improper description argument: everywhere false, whatever the property
  uint64_t bits = ev.eval_formula(asg, parse_formula("F((the y. ~(y = y)))"));
  CHECK(bits == 0);

  // property true exactly on Special(0): every abstract object exemplifies it
  asg.set_rel1("P", special0_code(m));
  for (uint64_t mask = 0; mask < 16; ++mask) {
    Assignment a2 = asg;
    a2.set_ind("a", Individual::make_abstract(mask));
    CHECK(ev.eval_formula(a2, parse_formula("P(a)")) == m.full_prop_mask());
  }
}

TEST_CASE("enc: membership, ordinary subjects, the null object") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  uint64_t p = 2;
  Assignment asg;
  asg.set_rel1("P", p);

  asg.set_ind("t", Individual::make_abstract(1ull << p));
  CHECK(ev.enc_prop(asg, ind_var("t"), rel_var(1, "P")) == m.full_prop_mask());

  asg.set_ind("t", Individual::make_ordinary(0));
  CHECK(ev.enc_prop(asg, ind_var("t"), rel_var(1, "P")) == 0);

  asg.set_ind("t", Individual::make_abstract(0));
  CHECK(ev.enc_prop(asg, ind_var("t"), rel_var(1, "P")) == 0);
}

TEST_CASE("enc: state- and world-constant (rigidity at the table level)") {
  AczelModel m = AczelModel::build({1, 1, 2, 2, {}, {}}, Budget{8, 1u << 16, 1u << 20});
  Evaluator ev(m);
  Assignment asg;
  asg.set_ind("t", Individual::make_abstract(1));
  asg.set_rel1("P", 0);
  uint64_t bits = ev.enc_prop(asg, ind_var("t"), rel_var(1, "P"));
  CHECK(bits == m.full_prop_mask());
}

TEST_CASE("lambda1: exemplification-only matrices reproduce the property") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  for (uint64_t code = 0; code < m.n_properties(); ++code) {
    Assignment asg;
    asg.set_rel1("F", code);
    uint64_t lam = ev.lambda1(asg, "x", parse_formula("F(x)"));
    // oracle: cellwise comparison against the assigned property
    for (int u = 0; u < m.n_urelements(); ++u)
      for (int s = 0; s < m.n_states(); ++s)
        for (int w = 0; w < m.n_worlds(); ++w)
          CHECK(m.prop_bit(lam, u, s, w) == m.prop_bit(code, u, s, w));
  }
}

TEST_CASE("lambda1: the banished matrix, brute-forced over the fiber") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  uint64_t lam = ev.lambda1(Assignment{}, "x", parse_formula("exists F.(x[F] & ~F(x))"));
  NaiveEvaluator naive(m);
  FormulaPtr matrix = parse_formula("exists F.(x[F] & ~F(x))");
  for (int u = 0; u < m.n_urelements(); ++u)
    for (int s = 0; s < m.n_states(); ++s)
      for (int w = 0; w < m.n_worlds(); ++w) {
        // oracle: scan every individual in the fiber of u
        bool expect = false;
        for (uint64_t r = 0; r < m.n_individuals() && !expect; ++r) {
          Individual i = m.individual_by_rank(r);
          if (m.nu_index(i) != u) continue;
          Assignment asg;
          asg.set_ind("x", i);
          expect = naive.truth(asg, matrix, s, w);
        }
        CHECK(m.prop_bit(lam, u, s, w) == expect);
      }
}

TEST_CASE("lambda1: contradictory matrix denotes the everywhere-false property") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  CHECK(ev.lambda1(Assignment{}, "x", parse_formula("~(x = x)")) == 0);
}

TEST_CASE("eval: the O!-encoding axiom is everywhere true in M0") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  FormulaPtr f = parse_formula("O!(x) -> box ~exists F. x[F]");
  FormulaPtr closed = ev.universal_closure(Assignment{}, f);
  CHECK(ev.eval_formula(Assignment{}, closed) == m.full_prop_mask());
}

TEST_CASE("eval: box collapses over a single world") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  for (uint64_t p = 0; p < m.n_propositions(); ++p) {
    Assignment asg;
    asg.set_prop("p", p);
    uint64_t bits = ev.eval_formula(asg, parse_formula("box p <-> p"));
    CHECK(((bits >> 0) & 1) == 1);
  }
}

TEST_CASE("eval: the theta-object existence claim holds in M0") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  Assignment asg;
  asg.set_rel1("K", 2);
  FormulaPtr f = parse_formula("exists x.(A!(x) & forall F.(x[F] <-> F = K))");
  CHECK(ev.truth_at_actual(asg, f));
  // and the witness is exactly the comprehension witness
  Individual theta = m.comprehension_witness([](uint64_t c) { return c == 2; });
  Assignment a2;
  a2.set_rel1("K", 2);
  a2.set_ind("v", theta);
  CHECK(ev.truth_at_actual(a2, parse_formula("A!(v) & forall F.(v[F] <-> F = K)")));
}

TEST_CASE("valid: abstract-identity principle in M0 and M1") {
  FormulaPtr f = parse_formula("A!(x) & A!(y) -> (x = y <-> box forall F.(x[F] <-> y[F]))");
  {
    AczelModel m = testutil::m0();
    CHECK(Evaluator(m).valid(f));
  }
  {
    // The full closure in M1 ranges over 65537^2 pairs (minutes of compute);
    // the instance check covers every individual against a co-prime stride
    // of partners, which hits all residue classes of both coordinates.
    AczelModel m = testutil::m1();
    Evaluator ev(m);
    CompiledQuery q(ev, f);
    uint64_t n = m.n_individuals();
    uint64_t s0 = m.state_row_mask(0);
    bool all_ok = true;
    for (uint64_t a = 0; a < n && all_ok; ++a) {
      uint64_t b = (a * 257 + 13) % n;
      Assignment asg;
      asg.set_ind("x", m.individual_by_rank(a));
      asg.set_ind("y", m.individual_by_rank(b));
      if ((q.eval(asg) & s0) != s0) all_ok = false;
      asg.set_ind("y", m.individual_by_rank(a));  // and the diagonal
      if ((q.eval(asg) & s0) != s0) all_ok = false;
    }
    CHECK(all_ok);
  }
}

TEST_CASE("valid: the diamond Barcan formula in M1") {
  AczelModel m = testutil::m1();
  CHECK(Evaluator(m).valid(parse_formula("dia exists x. F(x) -> exists x. dia F(x)")));
}

TEST_CASE("valid: universal encode-without-exemplifying fails (null object)") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  CHECK_FALSE(ev.valid(parse_formula("forall x. exists F.(x[F] & ~F(x))")));
  // pinned to the null abstract object
  Assignment asg;
  asg.set_ind("x", Individual::make_abstract(0));
  CHECK_FALSE(ev.truth_at_actual(asg, parse_formula("exists F.(x[F] & ~F(x))")));
}

TEST_CASE("denotes: variables, safe lambdas, unsafe lambdas, descriptions") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  CHECK(ev.denotes(Assignment{}, parse_term("[\\x. F(x)]")));
  CHECK_FALSE(ev.denotes(Assignment{}, parse_term("[\\x. exists F.(x[F] & ~F(x))]")));
  Assignment asg;
  CHECK_FALSE(ev.denotes(asg, parse_term("(the y. ~(y = y))")));
  CHECK(ev.denotes(asg, ind_var("x")));
  CHECK(ev.denotes(asg, rel_var(1, "F")));
}

TEST_CASE("beta_check: safe matrices convert for every term") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  TermPtr lam = parse_term("[\\x. F(x) & G(x)]");
  for (uint64_t fc = 0; fc < 4; ++fc)
    for (uint64_t gc = 0; gc < 4; ++gc)
      for (uint64_t r = 0; r < m.n_individuals(); ++r) {
        Assignment asg;
        asg.set_rel1("F", fc).set_rel1("G", gc);
        asg.set_ind("t", m.individual_by_rank(r));
        CHECK(ev.beta_check(asg, lam, ind_var("t")));
      }
}

TEST_CASE("beta_check: encoding matrices fail for proxy-sharing objects") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  TermPtr lam = parse_term("[\\z. z[F]]");
  bool failed_somewhere = false;
  for (uint64_t fc = 0; fc < 4 && !failed_somewhere; ++fc)
    for (uint64_t r = 0; r < m.n_individuals() && !failed_somewhere; ++r) {
      Assignment asg;
      asg.set_rel1("F", fc);
      asg.set_ind("t", m.individual_by_rank(r));
      if (!ev.beta_check(asg, lam, ind_var("t"))) failed_somewhere = true;
    }
  CHECK(failed_somewhere);
}

TEST_CASE("beta_check: improper argument is an error") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  CHECK_THROWS_AS(
      ev.beta_check(Assignment{}, parse_term("[\\x. F(x)]"), parse_term("(the y. ~(y = y))")),
      EvalError);
}

TEST_CASE("countermodel: tautologies have none") {
  SearchBounds b;
  b.max_ordinary = 2;
  b.max_special = 2;
  b.max_states = 2;
  b.max_worlds = 2;
  CHECK_FALSE(countermodel_search(parse_formula("p -> p"), b).has_value());
}

TEST_CASE("countermodel: encoding and exemplification diverge in M0") {
  SearchBounds b;  // defaults: all maxima 1
  auto cm = countermodel_search(parse_formula("x[F] <-> F(x)"), b);
  REQUIRE(cm.has_value());
  CHECK(cm->config.n_ordinary == 1);
  CHECK(cm->config.n_special == 1);
  CHECK(cm->config.n_states == 1);
  CHECK(cm->config.n_worlds == 1);
  CHECK(cm->config.state_interp.empty());
  // the witness refutes the formula
  AczelModel m = AczelModel::build(cm->config);
  Evaluator ev(m);
  uint64_t bits = ev.eval_formula(cm->witness, parse_formula("x[F] <-> F(x)"));
  CHECK_FALSE(((bits >> cm->world) & 1) != 0);
}

TEST_CASE("invariant: encoding rigidity across the sample family") {
  for (auto cfg : {ModelConfig{1, 1, 1, 1, {}, {}}, ModelConfig{2, 2, 1, 1, {}, {}},
                   ModelConfig{1, 1, 2, 1, {}, {}}, ModelConfig{0, 1, 2, 2, {}, {}}}) {
    AczelModel m = AczelModel::build(cfg);
    CHECK(Evaluator(m).valid(parse_formula("x[F] -> box x[F]")));
  }
}

TEST_CASE("invariant: classical connectives at the actual state") {
  // even with deviant tables at a non-actual state
  ModelConfig cfg{1, 1, 2, 1, {}, {}};
  cfg.state_interp[1] = StateTables{0b11, 0b0000, 0b01, 0b01, 0b01};
  AczelModel m = AczelModel::build(cfg);
  Evaluator ev(m);
  for (uint64_t p = 0; p < m.n_propositions(); ++p)
    for (uint64_t q = 0; q < m.n_propositions(); ++q) {
      Assignment asg;
      asg.set_prop("p", p).set_prop("q", q);
      bool vp = p & 1, vq = q & 1;  // cell (s0, w0) is bit 0
      CHECK(((ev.eval_formula(asg, parse_formula("~p")) >> 0) & 1) == !vp);
      CHECK(((ev.eval_formula(asg, parse_formula("p -> q")) >> 0) & 1) == (!vp || vq));
      CHECK(((ev.eval_formula(asg, parse_formula("p & q")) >> 0) & 1) == (vp && vq));
      CHECK(((ev.eval_formula(asg, parse_formula("p | q")) >> 0) & 1) == (vp || vq));
      CHECK(((ev.eval_formula(asg, parse_formula("p <-> q")) >> 0) & 1) == (vp == vq));
    }
}

TEST_CASE("invariant: comprehension soundness for Boolean conditions") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  // all Boolean combinations of <= 3 atomic membership tests F = K_i,
  // realized as the 256 truth functions over three fixed codes
  Assignment binds;
  binds.set_rel1("K1", 0).set_rel1("K2", 1).set_rel1("K3", 3);
  FormulaPtr atoms[3] = {parse_formula("F = K1"), parse_formula("F = K2"),
                         parse_formula("F = K3")};
  for (int fn = 0; fn < 256; ++fn) {
    // build a DNF for the truth function fn over the three atoms
    FormulaPtr cond;
    for (int row = 0; row < 8; ++row) {
      if (!((fn >> row) & 1)) continue;
      FormulaPtr term;
      for (int a = 0; a < 3; ++a) {
        FormulaPtr lit = ((row >> a) & 1) ? atoms[a] : f_not(atoms[a]);
        term = term ? f_and(term, lit) : lit;
      }
      cond = cond ? f_or(cond, term) : term;
    }
    if (!cond) cond = f_and(atoms[0], f_not(atoms[0]));  // the empty condition
    FormulaPtr inst = exists_ind(
        "v", f_and(exe(a_bang(), {ind_var("v")}),
                   forall_rel(1, "F", equiv(enc(ind_var("v"), rel_var(1, "F")), cond))));
    CHECK(ev.valid_under(binds, inst));
  }
}

TEST_CASE("invariant: relation identity coincides with table equality in M0") {
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  for (uint64_t f = 0; f < 4; ++f)
    for (uint64_t g = 0; g < 4; ++g) {
      Assignment asg;
      asg.set_rel1("F", f).set_rel1("G", g);
      bool valid_id = true;
      uint64_t bits = ev.eval_formula(asg, parse_formula("F = G"));
      for (int w = 0; w < m.n_worlds(); ++w)
        valid_id = valid_id && ((bits >> w) & 1);
      CHECK(valid_id == (f == g));
    }
}

TEST_CASE("invariant: pigeonhole artifactual validity in M0") {
  AczelModel m = testutil::m0();
  CHECK(Evaluator(m).valid(parse_formula(
      "exists x. exists y.(A!(x) & A!(y) & ~(x = y) & box forall F.(F(x) <-> F(y)))")));
}

TEST_CASE("beta property: strict description-free matrices always convert") {
  testutil::FormulaGen gen(31337);
  gen.allow_enc = false;
  gen.allow_desc = false;
  gen.allow_identity = false;
  gen.allow_lambda = false;
  AczelModel m = testutil::m0();
  Evaluator ev(m);
  int tested = 0;
  for (int i = 0; tested < 40 && i < 400; ++i) {
    FormulaPtr matrix = gen.formula({"x"}, 2);
    if (!classify_propositional(matrix, ClassifyMode::Strict)) continue;
    if (contains_description(matrix)) continue;
    ++tested;
    TermPtr lam = lambda("x", matrix);
    // assign every free variable a fixed value
    Assignment asg;
    std::mt19937 rng(i);
    for (auto& v : free_vars(matrix)) {
      if (v.name == "x") continue;
      if (!v.is_rel) asg.set_ind(v.name, m.individual_by_rank(rng() % m.n_individuals()));
      else if (v.arity == 0) asg.set_prop(v.name, rng() % m.n_propositions());
      else if (v.arity == 1) asg.set_rel1(v.name, rng() % m.n_properties());
      else asg.set_rel2(v.name, rng() % m.n_rel2());
    }
    for (uint64_t r = 0; r < m.n_individuals(); ++r) {
      Assignment a2 = asg;
      a2.set_ind("zarg", m.individual_by_rank(r));
      CHECK(ev.beta_check(a2, lam, ind_var("zarg")));
    }
  }
  CHECK(tested == 40);
}

TEST_CASE("oracle: the naive evaluator agrees on random closed formulas") {
  testutil::FormulaGen gen(60601);
  AczelModel m = testutil::m0();
  Evaluator fast(m);
  NaiveEvaluator naive(m);
  int n = 0;
  while (n < 120) {
    FormulaPtr f = gen.closed(3);
    if (testutil::naive_cost(m, f) > 3e6) continue;  // keep the reference evaluator feasible
    ++n;
    CAPTURE(print(f));
    uint64_t a = fast.eval_formula(Assignment{}, f);
    uint64_t b = naive.eval_prop(Assignment{}, f);
    CHECK(a == b);
  }
}

TEST_CASE("oracle: agreement on a hyperintensional two-state model") {
  ModelConfig cfg{0, 1, 2, 1, {}, {}};  // one special urelement keeps domains tiny
  cfg.state_interp[1] = StateTables{0b10, 0b0110, 0b01, 0b10, 0b01};
  AczelModel m = AczelModel::build(cfg);
  Evaluator fast(m);
  NaiveEvaluator naive(m);
  testutil::FormulaGen gen(2029);
  int n = 0;
  while (n < 60) {
    FormulaPtr f = gen.closed(2);
    if (testutil::naive_cost(m, f) > 3e6) continue;
    ++n;
    CAPTURE(print(f));
    CHECK(fast.eval_formula(Assignment{}, f) == naive.eval_prop(Assignment{}, f));
  }
}

TEST_SUITE_END();
