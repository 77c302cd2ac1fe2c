#include <doctest.h>

#include "aot/ast.hpp"
#include "aot/parser.hpp"
#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"
#include "testutil.hpp"

using namespace aot;

TEST_SUITE_BEGIN("syntax");

TEST_CASE("parse: the ordinary-object encoding axiom") {
  FormulaPtr f = parse_formula("O!(x) -> box ~exists F. x[F]");
  REQUIRE(f->kind == FormulaKind::Impl);
  CHECK(f->a->kind == FormulaKind::Exe);
  CHECK(f->a->rel->name == "O!");
  REQUIRE(f->b->kind == FormulaKind::Box);
  REQUIRE(f->b->a->kind == FormulaKind::Not);
  const FormulaPtr& ex = f->b->a->a;
  REQUIRE(ex->kind == FormulaKind::ExistsRel);
  CHECK(ex->var_arity == 1);
  CHECK(ex->body->kind == FormulaKind::Enc);
}

TEST_CASE("parse: atomic exemplification") {
  FormulaPtr f = parse_formula("F(x)");
  REQUIRE(f->kind == FormulaKind::Exe);
  CHECK(f->rel->name == "F");
  CHECK(f->rel->arity == 1);
  REQUIRE(f->args.size() == 1);
  CHECK(f->args[0]->name == "x");
}

TEST_CASE("parse: individual in relation position is a sort error") {
  CHECK_THROWS_AS(parse_formula("x(F)"), ParseError);
  // and a relation variable in individual position
  CHECK_THROWS_AS(parse_formula("G(F)"), ParseError);
}

TEST_CASE("parse: sorts and arities are inferred from usage") {
  FormulaPtr f = parse_formula("forall p.(p -> p)");
  CHECK(f->kind == FormulaKind::ForallRel);
  CHECK(f->var_arity == 0);

  f = parse_formula("forall F.(x[F] <-> F = K)");
  CHECK(f->kind == FormulaKind::ForallRel);
  CHECK(f->var_arity == 1);

  f = parse_formula("R(x,y)");
  CHECK(f->rel->arity == 2);

  CHECK_THROWS_AS(parse_formula("R(x,y) & x[R]"), ParseError);   // conflicting arity
  CHECK_THROWS_AS(parse_formula("p & F(p)"), ParseError);        // atom vs individual
  CHECK_THROWS_AS(parse_formula("S(x,y,z)"), ParseError);        // arity cap
}

TEST_CASE("parse: position-annotated syntax errors") {
  try {
    parse_formula("F(x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos >= 3);
  }
  CHECK_THROWS_AS(parse_formula("p -> "), ParseError);
  CHECK_THROWS_AS(parse_formula("p q"), ParseError);
}

TEST_CASE("print: spec forms") {
  CHECK(print(enc(ind_var("x"), rel_var(1, "F"))) == "x[F]");
  CHECK(print(lambda("x", exe(rel_var(1, "F"), {ind_var("x")}))) == "[\\x. F(x)]");
  CHECK(print(description("y", id_ind(ind_var("y"), ind_var("x")))) == "(the y. y = x)");
}

TEST_CASE("round trip: parse(print(a)) is alpha-equivalent to a") {
  testutil::FormulaGen gen(20240817);
  for (int i = 0; i < 250; ++i) {
    FormulaPtr f = gen.closed(3);
    std::string text = print(f);
    CAPTURE(text);
    FormulaPtr g = parse_formula(text);
    CHECK(alpha_equal(f, g));
  }
}

TEST_CASE("round trip: open formulas too") {
  testutil::FormulaGen gen(7);
  for (int i = 0; i < 150; ++i) {
    FormulaPtr f = gen.formula({}, 3);
    FormulaPtr g = parse_formula(print(f));
    CHECK(alpha_equal(f, g));
  }
}

TEST_CASE("classify: the banished matrix fails in both modes") {
  FormulaPtr f = parse_formula("exists F.(x[F] & ~F(x))");
  CHECK_FALSE(classify_propositional(f, ClassifyMode::Legacy));
  CHECK_FALSE(classify_propositional(f, ClassifyMode::Strict));
}

TEST_CASE("classify: the description loophole is legacy-only") {
  FormulaPtr f = parse_formula("G((the y. y = x & exists F.(x[F] & ~F(x))))");
  CHECK(classify_propositional(f, ClassifyMode::Legacy));
  CHECK_FALSE(classify_propositional(f, ClassifyMode::Strict));
}

TEST_CASE("classify: exemplification-only matrices pass both modes") {
  FormulaPtr f = parse_formula("F(x) & G(x)");
  CHECK(classify_propositional(f, ClassifyMode::Legacy));
  CHECK(classify_propositional(f, ClassifyMode::Strict));
}

TEST_CASE("classify: defined identities unfold to encoding clauses") {
  // x = y is definable only with encoding clauses, so it is not propositional
  CHECK_FALSE(classify_propositional(parse_formula("x = y"), ClassifyMode::Strict));
  CHECK_FALSE(classify_propositional(parse_formula("F = G"), ClassifyMode::Legacy));
}

TEST_CASE("classify: strict implies legacy") {
  testutil::FormulaGen gen(99);
  for (int i = 0; i < 300; ++i) {
    FormulaPtr f = gen.formula({}, 3);
    if (classify_propositional(f, ClassifyMode::Strict))
      CHECK(classify_propositional(f, ClassifyMode::Legacy));
  }
}

TEST_CASE("substitute: basics") {
  FormulaPtr f = parse_formula("F(x)");
  FormulaPtr g = substitute_ind(f, "x", ind_var("y"));
  CHECK(print(g) == "F(y)");
}

TEST_CASE("substitute: capture avoidance renames the binder") {
  FormulaPtr f = forall_ind("y", exe(rel_var(1, "F"), {ind_var("x")}));
  FormulaPtr g = substitute_ind(f, "x", ind_var("y"));
  REQUIRE(g->kind == FormulaKind::ForallInd);
  CHECK(g->var == "y'");
  CHECK(print(g->body) == "F(y)");
  CHECK(alpha_equal(g, forall_ind("w", exe(rel_var(1, "F"), {ind_var("y")}))));
}

TEST_CASE("substitute: relation variables accept lambda terms") {
  FormulaPtr f = enc(ind_var("x"), rel_var(1, "F"));
  TermPtr lam = lambda("z", exe(rel_var(1, "G"), {ind_var("z")}));
  FormulaPtr g = substitute_rel(f, "F", 1, lam);
  REQUIRE(g->kind == FormulaKind::Enc);
  CHECK(g->rel->kind == TermKind::Lambda);
  CHECK_THROWS_AS(substitute_ind(f, "x", lam), SortError);  // sort mismatch
}

TEST_CASE("substitute: identity substitution is alpha-identity") {
  testutil::FormulaGen gen(4242);
  for (int i = 0; i < 100; ++i) {
    FormulaPtr f = gen.formula({}, 3);
    CHECK(alpha_equal(substitute_ind(f, "x", ind_var("x")), f));
  }
}

TEST_CASE("expand_identity: relation identity") {
  FormulaPtr f = id_rel(1, rel_var(1, "F"), rel_var(1, "G"));
  FormulaPtr g = expand_identity(f);
  CHECK(alpha_equal(g, parse_formula("box forall x.(x[F] <-> x[G])")));
}

TEST_CASE("expand_identity: reflexive individual identity") {
  FormulaPtr g = expand_identity(id_ind(ind_var("x"), ind_var("x")));
  REQUIRE(g->kind == FormulaKind::Or);
  CHECK(alpha_equal(
      g, parse_formula("(O!(x) & O!(x)) & (box forall F.(F(x) <-> F(x))) | "
                       "(A!(x) & A!(x)) & (box forall F.(x[F] <-> x[F]))")));
}

TEST_CASE("expand_identity: fixpoint on identity-free formulas") {
  FormulaPtr f = parse_formula("box forall x.(F(x) -> exists G. x[G])");
  CHECK(struct_equal(expand_identity(f), f));
}

TEST_CASE("expand_identity: idempotent and preserves free variables") {
  testutil::FormulaGen gen(5150);
  for (int i = 0; i < 120; ++i) {
    FormulaPtr f = gen.formula({}, 3);
    FormulaPtr g = expand_identity(f);
    CHECK(alpha_equal(expand_identity(g), g));
    CHECK(free_vars(f) == free_vars(g));
  }
}

TEST_CASE("expand_identity: unsupported arity") {
  CHECK_THROWS_AS(expand_identity(id_rel(2, rel_var(2, "R"), rel_var(2, "S"))),
                  UnsupportedArityError);
}

TEST_CASE("expand_core: total and idempotent on core output") {
  testutil::FormulaGen gen(777);
  for (int i = 0; i < 120; ++i) {
    FormulaPtr f = gen.formula({}, 3);
    FormulaPtr g = expand_core(f);
    CHECK(g->is_core());
    CHECK(struct_equal(expand_core(g), g));
  }
}

TEST_CASE("alpha normalization keeps bound names distinct from free ones") {
  FormulaPtr f = parse_formula("F(x) & forall x. G(x)");
  REQUIRE(f->kind == FormulaKind::And);
  CHECK(f->b->var == "x'");
}

TEST_SUITE_END();
