#include "aot/axiom_suite.hpp"

#include "aot/parser.hpp"

namespace aot {

using namespace kernel;

std::vector<AxiomInstance> axiom_suite_instances() {
  std::vector<AxiomInstance> out;
  auto add = [&](const std::string& name, Theorem t) { out.push_back({name, std::move(t)}); };

  TermPtr x = ind_var("x"), y = ind_var("y");
  TermPtr F = rel_var(1, "F"), G = rel_var(1, "G"), K = rel_var(1, "K");
  FormulaPtr p = exe(rel_var(0, "p"), {});
  FormulaPtr q = exe(rel_var(0, "q"), {});
  FormulaPtr r = exe(rel_var(0, "r"), {});
  FormulaPtr Fx = exe(F, {x});
  FormulaPtr Gx = exe(G, {x});

  add("a1: ordinary objects encode nothing", axiom_a1(x));
  add("a2: comprehension, F = K", axiom_a2("x", "F", id_rel(1, F, K)));
  add("a2: comprehension, ~(F = K)", axiom_a2("x", "F", f_not(id_rel(1, F, K))));
  add("a2: comprehension, F = F", axiom_a2("x", "F", id_rel(1, F, F)));
  add("a2: comprehension, modal condition",
      axiom_a2("x", "F", box(forall_ind("y", impl(exe(F, {y}), exe(F, {y}))))));
  add("a3: encoding rigidity", axiom_a3(x, F));
  add("a4o: ordinary identity", axiom_a4o(x, y));
  add("a4a: abstract identity", axiom_a4a(x, y));
  add("a5k: K schema (propositional)", axiom_k(p, q));
  add("a5k: K schema (exemplification)", axiom_k(Fx, Gx));
  add("a5t: T schema", axiom_t(p));
  add("a5t: T schema (encoding)", axiom_t(exists_rel(1, "F", enc(x, F))));
  add("a55: 5 schema", axiom_5(p));
  add("a6u: UI, individuals", axiom_ui({"x", false, 1}, Fx, y));
  add("a6u: UI, relations", axiom_ui({"F", true, 1}, enc(x, F), G));
  add("a6u: UI, propositions",
      axiom_ui({"p", true, 0}, impl(p, p), rel_var(0, "q")));
  add("a6u: UI, lambda instance",
      axiom_ui({"F", true, 1}, exe(F, {x}), lambda("z", f_and(exe(G, {ind_var("z")}), Gx))));
  add("a6d: quantifier distribution", axiom_qdist({"x", false, 1}, Fx, Gx));
  add("a6d: distribution over relations", axiom_qdist({"F", true, 1}, enc(x, F), Fx));
  add("a6v: vacuous quantification", axiom_vac({"x", false, 1}, p));
  add("a6v: vacuous, relation variable", axiom_vac({"F", true, 1}, exe(o_bang(), {y})));
  add("p1 instance", axiom_p1(p, q));
  add("p2 instance", axiom_p2(p, q, r));
  add("p3 instance", axiom_p3(p, q));
  add("beta: safe matrix", beta_rule(lambda("z", f_and(exe(F, {ind_var("z")}), exe(G, {ind_var("z")}))), y));
  add("taut: contraposition", taut_prove(parse_formula("(p -> q) -> (~q -> ~p)")));
  add("rn of a tautology", rn(taut_prove(parse_formula("p -> p"))));
  {
    Theorem all_x = gen(taut_prove(impl(Fx, Fx)), {"x", false, 1});
    Theorem at_y = mp(axiom_ui({"x", false, 1}, impl(Fx, Fx), y), all_x);
    add("gen/ui/mp sample", gen(at_y, {"y", false, 1}));
  }

  return out;
}

std::vector<ModelConfig> model_family(int max_ordinary, int max_special, int max_states,
                                      int max_worlds, const Budget& budget) {
  std::vector<ModelConfig> out;
  for (int o = 0; o <= max_ordinary; ++o)
    for (int sp = 1; sp <= max_special; ++sp)
      for (int st = 1; st <= max_states; ++st)
        for (int w = 1; w <= max_worlds; ++w) {
          uint64_t cells = (uint64_t)(o + sp) * st * w;
          if (cells > budget.max_cells || cells > 63) continue;
          uint64_t n_props = 1ull << cells;
          if (n_props > budget.max_properties) continue;
          if (n_props > 63) continue;
          if ((1ull << n_props) > budget.max_objects) continue;
          out.push_back({o, sp, st, w, {}, {}});
        }
  return out;
}

}  // namespace aot
