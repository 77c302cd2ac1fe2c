// Scripted derivation of the diamond Barcan formula
//     dia exists x. F(x) -> exists x. dia F(x)
// from the kernel catalog alone (no semantic appeal). Follows the classical
// S5 route: derive the Barcan formula for ~F via the B schema (itself from
// T and 5), then contrapose and rewrite the duals.

#include "aot/kernel.hpp"
#include "aot/syntax_ops.hpp"

namespace aot::kernel {

namespace {

// |- A -> B, |- B -> C  gives  |- A -> C
Theorem chain(const Theorem& ab, const Theorem& bc) {
  const FormulaPtr& f1 = ab.formula();
  const FormulaPtr& f2 = bc.formula();
  return mp(mp(taut_trans(f1->a, f1->b, f2->b), ab), bc);
}

// |- A -> B  gives  |- ~B -> ~A
Theorem contrap(const Theorem& ab) {
  const FormulaPtr& f = ab.formula();
  return mp(taut_contrap(f->a, f->b), ab);
}

// |- A -> B  gives  |- box A -> box B
Theorem box_mono(const Theorem& ab) {
  const FormulaPtr& f = ab.formula();
  return mp(axiom_k(f->a, f->b), rn(ab));
}

// |- A -> B  gives  |- dia A -> dia B
Theorem dia_mono(const Theorem& ab) {
  const FormulaPtr& f = ab.formula();
  Theorem core = contrap(box_mono(contrap(ab)));  // ~box~A -> ~box~B
  return df(core, impl(diamond(f->a), diamond(f->b)));
}

// |- P -> dia P   (dual of T)
Theorem t_dual(const FormulaPtr& P) {
  Theorem core = chain(taut_dn_intro(P), contrap(axiom_t(f_not(P))));
  return df(core, impl(P, diamond(P)));
}

// |- dia box P -> P   (S5 theorem, via schema 5 at ~P)
Theorem dia_box_elim(const FormulaPtr& P) {
  FormulaPtr nnP = f_not(f_not(P));
  FormulaPtr nbnn = f_not(box(nnP));  // core of dia ~P

  Theorem five_core = df(axiom_5(f_not(P)), impl(nbnn, box(nbnn)));
  Theorem box_p_dnn = box_mono(taut_dn_intro(P));            // box P -> box ~~P
  Theorem box_dnn_p = box_mono(taut_dn_elim(P));             // box ~~P -> box P

  Theorem step2 = contrap(box_mono(contrap(box_p_dnn)));     // ~box~box P -> ~box~box~~P
  Theorem step3 = contrap(five_core);                        // ~box~box~~P -> ~~box~~P
  Theorem step4 = taut_dn_elim(box(nnP));
  Theorem t = chain(chain(chain(chain(step2, step3), step4), box_dnn_p), axiom_t(P));
  return df(t, impl(diamond(box(P)), P));  // ~box~box P -> P, read back as dia box P -> P
}

}  // namespace

Theorem derive_barcan_diamond() {
  const std::string x = "x";
  FormulaPtr Fx = exe(rel_var(1, "F"), {ind_var(x)});
  FormulaPtr nFx = f_not(Fx);
  FormulaPtr boxnFx = box(nFx);
  FormulaPtr A = forall_ind(x, nFx);     // forall x. ~Fx
  FormulaPtr G = forall_ind(x, boxnFx);  // forall x. box ~Fx
  VarRef vx{x, false, 1};

  // Barcan formula at ~F:  G -> box A
  Theorem s1 = axiom_ui(vx, boxnFx, ind_var(x));             // G -> box ~Fx
  Theorem s2 = dia_mono(s1);                                 // dia G -> dia box ~Fx
  Theorem s3 = dia_box_elim(nFx);                            // dia box ~Fx -> ~Fx
  Theorem s4 = chain(s2, s3);                                // dia G -> ~Fx
  Theorem s5 = gen(s4, vx);                                  // forall x.(dia G -> ~Fx)
  Theorem s6 = chain(axiom_vac(vx, diamond(G)),              // dia G -> forall x. dia G
                     mp(axiom_qdist(vx, diamond(G), nFx), s5));
  Theorem s7 = box_mono(s6);                                 // box dia G -> box A
  Theorem b_schema = chain(t_dual(G), axiom_5(G));           // G -> box dia G
  Theorem bf = chain(b_schema, s7);                          // G -> box A

  // Contrapose and rewrite duals into the surface goal.
  Theorem cbf = contrap(bf);                                // ~box A -> ~G
  Theorem n2 = contrap(box_mono(taut_dn_intro(A)));         // ~box~~A -> ~box A
  Theorem lhs_to_mid = chain(n2, cbf);                      // ~box~~A -> ~G

  Theorem pw = taut_dn_elim(boxnFx);
  Theorem pw_dist = mp(axiom_qdist(vx, f_not(f_not(boxnFx)), boxnFx), gen(pw, vx));
  Theorem to_rhs = contrap(pw_dist);  // ~G -> ~forall x.~~box~Fx

  Theorem core_thm = chain(lhs_to_mid, to_rhs);
  FormulaPtr goal = impl(diamond(exists_ind(x, Fx)), exists_ind(x, diamond(Fx)));
  return df(core_thm, goal);
}

}  // namespace aot::kernel
