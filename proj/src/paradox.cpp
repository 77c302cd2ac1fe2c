#include "aot/paradox.hpp"

#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"
#include "aot/trace.hpp"

namespace aot {

namespace {

// exists F.(x[F] & ~F(x))  for a given individual variable name
FormulaPtr banished_matrix(const std::string& x) {
  return exists_rel(1, "F",
                    f_and(enc(ind_var(x), rel_var(1, "F")),
                          f_not(exe(rel_var(1, "F"), {ind_var(x)}))));
}

// the banished term K = [\x. exists F.(x[F] & ~F(x))]
TermPtr banished_K() { return lambda("x", banished_matrix("x")); }

std::string individual_str(const AczelModel& m, const Individual& i) {
  if (i.ordinary) return "ordinary " + std::to_string(i.ord_index);
  std::ostringstream os;
  os << "abstract mask " << i.mask << " (encodes {";
  bool first = true;
  for (uint64_t c = 0; c < m.n_properties_unchecked() && c < 64; ++c)
    if ((i.mask >> c) & 1) {
      if (!first) os << ",";
      os << c;
      first = false;
    }
  os << "})";
  return os.str();
}

}  // namespace

TermPtr build_K_via_description(const TermPtr& G) {
  if (!G || !G->is_relation() || (G->kind == TermKind::RelVar && G->arity != 1))
    throw SortError("build_K_via_description needs a 1-place relation term");
  FormulaPtr desc_matrix = f_and(id_ind(ind_var("y"), ind_var("x")), banished_matrix("x"));
  return lambda("x", exe(G, {description("y", desc_matrix)}));
}

TermPtr universal_G() {
  FormulaPtr p = exe(rel_var(0, "p"), {});
  return lambda("z", forall_rel(0, "p", impl(p, p)));
}

bool verify_equivalence_chain(const AczelModel& m, const TermPtr& G) {
  {
    Evaluator pre(m);
    if (!pre.valid(forall_ind("x", exe(G, {ind_var("x")}))))
      throw EvalError("verify_equivalence_chain: G is not universal in this model");
  }

  // f1: G(iy(y = x & exists F.(x[F] & ~F(x))))
  FormulaPtr phi_y = f_and(id_ind(ind_var("y"), ind_var("x")), banished_matrix("x"));
  FormulaPtr f1 = exe(G, {description("y", phi_y)});
  // f2: exists y.(phi(y) & forall z.(phi(z) -> z = y))
  FormulaPtr phi_z = f_and(id_ind(ind_var("z"), ind_var("x")), banished_matrix("x"));
  FormulaPtr f2 = exists_ind(
      "y", f_and(phi_y, forall_ind("z", impl(phi_z, id_ind(ind_var("z"), ind_var("y"))))));
  // f3: exists F.(x[F] & ~F(x))
  FormulaPtr f3 = banished_matrix("x");

  uint64_t n = m.n_individuals();
  bool all_agree = true;

#ifdef _OPENMP
#pragma omp parallel
  {
    Evaluator ev(m);
    CompiledQuery q1(ev, f1), q2(ev, f2), q3(ev, f3);
    bool mine = true;
#pragma omp for schedule(dynamic, 256)
    for (int64_t r = 0; r < (int64_t)n; ++r) {
      if (!mine) continue;
      Assignment asg;
      asg.set_ind("x", m.individual_by_rank((uint64_t)r));
      bool v1 = q1.truth_at_actual(asg);
      bool v2 = q2.truth_at_actual(asg);
      bool v3 = q3.truth_at_actual(asg);
      if (v1 != v2 || v2 != v3) mine = false;
    }
#pragma omp critical
    all_agree = all_agree && mine;
  }
#else
  Evaluator ev(m);
  CompiledQuery q1(ev, f1), q2(ev, f2), q3(ev, f3);
  for (uint64_t r = 0; r < n; ++r) {
    Assignment asg;
    asg.set_ind("x", m.individual_by_rank(r));
    bool v1 = q1.truth_at_actual(asg);
    bool v2 = q2.truth_at_actual(asg);
    bool v3 = q3.truth_at_actual(asg);
    if (v1 != v2 || v2 != v3) {
      all_agree = false;
      break;
    }
  }
#endif
  return all_agree;
}

ParadoxReport run_clark_boolos_semantic(const AczelModel& m) {
  ParadoxReport rep;
  rep.route = ParadoxRoute::Description;
  rep.model_spec = m.spec_text();

  TermPtr G = universal_G();
  TermPtr Kp = build_K_via_description(G);
  Evaluator ev(m);

  bool legacy = classify_propositional(Kp->matrix, ClassifyMode::Legacy);
  bool strict = classify_propositional(Kp->matrix, ClassifyMode::Strict);
  rep.ledger.push_back(std::string("matrix classification: legacy=") +
                       (legacy ? "propositional" : "not-propositional") +
                       ", strict=" + (strict ? "propositional" : "not-propositional"));

  // The fiber property of K' and the theta-object encoding exactly it.
  uint64_t k_code = ev.den_rel1(Assignment{}, Kp);
  rep.ledger.push_back("fiber property of K': code " + std::to_string(k_code));
  Individual theta = m.comprehension_witness([&](uint64_t c) { return c == k_code; });
  rep.witness = individual_str(m, theta);
  rep.ledger.push_back("theta-object (comprehension witness for F = K'): " + rep.witness);

  // Evaluate the application and the beta-contractum at the theta-object.
  Assignment asg;
  asg.set_ind("a", theta);
  uint64_t app = ev.eval_formula(asg, exe(Kp, {ind_var("a")}));
  uint64_t sub = ev.eval_formula(asg, substitute_ind(Kp->matrix, Kp->bound, ind_var("a")));
  int s0 = m.actual_state(), w0 = m.actual_world();
  bool app00 = (app >> (s0 * m.n_worlds() + w0)) & 1;
  bool sub00 = (sub >> (s0 * m.n_worlds() + w0)) & 1;
  rep.ledger.push_back(std::string("K'(theta) at (s0,w0) = ") + (app00 ? "true" : "false"));
  rep.ledger.push_back(std::string("matrix[theta/x] at (s0,w0) = ") + (sub00 ? "true" : "false"));
  bool beta_ok = ev.beta_check(asg, Kp, ind_var("a"));
  rep.ledger.push_back(std::string("beta_check(K', theta) = ") + (beta_ok ? "holds" : "fails"));

  if (app00 == sub00 && beta_ok)
    throw EvalError("expected beta divergence did not materialize");

  rep.verdict = ParadoxVerdict::BetaCountermodelFound;
  rep.summary =
      "the legacy-propositional description term escapes the lambda restriction; "
      "beta-conversion for it fails at the theta-object, so assuming naive beta "
      "would reintroduce the Clark-Boolos contradiction";
  return rep;
}

ParadoxReport run_clark_boolos_syntactic(bool enable_unsound_beta) {
  if (!enable_unsound_beta)
    throw GateError(
        "naive beta-conversion is unsound for AOT lambda terms and is gated; "
        "pass --enable-unsound-beta to replay the paradox derivation");

  using namespace kernel;

  TermPtr K = banished_K();
  TermPtr a = ind_var("a");
  TermPtr P = rel_var(1, "P");
  auto KF = [&](const TermPtr& t) { return exe(K, {t}); };

  FormulaPtr theta_body =
      f_and(exe(a_bang(), {ind_var("x")}),
            forall_rel(1, "F", equiv(enc(ind_var("x"), rel_var(1, "F")),
                                     id_rel(1, rel_var(1, "F"), K))));
  FormulaPtr exists_theta = exists_ind("x", theta_body);
  FormulaPtr theta_inst =
      f_and(exe(a_bang(), {a}),
            forall_rel(1, "F",
                       equiv(enc(a, rel_var(1, "F")), id_rel(1, rel_var(1, "F"), K))));
  FormulaPtr theta = forall_rel(1, "F", equiv(enc(a, rel_var(1, "F")),
                                              id_rel(1, rel_var(1, "F"), K)));

  FormulaPtr Ka = KF(a);
  FormulaPtr ex_matrix = f_and(enc(a, rel_var(1, "F")), f_not(exe(rel_var(1, "F"), {a})));
  FormulaPtr exF = exists_rel(1, "F", ex_matrix);
  FormulaPtr aP_nPa = f_and(enc(a, P), f_not(exe(P, {a})));
  FormulaPtr theta_at_P = equiv(enc(a, P), id_rel(1, P, K));
  FormulaPtr PeqK = id_rel(1, P, K);
  FormulaPtr nPa = f_not(exe(P, {a}));
  FormulaPtr nKa = f_not(Ka);
  FormulaPtr n_exF = f_not(exF);
  FormulaPtr all_nF = forall_rel(1, "F", f_not(ex_matrix));
  FormulaPtr KeqK = id_rel(1, K, K);
  FormulaPtr theta_at_K = equiv(enc(a, K), id_rel(1, K, K));
  FormulaPtr aK = enc(a, K);
  FormulaPtr not_conj_K = f_not(f_and(enc(a, K), f_not(KF(a))));
  FormulaPtr bottom = f_and(Ka, nKa);

  Trace t;
  auto step = [&](const std::string& rule, std::vector<int> prem, FormulaPtr f) {
    t.push_back(Step{rule, std::move(prem), std::move(f)});
  };

  step("a2", {}, exists_theta);                       // 0: comprehension for F = K
  step("ei", {0}, theta_inst);                        // 1: witness a
  step("taut", {1}, theta);                           // 2: (theta)
  step("nbeta", {}, equiv(Ka, exF));                  // 3: Ka <-> exists F.(aF & ~Fa)  [unsound]
  step("assume", {}, Ka);                             // 4: suppose Ka
  step("taut", {3, 4}, exF);                          // 5
  step("ei", {5}, aP_nPa);                            // 6: witness P
  step("ui", {2}, theta_at_P);                        // 7: aP <-> P = K
  step("taut", {7, 6}, PeqK);                         // 8
  step("taut", {6}, nPa);                             // 9
  step("subst_id", {8, 9}, nKa);                      // 10: ~Ka  (from ~Pa, P = K)
  step("reductio", {4, 10}, nKa);                     // 11: discharge: ~Ka
  step("taut", {3, 11}, n_exF);                       // 12
  step("qdual", {12}, all_nF);                        // 13: forall F.~(aF & ~Fa)
  step("refl", {}, KeqK);                             // 14: K = K
  step("ui", {2}, theta_at_K);                        // 15: aK <-> K = K   [gated: K]
  step("taut", {15, 14}, aK);                         // 16
  step("ui", {13}, not_conj_K);                       // 17: ~(aK & ~Ka)    [gated: K]
  step("taut", {17, 16}, Ka);                         // 18
  step("taut", {11, 18}, bottom);                     // 19: Ka & ~Ka

  ReplayOptions opts;
  opts.allow_extended = true;
  opts.enable_unsound = true;
  ReplayResult rr = replay_trace(t, opts);
  if (!rr.ok) throw KernelError("paradox trace failed to replay: " + rr.error);
  if (!rr.open_hypotheses.empty())
    throw KernelError("paradox trace left hypotheses open");

  ParadoxReport rep;
  rep.route = ParadoxRoute::Direct;
  rep.verdict = ParadoxVerdict::ContradictionDerived;
  rep.trace = std::move(t);
  rep.witness = "a (comprehension witness encoding exactly K)";
  rep.summary =
      "replaying the classical derivation with naive beta-conversion for the "
      "banished term K derives Ka & ~Ka in " + std::to_string(rep.trace.size()) + " steps";
  return rep;
}

}  // namespace aot
