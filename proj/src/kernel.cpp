#include "aot/kernel.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "aot/printer.hpp"
#include "aot/semantics.hpp"
#include "aot/syntax_ops.hpp"
#include "kernel_internal.hpp"

namespace aot::kernel {

Theorem Theorem::unchecked(FormulaPtr f) {
  Trace t;
  t.push_back(Step{"unchecked", {}, f});
  return Theorem(std::move(f), std::move(t));
}

// ---------------------------------------------------------------------------
// axiom schemata

Theorem axiom_p1(const FormulaPtr& a, const FormulaPtr& b) {
  return Mint::axiom("p1", impl(a, impl(b, a)));
}

Theorem axiom_p2(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c) {
  return Mint::axiom("p2", impl(impl(a, impl(b, c)), impl(impl(a, b), impl(a, c))));
}

Theorem axiom_p3(const FormulaPtr& a, const FormulaPtr& b) {
  return Mint::axiom("p3", impl(impl(f_not(b), f_not(a)), impl(impl(f_not(b), a), b)));
}

static void require_ind_var(const TermPtr& t, const char* where) {
  if (t->kind != TermKind::IndVar)
    throw KernelError(std::string(where) + ": an individual variable is required");
}

// Terms the kernel certifies as denoting (tau-down): variables always;
// lambda terms via the strict classifier; descriptions never.
static bool certified_denoting(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::IndVar:
    case TermKind::RelVar:
      return true;
    case TermKind::Lambda:
      return classify_propositional(t->matrix, ClassifyMode::Strict) &&
             !contains_description(t->matrix);
    case TermKind::Description:
      return false;
  }
  return false;
}

Theorem axiom_a1(const TermPtr& x) {
  require_ind_var(x, "A1");
  std::string F = fresh_name("F", {x->name});
  return Mint::axiom(
      "a1", impl(exe(o_bang(), {x}), box(f_not(exists_rel(1, F, enc(x, rel_var(1, F)))))));
}

Theorem axiom_a2(const std::string& x, const std::string& F, const FormulaPtr& phi) {
  if (is_free_in(phi, x, false))
    throw KernelError("A2: '" + x + "' must not occur free in the condition");
  if (x == F) throw KernelError("A2: variable names must differ");
  auto xv = ind_var(x);
  return Mint::axiom(
      "a2", exists_ind(x, f_and(exe(a_bang(), {xv}),
                                forall_rel(1, F, equiv(enc(xv, rel_var(1, F)), phi)))));
}

Theorem axiom_a3(const TermPtr& x, const TermPtr& rel) {
  require_ind_var(x, "A3");
  if (!rel->is_relation() || (rel->kind == TermKind::RelVar && rel->arity != 1))
    throw KernelError("A3: a 1-place relation term is required");
  if (!certified_denoting(rel)) throw KernelError("A3: the relation term is not certified to denote");
  return Mint::axiom("a3", impl(enc(x, rel), box(enc(x, rel))));
}

static Theorem a4_common(const char* name, const TermPtr& x, const TermPtr& y, bool ordinary) {
  require_ind_var(x, name);
  require_ind_var(y, name);
  std::string F = fresh_name("F", {x->name, y->name});
  TermPtr cls = ordinary ? o_bang() : a_bang();
  FormulaPtr inner =
      ordinary ? equiv(exe(rel_var(1, F), {x}), exe(rel_var(1, F), {y}))
               : equiv(enc(x, rel_var(1, F)), enc(y, rel_var(1, F)));
  return Mint::axiom(name, impl(f_and(exe(cls, {x}), exe(cls, {y})),
                                equiv(id_ind(x, y), box(forall_rel(1, F, inner)))));
}

Theorem axiom_a4o(const TermPtr& x, const TermPtr& y) { return a4_common("a4o", x, y, true); }
Theorem axiom_a4a(const TermPtr& x, const TermPtr& y) { return a4_common("a4a", x, y, false); }

Theorem axiom_k(const FormulaPtr& p, const FormulaPtr& q) {
  return Mint::axiom("a5k", impl(box(impl(p, q)), impl(box(p), box(q))));
}

Theorem axiom_t(const FormulaPtr& p) { return Mint::axiom("a5t", impl(box(p), p)); }

Theorem axiom_5(const FormulaPtr& p) {
  return Mint::axiom("a55", impl(diamond(p), box(diamond(p))));
}

Theorem axiom_ui(const VarRef& v, const FormulaPtr& body, const TermPtr& tau) {
  if (v.is_rel) {
    if (!tau->is_relation()) throw KernelError("UI: sort mismatch");
    int ta = tau->kind == TermKind::Lambda ? 1 : tau->arity;
    if (ta != v.arity) throw KernelError("UI: arity mismatch");
  } else if (!tau->is_individual()) {
    throw KernelError("UI: sort mismatch");
  }
  if (!certified_denoting(tau))
    throw KernelError("UI: instantiation term is not certified to denote (tau-down)");
  FormulaPtr inst = substitute(body, v, tau);
  FormulaPtr all = v.is_rel ? forall_rel(v.arity, v.name, body) : forall_ind(v.name, body);
  return Mint::axiom("a6u", impl(all, inst));
}

Theorem axiom_qdist(const VarRef& v, const FormulaPtr& a, const FormulaPtr& b) {
  auto q = [&](const FormulaPtr& f) {
    return v.is_rel ? forall_rel(v.arity, v.name, f) : forall_ind(v.name, f);
  };
  return Mint::axiom("a6d", impl(q(impl(a, b)), impl(q(a), q(b))));
}

Theorem axiom_vac(const VarRef& v, const FormulaPtr& a) {
  if (is_free_in(a, v.name, v.is_rel))
    throw KernelError("VQ: '" + v.name + "' occurs free");
  FormulaPtr all = v.is_rel ? forall_rel(v.arity, v.name, a) : forall_ind(v.name, a);
  return Mint::axiom("a6v", impl(a, all));
}

// ---------------------------------------------------------------------------
// rules

Theorem mp(const Theorem& major, const Theorem& minor) {
  const FormulaPtr& f = major.formula();
  if (f->kind != FormulaKind::Impl)
    throw KernelError("MP: major premise is not an implication: " + print(f));
  if (!alpha_equal(f->a, minor.formula()))
    throw KernelError("MP: minor premise does not match the antecedent");
  return Mint::rule("mp", {&major, &minor}, f->b);
}

Theorem gen(const Theorem& t, const VarRef& v) {
  FormulaPtr g = v.is_rel ? forall_rel(v.arity, v.name, t.formula())
                          : forall_ind(v.name, t.formula());
  return Mint::rule("gen", {&t}, g);
}

Theorem rn(const Theorem& t) { return Mint::rule("rn", {&t}, box(t.formula())); }

Theorem beta_rule(const TermPtr& lam, const TermPtr& t, BetaDir dir) {
  if (lam->kind != TermKind::Lambda) throw KernelError("beta: a lambda term is required");
  if (!classify_propositional(lam->matrix, ClassifyMode::Strict))
    throw KernelError("beta: the matrix is not a propositional formula (strict)");
  if (contains_description(lam->matrix))
    throw KernelError("beta: the matrix contains a definite description");
  if (t->kind != TermKind::IndVar)
    throw KernelError("beta: the argument must be a variable (descriptions are not certified)");
  FormulaPtr app = exe(lam, {t});
  FormulaPtr sub = substitute_ind(lam->matrix, lam->bound, t);
  FormulaPtr f = dir == BetaDir::Equiv    ? equiv(app, sub)
                 : dir == BetaDir::Expand ? impl(app, sub)
                                          : impl(sub, app);
  return Mint::axiom("beta", f);
}

Theorem df(const Theorem& t, const FormulaPtr& target) {
  if (!alpha_equal(expand_core(t.formula()), expand_core(target)))
    throw KernelError("df: formulas do not share a core expansion");
  return Mint::rule("df", {&t}, target);
}

// ---------------------------------------------------------------------------
// audits

AuditReport soundness_audit(const Theorem& t, const std::vector<const AczelModel*>& models) {
  AuditReport rep;
  for (const AczelModel* m : models) {
    Evaluator ev(*m);
    bool ok = ev.valid(t.formula());
    rep.entries.push_back({"(" + std::to_string(m->n_ordinary()) + "," +
                               std::to_string(m->n_special()) + "," +
                               std::to_string(m->n_states()) + "," +
                               std::to_string(m->n_worlds()) + ")",
                           ok});
    rep.all_pass = rep.all_pass && ok;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// bounded forward proof search (firewall audit)

namespace {

void subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                 std::unordered_set<std::string>& seen) {
  if (seen.insert(print(f)).second) out.push_back(f);
  switch (f->kind) {
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      subformulas(f->a, out, seen);
      break;
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      subformulas(f->a, out, seen);
      subformulas(f->b, out, seen);
      break;
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel:
      subformulas(f->body, out, seen);
      break;
    default:
      break;
  }
}

std::string core_key(const FormulaPtr& f) { return print(normalize_bound_names(expand_core(f))); }

}  // namespace

FirewallStats firewall_search(const FormulaPtr& goal, int depth, uint64_t max_formulas) {
  FirewallStats stats;
  std::string goal_key = core_key(goal);

  std::vector<FormulaPtr> pool;
  std::unordered_set<std::string> pool_seen;
  subformulas(goal, pool, pool_seen);

  std::vector<VarRef> vars = free_vars(goal);
  std::vector<TermPtr> ind_vars, rel1_vars;
  std::set<std::string> names;
  for (auto& v : vars) {
    names.insert(v.name);
    if (!v.is_rel) ind_vars.push_back(ind_var(v.name));
    else if (v.arity == 1) rel1_vars.push_back(rel_var(1, v.name));
  }
  // A couple of canonical variables even if the goal has none free.
  if (ind_vars.empty()) ind_vars.push_back(ind_var("x"));
  if (rel1_vars.empty()) rel1_vars.push_back(rel_var(1, "F"));

  struct Entry {
    FormulaPtr f;
  };
  std::vector<Entry> derived;
  std::unordered_map<std::string, int> known;  // core key -> index
  auto add = [&](const FormulaPtr& f) -> bool {
    if (derived.size() >= max_formulas) return false;
    std::string k = core_key(f);
    if (known.count(k)) return false;
    known[k] = (int)derived.size();
    derived.push_back({f});
    return k == goal_key;
  };

  // Level 0: axiom instances over the pool.
  auto seed = [&]() -> bool {
    size_t np = pool.size();
    for (size_t i = 0; i < np; ++i) {
      if (add(axiom_t(pool[i]).formula())) return true;
      if (add(axiom_5(pool[i]).formula())) return true;
      for (size_t j = 0; j < np; ++j) {
        if (add(axiom_p1(pool[i], pool[j]).formula())) return true;
        if (add(axiom_p3(pool[i], pool[j]).formula())) return true;
        if (add(axiom_k(pool[i], pool[j]).formula())) return true;
        for (size_t k = 0; k < np; ++k)
          if (add(axiom_p2(pool[i], pool[j], pool[k]).formula())) return true;
      }
    }
    for (auto& x : ind_vars) {
      if (add(axiom_a1(x).formula())) return true;
      for (auto& F : rel1_vars)
        if (add(axiom_a3(x, F).formula())) return true;
      for (auto& y : ind_vars) {
        if (add(axiom_a4o(x, y).formula())) return true;
        if (add(axiom_a4a(x, y).formula())) return true;
      }
    }
    for (auto& f : pool) {
      // comprehension over pool conditions, with fresh witness names
      std::vector<std::string> avoid;
      for (auto& v : free_vars(f)) avoid.push_back(v.name);
      std::string x = fresh_name("x", avoid);
      std::string F = fresh_name("F", avoid);
      try {
        if (add(axiom_a2(x, F, f).formula())) return true;
      } catch (const KernelError&) {
      }
    }
    // quantifier schemata over pool formulas and goal variables
    for (auto& v : vars) {
      for (auto& a : pool) {
        try {
          if (add(axiom_vac(v, a).formula())) return true;
        } catch (const KernelError&) {
        }
        for (auto& b : pool)
          if (add(axiom_qdist(v, a, b).formula())) return true;
      }
    }
    return false;
  };
  if (seed()) {
    stats.derived = true;
    stats.formulas = derived.size();
    return stats;
  }

  // UI instances of any derived universal over goal terms, plus MP/GEN/RN
  // closure, by rounds.
  size_t frontier_start = 0;
  for (int round = 0; round < depth; ++round) {
    stats.rounds = round + 1;
    size_t n_before = derived.size();

    // index implications by core key of the antecedent
    std::unordered_map<std::string, std::vector<int>> by_antecedent;
    for (size_t i = 0; i < n_before; ++i) {
      const FormulaPtr& f = derived[i].f;
      if (f->kind == FormulaKind::Impl)
        by_antecedent[core_key(f->a)].push_back((int)i);
    }

    std::vector<FormulaPtr> fresh;
    auto emit = [&](const FormulaPtr& f) {
      fresh.push_back(f);
    };

    for (size_t i = 0; i < n_before; ++i) {
      const FormulaPtr& f = derived[i].f;
      // MP where f is the minor premise
      auto it = by_antecedent.find(core_key(f));
      if (it != by_antecedent.end())
        for (int j : it->second) emit(derived[j].f->b);
      // GEN and RN (only from the previous frontier to limit blowup)
      if (i >= frontier_start) {
        for (auto& v : vars) {
          FormulaPtr g = v.is_rel ? forall_rel(v.arity, v.name, f) : forall_ind(v.name, f);
          emit(g);
        }
        emit(box(f));
        // UI when f is universal
        if (f->kind == FormulaKind::ForallInd)
          for (auto& tau : ind_vars)
            emit(substitute_ind(f->body, f->var, tau));
        if (f->kind == FormulaKind::ForallRel && f->var_arity == 1)
          for (auto& tau : rel1_vars)
            emit(substitute_rel(f->body, f->var, 1, tau));
      }
    }

    frontier_start = n_before;
    bool hit = false;
    for (auto& f : fresh)
      if (add(f)) { hit = true; break; }
    stats.formulas = derived.size();
    if (hit) {
      stats.derived = true;
      return stats;
    }
    if (derived.size() >= max_formulas) break;
    if (derived.size() == n_before) break;  // fixpoint
  }
  stats.formulas = derived.size();
  return stats;
}

}  // namespace aot::kernel
