#include "aot/trace.hpp"

#include <sstream>

#include "aot/parser.hpp"
#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"

namespace aot::kernel {

std::string serialize_trace(const Trace& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i) {
    os << i << " " << t[i].rule << " ";
    if (t[i].premises.empty()) {
      os << "-";
    } else {
      for (size_t j = 0; j < t[i].premises.size(); ++j) {
        if (j) os << ",";
        os << t[i].premises[j];
      }
    }
    os << " " << print(t[i].formula) << "\n";
  }
  return os.str();
}

Trace parse_trace(const std::string& text) {
  Trace out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long idx;
    std::string rule, prems;
    if (!(ls >> idx >> rule >> prems))
      throw KernelError("trace line " + std::to_string(lineno) + ": malformed");
    if (idx != (long)out.size())
      throw KernelError("trace line " + std::to_string(lineno) + ": bad index " +
                        std::to_string(idx));
    std::string formula_text;
    std::getline(ls, formula_text);
    Step s;
    s.rule = rule;
    if (prems != "-") {
      std::istringstream ps(prems);
      std::string tok;
      while (std::getline(ps, tok, ',')) s.premises.push_back(std::stoi(tok));
    }
    try {
      s.formula = parse_formula(formula_text);
    } catch (const ParseError& e) {
      throw KernelError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// replay

namespace {

bool certified_denoting_term(const TermPtr& t) {
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

bool is_quant(const FormulaPtr& f) {
  return f->kind == FormulaKind::ForallInd || f->kind == FormulaKind::ForallRel;
}
bool is_exists(const FormulaPtr& f) {
  return f->kind == FormulaKind::ExistsInd || f->kind == FormulaKind::ExistsRel;
}

VarRef quant_var(const FormulaPtr& f) {
  bool rel = f->kind == FormulaKind::ForallRel || f->kind == FormulaKind::ExistsRel;
  return {f->var, rel, rel ? f->var_arity : 1};
}

// Aligned walk of body vs. instance, returning the term at the first free
// occurrence of `v`. Any found candidate is verified by substitution
// afterwards, so false positives are harmless.
std::optional<TermPtr> aligned_term(const FormulaPtr& body, const FormulaPtr& inst,
                                    const VarRef& v);

std::optional<TermPtr> aligned_in_term(const TermPtr& b, const TermPtr& i, const VarRef& v) {
  if (!v.is_rel && b->kind == TermKind::IndVar && b->name == v.name) return i;
  if (v.is_rel && b->kind == TermKind::RelVar && !b->is_rel_const() && b->name == v.name)
    return i;
  if (b->kind != i->kind) return std::nullopt;
  if ((b->kind == TermKind::Lambda || b->kind == TermKind::Description) &&
      !(b->bound == v.name && !v.is_rel))
    return aligned_term(b->matrix, i->matrix, v);
  return std::nullopt;
}

std::optional<TermPtr> aligned_term(const FormulaPtr& body, const FormulaPtr& inst,
                                    const VarRef& v) {
  if (body->kind != inst->kind) return std::nullopt;
  switch (body->kind) {
    case FormulaKind::Exe: {
      if (body->args.size() != inst->args.size()) return std::nullopt;
      if (auto r = aligned_in_term(body->rel, inst->rel, v)) return r;
      for (size_t k = 0; k < body->args.size(); ++k)
        if (auto r = aligned_in_term(body->args[k], inst->args[k], v)) return r;
      return std::nullopt;
    }
    case FormulaKind::Enc:
      if (auto r = aligned_in_term(body->subject, inst->subject, v)) return r;
      return aligned_in_term(body->rel, inst->rel, v);
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      return aligned_term(body->a, inst->a, v);
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      if (auto r = aligned_term(body->a, inst->a, v)) return r;
      return aligned_term(body->b, inst->b, v);
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
      if (!v.is_rel && body->var == v.name) return std::nullopt;  // shadowed
      return aligned_term(body->body, inst->body, v);
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel:
      if (v.is_rel && body->var == v.name) return std::nullopt;
      return aligned_term(body->body, inst->body, v);
    case FormulaKind::IdInd: case FormulaKind::IdRel:
      if (auto r = aligned_in_term(body->t1, inst->t1, v)) return r;
      return aligned_in_term(body->t2, inst->t2, v);
  }
  return std::nullopt;
}

// Checks `inst` = body[tau/v] for some tau; returns tau.
std::optional<TermPtr> match_instance(const FormulaPtr& body, const VarRef& v,
                                      const FormulaPtr& inst) {
  if (!is_free_in(body, v.name, v.is_rel)) {
    if (alpha_equal(body, inst))
      return v.is_rel ? rel_var(v.arity, v.name) : ind_var(v.name);  // vacuous
    return std::nullopt;
  }
  auto tau = aligned_term(body, inst, v);
  if (!tau) return std::nullopt;
  try {
    if (alpha_equal(substitute(body, v, *tau), inst)) return tau;
  } catch (const SortError&) {
  }
  return std::nullopt;
}

struct Checker {
  const Trace& t;
  const ReplayOptions& opts;
  std::vector<std::set<int>> deps;
  bool kernel_only = true;

  std::string check_step(int idx);

  const FormulaPtr& prem(int idx, int k) const { return t[t[idx].premises[k]].formula; }

  bool fresh_name_at(int idx, const std::string& name) const {
    for (int j = 0; j < idx; ++j)
      for (auto& v : free_vars(t[j].formula))
        if (v.name == name) return false;
    return true;
  }
};

std::string Checker::check_step(int idx) {
  const Step& s = t[idx];
  const FormulaPtr& f = s.formula;
  for (int p : s.premises)
    if (p < 0 || p >= idx) return "premise index out of range";

  std::set<int> d;
  for (int p : s.premises) d.insert(deps[p].begin(), deps[p].end());
  deps[idx] = d;

  auto need = [&](bool cond, const char* msg) -> std::string { return cond ? "" : msg; };
  auto ext = [&]() -> std::string {
    kernel_only = false;
    return opts.allow_extended ? "" : "extended rule not allowed";
  };

  if (s.rule == "p1") {
    if (f->kind != FormulaKind::Impl || f->b->kind != FormulaKind::Impl ||
        !alpha_equal(f->a, f->b->b))
      return "not a P1 instance";
    return "";
  }
  if (s.rule == "p2") {
    const FormulaPtr& g = f;
    if (g->kind != FormulaKind::Impl) return "not a P2 instance";
    const FormulaPtr &l = g->a, &r = g->b;
    if (l->kind != FormulaKind::Impl || l->b->kind != FormulaKind::Impl)
      return "not a P2 instance";
    FormulaPtr A = l->a, B = l->b->a, C = l->b->b;
    FormulaPtr want = impl(impl(A, B), impl(A, C));
    return need(alpha_equal(r, want), "not a P2 instance");
  }
  if (s.rule == "p3") {
    if (f->kind != FormulaKind::Impl) return "not a P3 instance";
    const FormulaPtr& l = f->a;
    if (l->kind != FormulaKind::Impl || l->a->kind != FormulaKind::Not ||
        l->b->kind != FormulaKind::Not)
      return "not a P3 instance";
    FormulaPtr B = l->a->a, A = l->b->a;
    FormulaPtr want = impl(impl(f_not(B), A), B);
    return need(alpha_equal(f->b, want), "not a P3 instance");
  }
  if (s.rule == "a1") {
    if (f->kind != FormulaKind::Impl || f->a->kind != FormulaKind::Exe ||
        f->a->args.size() != 1 || f->a->rel->name != "O!" ||
        f->a->args[0]->kind != TermKind::IndVar)
      return "not an A1 instance";
    TermPtr x = f->a->args[0];
    if (f->b->kind != FormulaKind::Box || f->b->a->kind != FormulaKind::Not)
      return "not an A1 instance";
    const FormulaPtr& ex = f->b->a->a;
    if (ex->kind != FormulaKind::ExistsRel || ex->var_arity != 1) return "not an A1 instance";
    FormulaPtr want = enc(x, rel_var(1, ex->var));
    return need(alpha_equal(ex->body, want), "not an A1 instance");
  }
  if (s.rule == "a2") {
    if (f->kind != FormulaKind::ExistsInd) return "not an A2 instance";
    const FormulaPtr& body = f->body;
    std::string x = f->var;
    if (body->kind != FormulaKind::And) return "not an A2 instance";
    const FormulaPtr& lhs = body->a;
    if (lhs->kind != FormulaKind::Exe || lhs->rel->name != "A!" || lhs->args.size() != 1 ||
        lhs->args[0]->kind != TermKind::IndVar || lhs->args[0]->name != x)
      return "not an A2 instance";
    const FormulaPtr& q = body->b;
    if (q->kind != FormulaKind::ForallRel || q->var_arity != 1) return "not an A2 instance";
    const FormulaPtr& eqv = q->body;
    if (eqv->kind != FormulaKind::Equiv || eqv->a->kind != FormulaKind::Enc ||
        eqv->a->subject->kind != TermKind::IndVar || eqv->a->subject->name != x ||
        eqv->a->rel->kind != TermKind::RelVar || eqv->a->rel->name != q->var)
      return "not an A2 instance";
    return need(!is_free_in(eqv->b, x, false), "A2: witness variable free in the condition");
  }
  if (s.rule == "a3") {
    if (f->kind != FormulaKind::Impl || f->a->kind != FormulaKind::Enc ||
        f->b->kind != FormulaKind::Box || f->b->a->kind != FormulaKind::Enc)
      return "not an A3 instance";
    return need(alpha_equal(f->a, f->b->a) && f->a->subject->kind == TermKind::IndVar &&
                    certified_denoting_term(f->a->rel),
                "not an A3 instance");
  }
  if (s.rule == "a4o" || s.rule == "a4a") {
    bool ordinary = s.rule == "a4o";
    if (f->kind != FormulaKind::Impl || f->a->kind != FormulaKind::And)
      return "not an A4 instance";
    const FormulaPtr& c1 = f->a->a;
    const FormulaPtr& c2 = f->a->b;
    const char* cls = ordinary ? "O!" : "A!";
    if (c1->kind != FormulaKind::Exe || c1->rel->name != cls || c1->args.size() != 1 ||
        c2->kind != FormulaKind::Exe || c2->rel->name != cls || c2->args.size() != 1)
      return "not an A4 instance";
    TermPtr x = c1->args[0], y = c2->args[0];
    if (x->kind != TermKind::IndVar || y->kind != TermKind::IndVar) return "not an A4 instance";
    const FormulaPtr& e = f->b;
    if (e->kind != FormulaKind::Equiv || e->a->kind != FormulaKind::IdInd ||
        e->b->kind != FormulaKind::Box || e->b->a->kind != FormulaKind::ForallRel)
      return "not an A4 instance";
    if (!struct_equal(e->a->t1, x) || !struct_equal(e->a->t2, y)) return "not an A4 instance";
    const FormulaPtr& q = e->b->a;
    FormulaPtr inner = ordinary
        ? equiv(exe(rel_var(1, q->var), {x}), exe(rel_var(1, q->var), {y}))
        : equiv(enc(x, rel_var(1, q->var)), enc(y, rel_var(1, q->var)));
    return need(q->var_arity == 1 && alpha_equal(q->body, inner), "not an A4 instance");
  }
  if (s.rule == "a5k") {
    if (f->kind != FormulaKind::Impl || f->a->kind != FormulaKind::Box ||
        f->a->a->kind != FormulaKind::Impl || f->b->kind != FormulaKind::Impl ||
        f->b->a->kind != FormulaKind::Box || f->b->b->kind != FormulaKind::Box)
      return "not a K instance";
    return need(alpha_equal(f->a->a->a, f->b->a->a) && alpha_equal(f->a->a->b, f->b->b->a),
                "not a K instance");
  }
  if (s.rule == "a5t") {
    return need(f->kind == FormulaKind::Impl && f->a->kind == FormulaKind::Box &&
                    alpha_equal(f->a->a, f->b),
                "not a T instance");
  }
  if (s.rule == "a55") {
    return need(f->kind == FormulaKind::Impl && f->a->kind == FormulaKind::Diamond &&
                    f->b->kind == FormulaKind::Box && f->b->a->kind == FormulaKind::Diamond &&
                    alpha_equal(f->a->a, f->b->a->a),
                "not a 5 instance");
  }
  if (s.rule == "a6u" || s.rule == "ui") {
    bool from_axiom = s.rule == "a6u";
    FormulaPtr all, inst;
    if (from_axiom) {
      if (f->kind != FormulaKind::Impl) return "not a UI instance";
      all = f->a;
      inst = f->b;
    } else {
      std::string e = ext();
      if (!e.empty()) return e;
      if (s.premises.size() != 1) return "ui needs one premise";
      all = prem(idx, 0);
      inst = f;
    }
    if (!is_quant(all)) return "UI: premise is not universal";
    auto tau = match_instance(all->body, quant_var(all), inst);
    if (!tau) return "UI: not an instance of the premise";
    if (!certified_denoting_term(*tau)) {
      kernel_only = false;
      if (!opts.enable_unsound)
        return "UI with a term not certified to denote requires --enable-unsound-beta";
    }
    return "";
  }
  if (s.rule == "a6d") {
    if (f->kind != FormulaKind::Impl || !is_quant(f->a) ||
        f->a->body->kind != FormulaKind::Impl || f->b->kind != FormulaKind::Impl)
      return "not a QD instance";
    VarRef v = quant_var(f->a);
    FormulaPtr qa = v.is_rel ? forall_rel(v.arity, v.name, f->a->body->a)
                             : forall_ind(v.name, f->a->body->a);
    FormulaPtr qb = v.is_rel ? forall_rel(v.arity, v.name, f->a->body->b)
                             : forall_ind(v.name, f->a->body->b);
    return need(alpha_equal(f->b->a, qa) && alpha_equal(f->b->b, qb), "not a QD instance");
  }
  if (s.rule == "a6v") {
    if (f->kind != FormulaKind::Impl || !is_quant(f->b)) return "not a VQ instance";
    VarRef v = quant_var(f->b);
    return need(alpha_equal(f->a, f->b->body) && !is_free_in(f->a, v.name, v.is_rel),
                "not a VQ instance");
  }
  if (s.rule == "mp") {
    if (s.premises.size() != 2) return "mp needs two premises";
    const FormulaPtr& maj = prem(idx, 0);
    if (maj->kind != FormulaKind::Impl) return "mp: major premise is not an implication";
    if (!alpha_equal(maj->a, prem(idx, 1))) return "mp: minor premise mismatch";
    return need(alpha_equal(maj->b, f), "mp: conclusion mismatch");
  }
  if (s.rule == "gen") {
    if (s.premises.size() != 1 || !is_quant(f)) return "gen: bad shape";
    return need(alpha_equal(f->body, prem(idx, 0)), "gen: body mismatch");
  }
  if (s.rule == "rn") {
    if (s.premises.size() != 1 || f->kind != FormulaKind::Box) return "rn: bad shape";
    return need(alpha_equal(f->a, prem(idx, 0)), "rn: body mismatch");
  }
  if (s.rule == "beta" || s.rule == "nbeta") {
    bool unsound = s.rule == "nbeta";
    if (unsound) {
      kernel_only = false;
      if (!opts.enable_unsound)
        return "naive beta-conversion is unsound and requires --enable-unsound-beta";
    }
    FormulaPtr app, sub;
    if (f->kind == FormulaKind::Equiv || f->kind == FormulaKind::Impl) {
      if (f->a->kind == FormulaKind::Exe && f->a->rel->kind == TermKind::Lambda) {
        app = f->a;
        sub = f->b;
      } else if (f->b->kind == FormulaKind::Exe && f->b->rel->kind == TermKind::Lambda) {
        app = f->b;
        sub = f->a;
      } else {
        return "beta: no lambda application";
      }
    } else {
      return "beta: bad shape";
    }
    const TermPtr& lam = app->rel;
    if (app->args.size() != 1) return "beta: bad application arity";
    const TermPtr& arg = app->args[0];
    if (!unsound) {
      if (!classify_propositional(lam->matrix, ClassifyMode::Strict))
        return "beta: matrix is not strict-propositional";
      if (contains_description(lam->matrix)) return "beta: matrix contains a description";
      if (arg->kind != TermKind::IndVar) return "beta: argument must be a variable";
    }
    return need(alpha_equal(sub, substitute_ind(lam->matrix, lam->bound, arg)),
                "beta: contractum mismatch");
  }
  if (s.rule == "df") {
    if (s.premises.size() != 1) return "df needs one premise";
    return need(alpha_equal(expand_core(f), expand_core(prem(idx, 0))),
                "df: core expansions differ");
  }
  if (s.rule == "restate") {
    if (s.premises.size() != 1) return "restate needs one premise";
    return need(alpha_equal(f, prem(idx, 0)), "restate: formula mismatch");
  }

  // ----- extended rules -----
  if (s.rule == "assume") {
    std::string e = ext();
    if (!e.empty()) return e;
    deps[idx].insert(idx);
    return "";
  }
  if (s.rule == "ei") {
    std::string e = ext();
    if (!e.empty()) return e;
    if (s.premises.size() != 1) return "ei needs one premise";
    const FormulaPtr& p = prem(idx, 0);
    if (!is_exists(p)) return "ei: premise is not existential";
    bool rel = p->kind == FormulaKind::ExistsRel;
    VarRef v{p->var, rel, rel ? p->var_arity : 1};
    auto tau = match_instance(p->body, v, f);
    if (!tau) return "ei: not an instance of the premise";
    if ((*tau)->kind != TermKind::IndVar && (*tau)->kind != TermKind::RelVar)
      return "ei: witness must be a fresh variable";
    return need(fresh_name_at(idx, (*tau)->name), "ei: witness name is not fresh");
  }
  if (s.rule == "reductio") {
    std::string e = ext();
    if (!e.empty()) return e;
    if (s.premises.size() != 2) return "reductio needs (assumption, refutation)";
    int h = s.premises[0], c = s.premises[1];
    if (t[h].rule != "assume") return "reductio: first premise is not an assumption";
    if (!alpha_equal(t[c].formula, f_not(t[h].formula)))
      return "reductio: refutation does not negate the assumption";
    if (!alpha_equal(f, f_not(t[h].formula))) return "reductio: conclusion mismatch";
    std::set<int> d2 = deps[c];
    d2.insert(deps[h].begin(), deps[h].end());
    d2.erase(h);
    deps[idx] = d2;
    return "";
  }
  if (s.rule == "taut") {
    std::string e = ext();
    if (!e.empty()) return e;
    std::vector<FormulaPtr> ps;
    for (int p : s.premises) ps.push_back(t[p].formula);
    return need(taut_consequence(ps, f), "taut: not a tautological consequence");
  }
  if (s.rule == "qdual") {
    std::string e = ext();
    if (!e.empty()) return e;
    if (s.premises.size() != 1) return "qdual needs one premise";
    const FormulaPtr& p = prem(idx, 0);
    if (p->kind != FormulaKind::Not || !is_exists(p->a)) return "qdual: premise shape";
    const FormulaPtr& ex = p->a;
    bool rel = ex->kind == FormulaKind::ExistsRel;
    FormulaPtr want = rel ? forall_rel(ex->var_arity, ex->var, f_not(ex->body))
                          : forall_ind(ex->var, f_not(ex->body));
    return need(alpha_equal(f, want), "qdual: conclusion mismatch");
  }
  if (s.rule == "refl") {
    std::string e = ext();
    if (!e.empty()) return e;
    if (f->kind == FormulaKind::IdRel) return need(alpha_equal(f->t1, f->t2), "refl: sides differ");
    if (f->kind == FormulaKind::IdInd) return need(alpha_equal(f->t1, f->t2), "refl: sides differ");
    return "refl: not an identity";
  }
  if (s.rule == "subst_id") {
    std::string e = ext();
    if (!e.empty()) return e;
    if (s.premises.size() != 2) return "subst_id needs (identity, formula)";
    const FormulaPtr& eq = prem(idx, 0);
    const FormulaPtr& p = prem(idx, 1);
    if (eq->kind == FormulaKind::IdRel && eq->t1->kind == TermKind::RelVar) {
      return need(alpha_equal(f, substitute_rel(p, eq->t1->name, eq->id_arity, eq->t2)),
                  "subst_id: conclusion mismatch");
    }
    if (eq->kind == FormulaKind::IdInd && eq->t1->kind == TermKind::IndVar) {
      return need(alpha_equal(f, substitute_ind(p, eq->t1->name, eq->t2)),
                  "subst_id: conclusion mismatch");
    }
    return "subst_id: left side must be a variable identity";
  }
  if (s.rule == "unchecked") return "unchecked theorems cannot be replayed";
  return "unknown rule '" + s.rule + "'";
}

}  // namespace

ReplayResult replay_trace(const Trace& t, const ReplayOptions& opts) {
  ReplayResult res;
  if (t.empty()) {
    res.error = "empty trace";
    return res;
  }
  Checker ch{t, opts, {}, true};
  ch.deps.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    std::string err = ch.check_step((int)i);
    if (!err.empty()) {
      res.error = "step " + std::to_string(i) + ": " + err;
      return res;
    }
  }
  res.ok = true;
  res.conclusion = t.back().formula;
  res.open_hypotheses = ch.deps.back();
  res.kernel_only = ch.kernel_only;
  return res;
}

}  // namespace aot::kernel
