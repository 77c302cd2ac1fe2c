#include "aot/syntax_ops.hpp"

#include <algorithm>
#include <set>

namespace aot {

namespace {

// ---------------------------------------------------------------------------
// bound-name normalization

struct Normalizer {
  std::vector<std::string> used;  // free names + binders on the current path
  std::vector<std::pair<std::string, std::string>> renames;  // bound: old -> new

  std::string lookup(const std::string& n) {
    for (auto it = renames.rbegin(); it != renames.rend(); ++it)
      if (it->first == n) return it->second;
    return n;
  }

  std::string enter(const std::string& n) {
    std::string fresh = fresh_name(n, used);
    used.push_back(fresh);
    renames.push_back({n, fresh});
    return fresh;
  }

  void leave() {
    renames.pop_back();
    used.pop_back();
  }

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::IndVar: return ind_var(lookup(t->name));
      case TermKind::RelVar:
        return t->is_rel_const() ? t : rel_var(t->arity, lookup(t->name));
      case TermKind::Lambda: {
        std::string b = enter(t->bound);
        auto m = formula(t->matrix);
        leave();
        return lambda(b, m);
      }
      case TermKind::Description: {
        std::string b = enter(t->bound);
        auto m = formula(t->matrix);
        leave();
        return description(b, m);
      }
    }
    return t;
  }

  FormulaPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Exe: {
        std::vector<TermPtr> args;
        for (auto& a : f->args) args.push_back(term(a));
        return exe(term(f->rel), std::move(args));
      }
      case FormulaKind::Enc:
        return enc(term(f->subject), term(f->rel));
      case FormulaKind::Not: return f_not(formula(f->a));
      case FormulaKind::Box: return box(formula(f->a));
      case FormulaKind::Diamond: return diamond(formula(f->a));
      case FormulaKind::Impl: return impl(formula(f->a), formula(f->b));
      case FormulaKind::And: return f_and(formula(f->a), formula(f->b));
      case FormulaKind::Or: return f_or(formula(f->a), formula(f->b));
      case FormulaKind::Equiv: return equiv(formula(f->a), formula(f->b));
      case FormulaKind::ForallInd: case FormulaKind::ExistsInd: {
        std::string b = enter(f->var);
        auto body = formula(f->body);
        leave();
        return f->kind == FormulaKind::ForallInd ? forall_ind(b, body) : exists_ind(b, body);
      }
      case FormulaKind::ForallRel: case FormulaKind::ExistsRel: {
        std::string b = enter(f->var);
        auto body = formula(f->body);
        leave();
        return f->kind == FormulaKind::ForallRel ? forall_rel(f->var_arity, b, body)
                                                 : exists_rel(f->var_arity, b, body);
      }
      case FormulaKind::IdInd: return id_ind(term(f->t1), term(f->t2));
      case FormulaKind::IdRel: return id_rel(f->id_arity, term(f->t1), term(f->t2));
    }
    return f;
  }
};

}  // namespace

FormulaPtr normalize_bound_names(const FormulaPtr& f) {
  Normalizer n;
  for (auto& v : free_vars(f)) n.used.push_back(v.name);
  return n.formula(f);
}

// ---------------------------------------------------------------------------
// substitution

namespace {

struct Subst {
  VarRef v;
  TermPtr t;
  std::vector<std::string> t_free;  // names free in t

  bool clashes(const std::string& binder) const {
    return std::find(t_free.begin(), t_free.end(), binder) != t_free.end();
  }

  // Renames a binder away from the free names of t (and of the body).
  template <typename MkBinder>
  auto rebind(const std::string& bound, bool binder_is_rel, int binder_arity,
              const FormulaPtr& matrix, MkBinder mk) {
    if (bound == v.name && binder_is_rel == v.is_rel) return mk(bound, matrix);  // v is shadowed
    if (!clashes(bound)) return mk(bound, formula(matrix));
    std::vector<std::string> avoid = t_free;
    for (auto& fv : free_vars(matrix)) avoid.push_back(fv.name);
    std::string fresh = fresh_name(bound, avoid);
    FormulaPtr renamed = binder_is_rel
        ? substitute_rel(matrix, bound, binder_arity, rel_var(binder_arity, fresh))
        : substitute_ind(matrix, bound, ind_var(fresh));
    return mk(fresh, formula(renamed));
  }

  TermPtr term(const TermPtr& x) {
    switch (x->kind) {
      case TermKind::IndVar:
        if (!v.is_rel && x->name == v.name) return t;
        return x;
      case TermKind::RelVar:
        if (v.is_rel && !x->is_rel_const() && x->name == v.name) {
          if (x->arity != v.arity) throw SortError("arity mismatch substituting " + v.name);
          return t;
        }
        return x;
      case TermKind::Lambda:
        return rebind(x->bound, false, 1, x->matrix,
                      [&](const std::string& b, const FormulaPtr& m) { return lambda(b, m); });
      case TermKind::Description:
        return rebind(x->bound, false, 1, x->matrix,
                      [&](const std::string& b, const FormulaPtr& m) { return description(b, m); });
    }
    return x;
  }

  FormulaPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Exe: {
        std::vector<TermPtr> args;
        for (auto& a : f->args) args.push_back(term(a));
        return exe(term(f->rel), std::move(args));
      }
      case FormulaKind::Enc:
        return enc(term(f->subject), term(f->rel));
      case FormulaKind::Not: return f_not(formula(f->a));
      case FormulaKind::Box: return box(formula(f->a));
      case FormulaKind::Diamond: return diamond(formula(f->a));
      case FormulaKind::Impl: return impl(formula(f->a), formula(f->b));
      case FormulaKind::And: return f_and(formula(f->a), formula(f->b));
      case FormulaKind::Or: return f_or(formula(f->a), formula(f->b));
      case FormulaKind::Equiv: return equiv(formula(f->a), formula(f->b));
      case FormulaKind::ForallInd: case FormulaKind::ExistsInd: {
        bool fa = f->kind == FormulaKind::ForallInd;
        return rebind(f->var, false, 1, f->body, [&](const std::string& b, const FormulaPtr& m) {
          return fa ? forall_ind(b, m) : exists_ind(b, m);
        });
      }
      case FormulaKind::ForallRel: case FormulaKind::ExistsRel: {
        bool fa = f->kind == FormulaKind::ForallRel;
        int n = f->var_arity;
        return rebind(f->var, true, n, f->body, [&](const std::string& b, const FormulaPtr& m) {
          return fa ? forall_rel(n, b, m) : exists_rel(n, b, m);
        });
      }
      case FormulaKind::IdInd: return id_ind(term(f->t1), term(f->t2));
      case FormulaKind::IdRel: return id_rel(f->id_arity, term(f->t1), term(f->t2));
    }
    return f;
  }
};

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const VarRef& v, const TermPtr& t) {
  if (v.is_rel) {
    if (!t->is_relation()) throw SortError("substituting an individual term for relation variable " + v.name);
    int ta = t->kind == TermKind::Lambda ? 1 : t->arity;
    if (ta != v.arity) throw SortError("arity mismatch substituting " + v.name);
  } else {
    if (!t->is_individual()) throw SortError("substituting a relation term for individual variable " + v.name);
  }
  Subst s;
  s.v = v;
  s.t = t;
  for (auto& fv : free_vars(t)) s.t_free.push_back(fv.name);
  return s.formula(f);
}

FormulaPtr substitute_ind(const FormulaPtr& f, const std::string& var, const TermPtr& t) {
  return substitute(f, VarRef{var, false, 1}, t);
}

FormulaPtr substitute_rel(const FormulaPtr& f, const std::string& var, int arity, const TermPtr& t) {
  return substitute(f, VarRef{var, true, arity}, t);
}

// ---------------------------------------------------------------------------
// identity expansion

namespace {

FormulaPtr expand_id_ind(const TermPtr& t1, const TermPtr& t2) {
  std::vector<std::string> avoid;
  for (auto& v : free_vars(t1)) avoid.push_back(v.name);
  for (auto& v : free_vars(t2)) avoid.push_back(v.name);
  std::string F = fresh_name("F", avoid);
  auto ordinary = f_and(
      f_and(exe(o_bang(), {t1}), exe(o_bang(), {t2})),
      box(forall_rel(1, F, equiv(exe(rel_var(1, F), {t1}), exe(rel_var(1, F), {t2})))));
  auto abstract_ = f_and(
      f_and(exe(a_bang(), {t1}), exe(a_bang(), {t2})),
      box(forall_rel(1, F, equiv(enc(t1, rel_var(1, F)), enc(t2, rel_var(1, F))))));
  return f_or(ordinary, abstract_);
}

FormulaPtr expand_id_rel(int arity, const TermPtr& t1, const TermPtr& t2) {
  if (arity != 1)
    throw UnsupportedArityError("relation identity is defined for 1-place relations only (got " +
                                std::to_string(arity) + ")");
  std::vector<std::string> avoid;
  for (auto& v : free_vars(t1)) avoid.push_back(v.name);
  for (auto& v : free_vars(t2)) avoid.push_back(v.name);
  std::string x = fresh_name("x", avoid);
  return box(forall_ind(x, equiv(enc(ind_var(x), t1), enc(ind_var(x), t2))));
}

TermPtr expand_in_term(const TermPtr& t, FormulaPtr (*rec)(const FormulaPtr&)) {
  switch (t->kind) {
    case TermKind::IndVar:
    case TermKind::RelVar:
      return t;
    case TermKind::Lambda: return lambda(t->bound, rec(t->matrix));
    case TermKind::Description: return description(t->bound, rec(t->matrix));
  }
  return t;
}

}  // namespace

FormulaPtr expand_identity(const FormulaPtr& f) {
  auto rec = expand_identity;
  switch (f->kind) {
    case FormulaKind::Exe: {
      std::vector<TermPtr> args;
      for (auto& a : f->args) args.push_back(expand_in_term(a, rec));
      return exe(expand_in_term(f->rel, rec), std::move(args));
    }
    case FormulaKind::Enc:
      return enc(expand_in_term(f->subject, rec), expand_in_term(f->rel, rec));
    case FormulaKind::Not: return f_not(rec(f->a));
    case FormulaKind::Box: return box(rec(f->a));
    case FormulaKind::Diamond: return diamond(rec(f->a));
    case FormulaKind::Impl: return impl(rec(f->a), rec(f->b));
    case FormulaKind::And: return f_and(rec(f->a), rec(f->b));
    case FormulaKind::Or: return f_or(rec(f->a), rec(f->b));
    case FormulaKind::Equiv: return equiv(rec(f->a), rec(f->b));
    case FormulaKind::ForallInd: return forall_ind(f->var, rec(f->body));
    case FormulaKind::ExistsInd: return exists_ind(f->var, rec(f->body));
    case FormulaKind::ForallRel: return forall_rel(f->var_arity, f->var, rec(f->body));
    case FormulaKind::ExistsRel: return exists_rel(f->var_arity, f->var, rec(f->body));
    case FormulaKind::IdInd:
      return rec(expand_id_ind(expand_in_term(f->t1, rec), expand_in_term(f->t2, rec)));
    case FormulaKind::IdRel:
      return rec(expand_id_rel(f->id_arity, expand_in_term(f->t1, rec), expand_in_term(f->t2, rec)));
  }
  return f;
}

// ---------------------------------------------------------------------------
// core expansion

FormulaPtr expand_core(const FormulaPtr& f, bool keep_identity) {
  auto rec = [keep_identity](const FormulaPtr& g) { return expand_core(g, keep_identity); };
  auto rec_term = [&](const TermPtr& t) -> TermPtr {
    switch (t->kind) {
      case TermKind::IndVar:
      case TermKind::RelVar:
        return t;
      case TermKind::Lambda: return lambda(t->bound, rec(t->matrix));
      case TermKind::Description: return description(t->bound, rec(t->matrix));
    }
    return t;
  };
  switch (f->kind) {
    case FormulaKind::Exe: {
      std::vector<TermPtr> args;
      for (auto& a : f->args) args.push_back(rec_term(a));
      return exe(rec_term(f->rel), std::move(args));
    }
    case FormulaKind::Enc:
      return enc(rec_term(f->subject), rec_term(f->rel));
    case FormulaKind::Not: return f_not(rec(f->a));
    case FormulaKind::Box: return box(rec(f->a));
    case FormulaKind::Impl: return impl(rec(f->a), rec(f->b));
    case FormulaKind::ForallInd: return forall_ind(f->var, rec(f->body));
    case FormulaKind::ForallRel: return forall_rel(f->var_arity, f->var, rec(f->body));
    // derived connectives
    case FormulaKind::And:  // a & b ~> ~(a -> ~b)
      return f_not(impl(rec(f->a), f_not(rec(f->b))));
    case FormulaKind::Or:  // a | b ~> ~a -> b
      return impl(f_not(rec(f->a)), rec(f->b));
    case FormulaKind::Equiv:  // a <-> b ~> ~((a -> b) -> ~(b -> a))
      return rec(f_and(impl(f->a, f->b), impl(f->b, f->a)));
    case FormulaKind::Diamond:  // dia a ~> ~box ~a
      return f_not(box(f_not(rec(f->a))));
    case FormulaKind::ExistsInd:  // exists v ~> ~forall v ~
      return f_not(forall_ind(f->var, f_not(rec(f->body))));
    case FormulaKind::ExistsRel:
      return f_not(forall_rel(f->var_arity, f->var, f_not(rec(f->body))));
    case FormulaKind::IdInd:
      if (keep_identity) return id_ind(rec_term(f->t1), rec_term(f->t2));
      return rec(expand_identity(f));
    case FormulaKind::IdRel:
      if (keep_identity) {
        if (f->id_arity != 1)
          throw UnsupportedArityError("relation identity is defined for 1-place relations only");
        return id_rel(f->id_arity, rec_term(f->t1), rec_term(f->t2));
      }
      return rec(expand_identity(f));
  }
  return f;
}

// ---------------------------------------------------------------------------
// propositional-formula classifier

namespace {

bool has_enc(const FormulaPtr& f, bool skip_descriptions);

bool has_enc_term(const TermPtr& t, bool skip_descriptions) {
  switch (t->kind) {
    case TermKind::IndVar:
    case TermKind::RelVar:
      return false;
    case TermKind::Lambda:
      return has_enc(t->matrix, skip_descriptions);
    case TermKind::Description:
      // The legacy subformula notion stops at description matrices.
      return skip_descriptions ? false : has_enc(t->matrix, skip_descriptions);
  }
  return false;
}

bool has_enc(const FormulaPtr& f, bool skip_descriptions) {
  switch (f->kind) {
    case FormulaKind::Enc:
      return true;
    case FormulaKind::Exe: {
      if (has_enc_term(f->rel, skip_descriptions)) return true;
      for (auto& a : f->args)
        if (has_enc_term(a, skip_descriptions)) return true;
      return false;
    }
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      return has_enc(f->a, skip_descriptions);
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      return has_enc(f->a, skip_descriptions) || has_enc(f->b, skip_descriptions);
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel:
      return has_enc(f->body, skip_descriptions);
    case FormulaKind::IdInd: case FormulaKind::IdRel:
      return has_enc_term(f->t1, skip_descriptions) || has_enc_term(f->t2, skip_descriptions);
  }
  return false;
}

}  // namespace

bool classify_propositional(const FormulaPtr& f, ClassifyMode mode) {
  // Defined identities unfold to matrices with encoding clauses, so they are
  // expanded before the check. Identities inside description matrices stay
  // unexpanded in legacy mode; that is harmless since those matrices are
  // skipped entirely.
  FormulaPtr g = expand_identity(f);
  return !has_enc(g, mode == ClassifyMode::Legacy);
}

bool contains_description(const FormulaPtr& f) {
  struct {
    bool term(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::IndVar:
        case TermKind::RelVar:
          return false;
        case TermKind::Lambda: return formula(t->matrix);
        case TermKind::Description: return true;
      }
      return false;
    }
    bool formula(const FormulaPtr& f) {
      switch (f->kind) {
        case FormulaKind::Exe: {
          if (term(f->rel)) return true;
          for (auto& a : f->args)
            if (term(a)) return true;
          return false;
        }
        case FormulaKind::Enc:
          return term(f->subject) || term(f->rel);
        case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
          return formula(f->a);
        case FormulaKind::Impl: case FormulaKind::And:
        case FormulaKind::Or: case FormulaKind::Equiv:
          return formula(f->a) || formula(f->b);
        case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
        case FormulaKind::ForallRel: case FormulaKind::ExistsRel:
          return formula(f->body);
        case FormulaKind::IdInd: case FormulaKind::IdRel:
          return term(f->t1) || term(f->t2);
      }
      return false;
    }
  } v;
  return v.formula(f);
}

}  // namespace aot
