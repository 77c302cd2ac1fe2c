#include "aot/ast.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aot {

TermPtr ind_var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::IndVar;
  t->name = std::move(name);
  return t;
}

TermPtr rel_var(int arity, std::string name) {
  if (arity < 0 || arity > 2)
    throw SortError("relation arity " + std::to_string(arity) + " unsupported (0..2)");
  auto t = std::make_shared<Term>();
  t->kind = TermKind::RelVar;
  t->arity = arity;
  t->name = std::move(name);
  return t;
}

TermPtr lambda(std::string bound, FormulaPtr matrix) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Lambda;
  t->arity = 1;
  t->bound = std::move(bound);
  t->matrix = std::move(matrix);
  return t;
}

TermPtr description(std::string bound, FormulaPtr matrix) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Description;
  t->bound = std::move(bound);
  t->matrix = std::move(matrix);
  return t;
}

TermPtr o_bang() {
  static const TermPtr t = rel_var(1, "O!");
  return t;
}

TermPtr a_bang() {
  static const TermPtr t = rel_var(1, "A!");
  return t;
}

bool Formula::is_core() const {
  switch (kind) {
    case FormulaKind::And: case FormulaKind::Or: case FormulaKind::Equiv:
    case FormulaKind::Diamond: case FormulaKind::ExistsInd:
    case FormulaKind::ExistsRel: case FormulaKind::IdInd: case FormulaKind::IdRel:
      return false;
    case FormulaKind::Exe: case FormulaKind::Enc:
      return true;  // term matrices are checked by the caller where it matters
    case FormulaKind::Not: case FormulaKind::Box:
      return a->is_core();
    case FormulaKind::Impl:
      return a->is_core() && b->is_core();
    case FormulaKind::ForallInd: case FormulaKind::ForallRel:
      return body->is_core();
    default:
      return false;
  }
}

static std::shared_ptr<Formula> mknew(FormulaKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

FormulaPtr exe(TermPtr rel, std::vector<TermPtr> args) {
  if (!rel || !rel->is_relation())
    throw SortError("exemplification head must be a relation term");
  if (rel->kind == TermKind::RelVar && rel->arity != (int)args.size())
    throw SortError("arity mismatch in exemplification of " + rel->name);
  if (rel->kind == TermKind::Lambda && args.size() != 1)
    throw SortError("lambda terms are 1-place");
  for (auto& a : args)
    if (!a || !a->is_individual())
      throw SortError("exemplification argument must be an individual term");
  auto f = mknew(FormulaKind::Exe);
  f->rel = std::move(rel);
  f->args = std::move(args);
  return f;
}

FormulaPtr enc(TermPtr subject, TermPtr rel) {
  if (!subject || !subject->is_individual())
    throw SortError("encoding subject must be an individual term");
  if (!rel || !rel->is_relation() ||
      (rel->kind == TermKind::RelVar && rel->arity != 1))
    throw SortError("encoded relation must be 1-place");
  auto f = mknew(FormulaKind::Enc);
  f->subject = std::move(subject);
  f->rel = std::move(rel);
  return f;
}

static FormulaPtr unary(FormulaKind k, FormulaPtr a) {
  auto f = mknew(k);
  f->a = std::move(a);
  return f;
}

static FormulaPtr binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  auto f = mknew(k);
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}

FormulaPtr f_not(FormulaPtr a) { return unary(FormulaKind::Not, std::move(a)); }
FormulaPtr box(FormulaPtr a) { return unary(FormulaKind::Box, std::move(a)); }
FormulaPtr diamond(FormulaPtr a) { return unary(FormulaKind::Diamond, std::move(a)); }
FormulaPtr impl(FormulaPtr a, FormulaPtr b) { return binary(FormulaKind::Impl, std::move(a), std::move(b)); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return binary(FormulaKind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return binary(FormulaKind::Or, std::move(a), std::move(b)); }
FormulaPtr equiv(FormulaPtr a, FormulaPtr b) { return binary(FormulaKind::Equiv, std::move(a), std::move(b)); }

static FormulaPtr quant(FormulaKind k, std::string v, int arity, FormulaPtr body) {
  auto f = mknew(k);
  f->var = std::move(v);
  f->var_arity = arity;
  f->body = std::move(body);
  return f;
}

FormulaPtr forall_ind(std::string v, FormulaPtr body) {
  return quant(FormulaKind::ForallInd, std::move(v), 1, std::move(body));
}
FormulaPtr exists_ind(std::string v, FormulaPtr body) {
  return quant(FormulaKind::ExistsInd, std::move(v), 1, std::move(body));
}
FormulaPtr forall_rel(int arity, std::string v, FormulaPtr body) {
  return quant(FormulaKind::ForallRel, std::move(v), arity, std::move(body));
}
FormulaPtr exists_rel(int arity, std::string v, FormulaPtr body) {
  return quant(FormulaKind::ExistsRel, std::move(v), arity, std::move(body));
}

FormulaPtr id_ind(TermPtr t1, TermPtr t2) {
  if (!t1->is_individual() || !t2->is_individual())
    throw SortError("individual identity needs individual terms");
  auto f = mknew(FormulaKind::IdInd);
  f->t1 = std::move(t1);
  f->t2 = std::move(t2);
  return f;
}

FormulaPtr id_rel(int arity, TermPtr t1, TermPtr t2) {
  if (!t1->is_relation() || !t2->is_relation())
    throw SortError("relation identity needs relation terms");
  auto f = mknew(FormulaKind::IdRel);
  f->t1 = std::move(t1);
  f->t2 = std::move(t2);
  f->id_arity = arity;
  return f;
}

// ---------------------------------------------------------------------------
// free variables

namespace {

struct Bound {
  std::vector<std::pair<std::string, bool>> names;  // (name, is_rel)
  bool covers(const std::string& n, bool is_rel) const {
    for (auto& p : names)
      if (p.first == n && p.second == is_rel) return true;
    return false;
  }
};

void collect_term(const TermPtr& t, Bound& bound, std::set<VarRef>& out);

void collect(const FormulaPtr& f, Bound& bound, std::set<VarRef>& out) {
  switch (f->kind) {
    case FormulaKind::Exe:
      collect_term(f->rel, bound, out);
      for (auto& a : f->args) collect_term(a, bound, out);
      break;
    case FormulaKind::Enc:
      collect_term(f->subject, bound, out);
      collect_term(f->rel, bound, out);
      break;
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      collect(f->a, bound, out);
      break;
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      collect(f->a, bound, out);
      collect(f->b, bound, out);
      break;
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd: {
      bound.names.push_back({f->var, false});
      collect(f->body, bound, out);
      bound.names.pop_back();
      break;
    }
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel: {
      bound.names.push_back({f->var, true});
      collect(f->body, bound, out);
      bound.names.pop_back();
      break;
    }
    case FormulaKind::IdInd: case FormulaKind::IdRel:
      collect_term(f->t1, bound, out);
      collect_term(f->t2, bound, out);
      break;
  }
}

void collect_term(const TermPtr& t, Bound& bound, std::set<VarRef>& out) {
  switch (t->kind) {
    case TermKind::IndVar:
      if (!bound.covers(t->name, false)) out.insert({t->name, false, 1});
      break;
    case TermKind::RelVar:
      if (!t->is_rel_const() && !bound.covers(t->name, true))
        out.insert({t->name, true, t->arity});
      break;
    case TermKind::Lambda:
    case TermKind::Description:
      bound.names.push_back({t->bound, false});
      collect(t->matrix, bound, out);
      bound.names.pop_back();
      break;
  }
}

}  // namespace

std::vector<VarRef> free_vars(const FormulaPtr& f) {
  std::set<VarRef> s;
  Bound b;
  collect(f, b, s);
  return {s.begin(), s.end()};
}

std::vector<VarRef> free_vars(const TermPtr& t) {
  std::set<VarRef> s;
  Bound b;
  collect_term(t, b, s);
  return {s.begin(), s.end()};
}

bool is_free_in(const FormulaPtr& f, const std::string& name, bool is_rel) {
  for (auto& v : free_vars(f))
    if (v.name == name && v.is_rel == is_rel) return true;
  return false;
}

// ---------------------------------------------------------------------------
// structural / alpha equality

bool struct_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::IndVar: return a->name == b->name;
    case TermKind::RelVar: return a->name == b->name && a->arity == b->arity;
    case TermKind::Lambda:
    case TermKind::Description:
      return a->bound == b->bound && struct_equal(a->matrix, b->matrix);
  }
  return false;
}

bool struct_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::Exe: {
      if (!struct_equal(a->rel, b->rel) || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!struct_equal(a->args[i], b->args[i])) return false;
      return true;
    }
    case FormulaKind::Enc:
      return struct_equal(a->subject, b->subject) && struct_equal(a->rel, b->rel);
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      return struct_equal(a->a, b->a);
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      return struct_equal(a->a, b->a) && struct_equal(a->b, b->b);
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
      return a->var == b->var && struct_equal(a->body, b->body);
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel:
      return a->var == b->var && a->var_arity == b->var_arity &&
             struct_equal(a->body, b->body);
    case FormulaKind::IdInd:
      return struct_equal(a->t1, b->t1) && struct_equal(a->t2, b->t2);
    case FormulaKind::IdRel:
      return a->id_arity == b->id_arity &&
             struct_equal(a->t1, b->t1) && struct_equal(a->t2, b->t2);
  }
  return false;
}

namespace {

// Rename maps for alpha comparison: bound name on each side -> shared id.
struct AlphaEnv {
  std::map<std::pair<std::string, bool>, int> left, right;
  int next = 0;

  struct Scope {
    AlphaEnv& env;
    std::pair<std::string, bool> lk, rk;
    bool had_l, had_r;
    int old_l = 0, old_r = 0;
    Scope(AlphaEnv& e, const std::string& ln, const std::string& rn, bool is_rel)
        : env(e), lk{ln, is_rel}, rk{rn, is_rel} {
      had_l = env.left.count(lk) > 0;
      had_r = env.right.count(rk) > 0;
      if (had_l) old_l = env.left[lk];
      if (had_r) old_r = env.right[rk];
      env.left[lk] = env.next;
      env.right[rk] = env.next;
      env.next++;
    }
    ~Scope() {
      if (had_l) env.left[lk] = old_l; else env.left.erase(lk);
      if (had_r) env.right[rk] = old_r; else env.right.erase(rk);
    }
  };

  bool var_match(const std::string& ln, const std::string& rn, bool is_rel) {
    auto li = left.find({ln, is_rel});
    auto ri = right.find({rn, is_rel});
    if (li == left.end() && ri == right.end()) return ln == rn;  // both free
    if (li == left.end() || ri == right.end()) return false;
    return li->second == ri->second;
  }
};

bool alpha_t(const TermPtr& a, const TermPtr& b, AlphaEnv& env);

bool alpha_f(const FormulaPtr& a, const FormulaPtr& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::Exe: {
      if (!alpha_t(a->rel, b->rel, env) || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_t(a->args[i], b->args[i], env)) return false;
      return true;
    }
    case FormulaKind::Enc:
      return alpha_t(a->subject, b->subject, env) && alpha_t(a->rel, b->rel, env);
    case FormulaKind::Not: case FormulaKind::Box: case FormulaKind::Diamond:
      return alpha_f(a->a, b->a, env);
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      return alpha_f(a->a, b->a, env) && alpha_f(a->b, b->b, env);
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd: {
      AlphaEnv::Scope s(env, a->var, b->var, false);
      return alpha_f(a->body, b->body, env);
    }
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel: {
      if (a->var_arity != b->var_arity) return false;
      AlphaEnv::Scope s(env, a->var, b->var, true);
      return alpha_f(a->body, b->body, env);
    }
    case FormulaKind::IdInd:
      return alpha_t(a->t1, b->t1, env) && alpha_t(a->t2, b->t2, env);
    case FormulaKind::IdRel:
      return a->id_arity == b->id_arity &&
             alpha_t(a->t1, b->t1, env) && alpha_t(a->t2, b->t2, env);
  }
  return false;
}

bool alpha_t(const TermPtr& a, const TermPtr& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::IndVar:
      return env.var_match(a->name, b->name, false);
    case TermKind::RelVar:
      if (a->is_rel_const() || b->is_rel_const())
        return a->name == b->name;
      return a->arity == b->arity && env.var_match(a->name, b->name, true);
    case TermKind::Lambda:
    case TermKind::Description: {
      AlphaEnv::Scope s(env, a->bound, b->bound, false);
      return alpha_f(a->matrix, b->matrix, env);
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  AlphaEnv env;
  return alpha_f(a, b, env);
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  AlphaEnv env;
  return alpha_t(a, b, env);
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& used) {
  std::string n = base;
  while (std::find(used.begin(), used.end(), n) != used.end()) n += "'";
  return n;
}

}  // namespace aot
