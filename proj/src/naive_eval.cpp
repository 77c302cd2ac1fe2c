#include "aot/naive_eval.hpp"

#include "aot/syntax_ops.hpp"

namespace aot {

struct NaiveEvaluator::Env {
  const Assignment* base;
  std::vector<std::pair<VarRef, SlotVal>> stack;

  const SlotVal* find(const VarRef& v) const {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (it->first == v) return &it->second;
    return base->find(v);
  }
};

namespace {

bool table1(uint8_t t, bool in) { return (t >> (in ? 1 : 0)) & 1; }
bool table2(uint8_t t, bool a, bool b) { return (t >> ((a ? 2 : 0) | (b ? 1 : 0))) & 1; }

}  // namespace

IndTermDen NaiveEvaluator::den_ind(Env& env, const TermPtr& t) const {
  switch (t->kind) {
    case TermKind::IndVar: {
      const SlotVal* v = env.find({t->name, false, 1});
      if (!v || v->kind != SlotVal::Ind)
        throw EvalError("unbound individual variable " + t->name);
      return {true, v->ind};
    }
    case TermKind::Description: {
      uint64_t n = m_.n_individuals();
      bool found = false;
      Individual val;
      for (uint64_t r = 0; r < n; ++r) {
        env.stack.push_back({{t->bound, false, 1}, SlotVal::individual(m_.individual_by_rank(r))});
        bool sat = truth_rec(env, t->matrix, m_.actual_state(), m_.actual_world());
        env.stack.pop_back();
        if (sat) {
          if (found) return {false, {}};
          found = true;
          val = m_.individual_by_rank(r);
        }
      }
      return found ? IndTermDen{true, val} : IndTermDen{false, {}};
    }
    default:
      throw SortError("relation term in individual position");
  }
}

uint64_t NaiveEvaluator::den_rel1(Env& env, const TermPtr& t) const {
  switch (t->kind) {
    case TermKind::RelVar: {
      if (t->name == "O!") return m_.o_bang_code();
      if (t->name == "A!") return m_.a_bang_code();
      const SlotVal* v = env.find({t->name, true, 1});
      if (!v || v->kind != SlotVal::Rel1)
        throw EvalError("unbound relation variable " + t->name);
      return v->code;
    }
    case TermKind::Lambda: {
      uint64_t code = 0;
      for (int u = 0; u < m_.n_urelements(); ++u)
        for (int s = 0; s < m_.n_states(); ++s)
          for (int w = 0; w < m_.n_worlds(); ++w) {
            bool hit = false;
            uint64_t n = m_.n_individuals();
            for (uint64_t r = 0; r < n && !hit; ++r) {
              Individual i = m_.individual_by_rank(r);
              if (m_.nu_index(i) != u) continue;
              env.stack.push_back({{t->bound, false, 1}, SlotVal::individual(i)});
              hit = truth_rec(env, t->matrix, s, w);
              env.stack.pop_back();
            }
            if (hit) code = m_.prop_code_set(code, u, s, w, true);
          }
      return code;
    }
    default:
      throw SortError("individual term in relation position");
  }
}

bool NaiveEvaluator::truth_rec(Env& env, const FormulaPtr& f, int s, int w) const {
  const StateTables& tbl = m_.tables(s);
  auto nt = [&](bool x) { return table1(tbl.not_t, x); };
  auto imp = [&](bool a, bool b) { return table2(tbl.impl_t, a, b); };

  switch (f->kind) {
    case FormulaKind::Exe: {
      if (f->args.empty()) {
        const SlotVal* v = env.find({f->rel->name, true, 0});
        if (!v || v->kind != SlotVal::Rel0)
          throw EvalError("unbound propositional variable " + f->rel->name);
        return (v->code >> (s * m_.n_worlds() + w)) & 1;
      }
      if (f->args.size() == 1) {
        uint64_t code = den_rel1(env, f->rel);
        IndTermDen d = den_ind(env, f->args[0]);
        if (!d.proper) return false;
        return m_.prop_bit(code, m_.nu_index(d.value), s, w);
      }
      const SlotVal* v = env.find({f->rel->name, true, 2});
      if (!v || v->kind != SlotVal::Rel2)
        throw EvalError("unbound relation variable " + f->rel->name);
      IndTermDen d1 = den_ind(env, f->args[0]);
      IndTermDen d2 = den_ind(env, f->args[1]);
      if (!d1.proper || !d2.proper) return false;
      return m_.rel2_bit(v->code, m_.nu_index(d1.value), m_.nu_index(d2.value), s, w);
    }
    case FormulaKind::Enc: {
      IndTermDen d = den_ind(env, f->subject);
      if (!d.proper || d.value.ordinary) return false;
      uint64_t code = den_rel1(env, f->rel);
      if (code > 63) throw BudgetError("encoding membership beyond representable property sets");
      return (d.value.mask >> code) & 1;
    }
    case FormulaKind::Not:
      return nt(truth_rec(env, f->a, s, w));
    case FormulaKind::Impl:
      return imp(truth_rec(env, f->a, s, w), truth_rec(env, f->b, s, w));
    case FormulaKind::And:  // ~(a -> ~b)
      return nt(imp(truth_rec(env, f->a, s, w), nt(truth_rec(env, f->b, s, w))));
    case FormulaKind::Or:  // ~a -> b
      return imp(nt(truth_rec(env, f->a, s, w)), truth_rec(env, f->b, s, w));
    case FormulaKind::Equiv: {  // (a -> b) & (b -> a)
      bool a = truth_rec(env, f->a, s, w);
      bool b = truth_rec(env, f->b, s, w);
      return nt(imp(imp(a, b), nt(imp(b, a))));
    }
    case FormulaKind::Box: {
      bool agg = true;
      for (int w2 = 0; w2 < m_.n_worlds(); ++w2)
        agg = agg && truth_rec(env, f->a, s, w2);
      return table1(tbl.box_t, agg);
    }
    case FormulaKind::Diamond: {  // ~box~a
      bool agg = true;
      for (int w2 = 0; w2 < m_.n_worlds(); ++w2)
        agg = agg && nt(truth_rec(env, f->a, s, w2));
      return nt(table1(tbl.box_t, agg));
    }
    case FormulaKind::ForallInd: {
      bool agg = true;
      uint64_t n = m_.n_individuals();
      for (uint64_t r = 0; r < n; ++r) {
        env.stack.push_back({{f->var, false, 1}, SlotVal::individual(m_.individual_by_rank(r))});
        agg = agg && truth_rec(env, f->body, s, w);
        env.stack.pop_back();
      }
      return table1(tbl.forall_ind_t, agg);
    }
    case FormulaKind::ExistsInd: {  // ~forall ~
      bool agg = true;
      uint64_t n = m_.n_individuals();
      for (uint64_t r = 0; r < n; ++r) {
        env.stack.push_back({{f->var, false, 1}, SlotVal::individual(m_.individual_by_rank(r))});
        agg = agg && nt(truth_rec(env, f->body, s, w));
        env.stack.pop_back();
      }
      return nt(table1(tbl.forall_ind_t, agg));
    }
    case FormulaKind::ForallRel:
    case FormulaKind::ExistsRel: {
      bool is_forall = f->kind == FormulaKind::ForallRel;
      uint64_t n;
      SlotVal (*mk)(uint64_t);
      if (f->var_arity == 0) {
        n = m_.n_propositions();
        mk = [](uint64_t i) { return SlotVal::prop(i); };
      } else if (f->var_arity == 1) {
        n = m_.n_properties();
        mk = [](uint64_t i) { return SlotVal::rel1(i); };
      } else {
        n = m_.n_rel2();
        mk = [](uint64_t i) { return SlotVal::rel2(i); };
      }
      bool agg = true;
      for (uint64_t i = 0; i < n; ++i) {
        env.stack.push_back({{f->var, true, f->var_arity}, mk(i)});
        bool b = truth_rec(env, f->body, s, w);
        env.stack.pop_back();
        agg = agg && (is_forall ? b : nt(b));
      }
      bool out = table1(tbl.forall_rel_t, agg);
      return is_forall ? out : nt(out);
    }
    case FormulaKind::IdInd:
    case FormulaKind::IdRel:
      return truth_rec(env, expand_identity(f), s, w);
  }
  throw EvalError("bad formula");
}

bool NaiveEvaluator::truth(const Assignment& asg, const FormulaPtr& f, int s, int w) const {
  Env env{&asg, {}};
  return truth_rec(env, f, s, w);
}

uint64_t NaiveEvaluator::eval_prop(const Assignment& asg, const FormulaPtr& f) const {
  uint64_t bits = 0;
  for (int s = 0; s < m_.n_states(); ++s)
    for (int w = 0; w < m_.n_worlds(); ++w)
      if (truth(asg, f, s, w)) bits |= 1ull << (s * m_.n_worlds() + w);
  return bits;
}

bool NaiveEvaluator::valid(const FormulaPtr& f) const {
  FormulaPtr g = f;
  auto fv = free_vars(f);
  std::sort(fv.begin(), fv.end());
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) {
    if (it->is_rel) g = forall_rel(it->arity, it->name, g);
    else g = forall_ind(it->name, g);
  }
  Assignment empty;
  for (int w = 0; w < m_.n_worlds(); ++w)
    if (!truth(empty, g, m_.actual_state(), w)) return false;
  return true;
}

}  // namespace aot
