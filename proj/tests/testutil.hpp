#pragma once

// Shared helpers for the test suites: seeded random formula generators and
// small independent oracles.

#include <random>
#include <vector>

#include "aot/ast.hpp"
#include "aot/model.hpp"

namespace aot::testutil {

inline AczelModel m0(const Budget& b = {}) { return AczelModel::build({1, 1, 1, 1, {}, {}}, b); }
inline AczelModel m1(const Budget& b = {}) { return AczelModel::build({1, 1, 1, 2, {}, {}}, b); }

// Random well-sorted formulas. Name pools are disjoint by sort so printing
// and reparsing cannot collide: individuals {x,y,z}, 1-place relations
// {F,G,H}, 0-place {p,q}, 2-place {R}.
struct FormulaGen {
  std::mt19937 rng;
  bool allow_enc = true;
  bool allow_desc = true;
  bool allow_identity = true;
  bool allow_lambda = true;
  bool allow_rel2 = false;

  explicit FormulaGen(uint64_t seed) : rng(seed) {}

  int pick(int n) { return (int)(rng() % n); }

  TermPtr ind_term(const std::vector<std::string>& ind_scope, int depth) {
    static const std::vector<std::string> free_pool = {"x", "y", "z"};
    if (allow_desc && depth > 0 && pick(6) == 0) {
      std::string b = "w" + std::to_string(pick(3));
      auto scope2 = ind_scope;
      scope2.push_back(b);
      return description(b, formula(scope2, depth - 1));
    }
    if (!ind_scope.empty() && pick(3) != 0)
      return ind_var(ind_scope[pick((int)ind_scope.size())]);
    return ind_var(free_pool[pick((int)free_pool.size())]);
  }

  TermPtr rel1_term(const std::vector<std::string>& ind_scope, int depth) {
    static const std::vector<std::string> pool = {"F", "G", "H"};
    int c = pick(8);
    if (c == 0) return o_bang();
    if (c == 1) return a_bang();
    if (allow_lambda && depth > 0 && c == 2) {
      std::string b = "v" + std::to_string(pick(3));
      auto scope2 = ind_scope;
      scope2.push_back(b);
      return lambda(b, formula(scope2, depth - 1));
    }
    return rel_var(1, pool[pick((int)pool.size())]);
  }

  FormulaPtr atom(const std::vector<std::string>& ind_scope, int depth) {
    switch (pick(allow_rel2 ? 6 : 5)) {
      case 0:
        return exe(rel_var(0, pick(2) ? "p" : "q"), {});
      case 1:
        return exe(rel1_term(ind_scope, depth), {ind_term(ind_scope, depth)});
      case 2:
        if (allow_enc) return enc(ind_term(ind_scope, depth), rel1_term(ind_scope, depth));
        return exe(rel1_term(ind_scope, depth), {ind_term(ind_scope, depth)});
      case 3:
        if (allow_identity) return id_ind(ind_term(ind_scope, depth), ind_term(ind_scope, depth));
        return exe(rel_var(0, "p"), {});
      case 4:
        if (allow_identity && allow_lambda)
          return id_rel(1, rel1_term(ind_scope, depth), rel1_term(ind_scope, depth));
        return exe(rel_var(0, "q"), {});
      default:
        return exe(rel_var(2, "R"), {ind_term(ind_scope, depth), ind_term(ind_scope, depth)});
    }
  }

  FormulaPtr formula(const std::vector<std::string>& ind_scope, int depth) {
    if (depth <= 0) return atom(ind_scope, 0);
    switch (pick(10)) {
      case 0: return atom(ind_scope, depth);
      case 1: return f_not(formula(ind_scope, depth - 1));
      case 2: return impl(formula(ind_scope, depth - 1), formula(ind_scope, depth - 1));
      case 3: return f_and(formula(ind_scope, depth - 1), formula(ind_scope, depth - 1));
      case 4: return f_or(formula(ind_scope, depth - 1), formula(ind_scope, depth - 1));
      case 5: return equiv(formula(ind_scope, depth - 1), formula(ind_scope, depth - 1));
      case 6: return pick(2) ? box(formula(ind_scope, depth - 1))
                             : diamond(formula(ind_scope, depth - 1));
      case 7: {
        std::string v = "u" + std::to_string(pick(3));
        auto scope2 = ind_scope;
        scope2.push_back(v);
        auto body = formula(scope2, depth - 1);
        return pick(2) ? forall_ind(v, body) : exists_ind(v, body);
      }
      case 8: {
        std::string v = pick(2) ? "P" : "Q";
        auto body0 = formula(ind_scope, depth - 1);
        // splice the bound relation variable into the body via an extra atom
        FormulaPtr use = pick(2) ? exe(rel_var(1, v), {ind_term(ind_scope, 0)})
                                 : (allow_enc ? enc(ind_term(ind_scope, 0), rel_var(1, v))
                                              : exe(rel_var(1, v), {ind_term(ind_scope, 0)}));
        auto body = f_and(use, body0);
        return pick(2) ? forall_rel(1, v, body) : exists_rel(1, v, body);
      }
      default: {
        std::string v = "r";
        auto body = impl(exe(rel_var(0, v), {}), formula(ind_scope, depth - 1));
        return pick(2) ? forall_rel(0, v, body) : exists_rel(0, v, body);
      }
    }
  }

  // A closed formula: free individual/relation variables are wrapped in
  // quantifiers.
  FormulaPtr closed(int depth);
};

inline FormulaPtr FormulaGen::closed(int depth) {
  FormulaPtr f = formula({}, depth);
  auto fv = free_vars(f);
  for (auto& v : fv) {
    if (v.is_rel) f = (rng() % 2) ? forall_rel(v.arity, v.name, f) : exists_rel(v.arity, v.name, f);
    else f = (rng() % 2) ? forall_ind(v.name, f) : exists_ind(v.name, f);
  }
  return f;
}

// Rough upper bound on the work the cell-recursive reference evaluator does
// for one truth query, used to keep random corpora within its reach.
inline double naive_cost(const AczelModel& m, const FormulaPtr& f);

inline double naive_cost_term(const AczelModel& m, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::IndVar:
    case TermKind::RelVar:
      return 1;
    case TermKind::Lambda:
      return (double)m.n_individuals() * m.prop_cells() * (1 + naive_cost(m, t->matrix));
    case TermKind::Description:
      return (double)m.n_individuals() * (1 + naive_cost(m, t->matrix));
  }
  return 1;
}

inline double naive_cost(const AczelModel& m, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Exe: {
      double c = naive_cost_term(m, f->rel);
      for (auto& a : f->args) c += naive_cost_term(m, a);
      return 1 + c;
    }
    case FormulaKind::Enc:
      return 1 + naive_cost_term(m, f->subject) + naive_cost_term(m, f->rel);
    case FormulaKind::Not:
      return 1 + naive_cost(m, f->a);
    case FormulaKind::Box: case FormulaKind::Diamond:
      return 1 + m.n_worlds() * naive_cost(m, f->a);
    case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      return 1 + naive_cost(m, f->a) + naive_cost(m, f->b);
    case FormulaKind::ForallInd: case FormulaKind::ExistsInd:
      return 1 + (double)m.n_individuals() * naive_cost(m, f->body);
    case FormulaKind::ForallRel: case FormulaKind::ExistsRel: {
      double dom = f->var_arity == 0   ? (double)(1ull << m.prop_cells())
                   : f->var_arity == 1 ? (double)m.n_properties_unchecked()
                                       : 65536.0;
      return 1 + dom * naive_cost(m, f->body);
    }
    case FormulaKind::IdInd:
      return 40 * (1 + naive_cost_term(m, f->t1) + naive_cost_term(m, f->t2));
    case FormulaKind::IdRel:
      return 40.0 * m.n_individuals() *
             (1 + naive_cost_term(m, f->t1) + naive_cost_term(m, f->t2));
  }
  return 1;
}

}  // namespace aot::testutil
