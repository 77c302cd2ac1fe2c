#include "aot/semantics.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"

namespace aot {

namespace {

constexpr uint64_t kParallelThreshold = 1u << 13;

// ---------------------------------------------------------------------------
// compiled form

struct TRef {
  enum K { None, IndSlot, RelSlot, OBang, ABang, Lam, Desc } k = None;
  int slot = -1;   // IndSlot / RelSlot
  int info = -1;   // Lam / Desc: index into binder infos
};

struct BinderInfo {
  int matrix = -1;
  int bound_slot = -1;
  const Term* src = nullptr;
  std::vector<int> free_slots;  // slots the matrix may read, minus the bound one
  int guard_mode = -1;          // see CNode
  TRef guard_term;
};

struct CNode {
  enum Op {
    Exe0, Exe1, Exe2, Enc, Not, Impl, Box, ForallInd, ForallRel0, ForallRel1,
    ForallRel2, IdIndFast, IdRelFast,
    // classical-model rewrites of forall F.(xF <-> yF) and
    // forall F.(Fx <-> Fy): extension comparison
    EncSetEq, ExeSetEq
  } op;
  int a = -1, b = -1;
  int slot = -1;  // quantifier slot
  TRef rel;
  TRef t1, t2;
  // Equality-guard: when the body is guarded by `v = t` (t free of v), every
  // domain member other than den(t) yields a constant. guard_mode 0: the
  // constant is all-false; 1: all-true. Only produced on classical models,
  // where identity compiles to the fast denotation-equality node.
  int guard_mode = -1;
  TRef guard_term;
};

struct Compiled {
  std::vector<CNode> nodes;
  std::vector<BinderInfo> binders;
  int root = -1;
  int n_slots = 0;
  std::vector<std::pair<VarRef, int>> free_slots;
};

struct Compiler {
  Compiled out;
  bool classical_model = false;
  std::vector<std::pair<VarRef, int>> scope;
  // Slots actually read by each open subtree; binders and quantifiers use
  // this to compute exact dependency sets.
  std::vector<std::set<int>> reads{{}};

  int slot_for_free(const VarRef& v) {
    for (auto& [ref, s] : out.free_slots)
      if (ref == v) return s;
    int s = out.n_slots++;
    out.free_slots.push_back({v, s});
    return s;
  }

  int lookup(const VarRef& v) {
    int s = -1;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == v) { s = it->second; break; }
    if (s < 0) s = slot_for_free(v);
    reads.back().insert(s);
    return s;
  }

  // Pops the current read set, removes the given bound slot, and merges the
  // remainder into the parent.
  std::vector<int> close_reads(int bound_slot) {
    std::set<int> mine = std::move(reads.back());
    reads.pop_back();
    mine.erase(bound_slot);
    reads.back().insert(mine.begin(), mine.end());
    return {mine.begin(), mine.end()};
  }

  TRef term(const TermPtr& t, bool rel_pos, int arity) {
    switch (t->kind) {
      case TermKind::IndVar: {
        if (rel_pos) throw SortError("individual term in relation position");
        return {TRef::IndSlot, lookup({t->name, false, 1}), -1};
      }
      case TermKind::RelVar: {
        if (!rel_pos) throw SortError("relation term in individual position");
        if (t->name == "O!") return {TRef::OBang, -1, -1};
        if (t->name == "A!") return {TRef::ABang, -1, -1};
        if (t->arity != arity) throw SortError("arity mismatch for " + t->name);
        return {TRef::RelSlot, lookup({t->name, true, t->arity}), -1};
      }
      case TermKind::Lambda: {
        if (!rel_pos || arity != 1) throw SortError("lambda term must be in 1-place relation position");
        return {TRef::Lam, -1, binder(t)};
      }
      case TermKind::Description: {
        if (rel_pos) throw SortError("individual term in relation position");
        return {TRef::Desc, -1, binder(t)};
      }
    }
    throw EvalError("bad term");
  }

  int binder(const TermPtr& t) {
    BinderInfo info;
    info.src = t.get();
    info.bound_slot = out.n_slots++;
    scope.push_back({VarRef{t->bound, false, 1}, info.bound_slot});
    reads.push_back({});
    info.matrix = formula(t->matrix);
    info.free_slots = close_reads(info.bound_slot);
    scope.pop_back();
    if (t->kind == TermKind::Description) {
      if (auto g = guard(info.matrix, info.bound_slot)) {
        info.guard_mode = g->second ? 1 : 0;
        info.guard_term = g->first;
      }
    }
    out.binders.push_back(std::move(info));
    return (int)out.binders.size() - 1;
  }

  int add(CNode n) {
    out.nodes.push_back(n);
    return (int)out.nodes.size() - 1;
  }

  // forall F.(aF <-> bF) (or with exemplification) compares extensions on
  // classical models; property codes enumerate every table, so the
  // quantifier is equivalent to equality of the compared extensions.
  std::optional<CNode> match_ext_eq(int body, int qslot) const {
    auto& nodes = out.nodes;
    const CNode& n0 = nodes[body];
    if (n0.op != CNode::Not) return std::nullopt;
    const CNode& n1 = nodes[n0.a];
    if (n1.op != CNode::Impl) return std::nullopt;
    const CNode& fwd = nodes[n1.a];
    const CNode& n2 = nodes[n1.b];
    if (fwd.op != CNode::Impl || n2.op != CNode::Not) return std::nullopt;
    const CNode& bwd = nodes[n2.a];
    if (bwd.op != CNode::Impl) return std::nullopt;

    auto atom = [&](int idx) -> const CNode* {
      const CNode& c = nodes[idx];
      if (c.op != CNode::Enc && c.op != CNode::Exe1) return nullptr;
      if (c.rel.k != TRef::RelSlot || c.rel.slot != qslot) return nullptr;
      if (c.t1.k != TRef::IndSlot || c.t1.slot == qslot) return nullptr;
      return &c;
    };
    const CNode* e1 = atom(fwd.a);
    const CNode* e2 = atom(fwd.b);
    const CNode* e2b = atom(bwd.a);
    const CNode* e1b = atom(bwd.b);
    if (!e1 || !e2 || !e2b || !e1b) return std::nullopt;
    if (e1->op != e2->op || e1->op != e2b->op || e1->op != e1b->op) return std::nullopt;
    if (e1->t1.slot != e1b->t1.slot || e2->t1.slot != e2b->t1.slot) return std::nullopt;
    CNode out_node;
    out_node.op = e1->op == CNode::Enc ? CNode::EncSetEq : CNode::ExeSetEq;
    out_node.t1 = e1->t1;
    out_node.t2 = e2->t1;
    return out_node;
  }

  bool tref_reads_slot(const TRef& t, int slot) const {
    if (t.k == TRef::IndSlot || t.k == TRef::RelSlot) return t.slot == slot;
    if (t.k == TRef::Lam || t.k == TRef::Desc) {
      // Conservative: treat any binder as possibly reading the slot.
      return true;
    }
    return false;
  }

  // Guard analysis: value of `node` at domain members v != den(t).
  // Returns {t, noncand_is_true} when every non-candidate yields a constant.
  std::optional<std::pair<TRef, bool>> guard(int node, int slot) const {
    const CNode& n = out.nodes[node];
    switch (n.op) {
      case CNode::IdIndFast: {
        bool left = n.t1.k == TRef::IndSlot && n.t1.slot == slot;
        bool right = n.t2.k == TRef::IndSlot && n.t2.slot == slot;
        if (left && !tref_reads_slot(n.t2, slot)) return {{n.t2, false}};
        if (right && !tref_reads_slot(n.t1, slot)) return {{n.t1, false}};
        return std::nullopt;
      }
      case CNode::Not: {
        if (auto g = guard(n.a, slot)) return {{g->first, !g->second}};
        return std::nullopt;
      }
      case CNode::Impl: {
        if (auto g = guard(n.a, slot); g && !g->second) return {{g->first, true}};
        if (auto g = guard(n.b, slot); g && g->second) return {{g->first, true}};
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  int formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Exe: {
        CNode n;
        n.rel = term(f->rel, true, (int)f->args.size());
        if (f->args.size() == 0) n.op = CNode::Exe0;
        else if (f->args.size() == 1) n.op = CNode::Exe1;
        else if (f->args.size() == 2) n.op = CNode::Exe2;
        else throw SortError("exemplification arity > 2 unsupported");
        if (f->args.size() >= 1) n.t1 = term(f->args[0], false, 1);
        if (f->args.size() >= 2) n.t2 = term(f->args[1], false, 1);
        return add(n);
      }
      case FormulaKind::Enc: {
        CNode n;
        n.op = CNode::Enc;
        n.t1 = term(f->subject, false, 1);
        n.rel = term(f->rel, true, 1);
        return add(n);
      }
      case FormulaKind::Not: {
        CNode n;
        n.op = CNode::Not;
        n.a = formula(f->a);
        return add(n);
      }
      case FormulaKind::Impl: {
        CNode n;
        n.op = CNode::Impl;
        n.a = formula(f->a);
        n.b = formula(f->b);
        return add(n);
      }
      case FormulaKind::Box: {
        CNode n;
        n.op = CNode::Box;
        n.a = formula(f->a);
        return add(n);
      }
      case FormulaKind::ForallInd: {
        CNode n;
        n.op = CNode::ForallInd;
        n.slot = out.n_slots++;
        scope.push_back({VarRef{f->var, false, 1}, n.slot});
        reads.push_back({});
        n.a = formula(f->body);
        close_reads(n.slot);
        scope.pop_back();
        if (auto g = guard(n.a, n.slot)) {
          n.guard_mode = g->second ? 1 : 0;
          n.guard_term = g->first;
        }
        return add(n);
      }
      case FormulaKind::ForallRel: {
        CNode n;
        n.op = f->var_arity == 0   ? CNode::ForallRel0
               : f->var_arity == 1 ? CNode::ForallRel1
                                   : CNode::ForallRel2;
        n.slot = out.n_slots++;
        scope.push_back({VarRef{f->var, true, f->var_arity}, n.slot});
        reads.push_back({});
        n.a = formula(f->body);
        close_reads(n.slot);
        scope.pop_back();
        if (classical_model && n.op == CNode::ForallRel1)
          if (auto eq = match_ext_eq(n.a, n.slot)) return add(*eq);
        return add(n);
      }
      case FormulaKind::IdInd: {
        CNode n;
        n.op = CNode::IdIndFast;
        n.t1 = term(f->t1, false, 1);
        n.t2 = term(f->t2, false, 1);
        return add(n);
      }
      case FormulaKind::IdRel: {
        CNode n;
        n.op = CNode::IdRelFast;
        n.t1 = term(f->t1, true, 1);
        n.t2 = term(f->t2, true, 1);
        return add(n);
      }
      default:
        throw EvalError("non-core connective survived expansion: " + print(f));
    }
  }
};

using LamCache = std::map<std::pair<const void*, std::vector<uint64_t>>, uint64_t>;

// ---------------------------------------------------------------------------
// evaluation of the compiled form

struct LamMemo {
  bool valid = false;
  std::vector<uint64_t> key;
  uint64_t code = 0;
};

struct CompiledEval {
  const AczelModel& m;
  const Compiled& c;
  std::vector<SlotVal>& slots;
  LamCache& cache;
  uint64_t full;
  std::vector<LamMemo> lam_memo;

  CompiledEval(const AczelModel& m_, const Compiled& c_, std::vector<SlotVal>& s, LamCache& lc)
      : m(m_), c(c_), slots(s), cache(lc), full(m_.full_prop_mask()),
        lam_memo(c_.binders.size()) {}

  uint64_t op_not(uint64_t x) const {
    if (m.all_classical()) return ~x & full;
    uint64_t out = 0;
    for (int s = 0; s < m.n_states(); ++s) {
      uint8_t t = m.tables(s).not_t;
      uint64_t row = m.state_row_mask(s);
      if (t & 1) out |= ~x & row;
      if ((t >> 1) & 1) out |= x & row;
    }
    return out;
  }

  uint64_t op_impl(uint64_t a, uint64_t b) const {
    if (m.all_classical()) return (~a | b) & full;
    uint64_t out = 0;
    for (int s = 0; s < m.n_states(); ++s) {
      uint8_t t = m.tables(s).impl_t;
      uint64_t row = m.state_row_mask(s);
      if (t & 1) out |= ~a & ~b & row;
      if ((t >> 1) & 1) out |= ~a & b & row;
      if ((t >> 2) & 1) out |= a & ~b & row;
      if ((t >> 3) & 1) out |= a & b & row;
    }
    return out;
  }

  template <typename Sel>
  uint64_t finish_aggregate(uint64_t agg_rows, Sel sel) const {
    if (m.all_classical()) return agg_rows;
    uint64_t out = 0;
    for (int s = 0; s < m.n_states(); ++s) {
      uint8_t t = sel(m.tables(s));
      uint64_t row = m.state_row_mask(s);
      if (t & 1) out |= ~agg_rows & row;
      if ((t >> 1) & 1) out |= agg_rows & row;
    }
    return out;
  }

  uint64_t op_box(uint64_t x) const {
    uint64_t agg = 0;
    for (int s = 0; s < m.n_states(); ++s) {
      uint64_t row = m.state_row_mask(s);
      if ((x & row) == row) agg |= row;
    }
    return finish_aggregate(agg, [](const StateTables& t) { return t.box_t; });
  }

  IndTermDen den_ind(const TRef& t) {
    switch (t.k) {
      case TRef::IndSlot: {
        const SlotVal& v = slots[t.slot];
        if (v.kind != SlotVal::Ind) throw EvalError("slot does not hold an individual");
        return {true, v.ind};
      }
      case TRef::Desc: {
        const BinderInfo& b = c.binders[t.info];
        uint64_t n = m.n_individuals();
        if (b.guard_mode >= 0 && n > 2) {
          // only den(guard_term) can satisfy the matrix; everyone else
          // yields the guard constant
          if (b.guard_mode == 1) return {false, {}};  // >= 2 satisfiers
          IndTermDen cand = den_ind(b.guard_term);
          if (!cand.proper) return {false, {}};
          slots[b.bound_slot] = SlotVal::individual(cand.value);
          if (eval(b.matrix) & 1) return {true, cand.value};
          return {false, {}};
        }
        bool found = false;
        Individual val;
        for (uint64_t r = 0; r < n; ++r) {
          slots[b.bound_slot] = SlotVal::individual(m.individual_by_rank(r));
          if (eval(b.matrix) & 1) {  // cell (s0, w0)
            if (found) return {false, {}};
            found = true;
            val = m.individual_by_rank(r);
          }
        }
        return found ? IndTermDen{true, val} : IndTermDen{false, {}};
      }
      default:
        throw EvalError("relation term in individual position");
    }
  }

  uint64_t den_rel1(const TRef& t) {
    switch (t.k) {
      case TRef::RelSlot: {
        const SlotVal& v = slots[t.slot];
        if (v.kind != SlotVal::Rel1) throw EvalError("slot does not hold a 1-place relation");
        return v.code;
      }
      case TRef::OBang: return m.o_bang_code();
      case TRef::ABang: return m.a_bang_code();
      case TRef::Lam: return lambda_code(t.info);
      default:
        throw EvalError("individual term in relation position");
    }
  }

  uint64_t slot_fingerprint(int s) const {
    const SlotVal& v = slots[s];
    return v.kind == SlotVal::Ind ? (m.individual_rank(v.ind) << 2)
                                  : ((v.code << 2) | (uint64_t)v.kind);
  }

  uint64_t lambda_code(int info_idx) {
    const BinderInfo& b = c.binders[info_idx];
    // Fast path: unchanged free-slot values since the last evaluation.
    LamMemo& memo = lam_memo[info_idx];
    if (memo.valid && memo.key.size() == b.free_slots.size()) {
      bool same = true;
      for (size_t i = 0; i < b.free_slots.size(); ++i)
        if (memo.key[i] != slot_fingerprint(b.free_slots[i])) { same = false; break; }
      if (same) return memo.code;
    }
    std::pair<const void*, std::vector<uint64_t>> key;
    key.first = b.src;
    key.second.reserve(b.free_slots.size());
    for (int s : b.free_slots) key.second.push_back(slot_fingerprint(s));
    auto it = cache.find(key);
    if (it != cache.end()) {
      memo.valid = true;
      memo.key = key.second;
      memo.code = it->second;
      return it->second;
    }

    // Fiber semantics: table true at (u, s, w) iff some individual with
    // nu-upsilon u satisfies the matrix at (s, w).
    uint64_t code = 0;
    for (int u = 0; u < m.n_urelements(); ++u) {
      uint64_t acc = 0;
      if (!m.is_special(u)) {
        slots[b.bound_slot] = SlotVal::individual(Individual::make_ordinary(u));
        acc = eval(b.matrix);
      } else {
        acc = fiber_or(b, (uint64_t)(u - m.n_ordinary()), (uint64_t)m.n_special(),
                       m.n_abstract_objects());
      }
      for (int s = 0; s < m.n_states(); ++s)
        for (int w = 0; w < m.n_worlds(); ++w)
          if ((acc >> (s * m.n_worlds() + w)) & 1) code = m.prop_code_set(code, u, s, w, true);
    }
    memo.valid = true;
    memo.key = key.second;
    memo.code = code;
    cache.emplace(std::move(key), code);
    return code;
  }

  uint64_t fiber_or(const BinderInfo& b, uint64_t start, uint64_t step, uint64_t n_obj) {
    uint64_t count = start < n_obj ? (n_obj - start + step - 1) / step : 0;
#ifdef _OPENMP
    if (count >= kParallelThreshold && !omp_in_parallel()) {
      std::atomic<bool> saturated{false};
      uint64_t acc = 0;
#pragma omp parallel
      {
        std::vector<SlotVal> local = slots;
        LamCache local_cache;
        CompiledEval ev(m, c, local, local_cache);
        uint64_t mine = 0;
#pragma omp for schedule(static)
        for (int64_t i = 0; i < (int64_t)count; ++i) {
          if (saturated.load(std::memory_order_relaxed)) continue;
          local[b.bound_slot] = SlotVal::individual(Individual::make_abstract(start + i * step));
          mine |= ev.eval(b.matrix);
          if (mine == full) saturated.store(true, std::memory_order_relaxed);
        }
#pragma omp critical
        acc |= mine;
      }
      return acc;
    }
#endif
    uint64_t acc = 0;
    for (uint64_t mask = start; mask < n_obj; mask += step) {
      slots[b.bound_slot] = SlotVal::individual(Individual::make_abstract(mask));
      acc |= eval(b.matrix);
      if (acc == full) break;
    }
    return acc;
  }

  uint64_t prop_row(uint64_t code, int u) const {
    uint64_t row = 0;
    for (int s = 0; s < m.n_states(); ++s)
      for (int w = 0; w < m.n_worlds(); ++w)
        if (m.prop_bit(code, u, s, w)) row |= 1ull << (s * m.n_worlds() + w);
    return row;
  }

  uint64_t rel2_row(uint64_t code, int u1, int u2) const {
    uint64_t row = 0;
    for (int s = 0; s < m.n_states(); ++s)
      for (int w = 0; w < m.n_worlds(); ++w)
        if (m.rel2_bit(code, u1, u2, s, w)) row |= 1ull << (s * m.n_worlds() + w);
    return row;
  }

  template <typename MakeVal, typename Sel>
  uint64_t forall_scan(int body, int slot, uint64_t n, MakeVal mk, Sel sel) {
    uint64_t conj = full;
#ifdef _OPENMP
    if (n >= kParallelThreshold && !omp_in_parallel()) {
      std::atomic<bool> dead{false};
#pragma omp parallel
      {
        std::vector<SlotVal> local = slots;
        LamCache local_cache;
        CompiledEval ev(m, c, local, local_cache);
        uint64_t mine = full;
#pragma omp for schedule(static)
        for (int64_t i = 0; i < (int64_t)n; ++i) {
          if (dead.load(std::memory_order_relaxed)) continue;
          local[slot] = mk(ev, (uint64_t)i);
          mine &= ev.eval(body);
          if (mine == 0) dead.store(true, std::memory_order_relaxed);
        }
#pragma omp critical
        conj &= mine;
      }
      return finish_aggregate(conj, sel);
    }
#endif
    for (uint64_t i = 0; i < n; ++i) {
      slots[slot] = mk(*this, i);
      conj &= eval(body);
      if (conj == 0) break;
    }
    return finish_aggregate(conj, sel);
  }

  uint64_t eval(int idx) {
    const CNode& n = c.nodes[idx];
    switch (n.op) {
      case CNode::Exe0: {
        if (n.rel.k != TRef::RelSlot) throw EvalError("bad 0-place relation reference");
        const SlotVal& v = slots[n.rel.slot];
        if (v.kind != SlotVal::Rel0) throw EvalError("slot does not hold a proposition");
        return v.code & full;
      }
      case CNode::Exe1: {
        uint64_t code = den_rel1(n.rel);
        IndTermDen d = den_ind(n.t1);
        if (!d.proper) return 0;  // negative free logic
        return prop_row(code, m.nu_index(d.value));
      }
      case CNode::Exe2: {
        if (n.rel.k != TRef::RelSlot) throw EvalError("bad 2-place relation reference");
        const SlotVal& v = slots[n.rel.slot];
        if (v.kind != SlotVal::Rel2) throw EvalError("slot does not hold a 2-place relation");
        IndTermDen d1 = den_ind(n.t1);
        IndTermDen d2 = den_ind(n.t2);
        if (!d1.proper || !d2.proper) return 0;
        return rel2_row(v.code, m.nu_index(d1.value), m.nu_index(d2.value));
      }
      case CNode::Enc: {
        IndTermDen d = den_ind(n.t1);
        if (!d.proper || d.value.ordinary) return 0;
        uint64_t code = den_rel1(n.rel);
        if (code > 63) throw BudgetError("encoding membership beyond representable property sets");
        return ((d.value.mask >> code) & 1) ? full : 0;
      }
      case CNode::Not:
        return op_not(eval(n.a));
      case CNode::Impl: {
        uint64_t a = eval(n.a);
        if (m.all_classical() && a == 0) return full;
        return op_impl(a, eval(n.b));
      }
      case CNode::Box:
        return op_box(eval(n.a));
      case CNode::ForallInd: {
        if (n.guard_mode >= 0) {
          uint64_t n_ind = m.n_individuals();
          IndTermDen cand = den_ind(n.guard_term);
          uint64_t n_noncand = n_ind - (cand.proper ? 1 : 0);
          uint64_t conj = full;
          if (n_noncand > 0 && n.guard_mode == 0) conj = 0;
          if (conj != 0 && cand.proper) {
            slots[n.slot] = SlotVal::individual(cand.value);
            conj &= eval(n.a);
          }
          return finish_aggregate(conj, [](const StateTables& t) { return t.forall_ind_t; });
        }
        return forall_scan(
            n.a, n.slot, m.n_individuals(),
            [](CompiledEval& ev, uint64_t i) {
              return SlotVal::individual(ev.m.individual_by_rank(i));
            },
            [](const StateTables& t) { return t.forall_ind_t; });
      }
      case CNode::ForallRel0:
        return forall_scan(
            n.a, n.slot, m.n_propositions(),
            [](CompiledEval&, uint64_t i) { return SlotVal::prop(i); },
            [](const StateTables& t) { return t.forall_rel_t; });
      case CNode::ForallRel1:
        return forall_scan(
            n.a, n.slot, m.n_properties(),
            [](CompiledEval&, uint64_t i) { return SlotVal::rel1(i); },
            [](const StateTables& t) { return t.forall_rel_t; });
      case CNode::ForallRel2:
        return forall_scan(
            n.a, n.slot, m.n_rel2(),
            [](CompiledEval&, uint64_t i) { return SlotVal::rel2(i); },
            [](const StateTables& t) { return t.forall_rel_t; });
      case CNode::IdIndFast: {
        IndTermDen d1 = den_ind(n.t1);
        IndTermDen d2 = den_ind(n.t2);
        return (d1.proper && d2.proper && d1.value == d2.value) ? full : 0;
      }
      case CNode::EncSetEq: {
        IndTermDen d1 = den_ind(n.t1);
        IndTermDen d2 = den_ind(n.t2);
        uint64_t e1 = (d1.proper && !d1.value.ordinary) ? d1.value.mask : 0;
        uint64_t e2 = (d2.proper && !d2.value.ordinary) ? d2.value.mask : 0;
        return e1 == e2 ? full : 0;
      }
      case CNode::ExeSetEq: {
        IndTermDen d1 = den_ind(n.t1);
        IndTermDen d2 = den_ind(n.t2);
        if (d1.proper != d2.proper) return 0;
        if (!d1.proper) return full;
        return m.nu_index(d1.value) == m.nu_index(d2.value) ? full : 0;
      }
      case CNode::IdRelFast: {
        uint64_t c1 = den_rel1(n.t1);
        uint64_t c2 = den_rel1(n.t2);
        return c1 == c2 ? full : 0;
      }
    }
    throw EvalError("bad node");
  }
};

struct Prepared {
  FormulaPtr ast;  // keeps binder source pointers alive for the cache
  Compiled compiled;
  std::vector<SlotVal> slots;
};

Prepared prepare(const AczelModel& m, const Assignment& asg, const FormulaPtr& f) {
  Prepared p;
  p.ast = normalize_bound_names(expand_core(f, m.all_classical()));
  Compiler comp;
  comp.classical_model = m.all_classical();
  comp.out.root = -1;
  int root = comp.formula(p.ast);
  p.compiled = std::move(comp.out);
  p.compiled.root = root;
  p.slots.assign(p.compiled.n_slots, SlotVal{});
  for (auto& [ref, slot] : p.compiled.free_slots) {
    const SlotVal* v = asg.find(ref);
    if (!v)
      throw EvalError("unbound variable '" + ref.name + "'" +
                      (ref.is_rel ? " (relation, arity " + std::to_string(ref.arity) + ")" : ""));
    bool ok = (!ref.is_rel && v->kind == SlotVal::Ind) ||
              (ref.is_rel && ref.arity == 0 && v->kind == SlotVal::Rel0) ||
              (ref.is_rel && ref.arity == 1 && v->kind == SlotVal::Rel1) ||
              (ref.is_rel && ref.arity == 2 && v->kind == SlotVal::Rel2);
    if (!ok) throw EvalError("assignment sort mismatch for '" + ref.name + "'");
    p.slots[slot] = *v;
  }
  return p;
}

}  // namespace

uint64_t Evaluator::eval_formula(const Assignment& asg, const FormulaPtr& f) {
  Prepared p = prepare(m_, asg, f);
  retained_.push_back(p.ast);
  CompiledEval ev(m_, p.compiled, p.slots, cache_);
  return ev.eval(p.compiled.root);
}

FormulaPtr Evaluator::universal_closure(const Assignment& asg, const FormulaPtr& f) const {
  FormulaPtr g = f;
  auto fv = free_vars(f);
  std::sort(fv.begin(), fv.end());
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) {
    if (asg.find(*it)) continue;
    if (it->is_rel) g = forall_rel(it->arity, it->name, g);
    else g = forall_ind(it->name, g);
  }
  return g;
}

bool Evaluator::valid(const FormulaPtr& f) { return valid_under(Assignment{}, f); }

bool Evaluator::valid_under(const Assignment& asg, const FormulaPtr& f) {
  FormulaPtr closed = universal_closure(asg, f);
  uint64_t bits = eval_formula(asg, closed);
  uint64_t s0 = m_.state_row_mask(0);
  return (bits & s0) == s0;
}

IndTermDen Evaluator::den_individual_term(const Assignment& asg, const TermPtr& t) {
  if (!t->is_individual()) throw SortError("relation term in individual position");
  if (t->kind == TermKind::IndVar) {
    const SlotVal* v = asg.find({t->name, false, 1});
    if (!v || v->kind != SlotVal::Ind) throw EvalError("unbound individual variable " + t->name);
    return {true, v->ind};
  }
  FormulaPtr probe = exe(o_bang(), {t});
  Prepared p = prepare(m_, asg, probe);
  retained_.push_back(p.ast);
  CompiledEval ev(m_, p.compiled, p.slots, cache_);
  return ev.den_ind(p.compiled.nodes[p.compiled.root].t1);
}

uint64_t Evaluator::den_rel1(const Assignment& asg, const TermPtr& rel) {
  if (!rel->is_relation()) throw SortError("individual term in relation position");
  if (rel->kind == TermKind::RelVar) {
    if (rel->name == "O!") return m_.o_bang_code();
    if (rel->name == "A!") return m_.a_bang_code();
    if (rel->arity != 1) throw SortError("den_rel1 needs a 1-place term");
    const SlotVal* v = asg.find({rel->name, true, 1});
    if (!v || v->kind != SlotVal::Rel1) throw EvalError("unbound relation variable " + rel->name);
    return v->code;
  }
  FormulaPtr probe = enc(ind_var("zdzeta"), rel);
  Assignment asg2 = asg;
  asg2.set_ind("zdzeta", Individual::make_abstract(0));
  Prepared p = prepare(m_, asg2, probe);
  retained_.push_back(p.ast);
  CompiledEval ev(m_, p.compiled, p.slots, cache_);
  return ev.den_rel1(p.compiled.nodes[p.compiled.root].rel);
}

uint64_t Evaluator::exe1(const Assignment& asg, const TermPtr& rel, const TermPtr& t) {
  return eval_formula(asg, exe(rel, {t}));
}

uint64_t Evaluator::enc_prop(const Assignment& asg, const TermPtr& t, const TermPtr& rel) {
  return eval_formula(asg, enc(t, rel));
}

uint64_t Evaluator::lambda1(const Assignment& asg, const std::string& x, const FormulaPtr& matrix) {
  return den_rel1(asg, lambda(x, matrix));
}

bool Evaluator::denotes(const Assignment& asg, const TermPtr& t) {
  if (t->is_individual()) {
    if (t->kind == TermKind::IndVar) return true;
    return den_individual_term(asg, t).proper;
  }
  if (t->kind == TermKind::RelVar) return true;
  if (classify_propositional(t->matrix, ClassifyMode::Strict) && !contains_description(t->matrix))
    return true;
  uint64_t n = m_.n_individuals();
  Assignment probe = asg;
  for (uint64_t r = 0; r < n; ++r) {
    probe.set_ind("zdencheck", m_.individual_by_rank(r));
    if (!beta_check(probe, t, ind_var("zdencheck"))) return false;
  }
  return true;
}

bool Evaluator::beta_check(const Assignment& asg, const TermPtr& lam, const TermPtr& t) {
  if (lam->kind != TermKind::Lambda) throw SortError("beta_check needs a lambda term");
  IndTermDen d = den_individual_term(asg, t);
  if (!d.proper) throw EvalError("beta_check needs a proper individual term");
  uint64_t app = eval_formula(asg, exe(lam, {t}));
  uint64_t sub = eval_formula(asg, substitute_ind(lam->matrix, lam->bound, t));
  uint64_t s0 = m_.state_row_mask(0);
  return (app & s0) == (sub & s0);
}

// ---------------------------------------------------------------------------
// CompiledQuery

struct CompiledQuery::Impl {
  Prepared prepared;
};

CompiledQuery::CompiledQuery(Evaluator& ev, const FormulaPtr& f) : ev_(ev) {
  impl_ = std::make_unique<Impl>();
  // Bindings are supplied per eval; compile with an empty assignment and
  // fill slots later.
  impl_->prepared.ast = normalize_bound_names(expand_core(f, ev.m_.all_classical()));
  Compiler comp;
  comp.classical_model = ev.m_.all_classical();
  int root = comp.formula(impl_->prepared.ast);
  impl_->prepared.compiled = std::move(comp.out);
  impl_->prepared.compiled.root = root;
  impl_->prepared.slots.assign(impl_->prepared.compiled.n_slots, SlotVal{});
  ev.retained_.push_back(impl_->prepared.ast);
}

CompiledQuery::~CompiledQuery() = default;
CompiledQuery::CompiledQuery(CompiledQuery&& o) noexcept : ev_(o.ev_), impl_(std::move(o.impl_)) {}

uint64_t CompiledQuery::eval(const Assignment& asg) {
  Prepared& p = impl_->prepared;
  for (auto& [ref, slot] : p.compiled.free_slots) {
    const SlotVal* v = asg.find(ref);
    if (!v) throw EvalError("unbound variable '" + ref.name + "'");
    p.slots[slot] = *v;
  }
  CompiledEval ev(ev_.m_, p.compiled, p.slots, ev_.cache_);
  return ev.eval(p.compiled.root);
}

}  // namespace aot
