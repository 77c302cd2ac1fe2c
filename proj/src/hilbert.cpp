// Tautology proving: truth-table decision plus a Kalmar-style constructive
// derivation through P1-P3 and MP, compiled into a single replayable trace.

#include <functional>
#include <unordered_map>

#include "aot/kernel.hpp"
#include "aot/printer.hpp"
#include "aot/syntax_ops.hpp"
#include "kernel_internal.hpp"

namespace aot::kernel {

namespace {

bool is_connective(FormulaKind k) {
  switch (k) {
    case FormulaKind::Not: case FormulaKind::Impl: case FormulaKind::And:
    case FormulaKind::Or: case FormulaKind::Equiv:
      return true;
    default:
      return false;
  }
}

void collect_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& atoms,
                   std::unordered_map<std::string, int>& index) {
  if (!is_connective(f->kind)) {
    std::string key = print(f);
    if (!index.count(key)) {
      index[key] = (int)atoms.size();
      atoms.push_back(f);
    }
    return;
  }
  switch (f->kind) {
    case FormulaKind::Not:
      collect_atoms(f->a, atoms, index);
      break;
    default:
      collect_atoms(f->a, atoms, index);
      collect_atoms(f->b, atoms, index);
      break;
  }
}

bool eval_bool(const FormulaPtr& f, const std::unordered_map<std::string, int>& index,
               uint32_t val) {
  if (!is_connective(f->kind)) return (val >> index.at(print(f))) & 1;
  switch (f->kind) {
    case FormulaKind::Not: return !eval_bool(f->a, index, val);
    case FormulaKind::Impl: return !eval_bool(f->a, index, val) || eval_bool(f->b, index, val);
    case FormulaKind::And: return eval_bool(f->a, index, val) && eval_bool(f->b, index, val);
    case FormulaKind::Or: return eval_bool(f->a, index, val) || eval_bool(f->b, index, val);
    case FormulaKind::Equiv: return eval_bool(f->a, index, val) == eval_bool(f->b, index, val);
    default: return false;
  }
}

}  // namespace

TautFailure taut_check(const FormulaPtr& f) {
  std::vector<FormulaPtr> atoms;
  std::unordered_map<std::string, int> index;
  collect_atoms(f, atoms, index);
  if (atoms.size() > 24) throw KernelError("tautology check: too many atoms");
  for (uint32_t v = 0; v < (1u << atoms.size()); ++v) {
    if (!eval_bool(f, index, v)) {
      TautFailure fail;
      fail.is_taut = false;
      for (size_t i = 0; i < atoms.size(); ++i)
        fail.falsifying.push_back({print(atoms[i]), ((v >> i) & 1) != 0});
      return fail;
    }
  }
  return {true, {}};
}

bool taut_consequence(const std::vector<FormulaPtr>& premises, const FormulaPtr& conclusion) {
  FormulaPtr f = conclusion;
  for (auto it = premises.rbegin(); it != premises.rend(); ++it) f = impl(*it, f);
  return taut_check(f).is_taut;
}

// ---------------------------------------------------------------------------
// hypothesis-tracked derivations over the {~, ->} fragment

namespace {

struct HStep {
  FormulaPtr f;
  enum K { Ax, Hyp, Mp, Thm } k;
  int ax = 0;              // 1..3
  FormulaPtr a, b, c;      // axiom arguments
  int i = -1, j = -1;      // Mp: major, minor
  int hyp = -1;
  int import_idx = -1;
};

struct HProof {
  std::vector<FormulaPtr> hyps;
  std::vector<HStep> steps;
  std::vector<Theorem> imports;
  std::unordered_map<std::string, int> index;
  int concl = -1;  // index of the conclusion step

  int find(const FormulaPtr& f) const {
    auto it = index.find(print(f));
    return it == index.end() ? -1 : it->second;
  }

  int push(HStep s) {
    std::string key = print(s.f);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    steps.push_back(std::move(s));
    index[key] = (int)steps.size() - 1;
    return (int)steps.size() - 1;
  }

  int ax1(const FormulaPtr& a, const FormulaPtr& b) {
    HStep s;
    s.k = HStep::Ax; s.ax = 1; s.a = a; s.b = b;
    s.f = impl(a, impl(b, a));
    return push(std::move(s));
  }
  int ax2(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c) {
    HStep s;
    s.k = HStep::Ax; s.ax = 2; s.a = a; s.b = b; s.c = c;
    s.f = impl(impl(a, impl(b, c)), impl(impl(a, b), impl(a, c)));
    return push(std::move(s));
  }
  int ax3(const FormulaPtr& a, const FormulaPtr& b) {
    HStep s;
    s.k = HStep::Ax; s.ax = 3; s.a = a; s.b = b;
    s.f = impl(impl(f_not(b), f_not(a)), impl(impl(f_not(b), a), b));
    return push(std::move(s));
  }
  int hyp(int h) {
    HStep s;
    s.k = HStep::Hyp; s.hyp = h; s.f = hyps[h];
    return push(std::move(s));
  }
  int mp(int maj, int min) {
    const FormulaPtr& mf = steps[maj].f;
    if (mf->kind != FormulaKind::Impl || !struct_equal(mf->a, steps[min].f))
      throw KernelError("internal: bad MP in tautology derivation");
    HStep s;
    s.k = HStep::Mp; s.i = maj; s.j = min; s.f = mf->b;
    return push(std::move(s));
  }
  int thm(Theorem t) {
    HStep s;
    s.k = HStep::Thm; s.f = t.formula();
    int at = find(s.f);
    if (at >= 0) return at;
    imports.push_back(std::move(t));
    s.import_idx = (int)imports.size() - 1;
    return push(std::move(s));
  }
};

// id: A -> A  (five-step classic)
int emit_id(HProof& q, const FormulaPtr& A) {
  int p2 = q.ax2(A, impl(A, A), A);
  int p1a = q.ax1(A, impl(A, A));
  int s1 = q.mp(p2, p1a);
  int p1b = q.ax1(A, A);
  return q.mp(s1, p1b);
}

// from step deriving alpha, produce step deriving phi -> alpha
int wrap_p1(HProof& q, int base, const FormulaPtr& phi) {
  int p1 = q.ax1(q.steps[base].f, phi);
  return q.mp(p1, base);
}

// Deduction theorem: eliminate hypothesis `h`, mapping every step alpha to
// phi -> alpha.
HProof discharge(const HProof& p, int h) {
  HProof q;
  for (size_t i = 0; i < p.hyps.size(); ++i)
    if ((int)i != h) q.hyps.push_back(p.hyps[i]);
  FormulaPtr phi = p.hyps[h];

  std::vector<int> remap(p.steps.size(), -1);
  for (size_t i = 0; i < p.steps.size(); ++i) {
    const HStep& s = p.steps[i];
    switch (s.k) {
      case HStep::Hyp: {
        if (s.hyp == h) {
          remap[i] = emit_id(q, phi);
        } else {
          int nh = s.hyp < h ? s.hyp : s.hyp - 1;
          remap[i] = wrap_p1(q, q.hyp(nh), phi);
        }
        break;
      }
      case HStep::Ax: {
        int base = s.ax == 1 ? q.ax1(s.a, s.b) : s.ax == 2 ? q.ax2(s.a, s.b, s.c) : q.ax3(s.a, s.b);
        remap[i] = wrap_p1(q, base, phi);
        break;
      }
      case HStep::Thm: {
        int base = q.thm(p.imports[s.import_idx]);
        remap[i] = wrap_p1(q, base, phi);
        break;
      }
      case HStep::Mp: {
        // have phi -> (A -> B) and phi -> A
        const FormulaPtr& major = p.steps[s.i].f;  // A -> B
        int p2 = q.ax2(phi, major->a, major->b);
        int s1 = q.mp(p2, remap[s.i]);
        remap[i] = q.mp(s1, remap[s.j]);
        break;
      }
    }
  }
  q.concl = remap[p.concl >= 0 ? p.concl : (int)p.steps.size() - 1];
  return q;
}

// Splice all steps of `from` into `into` (same hypothesis list), returning
// the index of from's conclusion.
int append_proof(HProof& into, const HProof& from) {
  std::vector<int> remap(from.steps.size(), -1);
  for (size_t i = 0; i < from.steps.size(); ++i) {
    const HStep& s = from.steps[i];
    switch (s.k) {
      case HStep::Hyp: remap[i] = into.hyp(s.hyp); break;
      case HStep::Ax:
        remap[i] = s.ax == 1 ? into.ax1(s.a, s.b)
                 : s.ax == 2 ? into.ax2(s.a, s.b, s.c)
                             : into.ax3(s.a, s.b);
        break;
      case HStep::Thm: remap[i] = into.thm(from.imports[s.import_idx]); break;
      case HStep::Mp: remap[i] = into.mp(remap[s.i], remap[s.j]); break;
    }
  }
  return remap[from.concl >= 0 ? from.concl : (int)from.steps.size() - 1];
}

// ---------------------------------------------------------------------------
// lemma kit (theorems over the {~,->} fragment), instance-cached

Theorem compile_hproof(const HProof& p);

std::string lemma_key(const char* name, std::initializer_list<const FormulaPtr*> args) {
  std::string k = name;
  for (auto* a : args) k += "|" + print(*a);
  return k;
}

thread_local std::unordered_map<std::string, Theorem> g_lemma_cache;

template <typename Make>
Theorem cached_lemma(const std::string& key, Make make) {
  auto it = g_lemma_cache.find(key);
  if (it != g_lemma_cache.end()) return it->second;
  Theorem t = make();
  g_lemma_cache.emplace(key, t);
  return t;
}

Theorem lemma_id(const FormulaPtr& A) {
  return cached_lemma(lemma_key("id", {&A}), [&] {
    HProof p;
    emit_id(p, A);
    return compile_hproof(p);
  });
}

// ~A -> (A -> B)
Theorem lemma_afq(const FormulaPtr& A, const FormulaPtr& B) {
  return cached_lemma(lemma_key("afq", {&A, &B}), [&] {
    HProof p;
    p.hyps = {f_not(A), A};
    int h0 = p.hyp(0), h1 = p.hyp(1);
    int s1 = p.mp(p.ax1(A, f_not(B)), h1);                      // ~B -> A
    int s2 = p.mp(p.ax1(f_not(A), f_not(B)), h0);               // ~B -> ~A
    int s3 = p.mp(p.ax3(A, B), s2);                             // (~B -> A) -> B
    p.concl = p.mp(s3, s1);                                     // B
    return compile_hproof(discharge(discharge(p, 1), 0));
  });
}

// ~~A -> A
Theorem lemma_dn_elim(const FormulaPtr& A) {
  return cached_lemma(lemma_key("dne", {&A}), [&] {
    HProof p;
    p.hyps = {f_not(f_not(A))};
    int h = p.hyp(0);
    int s1 = p.mp(p.ax1(f_not(f_not(A)), f_not(A)), h);  // ~A -> ~~A
    int s2 = p.thm(lemma_id(f_not(A)));                  // ~A -> ~A
    int s3 = p.mp(p.ax3(f_not(A), A), s1);               // (~A -> ~A) -> A
    p.concl = p.mp(s3, s2);                               // A
    return compile_hproof(discharge(p, 0));
  });
}

// A -> ~~A
Theorem lemma_dn_intro(const FormulaPtr& A) {
  return cached_lemma(lemma_key("dni", {&A}), [&] {
    HProof p;
    p.hyps = {A};
    int h = p.hyp(0);
    int dne = p.thm(lemma_dn_elim(f_not(A)));            // ~~~A -> ~A
    int s1 = p.mp(p.ax1(A, f_not(f_not(f_not(A)))), h);  // ~~~A -> A
    int s2 = p.mp(p.ax3(A, f_not(f_not(A))), dne);       // (~~~A -> A) -> ~~A
    p.concl = p.mp(s2, s1);
    return compile_hproof(discharge(p, 0));
  });
}

// X -> Y, Y -> Z within a proof: X -> Z
int h_compose(HProof& p, int xy, int yz) {
  const FormulaPtr X = p.steps[xy].f->a;
  const FormulaPtr Y = p.steps[xy].f->b;
  const FormulaPtr Z = p.steps[yz].f->b;
  if (!struct_equal(p.steps[yz].f->a, Y))
    throw KernelError("internal: compose mismatch");
  int s1 = p.mp(p.ax1(impl(Y, Z), X), yz);  // X -> (Y -> Z)
  int s2 = p.mp(p.ax2(X, Y, Z), s1);        // (X -> Y) -> (X -> Z)
  return p.mp(s2, xy);
}

// (A -> B) -> (~B -> ~A)
Theorem lemma_contrap(const FormulaPtr& A, const FormulaPtr& B) {
  return cached_lemma(lemma_key("ctp", {&A, &B}), [&] {
    HProof p;
    p.hyps = {impl(A, B), f_not(B)};
    int h0 = p.hyp(0), h1 = p.hyp(1);
    int dneA = p.thm(lemma_dn_elim(A));                      // ~~A -> A
    int s1 = h_compose(p, dneA, h0);                         // ~~A -> B
    int dniB = p.thm(lemma_dn_intro(B));                     // B -> ~~B
    int s2 = h_compose(p, s1, dniB);                         // ~~A -> ~~B
    int s3 = p.mp(p.ax1(f_not(B), f_not(f_not(A))), h1);     // ~~A -> ~B
    int s4 = p.mp(p.ax3(f_not(B), f_not(A)), s2);            // (~~A -> ~B) -> ~A
    p.concl = p.mp(s4, s3);                                  // ~A
    return compile_hproof(discharge(discharge(p, 1), 0));
  });
}

// A -> (~B -> ~(A -> B))
Theorem lemma_neg_impl(const FormulaPtr& A, const FormulaPtr& B) {
  return cached_lemma(lemma_key("ni", {&A, &B}), [&] {
    HProof inner;  // {A, ~B, A->B} |- B
    inner.hyps = {A, f_not(B), impl(A, B)};
    inner.concl = inner.mp(inner.hyp(2), inner.hyp(0));
    HProof p = discharge(inner, 2);  // {A, ~B} |- (A->B) -> B
    int ab_b = p.concl;
    int ctp = p.thm(lemma_contrap(impl(A, B), B));  // ((A->B)->B) -> (~B -> ~(A->B))
    int s1 = p.mp(ctp, ab_b);
    p.concl = p.mp(s1, p.hyp(1));
    return compile_hproof(discharge(discharge(p, 1), 0));
  });
}

// (A -> B) -> ((~A -> B) -> B)
Theorem lemma_cases(const FormulaPtr& A, const FormulaPtr& B) {
  return cached_lemma(lemma_key("cas", {&A, &B}), [&] {
    HProof p;
    p.hyps = {impl(A, B), impl(f_not(A), B)};
    int h0 = p.hyp(0), h1 = p.hyp(1);
    int s1 = p.mp(p.thm(lemma_contrap(A, B)), h0);          // ~B -> ~A
    int s2 = p.mp(p.thm(lemma_contrap(f_not(A), B)), h1);   // ~B -> ~~A
    int s3 = p.mp(p.ax3(f_not(A), B), s2);                  // (~B -> ~A) -> B
    p.concl = p.mp(s3, s1);
    return compile_hproof(discharge(discharge(p, 1), 0));
  });
}

// ---------------------------------------------------------------------------
// compiling hypothesis-free proofs into one flat trace

Theorem compile_hproof(const HProof& p) {
  if (!p.hyps.empty()) throw KernelError("internal: compiling a hypothetical proof");
  Trace out;
  std::unordered_map<std::string, int> seen;
  auto emit = [&](Step s) -> int {
    std::string key = print(s.formula);
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    out.push_back(std::move(s));
    seen[key] = (int)out.size() - 1;
    return (int)out.size() - 1;
  };

  std::vector<int> remap(p.steps.size(), -1);
  for (size_t i = 0; i < p.steps.size(); ++i) {
    const HStep& s = p.steps[i];
    switch (s.k) {
      case HStep::Hyp:
        throw KernelError("internal: hypothesis in a closed proof");
      case HStep::Ax:
        remap[i] = emit(Step{s.ax == 1 ? "p1" : s.ax == 2 ? "p2" : "p3", {}, s.f});
        break;
      case HStep::Thm: {
        const Trace& tr = p.imports[s.import_idx].trace();
        std::vector<int> sub(tr.size(), -1);
        for (size_t j = 0; j < tr.size(); ++j) {
          Step ns = tr[j];
          for (int& pr : ns.premises) pr = sub[pr];
          sub[j] = emit(std::move(ns));
        }
        remap[i] = sub[tr.size() - 1];
        break;
      }
      case HStep::Mp:
        remap[i] = emit(Step{"mp", {remap[s.i], remap[s.j]}, s.f});
        break;
    }
  }
  int concl_idx = remap[p.concl >= 0 ? p.concl : (int)p.steps.size() - 1];
  FormulaPtr concl = out[concl_idx].formula;
  // The last step must carry the theorem's formula.
  if (concl_idx != (int)out.size() - 1)
    out.push_back(Step{"restate", {concl_idx}, concl});
  return Mint::make(concl, std::move(out));
}

// ---------------------------------------------------------------------------
// Kalmar construction

struct Kalmar {
  FormulaPtr core;
  std::vector<FormulaPtr> atoms;
  std::unordered_map<std::string, int> atom_index;

  FormulaPtr lit(const FormulaPtr& f, uint32_t val, bool* out_true = nullptr) {
    bool v = eval_core(f, val);
    if (out_true) *out_true = v;
    return v ? f : f_not(f);
  }

  bool eval_core(const FormulaPtr& f, uint32_t val) {
    if (!is_connective(f->kind)) return (val >> atom_index.at(print(f))) & 1;
    if (f->kind == FormulaKind::Not) return !eval_core(f->a, val);
    return !eval_core(f->a, val) || eval_core(f->b, val);  // Impl
  }

  // Derive lit(f) within p, whose hyps are the literals of all atoms.
  int derive_lit(HProof& p, const FormulaPtr& f, uint32_t val) {
    if (!is_connective(f->kind)) {
      return p.hyp(atom_index.at(print(f)));
    }
    if (f->kind == FormulaKind::Not) {
      bool sub = eval_core(f->a, val);
      if (sub) {
        int d = derive_lit(p, f->a, val);          // f->a
        int dni = p.thm(lemma_dn_intro(f->a));     // a -> ~~a
        return p.mp(dni, d);                       // ~~a == ~f? no: lit(~a) with a true is ~(~a) = ~~a
      }
      return derive_lit(p, f->a, val);  // lit(a) = ~a, which is lit(~a) itself
    }
    // implication
    bool va = eval_core(f->a, val);
    bool vb = eval_core(f->b, val);
    if (!va) {
      int d = derive_lit(p, f->a, val);                       // ~a
      int afq = p.thm(lemma_afq(f->a, f->b));                 // ~a -> (a -> b)
      return p.mp(afq, d);
    }
    if (vb) {
      int d = derive_lit(p, f->b, val);                       // b
      int p1 = p.ax1(f->b, f->a);                             // b -> (a -> b)
      return p.mp(p1, d);
    }
    int da = derive_lit(p, f->a, val);                        // a
    int db = derive_lit(p, f->b, val);                        // ~b
    int ni = p.thm(lemma_neg_impl(f->a, f->b));               // a -> (~b -> ~(a->b))
    int s1 = p.mp(ni, da);
    return p.mp(s1, db);
  }

  HProof leaf(uint32_t val) {
    HProof p;
    for (size_t i = 0; i < atoms.size(); ++i)
      p.hyps.push_back(((val >> i) & 1) ? atoms[i] : f_not(atoms[i]));
    p.concl = derive_lit(p, core, val);  // core is a tautology: lit(core) == core
    return p;
  }

  HProof merge(uint32_t partial_val, size_t fixed) {
    if (fixed == atoms.size()) return leaf(partial_val);
    HProof p_true = merge(partial_val | (1u << fixed), fixed + 1);
    HProof p_false = merge(partial_val, fixed + 1);
    // Discharge the literal of atoms[fixed] (hypothesis index `fixed`).
    HProof q_true = discharge(p_true, (int)fixed);    // lits[0..fixed-1] |- a -> core
    HProof q_false = discharge(p_false, (int)fixed);  // lits[0..fixed-1] |- ~a -> core
    HProof r;
    r.hyps = q_true.hyps;
    int i_true = append_proof(r, q_true);
    int i_false = append_proof(r, q_false);
    int cas = r.thm(lemma_cases(atoms[fixed], core));
    int s1 = r.mp(cas, i_true);
    r.concl = r.mp(s1, i_false);
    return r;
  }
};

}  // namespace

Theorem taut_trans(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c) {
  return cached_lemma(lemma_key("trans", {&a, &b, &c}), [&] {
    HProof p;
    p.hyps = {impl(a, b), impl(b, c)};
    p.concl = h_compose(p, p.hyp(0), p.hyp(1));
    return compile_hproof(discharge(discharge(p, 1), 0));
  });
}

Theorem taut_contrap(const FormulaPtr& a, const FormulaPtr& b) { return lemma_contrap(a, b); }
Theorem taut_dn_intro(const FormulaPtr& a) { return lemma_dn_intro(a); }
Theorem taut_dn_elim(const FormulaPtr& a) { return lemma_dn_elim(a); }

Theorem taut_prove(const FormulaPtr& f) {
  TautFailure chk = taut_check(f);
  if (!chk.is_taut) {
    std::string msg = "not a tautology; falsified by:";
    for (auto& [atom, v] : chk.falsifying) msg += " " + atom + "=" + (v ? "1" : "0");
    throw NotATautology(msg, chk);
  }
  FormulaPtr core = expand_core(f);

  Kalmar k;
  k.core = core;
  collect_atoms(core, k.atoms, k.atom_index);
  if (k.atoms.size() > 12)
    throw KernelError("tautology derivation supports at most 12 atoms");

  HProof closed = k.merge(0, 0);
  Theorem t = compile_hproof(closed);
  if (!struct_equal(t.formula(), f)) t = df(t, f);
  return t;
}

}  // namespace aot::kernel
