#include "aot/countermodel.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aot {

StateTables state_tables_by_index(uint32_t idx) {
  StateTables t;
  t.not_t = (uint8_t)(idx & 3);
  t.impl_t = (uint8_t)((idx >> 2) & 15);
  t.box_t = (uint8_t)((idx >> 6) & 3);
  t.forall_ind_t = (uint8_t)((idx >> 8) & 3);
  t.forall_rel_t = (uint8_t)((idx >> 10) & 3);
  return t;
}

namespace {

struct Candidate {
  ModelConfig config;
};

// Fails (closure false at the actual state in some world) -> world index.
std::optional<int> refutes(const AczelModel& m, const FormulaPtr& f) {
  Evaluator ev(m);
  FormulaPtr closed = ev.universal_closure(Assignment{}, f);
  uint64_t bits = ev.eval_formula(Assignment{}, closed);
  for (int w = 0; w < m.n_worlds(); ++w)
    if (!((bits >> w) & 1)) return w;  // actual-state row starts at bit 0
  return std::nullopt;
}

// Finds concrete values for the free variables under which f fails at
// (s0, some world).
Assignment extract_witness(const AczelModel& m, const FormulaPtr& f, int* world_out) {
  Evaluator ev(m);
  auto fv = free_vars(f);
  std::sort(fv.begin(), fv.end());
  Assignment asg;
  std::vector<uint64_t> domain_size;
  for (auto& v : fv) {
    if (!v.is_rel) domain_size.push_back(m.n_individuals());
    else if (v.arity == 0) domain_size.push_back(m.n_propositions());
    else if (v.arity == 1) domain_size.push_back(m.n_properties());
    else domain_size.push_back(m.n_rel2());
  }
  CompiledQuery query(ev, f);
  std::vector<uint64_t> pick(fv.size(), 0);
  while (true) {
    Assignment cur;
    for (size_t i = 0; i < fv.size(); ++i) {
      if (!fv[i].is_rel) cur.set_ind(fv[i].name, m.individual_by_rank(pick[i]));
      else if (fv[i].arity == 0) cur.set_prop(fv[i].name, pick[i]);
      else if (fv[i].arity == 1) cur.set_rel1(fv[i].name, pick[i]);
      else cur.set_rel2(fv[i].name, pick[i]);
    }
    uint64_t bits = query.eval(cur);
    for (int w = 0; w < m.n_worlds(); ++w)
      if (!((bits >> w) & 1)) {
        *world_out = w;
        return cur;
      }
    // next tuple
    size_t k = 0;
    while (k < fv.size()) {
      if (++pick[k] < domain_size[k]) break;
      pick[k] = 0;
      ++k;
    }
    if (k == fv.size()) break;
  }
  *world_out = 0;
  return asg;  // closure false but no pointwise witness: report empty
}

}  // namespace

std::optional<Countermodel> countermodel_search(const FormulaPtr& f, const SearchBounds& bounds) {
  // Configurations ordered by size.
  std::vector<ModelConfig> configs;
  for (int o = 1; o <= bounds.max_ordinary; ++o)
    for (int sp = 1; sp <= bounds.max_special; ++sp)
      for (int st = 1; st <= bounds.max_states; ++st)
        for (int w = 1; w <= bounds.max_worlds; ++w)
          configs.push_back({o, sp, st, w, {}, {}});
  std::stable_sort(configs.begin(), configs.end(), [](const ModelConfig& a, const ModelConfig& b) {
    auto key = [](const ModelConfig& c) {
      return std::tuple<int, int, int, int, int, int>(
          (c.n_ordinary + c.n_special) * c.n_states * c.n_worlds,
          c.n_ordinary + c.n_special, c.n_ordinary, c.n_special, c.n_states, c.n_worlds);
    };
    return key(a) < key(b);
  });

  uint64_t tried = 0, skipped = 0;

  for (const ModelConfig& base : configs) {
    int extra_states = base.n_states - 1;
    uint64_t n_variants = 1;
    if (bounds.vary_state_interp) {
      for (int i = 0; i < extra_states; ++i) {
        if (n_variants > (uint64_t)1 << 40) break;  // bounded by the caller's patience
        n_variants *= kStateTableVariants;
      }
    }

    auto config_for = [&](uint64_t v) {
      ModelConfig cfg = base;
      for (int s = 1; s < cfg.n_states; ++s) {
        StateTables t = state_tables_by_index((uint32_t)(v % kStateTableVariants));
        v /= kStateTableVariants;
        if (!t.classical()) cfg.state_interp[s] = t;
      }
      return cfg;
    };

    // Small parallel blocks; the lowest candidate index in a block wins, so
    // the outcome is independent of the thread schedule.
    constexpr uint64_t kBlock = 8;
    for (uint64_t block = 0; block < n_variants; block += kBlock) {
      uint64_t hi = std::min(n_variants, block + kBlock);
      int n = (int)(hi - block);
      std::vector<int> outcome(n, -2);  // -2 no refutation, -1 skipped, >=0 failing world

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
      for (int i = 0; i < n; ++i) {
        try {
          AczelModel m = AczelModel::build(config_for(block + i), bounds.budget);
          if (auto w = refutes(m, f)) outcome[i] = *w;
        } catch (const BudgetError&) {
          outcome[i] = -1;
        } catch (const ModelError&) {
          outcome[i] = -1;
        }
      }

      tried += n;
      for (int i = 0; i < n; ++i)
        if (outcome[i] == -1) ++skipped;
      for (int i = 0; i < n; ++i) {
        if (outcome[i] < 0) continue;
        ModelConfig cfg = config_for(block + i);
        AczelModel m = AczelModel::build(cfg, bounds.budget);
        Countermodel cm;
        cm.config = cfg;
        cm.world = outcome[i];
        cm.witness = extract_witness(m, f, &cm.world);
        cm.candidates_tried = tried;
        cm.skipped_budget = skipped;
        return cm;
      }
    }
  }
  return std::nullopt;
}

}  // namespace aot
