#pragma once

// Internal minting door for the kernel translation units. Not installed.

#include <unordered_map>

#include "aot/kernel.hpp"
#include "aot/printer.hpp"

namespace aot::kernel {

struct Mint {
  static Theorem make(FormulaPtr f, Trace t) { return Theorem(std::move(f), std::move(t)); }

  // Merge premise traces (deduplicating by printed formula) and append one
  // step concluding `conclusion`.
  static Theorem rule(const std::string& name, const std::vector<const Theorem*>& premises,
                      FormulaPtr conclusion) {
    Trace out;
    std::unordered_map<std::string, int> seen;
    std::vector<int> prem_idx;
    for (const Theorem* p : premises) {
      std::vector<int> remap(p->trace().size());
      for (size_t i = 0; i < p->trace().size(); ++i) {
        const Step& s = p->trace()[i];
        std::string key = print(s.formula);
        auto it = seen.find(key);
        if (it != seen.end()) {
          remap[i] = it->second;
          continue;
        }
        Step ns = s;
        for (int& pr : ns.premises) pr = remap[pr];
        out.push_back(std::move(ns));
        remap[i] = (int)out.size() - 1;
        seen[key] = remap[i];
      }
      prem_idx.push_back(remap[p->trace().size() - 1]);
    }
    out.push_back(Step{name, prem_idx, conclusion});
    return Theorem(std::move(conclusion), std::move(out));
  }

  static Theorem axiom(const std::string& name, FormulaPtr f) {
    Trace t;
    t.push_back(Step{name, {}, f});
    return Theorem(f, std::move(t));
  }
};

}  // namespace aot::kernel
