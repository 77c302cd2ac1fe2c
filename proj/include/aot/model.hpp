#pragma once

// Finite hyperintensional Aczel models. Properties are tables
// urelement -> (state x world -> bool), packed into integer codes; abstract
// objects are subsets of the property enumeration, packed into bit masks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aot {

struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& m) : std::runtime_error(m) {}
};
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& m) : std::runtime_error(m) {}
};

struct Budget {
  uint64_t max_cells = 8;             // |U| * |S| * |W| cap at build time
  uint64_t max_properties = 1u << 16; // property enumeration cap (2^cells)
  uint64_t max_objects = 1u << 20;    // abstract-object enumeration cap (2^|P|)
};

enum class UrKind { Ordinary, Special };

struct Urelement {
  UrKind kind;
  int index;

  bool operator==(const Urelement& o) const { return kind == o.kind && index == o.index; }
  bool operator<(const Urelement& o) const {
    if (kind != o.kind) return kind < o.kind;  // ordinary before special
    return index < o.index;
  }
  std::string str() const {
    return (kind == UrKind::Ordinary ? "o" : "s") + std::to_string(index);
  }
};

// Per-state truth tables for the core operators at non-actual states.
// Unary tables: bit i = output for input i. The implication table is indexed
// by (a << 1) | b. Box and the quantifiers apply their table to the
// classical aggregate, cellwise.
struct StateTables {
  uint8_t not_t = 0b01;
  uint8_t impl_t = 0b1011;
  uint8_t box_t = 0b10;
  uint8_t forall_ind_t = 0b10;
  uint8_t forall_rel_t = 0b10;

  bool classical() const {
    return not_t == 0b01 && impl_t == 0b1011 && box_t == 0b10 &&
           forall_ind_t == 0b10 && forall_rel_t == 0b10;
  }
  bool operator==(const StateTables& o) const {
    return not_t == o.not_t && impl_t == o.impl_t && box_t == o.box_t &&
           forall_ind_t == o.forall_ind_t && forall_rel_t == o.forall_rel_t;
  }
};

struct ModelConfig {
  int n_ordinary = 1;
  int n_special = 1;
  int n_states = 1;
  int n_worlds = 1;
  std::map<int, StateTables> state_interp;  // non-actual states only
  std::optional<int64_t> proxy_seed;        // reserved
};

// An individual: an ordinary urelement or a set of properties (bit mask over
// the canonical property order).
struct Individual {
  bool ordinary = true;
  int ord_index = 0;
  uint64_t mask = 0;

  static Individual make_ordinary(int i) { return {true, i, 0}; }
  static Individual make_abstract(uint64_t m) { return {false, 0, m}; }
  bool operator==(const Individual& o) const {
    return ordinary == o.ordinary && (ordinary ? ord_index == o.ord_index : mask == o.mask);
  }
  std::string str() const {
    return ordinary ? "ord:" + std::to_string(ord_index) : "abs:" + std::to_string(mask);
  }
};

class AczelModel {
 public:
  static AczelModel build(const ModelConfig& cfg, const Budget& budget = {});

  const ModelConfig& config() const { return cfg_; }
  const Budget& budget() const { return budget_; }

  int n_ordinary() const { return cfg_.n_ordinary; }
  int n_special() const { return cfg_.n_special; }
  int n_urelements() const { return cfg_.n_ordinary + cfg_.n_special; }
  int n_states() const { return cfg_.n_states; }
  int n_worlds() const { return cfg_.n_worlds; }
  int actual_state() const { return 0; }
  int actual_world() const { return 0; }

  int cells() const { return n_urelements() * n_states() * n_worlds(); }
  int prop_cells() const { return n_states() * n_worlds(); }  // proposition table size
  bool all_classical() const { return all_classical_; }
  const StateTables& tables(int state) const { return tables_[state]; }

  // urelement indexing: ordinary 0..k first, then special
  Urelement urelement(int u) const {
    if (u < cfg_.n_ordinary) return {UrKind::Ordinary, u};
    return {UrKind::Special, u - cfg_.n_ordinary};
  }
  int ur_index(const Urelement& u) const {
    return u.kind == UrKind::Ordinary ? u.index : cfg_.n_ordinary + u.index;
  }
  bool is_special(int u) const { return u >= cfg_.n_ordinary; }

  // Properties are identified with their canonical codes: the flattened
  // truth table over (u, s, w) read lexicographically, most significant
  // first, so code 0 is everywhere-false and the maximal code is
  // everywhere-true.
  uint64_t n_properties() const;                 // checks the property budget
  uint64_t n_properties_unchecked() const { return 1ull << cells(); }
  bool prop_bit(uint64_t code, int u, int s, int w) const {
    int flat = (u * n_states() + s) * n_worlds() + w;
    return (code >> (cells() - 1 - flat)) & 1;
  }
  uint64_t prop_code_set(uint64_t code, int u, int s, int w, bool value) const {
    int flat = (u * n_states() + s) * n_worlds() + w;
    uint64_t bit = 1ull << (cells() - 1 - flat);
    return value ? (code | bit) : (code & ~bit);
  }
  std::vector<uint64_t> enumerate_properties() const;

  uint64_t o_bang_code() const { return o_code_; }
  uint64_t a_bang_code() const { return a_code_; }

  // Abstract objects in canonical subset order: mask r is the r-th object.
  uint64_t n_abstract_objects() const;           // checks the object budget
  uint64_t n_individuals() const { return (uint64_t)cfg_.n_ordinary + n_abstract_objects(); }
  Individual individual_by_rank(uint64_t r) const {
    if (r < (uint64_t)cfg_.n_ordinary) return Individual::make_ordinary((int)r);
    return Individual::make_abstract(r - cfg_.n_ordinary);
  }
  uint64_t individual_rank(const Individual& i) const {
    return i.ordinary ? (uint64_t)i.ord_index : cfg_.n_ordinary + i.mask;
  }

  // proxy: canonical subset rank mod n_special
  Urelement proxy(uint64_t abstract_mask) const {
    if (cfg_.n_special == 0)
      throw ModelError("no special urelements: abstract objects have no proxy");
    return {UrKind::Special, (int)(abstract_mask % cfg_.n_special)};
  }
  Urelement nu_upsilon(const Individual& i) const {
    return i.ordinary ? Urelement{UrKind::Ordinary, i.ord_index} : proxy(i.mask);
  }
  int nu_index(const Individual& i) const { return ur_index(nu_upsilon(i)); }

  Individual comprehension_witness(const std::function<bool(uint64_t)>& cond) const;

  // n-place relation domains for quantifiers
  uint64_t n_propositions() const;  // n = 0
  uint64_t n_rel2() const;          // n = 2
  bool rel2_bit(uint64_t code, int u1, int u2, int s, int w) const {
    int u = n_urelements();
    int flat = ((u1 * u + u2) * n_states() + s) * n_worlds() + w;
    int bits = u * u * n_states() * n_worlds();
    return (code >> (bits - 1 - flat)) & 1;
  }

  // proposition cell masks (bit = s * n_worlds + w)
  uint64_t full_prop_mask() const { return (prop_cells() == 64) ? ~0ull : ((1ull << prop_cells()) - 1); }
  uint64_t state_row_mask(int s) const {
    uint64_t row = (n_worlds() == 64) ? ~0ull : ((1ull << n_worlds()) - 1);
    return row << (s * n_worlds());
  }

  std::string spec_text() const;  // model spec file format

 private:
  ModelConfig cfg_;
  Budget budget_;
  std::vector<StateTables> tables_;
  bool all_classical_ = true;
  uint64_t o_code_ = 0, a_code_ = 0;
};

ModelConfig parse_model_spec(const std::string& text);
AczelModel load_model_spec_file(const std::string& path, const Budget& budget = {});

}  // namespace aot
