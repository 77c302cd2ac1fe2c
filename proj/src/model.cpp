#include "aot/model.hpp"

#include <fstream>
#include <sstream>

namespace aot {

AczelModel AczelModel::build(const ModelConfig& cfg, const Budget& budget) {
  if (cfg.n_ordinary < 0 || cfg.n_special < 0)
    throw ModelError("negative urelement count");
  if (cfg.n_ordinary + cfg.n_special < 1)
    throw ModelError("empty urelement domain");
  if (cfg.n_states < 1 || cfg.n_worlds < 1)
    throw ModelError("at least one state and one world required");
  uint64_t cells = (uint64_t)(cfg.n_ordinary + cfg.n_special) * cfg.n_states * cfg.n_worlds;
  if (cells > budget.max_cells || cells > 63)
    throw BudgetError("cell budget exceeded: |U|*|S|*|W| = " + std::to_string(cells) +
                      " > " + std::to_string(std::min<uint64_t>(budget.max_cells, 63)));

  AczelModel m;
  m.cfg_ = cfg;
  m.budget_ = budget;
  m.tables_.assign(cfg.n_states, StateTables{});
  for (auto& [state, tbl] : cfg.state_interp) {
    if (state == 0)
      throw ModelError("the actual state is classical and not configurable");
    if (state < 0 || state >= cfg.n_states)
      throw ModelError("state_interp for unknown state " + std::to_string(state));
    m.tables_[state] = tbl;
  }
  for (int s = 1; s < cfg.n_states; ++s)
    if (!m.tables_[s].classical()) m.all_classical_ = false;

  for (int u = 0; u < m.n_urelements(); ++u)
    for (int s = 0; s < cfg.n_states; ++s)
      for (int w = 0; w < cfg.n_worlds; ++w) {
        if (!m.is_special(u)) m.o_code_ = m.prop_code_set(m.o_code_, u, s, w, true);
        else m.a_code_ = m.prop_code_set(m.a_code_, u, s, w, true);
      }
  return m;
}

uint64_t AczelModel::n_properties() const {
  uint64_t n = n_properties_unchecked();
  if (n > budget_.max_properties)
    throw BudgetError("property enumeration budget exceeded: 2^" + std::to_string(cells()) +
                      " > " + std::to_string(budget_.max_properties));
  return n;
}

std::vector<uint64_t> AczelModel::enumerate_properties() const {
  uint64_t n = n_properties();
  std::vector<uint64_t> out(n);
  for (uint64_t c = 0; c < n; ++c) out[c] = c;
  return out;
}

uint64_t AczelModel::n_abstract_objects() const {
  uint64_t np = n_properties_unchecked();
  if (np > 63)
    throw BudgetError("abstract-object domain needs 2^" + std::to_string(np) +
                      " elements; beyond representation");
  uint64_t n = 1ull << np;
  if (n > budget_.max_objects)
    throw BudgetError("abstract-object enumeration budget exceeded: 2^" + std::to_string(np) +
                      " > " + std::to_string(budget_.max_objects));
  if (cfg_.n_special == 0)
    throw ModelError("no special urelements: abstract objects have no proxy");
  return n;
}

Individual AczelModel::comprehension_witness(const std::function<bool(uint64_t)>& cond) const {
  uint64_t np = n_properties();
  (void)n_abstract_objects();  // the witness must live in the object domain
  uint64_t mask = 0;
  for (uint64_t c = 0; c < np; ++c)
    if (cond(c)) mask |= 1ull << c;
  return Individual::make_abstract(mask);
}

uint64_t AczelModel::n_propositions() const {
  uint64_t bits = (uint64_t)prop_cells();
  uint64_t n = 1ull << bits;
  if (n > budget_.max_properties)
    throw BudgetError("proposition enumeration budget exceeded");
  return n;
}

uint64_t AczelModel::n_rel2() const {
  uint64_t bits = (uint64_t)n_urelements() * n_urelements() * n_states() * n_worlds();
  if (bits > 63 || (1ull << bits) > budget_.max_properties)
    throw BudgetError("2-place relation enumeration budget exceeded");
  return 1ull << bits;
}

namespace {

std::string table_bits(uint8_t t, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += ((t >> i) & 1) ? '1' : '0';
  return s;
}

uint8_t parse_table(const std::string& s, int n, const std::string& what) {
  if ((int)s.size() != n)
    throw ModelError("table '" + what + "' needs " + std::to_string(n) + " bits");
  uint8_t t = 0;
  for (int i = 0; i < n; ++i) {
    if (s[i] == '1') t |= (uint8_t)(1 << i);
    else if (s[i] != '0') throw ModelError("table '" + what + "' must be bits");
  }
  return t;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string AczelModel::spec_text() const {
  std::ostringstream os;
  os << "ordinary = " << cfg_.n_ordinary << "\n";
  os << "special = " << cfg_.n_special << "\n";
  os << "states = " << cfg_.n_states << "\n";
  os << "worlds = " << cfg_.n_worlds << "\n";
  if (cfg_.proxy_seed) os << "proxy_seed = " << *cfg_.proxy_seed << "\n";
  for (int s = 1; s < cfg_.n_states; ++s) {
    if (tables_[s].classical()) continue;
    os << "[state_interp." << s << "]\n";
    os << "not = " << table_bits(tables_[s].not_t, 2) << "\n";
    os << "impl = " << table_bits(tables_[s].impl_t, 4) << "\n";
    os << "box = " << table_bits(tables_[s].box_t, 2) << "\n";
    os << "forall_ind = " << table_bits(tables_[s].forall_ind_t, 2) << "\n";
    os << "forall_rel = " << table_bits(tables_[s].forall_rel_t, 2) << "\n";
  }
  return os.str();
}

ModelConfig parse_model_spec(const std::string& text) {
  ModelConfig cfg;
  cfg.n_ordinary = cfg.n_special = cfg.n_states = cfg.n_worlds = -1;
  std::istringstream is(text);
  std::string line;
  int cur_state = -1;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ModelError("bad section at line " + std::to_string(lineno));
      std::string section = line.substr(1, line.size() - 2);
      const std::string prefix = "state_interp.";
      if (section.rfind(prefix, 0) != 0)
        throw ModelError("unknown section [" + section + "]");
      cur_state = std::stoi(section.substr(prefix.size()));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ModelError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (cur_state < 0) {
      if (key == "ordinary") cfg.n_ordinary = std::stoi(val);
      else if (key == "special") cfg.n_special = std::stoi(val);
      else if (key == "states") cfg.n_states = std::stoi(val);
      else if (key == "worlds") cfg.n_worlds = std::stoi(val);
      else if (key == "proxy_seed") cfg.proxy_seed = std::stoll(val);
      else throw ModelError("unknown key '" + key + "'");
    } else {
      StateTables& t = cfg.state_interp[cur_state];
      if (key == "not") t.not_t = parse_table(val, 2, key);
      else if (key == "impl") t.impl_t = parse_table(val, 4, key);
      else if (key == "box") t.box_t = parse_table(val, 2, key);
      else if (key == "forall_ind") t.forall_ind_t = parse_table(val, 2, key);
      else if (key == "forall_rel") t.forall_rel_t = parse_table(val, 2, key);
      else throw ModelError("unknown state_interp key '" + key + "'");
    }
  }
  if (cfg.n_ordinary < 0 || cfg.n_special < 0 || cfg.n_states < 0 || cfg.n_worlds < 0)
    throw ModelError("model spec must set ordinary, special, states, worlds");
  return cfg;
}

AczelModel load_model_spec_file(const std::string& path, const Budget& budget) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return AczelModel::build(parse_model_spec(ss.str()), budget);
}

}  // namespace aot
