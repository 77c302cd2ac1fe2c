#include <doctest.h>

#include <set>

#include "aot/model.hpp"
#include "testutil.hpp"

using namespace aot;

TEST_SUITE_BEGIN("model");

// Independent counting oracle: |P| = 2^(|U| * |S| * |W|).
static uint64_t prop_count_oracle(int o, int s, int st, int w) {
  uint64_t cells = (uint64_t)(o + s) * st * w;
  return 1ull << cells;
}

TEST_CASE("build: M0 has 4 properties and 16 abstract objects") {
  AczelModel m = testutil::m0();
  CHECK(m.n_properties() == prop_count_oracle(1, 1, 1, 1));
  CHECK(m.n_properties() == 4);
  CHECK(m.n_abstract_objects() == 16);
  CHECK(m.n_individuals() == 17);
}

TEST_CASE("build: M1 has 16 properties and 65536 abstract objects") {
  AczelModel m = testutil::m1();
  CHECK(m.n_properties() == prop_count_oracle(1, 1, 1, 2));
  CHECK(m.n_properties() == 16);
  CHECK(m.n_abstract_objects() == 65536);
}

TEST_CASE("build: empty urelement domain is an error") {
  CHECK_THROWS_AS(AczelModel::build({0, 0, 1, 1, {}, {}}), ModelError);
}

TEST_CASE("build: budgets are hard errors, not truncation") {
  Budget tight;
  tight.max_cells = 2;
  CHECK_THROWS_AS(AczelModel::build({1, 1, 1, 2, {}, {}}, tight), BudgetError);

  Budget small_props;
  small_props.max_properties = 8;
  AczelModel m = AczelModel::build({1, 1, 1, 2, {}, {}}, small_props);
  CHECK_THROWS_AS(m.n_properties(), BudgetError);

  Budget small_objs;
  small_objs.max_objects = 1000;
  AczelModel m2 = AczelModel::build({1, 1, 1, 2, {}, {}}, small_objs);
  CHECK_THROWS_AS(m2.n_abstract_objects(), BudgetError);
}

TEST_CASE("build: the actual state is classical and not configurable") {
  ModelConfig cfg{1, 1, 2, 1, {}, {}};
  cfg.state_interp[0] = StateTables{0, 0, 0, 0, 0};
  CHECK_THROWS_AS(AczelModel::build(cfg), ModelError);
}

TEST_CASE("properties: canonical order runs from everywhere-false to everywhere-true") {
  AczelModel m = testutil::m0();
  auto props = m.enumerate_properties();
  REQUIRE(props.size() == 4);
  for (int u = 0; u < m.n_urelements(); ++u) {
    CHECK_FALSE(m.prop_bit(props.front(), u, 0, 0));
    CHECK(m.prop_bit(props.back(), u, 0, 0));
  }
}

TEST_CASE("abstract objects: canonical subset order is binary counting") {
  AczelModel m = testutil::m0();
  // ranks 0..n_ordinary-1 are ordinary; the first abstract object is the
  // empty set, and the singleton {everywhere-false} appears exactly once
  CHECK(m.individual_by_rank(0).ordinary);
  Individual first_abstract = m.individual_by_rank(m.n_ordinary());
  CHECK_FALSE(first_abstract.ordinary);
  CHECK(first_abstract.mask == 0);
  int seen = 0;
  for (uint64_t r = 0; r < m.n_abstract_objects(); ++r)
    if (m.individual_by_rank(m.n_ordinary() + r).mask == 1) ++seen;
  CHECK(seen == 1);
}

TEST_CASE("proxy: deterministic, constant on M0") {
  AczelModel m = testutil::m0();
  for (uint64_t mask = 0; mask < 16; ++mask) {
    Urelement p = m.proxy(mask);
    CHECK(p.kind == UrKind::Special);
    CHECK(p.index == 0);
    CHECK(m.proxy(mask) == p);  // repeated calls agree
  }
}

TEST_CASE("proxy: canonical subset rank mod n_special") {
  AczelModel m = AczelModel::build({1, 2, 1, 1, {}, {}});
  // independent rank oracle: position in an explicit enumeration of subsets
  // in binary counting order over the canonical property order
  auto props = m.enumerate_properties();
  std::vector<std::set<uint64_t>> subsets;
  for (uint64_t mask = 0; mask < (1ull << props.size()); ++mask) {
    std::set<uint64_t> s;
    for (size_t i = 0; i < props.size(); ++i)
      if ((mask >> i) & 1) s.insert(props[i]);
    subsets.push_back(std::move(s));
  }
  std::set<uint64_t> target = {props[0], props[1]};  // mask 3
  uint64_t rank = 0;
  while (subsets[rank] != target) ++rank;
  CHECK(rank == 3);
  CHECK(m.proxy(rank).index == (int)(rank % 2));
  CHECK(m.proxy(rank).index == 1);
}

TEST_CASE("nu_upsilon: identity on ordinary, proxy on abstract") {
  AczelModel m = testutil::m0();
  CHECK(m.nu_upsilon(Individual::make_ordinary(0)) == Urelement{UrKind::Ordinary, 0});
  CHECK(m.nu_upsilon(Individual::make_abstract(0)) == Urelement{UrKind::Special, 0});
  // two distinct abstract objects share their proxy
  Individual a = Individual::make_abstract(3);
  Individual b = Individual::make_abstract(7);
  CHECK(!(a == b));
  CHECK(m.nu_upsilon(a) == m.nu_upsilon(b));
}

TEST_CASE("pigeonhole: distinct abstract objects with the same proxy exist in M0") {
  AczelModel m = testutil::m0();
  bool found = false;
  for (uint64_t i = 0; i < m.n_abstract_objects() && !found; ++i)
    for (uint64_t j = i + 1; j < m.n_abstract_objects() && !found; ++j)
      if (m.proxy(i) == m.proxy(j)) found = true;
  CHECK(found);
}

TEST_CASE("comprehension witness: null, singleton, everything") {
  AczelModel m = testutil::m0();
  CHECK(m.comprehension_witness([](uint64_t) { return false; }).mask == 0);

  uint64_t k = 2;
  Individual theta = m.comprehension_witness([&](uint64_t c) { return c == k; });
  CHECK(theta.mask == (1ull << k));

  Individual all = m.comprehension_witness([](uint64_t) { return true; });
  CHECK(all.mask == 15);

  // encodes F iff cond(F), exhaustively
  auto cond = [](uint64_t c) { return c % 3 == 1; };
  Individual w = m.comprehension_witness(cond);
  for (uint64_t c = 0; c < m.n_properties(); ++c)
    CHECK(((w.mask >> c) & 1) == (cond(c) ? 1u : 0u));
}

TEST_CASE("comprehension requires special urelements") {
  AczelModel m = AczelModel::build({1, 0, 1, 1, {}, {}});
  CHECK_THROWS_AS(m.comprehension_witness([](uint64_t) { return false; }), ModelError);
}

TEST_CASE("model spec file: round trip, including state tables") {
  ModelConfig cfg{2, 1, 2, 2, {}, {}};
  StateTables t;
  t.not_t = 0b10;
  t.impl_t = 0b0011;
  cfg.state_interp[1] = t;
  AczelModel m = AczelModel::build(cfg, Budget{16, 1u << 16, 1u << 20});
  ModelConfig back = parse_model_spec(m.spec_text());
  CHECK(back.n_ordinary == 2);
  CHECK(back.n_special == 1);
  CHECK(back.n_states == 2);
  CHECK(back.n_worlds == 2);
  REQUIRE(back.state_interp.count(1));
  CHECK(back.state_interp.at(1) == t);
  CHECK_FALSE(AczelModel::build(back, Budget{16, 1u << 16, 1u << 20}).all_classical());
}

TEST_CASE("O! and A! codes classify urelements") {
  AczelModel m = AczelModel::build({2, 1, 1, 1, {}, {}});
  for (int u = 0; u < m.n_urelements(); ++u) {
    CHECK(m.prop_bit(m.o_bang_code(), u, 0, 0) == !m.is_special(u));
    CHECK(m.prop_bit(m.a_bang_code(), u, 0, 0) == m.is_special(u));
  }
}

TEST_SUITE_END();
