#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmf/hecke.hpp"
#include "hmf/presets.hpp"

using namespace hmf;

TEST_CASE("splitting map at an odd auxiliary prime") {
  Order O = preset_order(5);
  auto s11 = split_prime(O.A.F, 11);
  LocalSplitting sp = build_splitting(O, s11.p2, 8);
  QuatF one{FieldElem(1)};
  SplitMat i1 = sp.apply(O, one);
  CHECK(i1.m[0][0].valuation() == ExtRat(0));
  CHECK(i1.m[0][1].is_exactly_zero_mod_cap());
  CHECK(i1.m[1][0].is_exactly_zero_mod_cap());
}

TEST_CASE("class numbers of the three preset levels (paper oracle)") {
  // h = 12 for Q(sqrt13), level 9
  {
    Order O = preset_order(13);
    auto pl = PLevel::make(O.A.F, 3, 2);
    auto level = LevelData::make(pl, {});
    ClassSet cs = class_set(O, level);
    CHECK(cs.h() == 12);
    CHECK(cs.sufficiently_small);
    CHECK(cs.level.p1_size() == Int(144));
  }
  // h = 24 for Q(sqrt17), level 8
  {
    Order O = preset_order(17);
    auto pl = PLevel::make(O.A.F, 2, 3);
    auto level = LevelData::make(pl, {});
    ClassSet cs = class_set(O, level);
    CHECK(cs.h() == 24);
    CHECK(cs.sufficiently_small);
  }
  // h = 16 for Q(sqrt5), level 8 * p11 with p11 = (11, 3+2sqrt5), omega root 8
  {
    Order O = preset_order(5);
    auto pl = PLevel::make(O.A.F, 2, 3);
    auto s11 = split_prime(O.A.F, 11);
    PrimeIdeal aux = s11.p2;
    CHECK(aux.omega_root == 8);
    auto level = LevelData::make(pl, {{aux, 1}});
    ClassSet cs = class_set(O, level);
    CHECK(cs.h() == 16);
    CHECK(cs.sufficiently_small);
    CHECK(cs.level.p1_size() == Int(960));
  }
}

TEST_CASE("orbit partition covers P^1") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  ClassSet cs = class_set(O, level);
  long total = 0;
  std::vector<long> sizes((size_t)cs.h(), 0);
  for (long o : cs.orbit_of_point) {
    CHECK(o >= 0);
    sizes[(size_t)o]++;
    total++;
  }
  CHECK(Int(total) == cs.level.p1_size());
  for (size_t i = 0; i < sizes.size(); i++)
    CHECK(sizes[i] * cs.stab_orders[i] == (long)cs.units.reps.size());
}

TEST_CASE("theta data: row partition and Delta_s shapes, split p=3") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  HeckeContext H = make_hecke_context(O, level, 24);
  HeckeLocalData d1 = hecke_data(H, 0);
  long h = d1.h;
  CHECK(h == 12);
  for (long i = 0; i < h; i++) {
    long cnt = 0;
    for (long j = 0; j < h; j++) cnt += (long)d1.at(i, j).size();
    CHECK(cnt == 3);  // Nm(P) cosets per row
  }
  HeckeLocalData d2 = hecke_data(H, 1);
  for (long i = 0; i < h; i++) {
    long cnt = 0;
    for (long j = 0; j < h; j++) cnt += (long)d2.at(i, j).size();
    CHECK(cnt == 3);
  }
  // composite U_p = U_P1 U_P2 has p^2 paths per row
  HeckeLocalData up = hecke_compose(H, d1, d2);
  for (long i = 0; i < h; i++) {
    long cnt = 0;
    for (long j = 0; j < h; j++) cnt += (long)up.at(i, j).size();
    CHECK(cnt == 9);
  }
}

TEST_CASE("theta data inert p=2 with auxiliary prime") {
  Order O = preset_order(5);
  auto pl = PLevel::make(O.A.F, 2, 3);
  auto s11 = split_prime(O.A.F, 11);
  auto level = LevelData::make(pl, {{s11.p2, 1}});
  HeckeContext H = make_hecke_context(O, level, 20);
  HeckeLocalData d = hecke_data(H, 0);
  CHECK(d.h == 16);
  for (long i = 0; i < d.h; i++) {
    long cnt = 0;
    for (long j = 0; j < d.h; j++) cnt += (long)d.at(i, j).size();
    CHECK(cnt == 4);  // Nm(P) = 4
  }
}
