#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hmf/cache.hpp"
#include "hmf/slopes.hpp"
#include "hmf/presets.hpp"

using namespace hmf;

TEST_CASE("hecke cache round trip is byte-stable and verified") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  HeckeContext H = make_hecke_context(O, level, 24);
  std::vector<HeckeLocalData> data{hecke_data(H, 0), hecke_data(H, 1)};
  std::string dir = std::filesystem::temp_directory_path().string();
  std::string path = dir + "/hmf_test_cache.bin";
  cache_save(path, O, level, 24, H.cs, data);
  // byte stability: saving again produces identical bytes
  std::string path2 = dir + "/hmf_test_cache2.bin";
  cache_save(path2, O, level, 24, H.cs, data);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);

  auto loaded = cache_load(path, O, level, 24);
  CHECK(loaded.h == 12);
  CHECK(loaded.sufficiently_small);
  REQUIRE(loaded.per_prime.size() == 2);
  for (int l = 0; l < 2; l++) {
    const auto& X = data[(size_t)l];
    const auto& Y = loaded.per_prime[(size_t)l];
    CHECK(X.h == Y.h);
    REQUIRE(X.T.size() == Y.T.size());
    for (size_t t = 0; t < X.T.size(); t++) {
      REQUIRE(X.T[t].size() == Y.T[t].size());
      for (size_t m = 0; m < X.T[t].size(); m++)
        for (size_t c = 0; c < X.T[t][m].comp.size(); c++)
          for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++)
              CHECK(X.T[t][m].comp[c].m[i][j].coords() == Y.T[t][m].comp[c].m[i][j].coords());
    }
  }
  // altered header input -> HashMismatch
  CHECK_THROWS_AS(cache_load(path, O, level, 32), HashMismatch);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("cache reuse across weights: one cache serves several kappa") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  HeckeContext H = make_hecke_context(O, level, 40);
  std::vector<HeckeLocalData> data{hecke_data(H, 0), hecke_data(H, 1)};
  std::string path = std::filesystem::temp_directory_path().string() + "/hmf_test_cache3.bin";
  cache_save(path, O, level, 40, H.cs, data);
  auto loaded = cache_load(path, O, level, 40);
  Ctx ctx = make_run_context(pl, 40);
  HeckeLocalData up_fresh = hecke_compose(H, data[0], data[1]);
  HeckeLocalData up_cached = hecke_compose(H, loaded.per_prime[0], loaded.per_prime[1]);
  for (auto k : std::vector<std::vector<long>>{{2, 2}, {2, 4}}) {
    auto kappa = make_weight(pl, k, make_psi_r(pl, weight_tuple_from_k(k).r));
    auto basis = subspace_basis(SubspaceSpec::classical(k[0] - 2, k[1] - 2), 16);
    auto A = assemble(up_fresh, kappa, basis, ctx);
    auto B = assemble(up_cached, kappa, basis, ctx);
    auto sa = matrix_slopes(A).slopes;
    auto sb = matrix_slopes(B).slopes;
    CHECK(sa.str() == sb.str());
  }
  std::remove(path.c_str());
}

TEST_CASE("matrix dump round trip") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  HeckeContext H = make_hecke_context(O, level, 30);
  auto d1 = hecke_data(H, 0);
  Ctx ctx = make_run_context(pl, 24);
  auto kappa = make_weight(pl, {2, 2}, make_psi_r(pl, 0));
  auto A = assemble_truncation(d1, kappa, 3, ctx);
  std::string path = std::filesystem::temp_directory_path().string() + "/hmf_test_mat.bin";
  matrix_save(path, A);
  auto B = matrix_load(path, pl, kappa);
  CHECK(A.n() == B.n());
  CHECK(A.basis == B.basis);
  for (long i = 0; i < A.n(); i++)
    for (long j = 0; j < A.n(); j++) CHECK(A.at(i, j).coords() == B.at(i, j).coords());
  std::remove(path.c_str());
}
