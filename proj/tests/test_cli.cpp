#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hmf/emit.hpp"

using namespace hmf;

TEST_CASE("op word parsing") {
  CHECK(parse_op_word("Up", 2) == std::vector<int>{0, 1});
  CHECK(parse_op_word("Up", 1) == std::vector<int>{0});
  CHECK(parse_op_word("Up1", 2) == std::vector<int>{0});
  CHECK(parse_op_word("Up2", 2) == std::vector<int>{1});
  CHECK(parse_op_word("Up1^2*Up2", 2) == (std::vector<int>{0, 0, 1}));
  CHECK_THROWS_AS(parse_op_word("Uq", 2), ConfigInvalid);
  CHECK_THROWS_AS(parse_op_word("Up2", 1), ConfigInvalid);
}

TEST_CASE("config file parsing") {
  std::string path = std::filesystem::temp_directory_path().string() + "/hmf_test_cfg.txt";
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "field 5\nprime 2\nwild 3\naux 11 2\n";
    out << "weight 2,2\nweight 2,2 2\n";
    out << "op Up\nR 0,20\nslope-bound 5\nprecision 0\nformat tsv\n";
  }
  RunConfig cfg = parse_config_file(path);
  CHECK(cfg.d == 5);
  CHECK(cfg.p == 2);
  CHECK(cfg.s == 3);
  REQUIRE(cfg.aux.size() == 1);
  CHECK(cfg.aux[0].first == 11);
  CHECK(cfg.aux[0].second == 2);
  REQUIRE(cfg.weights.size() == 2);
  CHECK(cfg.weights[1].tau_power == 2);
  CHECK(cfg.Rs == std::vector<long>{0, 20});
  CHECK(cfg.format == "tsv");
  std::remove(path.c_str());
}

TEST_CASE("jsonl emit is deterministic and re-ingests equal") {
  SlopeReport rep;
  SlopeRecord r1;
  r1.weight = "[2,2]psi2";
  r1.op = "Up";
  r1.R = 0;
  r1.slopes = parse_smset("(0,1),(1/2,2),(2/3,6)");
  rep.records.push_back(r1);
  std::string dir = std::filesystem::temp_directory_path().string();
  emit_jsonl(rep, dir + "/hmf_t1.jsonl");
  emit_jsonl(rep, dir + "/hmf_t2.jsonl");
  std::ifstream a(dir + "/hmf_t1.jsonl"), b(dir + "/hmf_t2.jsonl");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find("\"2/3\"") != std::string::npos);  // fractions stay exact strings
  auto back = ingest_jsonl(dir + "/hmf_t1.jsonl");
  REQUIRE(back.records.size() == 1);
  CHECK(back.records[0].slopes.str() == r1.slopes.str());
  std::remove((dir + "/hmf_t1.jsonl").c_str());
  std::remove((dir + "/hmf_t2.jsonl").c_str());
}

TEST_CASE("svg grid includes fraction axis labels") {
  PartialGrid G;
  G.xs = {ExtRat(0), ExtRat(1, 2), ExtRat(1)};
  G.ys = {ExtRat(0), ExtRat(1, 2), ExtRat(1)};
  G.mult = {1, 1, 1, 1, 4, 1, 1, 1, 1};
  std::string path = std::filesystem::temp_directory_path().string() + "/hmf_grid.svg";
  emit_svg_grid(G, "weight [2,2]", path);
  std::ifstream in(path);
  std::string svg((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(svg.find("1/2") != std::string::npos);
  CHECK(svg.find(">4<") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("empty weight list gives an empty report") {
  RunConfig cfg;
  cfg.weights.clear();
  auto rep = run(cfg);
  CHECK(rep.records.empty());
}
