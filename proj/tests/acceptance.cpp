// Acceptance suite: runs every gating criterion at its stated tolerance and
// prints one pass/fail line per criterion.

#include <chrono>
#include <map>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "hmf/emit.hpp"
#include "hmf/presets.hpp"

using namespace hmf;

namespace {

int failures = 0;

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int id, bool pass, double secs, const std::string& detail, bool gating = true) {
  std::printf("criterion %2d: %s  (%.1fs)  %s\n", id,
              pass ? "PASS" : (gating ? "FAIL" : "fail (non-gating)"), secs, detail.c_str());
  std::fflush(stdout);
  if (!pass && gating) failures++;
}

std::map<std::string, SMSet> load_fixture_rows(const std::string& name) {
  std::ifstream in(data_dir() + "/fixtures/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::map<std::string, SMSet> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto p1 = line.find('|');
    auto p2 = line.find('|', p1 + 1);
    rows[line.substr(0, p1) + "|" + line.substr(p1 + 1, p2 - p1 - 1)] =
        parse_smset(line.substr(p2 + 1));
  }
  return rows;
}

SMSet load_fixture_set(const std::string& name) {
  std::ifstream in(data_dir() + "/fixtures/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::string line, payload;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    payload = line;
  }
  return parse_smset(payload);
}

SeedMap split_seed() {
  SeedMap s;
  s.keying = SeedMap::Single;
  s.seeds = {parse_smset("(0,1),(1/2,2),(1,6),(3/2,2),(2,1)")};
  return s;
}

SeedMap inert_seed_c1() {
  SeedMap s;
  s.keying = SeedMap::DiffMod;
  s.mod = 3;
  s.seeds = {parse_smset("(2/3,6),(1,4),(4/3,6)"), parse_smset("(1/2,4),(1,8),(3/2,4)"),
             parse_smset("(1/2,4),(1,8),(3/2,4)")};
  return s;
}

RunConfig config_d13() {
  RunConfig cfg;
  cfg.cache_dir = "acceptance_cache";
  cfg.d = 13;
  cfg.p = 3;
  cfg.s = 2;
  cfg.nthreads = 0;
  return cfg;
}

RunConfig config_d17() {
  RunConfig cfg;
  cfg.cache_dir = "acceptance_cache";
  cfg.d = 17;
  cfg.p = 2;
  cfg.s = 3;
  return cfg;
}

RunConfig config_d5() {
  RunConfig cfg;
  cfg.cache_dir = "acceptance_cache";
  cfg.d = 5;
  cfg.p = 2;
  cfg.s = 3;
  cfg.aux = {{11, 2}};
  return cfg;
}

}  // namespace

int main() {
  // 1: class numbers
  {
    double t0 = now();
    std::string detail;
    bool ok = true;
    struct Case {
      RunConfig cfg;
      long want_h;
    } cases[] = {{config_d13(), 12}, {config_d17(), 24}, {config_d5(), 16}};
    for (auto& c : cases) {
      double t1 = now();
      Order O = preset_order(c.cfg.d);
      auto pl = PLevel::make(O.A.F, c.cfg.p, c.cfg.s);
      std::vector<LevelFactor> aux;
      for (auto& [q, label] : c.cfg.aux) {
        auto st = split_prime(O.A.F, q);
        aux.push_back({label == 2 ? st.p2 : st.p1, 1});
      }
      auto level = LevelData::make(pl, aux);
      ClassSet cs = class_set(O, level);
      double dt = now() - t1;
      bool good = cs.h() == c.want_h && cs.sufficiently_small && dt <= 600.0;
      if (!good) ok = false;
      detail += "d=" + std::to_string(c.cfg.d) + ": h=" + std::to_string(cs.h()) +
                (cs.sufficiently_small ? " small" : " NOT-small") + "; ";
    }
    report(1, ok, now() - t0, detail);
  }

  // sessions reused by several criteria
  Session S13 = make_session(config_d13(), 420);
  Session S17 = make_session(config_d17(), 300);
  Session S5 = make_session(config_d5(), 300);

  // 2: split p=3 classical rows
  {
    double t0 = now();
    auto rows = load_fixture_rows("split_p3_classical.txt");
    bool ok = true;
    std::string detail;
    for (auto& [key, want] : rows) {
      double t1 = now();
      auto bar = key.find('|');
      std::string wname = key.substr(0, bar), op = key.substr(bar + 1);
      long k2p = wname.find(",") != std::string::npos ? 0 : 0;
      (void)k2p;
      std::vector<long> k{std::stol(wname.substr(1, wname.find(',') - 1)),
                          std::stol(wname.substr(wname.find(',') + 1,
                                                 wname.find(']') - wname.find(',') - 1))};
      auto kappa = make_weight(S13.pl, k, make_psi_r(S13.pl, weight_tuple_from_k(k).r), wname);
      SMSet got = classical_slopes(S13, kappa, op);
      bool good = got.str() == want.str() && (now() - t1) <= 900.0;
      if (!good) {
        ok = false;
        detail += key + " got " + got.str() + "; ";
      }
    }
    if (ok) detail = std::to_string(rows.size()) + " rows exact";
    report(2, ok, now() - t0, detail);
  }

  // 3: split p=2 classical rows (d = 17)
  {
    double t0 = now();
    auto rows = load_fixture_rows("split_p2_classical.txt");
    bool ok = true;
    std::string detail;
    for (auto& [key, want] : rows) {
      auto bar = key.find('|');
      std::string wname = key.substr(0, bar), op = key.substr(bar + 1);
      std::vector<long> k{std::stol(wname.substr(1, wname.find(',') - 1)),
                          std::stol(wname.substr(wname.find(',') + 1,
                                                 wname.find(']') - wname.find(',') - 1))};
      auto kappa = make_weight(S17.pl, k, make_psi_r(S17.pl, weight_tuple_from_k(k).r), wname);
      SMSet got = classical_slopes(S17, kappa, op);
      if (got.str() != want.str()) {
        ok = false;
        detail += key + " got " + got.str() + "; ";
      }
    }
    if (ok) detail = std::to_string(rows.size()) + " rows exact";
    report(3, ok, now() - t0, detail);
  }

  // 4: inert classical rows, including the tau^2 seed row
  {
    double t0 = now();
    auto rows = load_fixture_rows("inert_p2_classical.txt");
    bool ok = true;
    std::string detail;
    auto k22 = make_weight(S5.pl, {2, 2}, make_psi_r(S5.pl, 0), "[2,2]psi2");
    SMSet got22 = classical_slopes(S5, k22, "Up");
    if (got22.str() != rows.at("[2,2]psi2|Up").str()) {
      ok = false;
      detail += "[2,2]psi2 got " + got22.str() + "; ";
    }
    auto k24 = make_weight(S5.pl, {2, 4}, make_psi_r(S5.pl, 2), "[2,4]psi2");
    SMSet got24 = classical_slopes(S5, k24, "Up");
    if (got24.str() != rows.at("[2,4]psi2|Up").str()) {
      ok = false;
      detail += "[2,4]psi2 got " + got24.str() + "; ";
    }
    // the tau^2 twist class is delivered by the seed machinery
    SeedMap seeds = seed_from_smallest_classical(S5, SeedMap::DiffMod, 3);
    if (seeds.seeds[1].str() != rows.at("[2,2]psi2tau2|Up").str()) {
      ok = false;
      detail += "tau2 seed got " + seeds.seeds[1].str() + "; ";
    }
    if (ok) detail = "3 rows exact (embedding convention adjudicated)";
    report(4, ok, now() - t0, detail);
  }

  // 5: overconvergent split U_p(20*12), slopes <= 5
  {
    double t0 = now();
    auto want = load_fixture_set("overconvergent_split_R20.txt");
    auto kappa = make_weight(S13.pl, {2, 2}, make_psi_r(S13.pl, 0), "[2,2]psi2");
    SlopeRecord rec = overconvergent_slopes(S13, kappa, "Up", 20, ExtRat(5));
    bool certified = ExtRat(5) < rec.slopes.trust;
    bool match = smset_prefix_equal(rec.slopes, want, ExtRat(5));
    bool ok = certified && match && rec.seconds <= 7200.0;
    report(5, ok, now() - t0,
           "n=" + std::to_string(rec.n) + " digits=" + std::to_string(rec.precision_digits) +
               " trust<" + rec.slopes.trust.str() + (match ? " prefix exact" : " PREFIX MISMATCH: " + rec.slopes.str()));
  }

  // 6: overconvergent inert U_p(20*16) component 1, slopes <= 5
  {
    double t0 = now();
    auto want = load_fixture_set("overconvergent_inert_R20_c1.txt");
    auto kappa = make_weight(S5.pl, {2, 2}, make_psi_r(S5.pl, 0), "[2,2]psi2");
    SlopeRecord rec = overconvergent_slopes(S5, kappa, "Up", 20, ExtRat(5));
    bool certified = ExtRat(5) < rec.slopes.trust;
    bool match = smset_prefix_equal(rec.slopes, want, ExtRat(5));
    bool ok = certified && match && rec.seconds <= 7200.0;
    report(6, ok, now() - t0,
           "n=" + std::to_string(rec.n) + " digits=" + std::to_string(rec.precision_digits) +
               " trust<" + rec.slopes.trust.str() + (match ? " prefix exact" : " PREFIX MISMATCH: " + rec.slopes.str()));
  }

  // 7: conjecture generator reproduces the truncation prefixes
  {
    double t0 = now();
    auto want_split = load_fixture_set("overconvergent_split_R25_prefix.txt");
    auto gen_split = generate_conjectured(split_seed(), ExtRat(5));
    bool ok1 = gen_split.str() == want_split.str();
    auto want_inert = load_fixture_set("overconvergent_inert_R30_c1_prefix.txt");
    auto gen_inert = generate_conjectured(inert_seed_c1(), ExtRat(5));
    bool ok2 = gen_inert.str() == want_inert.str();
    report(7, ok1 && ok2, now() - t0,
           std::string(ok1 ? "split prefix exact" : "split mismatch") + "; " +
               (ok2 ? "inert prefix exact" : "inert mismatch"));
  }

  // 8: classical prediction reproduces the [2,4] and [4,4] split rows
  {
    double t0 = now();
    auto rows = load_fixture_rows("split_p3_classical.txt");
    auto p24 = classical_prediction(split_seed(), {2, 4});
    auto p44 = classical_prediction(split_seed(), {4, 4});
    bool ok = p24.str() == rows.at("[2,4]psi2|Up").str() &&
              p44.str() == rows.at("[4,4]psi2|Up").str();
    report(8, ok, now() - t0, ok ? "both rows exact" : "mismatch");
  }

  // 9: oracle equivalence on random Delta_s matrices
  {
    double t0 = now();
    std::mt19937_64 rng(2024);
    Ctx ctx = PadicContext::make(3, 1, 1, 40);  // pi-digit cap 40 = 20e
    long checked = 0;
    bool ok = true;
    auto pl = S13.pl;
    for (int s : {1, 2, 3}) {
      for (int trial = 0; trial < 67 && ok; trial++) {
        // random Delta_s-shaped pair of components in the plain contexts
        HeckeMatrix hm;
        for (int l = 0; l < 2; l++) {
          const Ctx& pc = S13.H->psplit[(size_t)l].ctx;
          auto rnd = [&](bool unit) {
            long v = (long)(rng() % 100000);
            if (unit && v % 3 == 0) v += 1;
            return PadicElem(pc, v);
          };
          SplitMat g = SplitMat::zero(pc);
          g.m[0][0] = rnd(true) * Int(3);
          g.m[0][1] = rnd(false);
          g.m[1][0] = rnd(false) * pow_ui(Int(3), (unsigned long)s);
          g.m[1][1] = rnd(true);
          hm.comp.push_back(g);
        }
        // weight with n <= 6 and the level character
        std::vector<long> k{2 + 2 * (long)(rng() % 4), 2 + 2 * (long)(rng() % 4)};
        auto kappa = make_weight(pl, k, make_psi_r(pl, weight_tuple_from_k(k).r));
        AssemblyOptions opt;
        opt.normalize = false;
        OmegaEvaluator ev(ctx, pl, kappa, {0}, opt, 4);
        auto pm = ev.prepare(hm);
        auto pg = ev.generating_place_grids(hm, 5);
        for (long xi = 0; xi <= 12 && ok; xi++)
          for (long yi = 0; yi <= 12 && ok; yi++) {
            auto x = bi_inv(xi), y = bi_inv(yi);
            PadicElem closed = ev.entry(pm, x, y);
            PadicElem series = pg.scalar * pg.place[0][(size_t)x[0]][(size_t)y[0]] *
                               pg.place[1][(size_t)x[1]][(size_t)y[1]];
            if (!(closed - series).is_exactly_zero_mod_cap()) ok = false;
          }
        checked++;
      }
    }
    report(9, ok && checked >= 200, now() - t0,
           std::to_string(checked) + " matrices, flat indices <= 12, mod pi^40");
  }

  // 10: Newton above Hodge on random block matrices + the h=12 vertices
  {
    double t0 = now();
    std::mt19937_64 rng(77);
    Ctx ctx = PadicContext::make(3, 1, 0, 90);
    auto kappa = make_weight(S13.pl, {2, 2}, make_psi_r(S13.pl, 0));
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; trial++) {
      long h = 1 + (long)(rng() % 3);
      long R = 4 + (long)(rng() % 57);
      ApproxOperatorMatrix A;
      A.ctx = ctx;
      A.h = h;
      A.kappa = kappa;
      A.op_word = {0, 1};
      A.basis = bi_prefix(R);
      long n = R * h;
      if (n > 120) {
        trial--;
        continue;
      }
      A.e.assign((size_t)(n * n), PadicElem(ctx));
      for (long xi = 0; xi < R; xi++)
        for (long yi = 0; yi < R; yi++)
          for (long i = 0; i < h; i++)
            for (long j = 0; j < h; j++) {
              long bx = A.basis[(size_t)xi][0] + A.basis[(size_t)xi][1];
              A.at(xi * h + i, yi * h + j) =
                  PadicElem(ctx, (long)(rng() % 3000)) * pow_ui(Int(3), (unsigned long)bx);
            }
      auto np = matrix_slopes(A);
      if (!verify_np_above_hodge(np, hodge_bound(h, 2, n + 1))) ok = false;
    }
    auto hb = hodge_bound(12, 2, 100);
    bool verts = hb.vertices[0] == std::pair<long, long>{0, 0} &&
                 hb.vertices[1] == std::pair<long, long>{12, 0} &&
                 hb.vertices[2] == std::pair<long, long>{36, 24};
    report(10, ok && verts, now() - t0, "100 random matrices; h=12 vertices (0,0),(12,0),(36,24)");
  }

  // 11: Atkin-Lehner symmetry of the classical rows
  {
    double t0 = now();
    bool ok = true;
    std::string detail;
    struct Probe {
      Session* S;
      std::vector<long> k;
      std::string op;
    } probes[] = {{&S13, {2, 2}, "Up"},   {&S13, {2, 4}, "Up"},  {&S13, {2, 6}, "Up"},
                  {&S13, {4, 4}, "Up"},   {&S13, {3, 3}, "Up"},  {&S13, {2, 4}, "Up1"},
                  {&S13, {2, 4}, "Up2"},  {&S17, {2, 2}, "Up"},  {&S17, {4, 2}, "Up"},
                  {&S5, {2, 2}, "Up"},    {&S5, {2, 4}, "Up"}};
    for (auto& pr : probes) {
      auto kt = weight_tuple_from_k(pr.k);
      auto kappa = make_weight(pr.S->pl, pr.k, make_psi_r(pr.S->pl, kt.r));
      SMSet sm = classical_slopes(*pr.S, kappa, pr.op);
      ExtRat centre = al_centre(kappa, pr.S->pl, parse_op_word(pr.op, pr.S->pl->nfac));
      auto rep = al_check(sm, centre);
      if (!rep.symmetric) {
        ok = false;
        detail += "[" + std::to_string(pr.k[0]) + "," + std::to_string(pr.k[1]) + "]" + pr.op +
                  " centre " + centre.str() + "; ";
      }
    }
    // spot-check the stated centres
    auto c22 = al_centre(make_weight(S13.pl, {2, 2}, make_psi_r(S13.pl, 0)), S13.pl, {0, 1});
    auto c24 = al_centre(make_weight(S13.pl, {2, 4}, make_psi_r(S13.pl, 2)), S13.pl, {0, 1});
    if (!(c22 == ExtRat(2) && c24 == ExtRat(4))) ok = false;
    if (ok) detail = "11 multisets symmetric; centres 2 and 4 as stated";
    report(11, ok, now() - t0, detail);
  }

  // 12: partial grids
  {
    double t0 = now();
    bool ok = true;
    std::string detail;
    {
      auto kappa = make_weight(S13.pl, {2, 2}, make_psi_r(S13.pl, 0));
      auto u1 = classical_slopes(S13, kappa, "Up1");
      auto u2 = classical_slopes(S13, kappa, "Up2");
      auto up = classical_slopes(S13, kappa, "Up");
      PartialGrid G = partial_grid_solve(u1, u2, {{{1, 1}, up}}, true);
      if (!(G.total() == 12 && G.at(1, 1) == 4 && G.at(0, 0) == 1 && G.at(2, 2) == 1 &&
            G.at(2, 0) == 1 && G.at(0, 2) == 1)) {
        ok = false;
        detail += "d13 [2,2] grid wrong; ";
      }
    }
    {
      auto kappa = make_weight(S13.pl, {4, 4}, make_psi_r(S13.pl, 2));
      auto u1 = classical_slopes(S13, kappa, "Up1");
      auto u2 = classical_slopes(S13, kappa, "Up2");
      auto up = classical_slopes(S13, kappa, "Up");
      auto p12 = classical_slopes(S13, kappa, "Up1*Up2^2");
      std::vector<std::pair<std::pair<long, long>, SMSet>> powers{{{1, 1}, up}, {{1, 2}, p12}};
      PartialGrid G;
      try {
        G = partial_grid_solve(u1, u2, powers, true);
      } catch (const InfeasibleGrid&) {
        ok = false;
      }
      if (ok && !G.unique) {
        ok = false;
        detail += "d13 [4,4] not unique; ";
      }
      if (ok) {
        // corners 1, 4s on the odd-odd lattice
        bool corners = G.at(0, 0) == 1 && G.at(6, 6) == 1 && G.at(0, 6) == 1 && G.at(6, 0) == 1;
        bool odd4 = true;
        for (size_t r = 1; r < 7; r += 2)
          for (size_t c = 1; c < 7; c += 2)
            if (G.at(r, c) != 4) odd4 = false;
        if (!(corners && odd4 && G.total() == 108)) {
          ok = false;
          detail += "d13 [4,4] pattern wrong; ";
        }
      }
    }
    {
      auto kappa = make_weight(S17.pl, {2, 2}, make_psi_r(S17.pl, 0));
      auto u1 = classical_slopes(S17, kappa, "Up1");
      auto u2 = classical_slopes(S17, kappa, "Up2");
      auto up = classical_slopes(S17, kappa, "Up");
      PartialGrid G = partial_grid_solve(u1, u2, {{{1, 1}, up}}, true);
      if (!(G.total() == 24 && G.at(1, 1) == 12)) {
        ok = false;
        detail += "d17 [2,2] grid wrong; ";
      }
    }
    if (ok) detail = "three grids reproduced";
    report(12, ok, now() - t0, detail);
  }

  // 13: always-on property suites (mirrors of the unit tests, quick forms)
  {
    double t0 = now();
    bool ok = true;
    std::string detail;
    // Theta row partitions
    for (auto& d : S13.prime_data)
      for (long i = 0; i < d.h; i++) {
        long cnt = 0;
        for (long j = 0; j < d.h; j++) cnt += (long)d.at(i, j).size();
        if (cnt != 3) ok = false;
      }
    // P1 size formula
    if (!(S13.level.p1_size() == Int(144) && S5.level.p1_size() == Int(960))) ok = false;
    // Bi round trip
    for (long m = 0; m < 100000; m++) {
      auto x = bi_inv(m);
      if (bi(x[0], x[1]) != m || x[0] + x[1] != b_of(m)) {
        ok = false;
        break;
      }
    }
    // ultrametric + multiplicativity samples
    {
      auto ctx = PadicContext::make(3, 1, 1, 30);
      std::mt19937_64 rng(5);
      for (int t = 0; t < 100; t++) {
        PadicElem x(ctx, (long)(rng() % 100000 + 1)), y(ctx, (long)(rng() % 100000 + 1));
        auto vx = x.valuation(), vy = y.valuation();
        auto vs = (x + y).valuation(), vp = (x * y).valuation();
        ExtRat mn = vx < vy ? vx : vy;
        if (vs < mn) ok = false;
        if (vx != vy && !(vs == mn)) ok = false;
        if (vx.finite() && vy.finite() && (vx + vy) < ExtRat(15) && vp != vx + vy) ok = false;
      }
    }
    // classical dimension h (k1-1)(k2-1) and the split product identity
    {
      auto kappa = make_weight(S13.pl, {2, 4}, make_psi_r(S13.pl, 2));
      SMSet sm = classical_slopes(S13, kappa, "Up");
      if (sm.total_mult() != 12 * 1 * 3) ok = false;
      Ctx ctx = make_run_context(S13.pl, 60);
      auto basis = subspace_basis(SubspaceSpec::classical(0, 2), 16);
      auto A1 = assemble(S13.op_data("Up1"), kappa, basis, ctx);
      auto A2 = assemble(S13.op_data("Up2"), kappa, basis, ctx);
      auto Ap = assemble(S13.op_data("Up"), kappa, basis, ctx);
      for (long i = 0; i < Ap.n() && ok; i++)
        for (long j = 0; j < Ap.n() && ok; j++) {
          PadicElem acc(ctx);
          for (long t = 0; t < Ap.n(); t++) acc = acc + A2.at(i, t) * A1.at(t, j);
          if (!(acc - Ap.at(i, j)).is_exactly_zero_mod_cap()) ok = false;
        }
    }
    report(13, ok, now() - t0, ok ? "partitions, sizes, Bi, ultrametric, dimension, product law"
                                  : "property failure" + detail);
  }

  // 14 (stretch, non-gating): centre of weight space, d = 5, p = 3
  {
    double t0 = now();
    bool ok = true;
    std::string detail;
    try {
      RunConfig cfg;
      cfg.d = 5;
      cfg.p = 3;
      cfg.s = 1;
      cfg.aux = {{11, 2}};
      Session S = make_session(cfg, 200);
      detail = "h=" + std::to_string(S.h) +
               (S.sufficiently_small ? " (sufficiently small); " : " (NOT sufficiently small); ");
      if (S.sufficiently_small) {
        FiniteCharacter triv;
        triv.L = S.pl;
        triv.m = 1;
        triv.a.assign((size_t)S.pl->nfac, {});
        for (int i = 0; i < S.pl->nfac; i++)
          triv.a[(size_t)i].assign(S.pl->ugroups[(size_t)i].orders().size(), 0);
        auto kappa = make_weight(S.pl, {4, 4}, triv, "[4,4]");
        SMSet got = classical_slopes(S, kappa, "Up");
        auto rows = load_fixture_rows("centre_p3.txt");
        ok = got.str() == rows.at("[4,4]|Up").str();
        detail += "[4,4] " + got.str();
      } else {
        ok = false;
        detail += "invariants nontrivial, computation skipped";
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    report(14, ok, now() - t0, detail, /*gating=*/false);
  }

  std::printf("%s\n", failures == 0 ? "ACCEPTANCE: all gating criteria passed"
                                    : "ACCEPTANCE: FAILURES PRESENT");
  return failures == 0 ? 0 : 1;
}
