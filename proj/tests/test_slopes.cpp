#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include "hmf/presets.hpp"
#include "hmf/slopes.hpp"

using namespace hmf;

TEST_CASE("uncertified tail is flagged, never dropped") {
  // low precision cap forces unknown leading coefficients
  auto ctx = PadicContext::make(3, 1, 0, 6);
  auto F = RealQuadraticField::make(13);
  auto pl = PLevel::make(F, 3, 2);
  auto kappa = make_weight(pl, {2, 2}, make_psi_r(pl, 0));
  ApproxOperatorMatrix A;
  A.ctx = ctx;
  A.h = 1;
  A.kappa = kappa;
  A.basis.assign(3, {0, 0});
  A.e.assign(9, PadicElem(ctx));
  // diag(1, 3, 27): v(c_0) = 4 exact, but diag(1,3,243)-style would exceed cap
  A.at(0, 0) = PadicElem(ctx, 1);
  A.at(1, 1) = PadicElem(ctx, 3);
  A.at(2, 2) = PadicElem(ctx, 243);  // 3^5 = 243: c_0 valuation 6 >= cap
  auto np = matrix_slopes(A);
  // the smallest slopes are certified, the deep tail is not
  CHECK(np.slopes.pairs.front().slope == ExtRat(0));
  CHECK(np.slopes.pairs.front().certified);
  CHECK(!np.slopes.pairs.back().certified);
  CHECK(np.slopes.trust.finite());
  auto cp = np.slopes.certified_prefix();
  CHECK(cp.pairs.size() < np.slopes.pairs.size());
}

TEST_CASE("stable prefix of two truncations") {
  auto a = parse_smset("(0,1),(1,2),(2,4)");
  auto b = parse_smset("(0,1),(1,2),(2,5)");
  auto s = stable_prefix(a, b);
  CHECK(s.str() == parse_smset("(0,1),(1,2)").str());
}

TEST_CASE("smset parse/str round trip") {
  std::string text = "(0,1), (1/2,2), (5/3,6), (3,24)";
  auto s = parse_smset(text);
  CHECK(s.str() == text);
  CHECK_THROWS_AS(parse_smset("(1,2),(0,3)"), std::invalid_argument);
}

TEST_CASE("truncation slope prefix is monotone in R (empirical stabilization)") {
  Order O = preset_order(13);
  auto pl = PLevel::make(O.A.F, 3, 2);
  auto level = LevelData::make(pl, {});
  HeckeContext H = make_hecke_context(O, level, 80);
  auto d1 = hecke_data(H, 0);
  auto d2 = hecke_data(H, 1);
  auto up = hecke_compose(H, d1, d2);
  auto kappa = make_weight(pl, {2, 2}, make_psi_r(pl, 0));
  Ctx ctx = make_run_context(pl, 72);
  auto s3 = matrix_slopes(assemble_truncation(up, kappa, 3, ctx)).slopes;
  auto s6 = matrix_slopes(assemble_truncation(up, kappa, 6, ctx)).slopes;
  auto pre = stable_prefix(s3, s6);
  // rigorous trust_count is small; empirically the prefix is much longer
  CHECK((long)pre.pairs.size() >= 3);
  CHECK(trust_count(3, 1) >= 0);
}

TEST_CASE("slope multiset invariant under transpose and unimodular conjugation") {
  auto ctx = PadicContext::make(5, 1, 0, 40);
  auto F = RealQuadraticField::make(13);
  auto pl = PLevel::make(F, 3, 2);
  auto kappa = make_weight(pl, {2, 2}, make_psi_r(pl, 0));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; trial++) {
    long n = 5;
    ApproxOperatorMatrix A;
    A.ctx = ctx;
    A.h = 1;
    A.kappa = kappa;
    A.basis.assign((size_t)n, {0, 0});
    A.e.assign((size_t)(n * n), PadicElem(ctx));
    for (long i = 0; i < n * n; i++)
      A.e[(size_t)i] = PadicElem(ctx, (long)(rng() % 3000)) * pow_ui(Int(5), rng() % 3);
    ApproxOperatorMatrix At = A;
    for (long i = 0; i < n; i++)
      for (long j = 0; j < n; j++) At.at(i, j) = A.at(j, i);
    CHECK(matrix_slopes(A).slopes.str() == matrix_slopes(At).slopes.str());
    // conjugate by a random unimodular integer matrix (det +-1): build from
    // elementary row operations
    std::vector<std::vector<long>> U((size_t)n, std::vector<long>(n, 0));
    for (long i = 0; i < n; i++) U[(size_t)i][(size_t)i] = 1;
    for (int step = 0; step < 8; step++) {
      long a = (long)(rng() % n), b = (long)(rng() % n);
      if (a == b) continue;
      long c = (long)(rng() % 3) - 1;
      for (long j = 0; j < n; j++) U[(size_t)a][(size_t)j] += c * U[(size_t)b][(size_t)j];
    }
    // inverse of U by exact Gaussian elimination over Q
    std::vector<std::vector<Rat>> M((size_t)n, std::vector<Rat>(2 * n, Rat(0)));
    for (long i = 0; i < n; i++) {
      for (long j = 0; j < n; j++) M[(size_t)i][(size_t)j] = Rat(U[(size_t)i][(size_t)j]);
      M[(size_t)i][(size_t)(n + i)] = Rat(1);
    }
    for (long col = 0; col < n; col++) {
      long piv = col;
      while (M[(size_t)piv][(size_t)col].is_zero()) piv++;
      std::swap(M[(size_t)col], M[(size_t)piv]);
      Rat inv = Rat(1) / M[(size_t)col][(size_t)col];
      for (long j = 0; j < 2 * n; j++) M[(size_t)col][(size_t)j] *= inv;
      for (long r = 0; r < n; r++)
        if (r != col && !M[(size_t)r][(size_t)col].is_zero()) {
          Rat f = M[(size_t)r][(size_t)col];
          for (long j = 0; j < 2 * n; j++)
            M[(size_t)r][(size_t)j] -= f * M[(size_t)col][(size_t)j];
        }
    }
    ApproxOperatorMatrix B = A;
    // B = U A U^{-1}
    for (long i = 0; i < n; i++)
      for (long j = 0; j < n; j++) {
        PadicElem acc(ctx);
        for (long s = 0; s < n; s++)
          for (long t = 0; t < n; t++) {
            if (U[(size_t)i][(size_t)s] == 0) continue;
            const Rat& uin = M[(size_t)t][(size_t)(n + j)];
            if (uin.is_zero()) continue;
            PadicElem term = A.at(s, t) * Int(U[(size_t)i][(size_t)s]);
            // uin is integral up to det +-1; multiply exactly
            term = term * uin.num();
            if (!uin.den().is_one()) term = term * PadicElem(ctx, uin.den()).inv();
            acc = acc + term;
          }
        B.at(i, j) = acc;
      }
    CHECK(matrix_slopes(A).slopes.str() == matrix_slopes(B).slopes.str());
  }
}
