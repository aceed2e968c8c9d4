#include "hmf/hecke.hpp"

#include <algorithm>

namespace hmf {

namespace {

// embed an integral 2x2 over O_F into a padic context at one prime
SplitMat embed_mat(const PlaceEmbedding& E, const std::array<std::array<FieldElem, 2>, 2>& t) {
  SplitMat r = SplitMat::zero(E.ctx);
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = E(t[(size_t)i][(size_t)j]);
  return r;
}

LocalMat reduce_mat_local(const LocalRing& R, const std::array<std::array<FieldElem, 2>, 2>& t) {
  LocalMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = R.reduce(t[(size_t)i][(size_t)j]);
  return r;
}

long val_floor(const PadicElem& x) {
  ExtRat v = x.valuation();
  if (!v.finite()) return x.ctx()->M + 1;
  return v.num / v.den;
}

// exact division of every entry by p^k
SplitMat sm_divexact_p(const SplitMat& a, long k) {
  SplitMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = a.m[i][j].divexact_p(k);
  return r;
}

// integer row HNF (small 8x8 lattices)
std::vector<std::vector<Int>> z_hnf(std::vector<std::vector<Int>> rows) {
  const size_t n = rows.empty() ? 0 : rows[0].size();
  size_t pivot = 0;
  for (size_t col = 0; col < n && pivot < rows.size(); col++) {
    while (true) {
      long best = -1;
      for (size_t r = pivot; r < rows.size(); r++)
        if (!rows[r][col].is_zero())
          if (best < 0 || cmp(abs(rows[r][col]), abs(rows[(size_t)best][col])) < 0) best = (long)r;
      if (best < 0) break;
      std::swap(rows[pivot], rows[(size_t)best]);
      bool clean = true;
      for (size_t r = pivot + 1; r < rows.size(); r++)
        if (!rows[r][col].is_zero()) {
          Int q = fdiv(rows[r][col], rows[pivot][col]);
          for (size_t cidx = 0; cidx < n; cidx++) rows[r][cidx] -= q * rows[pivot][cidx];
          if (!rows[r][col].is_zero()) clean = false;
        }
      if (clean) {
        if (rows[pivot][col].sgn() < 0)
          for (size_t cidx = 0; cidx < n; cidx++) rows[pivot][cidx] = -rows[pivot][cidx];
        pivot++;
        break;
      }
    }
  }
  rows.resize(pivot);
  return rows;
}

}  // namespace

HeckeContext make_hecke_context(const Order& O, const LevelData& level, long digits) {
  HeckeContext H;
  H.O = O;
  H.level = level;
  H.digits = digits;
  H.cs = class_set(O, level);
  const PLevelRef& pl = level.pl;
  for (int i = 0; i < pl->nfac; i++) H.psplit.push_back(build_splitting(O, pl->prime(i), digits + 8));
  for (auto& f : level.factors) H.level_split.push_back(build_splitting(O, f.prime, f.e + 6));
  const size_t nu = H.cs.units.reps.size();
  for (size_t fi = 0; fi < level.nfactors(); fi++)
    for (size_t u = 0; u < nu; u++)
      H.unit_images_flat.push_back(
          H.level_split[fi].reduce(level.rings[fi], H.level_split[fi].apply(O, H.cs.units.reps[u])));
  return H;
}

HeckeLocalData hecke_data(const HeckeContext& H, int pi) {
  const Order& O = H.O;
  const RealQuadraticField& F = O.A.F;
  const LevelData& level = H.level;
  const PLevelRef& pl = level.pl;
  const ClassSet& cs = H.cs;
  if (!cs.sufficiently_small)
    throw std::runtime_error("hecke_data: level is not sufficiently small");
  const long h = cs.h();
  const int s = pl->s;
  if (s < 1) throw std::invalid_argument("hecke_data: wild level s >= 1 required");
  const PrimeIdeal& P = pl->prime(pi);
  const Ctx& ctx = H.psplit[(size_t)pi].ctx;
  PlaceEmbedding E = [&] {
    SplittingType st;
    st.split = P.f == 1;
    st.p1 = P;
    return make_place_embedding(ctx, F, st, 1);
  }();
  PadicElem pi_loc = E(P.gen);
  if (val_floor(pi_loc) != 1) throw std::logic_error("hecke_data: uniformizer valuation");

  // embeddings and t-lifts at every prime above p
  std::vector<PlaceEmbedding> Ep;
  for (int l = 0; l < pl->nfac; l++) {
    SplittingType st;
    st.split = pl->prime(l).f == 1;
    st.p1 = pl->prime(l);
    Ep.push_back(make_place_embedding(H.psplit[(size_t)l].ctx, F, st, 1));
  }
  std::vector<std::vector<SplitMat>> tmat(pl->nfac), tmat_inv(pl->nfac);
  for (int l = 0; l < pl->nfac; l++)
    for (long i = 0; i < h; i++) {
      SplitMat t = embed_mat(Ep[(size_t)l], cs.t_lift[(size_t)i]);
      tmat[(size_t)l].push_back(t);
      tmat_inv[(size_t)l].push_back(sm_inv(t));
    }

  // residue representatives of O_P / pi
  std::vector<FieldElem> alphas;
  if (P.f == 1)
    for (long a = 0; a < P.q; a++) alphas.push_back(FieldElem(a));
  else
    for (long a = 0; a < P.q; a++)
      for (long b = 0; b < P.q; b++) alphas.push_back({Rat(a), Rat(b)});

  // pi^s as a field element (global uniformizer power)
  FieldElem pis_f(1);
  for (int t = 0; t < s; t++) pis_f = fe_mul(F, pis_f, P.gen);

  auto zb = z_basis_of(F, O.basis);

  HeckeLocalData out;
  out.pl = pl;
  out.op_word = {pi};
  out.digits = H.digits;
  out.h = h;
  out.sufficiently_small = cs.sufficiently_small;
  out.T.assign((size_t)(h * h), {});

  // targets for the principal generator: totally positive generators of the
  // ideal nrd(g J) = (P.gen), minimal trace among +-eps^k multiples
  std::vector<FieldElem> targets;
  Rat best_tr;
  {
    FieldElem eps = fundamental_unit(F);
    FieldElem epsi = fe_inv(F, eps);
    for (int dir = 0; dir < 2; dir++) {
      FieldElem u(1);
      for (int k = 0; k <= 8; k++) {
        for (int sg = 0; sg < 2; sg++) {
          FieldElem cand = fe_mul(F, sg ? -u : u, P.gen);
          if (fe_totally_positive(F, cand)) {
            Rat tr = fe_trace(F, cand);
            if (targets.empty() || tr < best_tr) {
              targets.assign(1, cand);
              best_tr = tr;
            } else if (tr == best_tr &&
                       std::find(targets.begin(), targets.end(), cand) == targets.end()) {
              targets.push_back(cand);
            }
          }
        }
        u = fe_mul(F, u, dir ? epsi : eps);
      }
    }
    if (targets.empty()) throw PrincipalizationFailure("hecke_data: no totally positive generator");
  }
  Int fp_bound = best_tr.num();  // best_tr is a positive integer

  for (long i = 0; i < h; i++) {
    // lattice J' = { y in O_D : second row of t_i^{-1} sigma_P(y) = 0 mod P }
    // over the Z-basis of O_D, via F_p-linear algebra on the residue field coords
    const long p = P.q;
    const int fdeg = P.f;
    const int ncond = 2 * fdeg;
    std::vector<std::vector<long>> condmat;  // ncond x 8 over F_p
    condmat.assign((size_t)ncond, std::vector<long>(8, 0));
    for (size_t m = 0; m < 8; m++) {
      SplitMat sg = H.psplit[(size_t)pi].apply(O, zb[m]);
      SplitMat row = sm_mul(sm_adj(tmat[(size_t)pi][(size_t)i]), sg);
      // second row entries row.m[1][0], row.m[1][1] mod P
      for (int cidx = 0; cidx < 2; cidx++)
        for (int t = 0; t < fdeg; t++) {
          long v = fmod_pos(row.m[1][cidx].coord(0, t), Int(p)).to_long();
          condmat[(size_t)(cidx * fdeg + t)][m] = v;
        }
    }
    // kernel of condmat over F_p
    std::vector<std::vector<long>> mat = condmat;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < 8 && rank < ncond; col++) {
      int piv = -1;
      for (int r = rank; r < ncond; r++)
        if (mat[(size_t)r][(size_t)col] % p != 0) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(mat[(size_t)rank], mat[(size_t)piv]);
      long inv = 0;
      for (long x = 1; x < p; x++)
        if (x * mat[(size_t)rank][(size_t)col] % p == 1) inv = x;
      for (int cc = 0; cc < 8; cc++) mat[(size_t)rank][(size_t)cc] = mat[(size_t)rank][(size_t)cc] * inv % p;
      for (int r = 0; r < ncond; r++)
        if (r != rank && mat[(size_t)r][(size_t)col] % p != 0) {
          long f = mat[(size_t)r][(size_t)col];
          for (int cc = 0; cc < 8; cc++)
            mat[(size_t)r][(size_t)cc] =
                ((mat[(size_t)r][(size_t)cc] - f * mat[(size_t)rank][(size_t)cc]) % p + p) % p;
        }
      pivot_col.push_back(col);
      rank++;
    }
    // kernel basis: free columns
    std::vector<std::vector<Int>> lat;
    for (int col = 0; col < 8; col++) {
      if (std::find(pivot_col.begin(), pivot_col.end(), col) != pivot_col.end()) continue;
      std::vector<Int> v(8, Int(0));
      v[(size_t)col] = Int(1);
      for (int r = 0; r < rank; r++) {
        long coeff = mat[(size_t)r][(size_t)col];
        v[(size_t)pivot_col[(size_t)r]] = Int(((-coeff) % p + p) % p);
      }
      lat.push_back(v);
    }
    for (int m = 0; m < 8; m++) {
      std::vector<Int> v(8, Int(0));
      v[(size_t)m] = Int(p);
      lat.push_back(v);
    }
    auto hnf = z_hnf(std::move(lat));
    if (hnf.size() != 8) throw std::logic_error("hecke_data: J lattice rank defect");
    std::vector<QuatF> jbasis;
    for (auto& row : hnf) {
      QuatF v;
      for (int m = 0; m < 8; m++)
        if (!row[(size_t)m].is_zero()) v = v + q_scale(F, FieldElem{Rat(row[(size_t)m]), Rat(0)}, zb[(size_t)m]);
      jbasis.push_back(v);
    }
    // principal generator search
    QuatF y;
    bool found = false;
    for (auto& v : short_vectors(O.A, jbasis, fp_bound)) {
      FieldElem nr = qnrd(O.A, v);
      for (auto& t : targets)
        if (nr == t) {
          y = v;
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found)
      throw PrincipalizationFailure("hecke_data: no generator of reduced norm pi within bound");
    QuatF ybar = qconj(y);
    FieldElem nrd_y = qnrd(O.A, y);

    for (auto& alpha : alphas) {
      // w = delta^{-1} t_i u_alpha^{-1}: find its orbit and transporter
      // at the operator prime: [sigma(ybar) t_i adj(u_alpha)] / nrd(y)
      P1Point wpt(level.nfactors());
      {
        SplitMat sy = H.psplit[(size_t)pi].apply(O, ybar);
        SplitMat adj_u = SplitMat::zero(ctx);
        adj_u.m[0][0] = PadicElem(ctx, 1);
        adj_u.m[1][0] = -(E(alpha) * E(pis_f));
        adj_u.m[1][1] = pi_loc;
        SplitMat M = sm_mul(sm_mul(sy, tmat[(size_t)pi][(size_t)i]), adj_u);
        PadicElem nrd_emb = E(nrd_y);
        long vn = val_floor(nrd_emb);
        if (vn != 1) throw std::logic_error("hecke_data: nrd(y) valuation at P");
        SplitMat W = sm_divexact_p(M, 1);
        PadicElem sc = nrd_emb.divexact_p(1).inv();
        W = sm_scale(W, sc);
        if (!(val_floor(sm_det(W)) == 0)) throw std::logic_error("hecke_data: w not a unit at P");
        const LocalRing& SR = pl->srings[(size_t)pi];
        Int mod(SR.modulus());
        LocalElem c0{fmod_pos(W.m[0][0].coord(0, 0), mod).to_long(),
                     P.f == 2 ? fmod_pos(W.m[0][0].coord(0, 1), mod).to_long() : 0};
        LocalElem c1{fmod_pos(W.m[1][0].coord(0, 0), mod).to_long(),
                     P.f == 2 ? fmod_pos(W.m[1][0].coord(0, 1), mod).to_long() : 0};
        wpt[(size_t)pi] = p1_normalize(SR, c0, c1);
      }
      // other primes above p
      for (int l = 0; l < pl->nfac; l++) {
        if (l == pi) continue;
        SplitMat sy = H.psplit[(size_t)l].apply(O, ybar);
        SplitMat M = sm_mul(sy, tmat[(size_t)l][(size_t)i]);
        PadicElem nrd_emb = Ep[(size_t)l](nrd_y);
        if (val_floor(nrd_emb) != 0) throw std::logic_error("hecke_data: nrd(y) valuation at P'");
        SplitMat W = sm_scale(M, nrd_emb.inv());
        const LocalRing& SR = pl->srings[(size_t)l];
        Int mod(SR.modulus());
        LocalElem c0{fmod_pos(W.m[0][0].coord(0, 0), mod).to_long(),
                     pl->prime(l).f == 2 ? fmod_pos(W.m[0][0].coord(0, 1), mod).to_long() : 0};
        LocalElem c1{fmod_pos(W.m[1][0].coord(0, 0), mod).to_long(),
                     pl->prime(l).f == 2 ? fmod_pos(W.m[1][0].coord(0, 1), mod).to_long() : 0};
        wpt[(size_t)l] = p1_normalize(SR, c0, c1);
      }
      // auxiliary factors
      for (size_t fi = (size_t)pl->nfac; fi < level.nfactors(); fi++) {
        const LocalRing& R = level.rings[fi];
        LocalMat sy = H.level_split[fi].reduce(R, H.level_split[fi].apply(O, ybar));
        LocalMat ti = reduce_mat_local(R, cs.t_lift[(size_t)i]);
        LocalMat M = lm_mul(R, sy, ti);
        LocalElem sc = R.inv(R.reduce(nrd_y));
        LocalElem c0 = R.mul(M.m[0][0], sc);
        LocalElem c1 = R.mul(M.m[1][0], sc);
        wpt[fi] = p1_normalize(R, c0, c1);
      }
      // wait: the p-prime points above were computed before aux; but the level
      // factor order is p-primes first, so wpt indices line up.
      auto it = cs.point_index.find(p1_point_key(level, wpt));
      if (it == cs.point_index.end()) throw std::logic_error("hecke_data: w point not found");
      long pt_idx = it->second;
      long j = cs.orbit_of_point[(size_t)pt_idx];
      long uidx = cs.transporter[(size_t)pt_idx];
      const QuatF& dpp = cs.units.reps[(size_t)uidx];

      // coset matrix components: (t_j)^{-1} sigma(d^{-1}) (t_i), d = (y/g) d''
      QuatF z = qmul(O.A, y, dpp);
      QuatF zbar = qconj(z);
      FieldElem nrd_z = qnrd(O.A, z);
      HeckeMatrix hm;
      hm.comp.resize((size_t)pl->nfac, SplitMat::zero(ctx));
      for (int l = 0; l < pl->nfac; l++) {
        const Ctx& lctx = H.psplit[(size_t)l].ctx;
        SplitMat sz = H.psplit[(size_t)l].apply(O, zbar);
        SplitMat num = sm_mul(sm_mul(tmat_inv[(size_t)l][(size_t)j], sz), tmat[(size_t)l][(size_t)i]);
        PadicElem g_emb = Ep[(size_t)l](P.gen);
        PadicElem n_emb = Ep[(size_t)l](nrd_z);
        long vg = val_floor(g_emb), vn = val_floor(n_emb);
        if (vg != vn) throw std::logic_error("hecke_data: scalar valuation mismatch");
        PadicElem scalar = g_emb.divexact_p(vg) * (n_emb.divexact_p(vn)).inv();
        SplitMat X = sm_scale(num, scalar);
        // shape checks
        auto shape_msg = [&](const char* what) {
          return std::string("hecke_data: ") + what + " (i=" + std::to_string(i) +
                 " j=" + std::to_string(j) + " l=" + std::to_string(l) +
                 " vals " + std::to_string(val_floor(X.m[0][0])) + "," +
                 std::to_string(val_floor(X.m[0][1])) + "," +
                 std::to_string(val_floor(X.m[1][0])) + "," +
                 std::to_string(val_floor(X.m[1][1])) + ")";
        };
        if (l == pi) {
          // top-left is pi times a unit for s >= 2; for s = 1 only pi | a holds
          long tl_min = 1;
          bool tl_exact = s >= 2;
          long vtl = val_floor(X.m[0][0]);
          if ((tl_exact ? vtl != tl_min : vtl < tl_min) || val_floor(X.m[1][1]) != 0 ||
              val_floor(X.m[1][0]) < s)
            throw std::logic_error(shape_msg("Delta_s shape violated at P"));
        } else {
          if (val_floor(X.m[0][0]) != 0 || val_floor(X.m[1][1]) != 0 || val_floor(X.m[1][0]) < s)
            throw std::logic_error(shape_msg("U shape violated away from P"));
        }
        (void)lctx;
        hm.comp[(size_t)l] = X;
      }
      out.T[(size_t)(i * h + j)].push_back(std::move(hm));
    }
    // row partition check
    long cnt = 0;
    for (long j = 0; j < h; j++) cnt += (long)out.at(i, j).size();
    if (cnt != (long)alphas.size()) throw std::logic_error("hecke_data: Theta row size");
  }
  return out;
}

HeckeLocalData hecke_compose(const HeckeContext& H, const HeckeLocalData& A,
                             const HeckeLocalData& B) {
  if (A.h != B.h) throw std::invalid_argument("hecke_compose: size mismatch");
  HeckeLocalData C;
  C.pl = A.pl;
  C.op_word = A.op_word;
  C.op_word.insert(C.op_word.end(), B.op_word.begin(), B.op_word.end());
  C.digits = std::min(A.digits, B.digits);
  C.h = A.h;
  C.sufficiently_small = A.sufficiently_small && B.sufficiently_small;
  C.T.assign((size_t)(C.h * C.h), {});
  const int nfac = (int)H.psplit.size();
  for (long i = 0; i < C.h; i++)
    for (long m = 0; m < C.h; m++)
      for (auto& bmat : B.at(i, m))
        for (long j = 0; j < C.h; j++)
          for (auto& amat : A.at(m, j)) {
            HeckeMatrix hm;
            hm.comp.resize((size_t)nfac);
            for (int l = 0; l < nfac; l++) hm.comp[(size_t)l] = sm_mul(amat.comp[(size_t)l], bmat.comp[(size_t)l]);
            C.T[(size_t)(i * C.h + j)].push_back(std::move(hm));
          }
  return C;
}

}  // namespace hmf
