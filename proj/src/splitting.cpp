#include "hmf/splitting.hpp"

namespace hmf {

SplitMat sm_mul(const SplitMat& a, const SplitMat& b) {
  SplitMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
  return r;
}

SplitMat sm_add(const SplitMat& a, const SplitMat& b) {
  SplitMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = a.m[i][j] + b.m[i][j];
  return r;
}

PadicElem sm_det(const SplitMat& a) { return a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]; }

SplitMat sm_scale(const SplitMat& a, const PadicElem& s) {
  SplitMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = a.m[i][j] * s;
  return r;
}

SplitMat sm_adj(const SplitMat& a) {
  SplitMat r;
  r.m[0][0] = a.m[1][1];
  r.m[0][1] = -a.m[0][1];
  r.m[1][0] = -a.m[1][0];
  r.m[1][1] = a.m[0][0];
  return r;
}

SplitMat sm_inv(const SplitMat& a) {
  PadicElem di = sm_det(a).inv();
  return sm_scale(sm_adj(a), di);
}

SplitMat sm_frobenius(const SplitMat& a) {
  SplitMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = a.m[i][j].frobenius();
  return r;
}

PadicElem PlaceEmbedding::embed_rat(const Rat& r) const {
  PadicElem num(ctx, r.num());
  if (r.den().is_one()) return num;
  PadicElem den(ctx, r.den());
  return num * den.inv();
}

PadicElem PlaceEmbedding::operator()(const FieldElem& x) const {
  return embed_rat(x.x) + embed_rat(x.y) * omega_img;
}

PlaceEmbedding make_place_embedding(const Ctx& ctx, const RealQuadraticField& F,
                                    const SplittingType& split, int place) {
  PlaceEmbedding E;
  E.ctx = ctx;
  E.F = F;
  if (split.split) {
    if (ctx->f != 1) throw std::invalid_argument("make_place_embedding: split prime needs f = 1");
    long r0 = place == 1 ? split.p1.omega_root : split.p2.omega_root;
    E.omega_img = hensel_quadratic_root(ctx, F.T, F.C, r0);
  } else {
    if (ctx->f != 2 || ctx->gT != F.T || ctx->gC != F.C)
      throw std::invalid_argument("make_place_embedding: inert prime needs the field quadratic");
    E.omega_img = PadicElem::w_gen(ctx);
    if (place == 2) E.omega_img = E.omega_img.frobenius();
  }
  return E;
}

namespace {

struct QuatR {
  PadicElem c[4];
};

QuatR qr_mul(const PadicElem& a, const PadicElem& b, const QuatR& x, const QuatR& y) {
  QuatR r;
  r.c[0] = x.c[0] * y.c[0] + a * (x.c[1] * y.c[1]) + b * (x.c[2] * y.c[2]) -
           a * b * (x.c[3] * y.c[3]);
  r.c[1] = x.c[0] * y.c[1] + x.c[1] * y.c[0] - b * (x.c[2] * y.c[3] - x.c[3] * y.c[2]);
  r.c[2] = x.c[0] * y.c[2] + x.c[2] * y.c[0] + a * (x.c[1] * y.c[3] - x.c[3] * y.c[1]);
  r.c[3] = x.c[0] * y.c[3] + x.c[3] * y.c[0] + x.c[1] * y.c[2] - x.c[2] * y.c[1];
  return r;
}

long val_floor(const PadicElem& x) {
  ExtRat v = x.valuation();
  if (!v.finite()) return x.ctx()->M + 1;
  return v.num / v.den;
}

PlaceEmbedding completion_embedding(const Ctx& ctx, const RealQuadraticField& F,
                                    const PrimeIdeal& P) {
  SplittingType st;
  st.split = P.f == 1;
  st.p1 = P;
  return make_place_embedding(ctx, F, st, 1);
}

}  // namespace

SplitMat LocalSplitting::apply(const Order& O, const QuatF& x) const {
  auto coords = order_coordinates(O, x);
  if (!coords) throw std::invalid_argument("LocalSplitting::apply: element outside the order");
  PlaceEmbedding E = completion_embedding(ctx, O.A.F, P);
  SplitMat out = SplitMat::zero(ctx);
  for (int m = 0; m < 4; m++) {
    PadicElem c = E((*coords)[(size_t)m]);
    out = sm_add(out, sm_scale(images[(size_t)m], c));
  }
  return out;
}

LocalMat LocalSplitting::reduce(const LocalRing& R, const SplitMat& s) const {
  if (R.prime().q != P.q || R.prime().f != P.f || R.prime().label != P.label)
    throw std::invalid_argument("LocalSplitting::reduce: prime mismatch");
  LocalMat out;
  Int mod((long)R.modulus());
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      long a = fmod_pos(s.m[i][j].coord(0, 0), mod).to_long();
      long b = (ctx->f == 2) ? fmod_pos(s.m[i][j].coord(0, 1), mod).to_long() : 0;
      out.m[i][j] = {a, b};
    }
  return out;
}

LocalSplitting build_splitting(const Order& O, const PrimeIdeal& P, long digits) {
  const RealQuadraticField& F = O.A.F;
  const long q = P.q;
  const long slack = 12;
  Ctx big = (P.f == 2) ? PadicContext::make(q, 2, 0, digits + slack, F.T, F.C)
                       : PadicContext::make(q, 1, 0, digits + slack);
  PlaceEmbedding E = completion_embedding(big, F, P);
  PadicElem a = E(O.A.a), b = E(O.A.b);

  // conic seed z^2 = a x^2 + b y^2 with z a unit
  long k0 = q == 2 ? 3 : 1;
  LocalRing Rs(F, P, (int)k0);
  LocalElem as = Rs.reduce(O.A.a), bs = Rs.reduce(O.A.b);
  LocalElem sx, sy, sz;
  bool found = false;
  for (auto& x : Rs.all_elements()) {
    if (found) break;
    for (auto& y : Rs.all_elements()) {
      if (found) break;
      LocalElem rhs = Rs.add(Rs.mul(as, Rs.mul(x, x)), Rs.mul(bs, Rs.mul(y, y)));
      for (auto& z : Rs.all_units()) {
        if (Rs.mul(z, z) == rhs) {
          sx = x;
          sy = y;
          sz = z;
          found = true;
          break;
        }
      }
    }
  }
  if (!found) throw std::runtime_error("build_splitting: conic has no unit-z point (ramified?)");

  auto lift = [&](const LocalElem& e) {
    PadicElem r(big, e.a);
    if (P.f == 2) r = r + PadicElem(big, e.b) * PadicElem::w_gen(big);
    return r;
  };
  PadicElem X = lift(sx), Y = lift(sy), Z = lift(sz);
  PadicElem c = a * X * X + b * Y * Y;
  for (int it = 0; it < 80; it++) {
    PadicElem t = Z * Z - c;
    if (t.is_exactly_zero_mod_cap()) break;
    PadicElem h = (q == 2) ? t.divexact_p(1) * Z.inv() : t * (Z + Z).inv();
    Z = Z - h;
  }
  if (!(Z * Z - c).is_exactly_zero_mod_cap())
    throw std::runtime_error("build_splitting: Hensel did not converge");

  QuatR eps;
  eps.c[0] = Z;
  eps.c[1] = X;
  eps.c[2] = Y;
  eps.c[3] = PadicElem(big);

  Int den(1);
  for (auto& bq : O.basis)
    for (auto& fe : bq.c)
      for (const Rat* r : {&fe.x, &fe.y}) {
        Int g = gcd(den, r->den());
        den = divexact(den * r->den(), g);
      }

  auto embed_scaled_basis = [&](int m) {
    QuatR bm;
    for (int t = 0; t < 4; t++)
      bm.c[t] = E({O.basis[(size_t)m].c[(size_t)t].x * Rat(den),
                   O.basis[(size_t)m].c[(size_t)t].y * Rat(den)});
    return bm;
  };

  // columns of the left ideal (den O_D) eps
  std::vector<std::array<PadicElem, 4>> cols;
  for (int m = 0; m < 4; m++) {
    QuatR pr = qr_mul(a, b, embed_scaled_basis(m), eps);
    cols.push_back({pr.c[0], pr.c[1], pr.c[2], pr.c[3]});
  }
  std::vector<std::array<PadicElem, 4>> basis_cols;
  std::vector<int> pivot_rows;
  for (int step = 0; step < 2; step++) {
    long best_val = big->M + 1;
    size_t best_col = 0;
    int best_row = -1;
    for (size_t ci = 0; ci < cols.size(); ci++)
      for (int r = 0; r < 4; r++) {
        long v = val_floor(cols[ci][(size_t)r]);
        if (v < best_val) {
          best_val = v;
          best_col = ci;
          best_row = r;
        }
      }
    if (best_row < 0 || best_val > 6)
      throw std::runtime_error("build_splitting: pivot too deep");
    auto piv = cols[best_col];
    cols.erase(cols.begin() + (long)best_col);
    PadicElem pui = piv[(size_t)best_row].divexact_p(best_val).inv();
    for (auto& col : cols) {
      long vv = val_floor(col[(size_t)best_row]);
      if (vv > big->M) continue;
      if (vv < best_val) throw std::logic_error("build_splitting: pivot not minimal");
      PadicElem f = col[(size_t)best_row].divexact_p(best_val) * pui;
      for (int r = 0; r < 4; r++) col[(size_t)r] = col[(size_t)r] - f * piv[(size_t)r];
    }
    basis_cols.push_back(piv);
    pivot_rows.push_back(best_row);
  }
  for (auto& col : cols)
    for (int r = 0; r < 4; r++)
      if (val_floor(col[(size_t)r]) < digits)
        throw std::runtime_error("build_splitting: residual column above tolerance");

  LocalSplitting out;
  out.P = P;
  Ctx fin = (P.f == 2) ? PadicContext::make(q, 2, 0, digits, F.T, F.C)
                       : PadicContext::make(q, 1, 0, digits);
  out.ctx = fin;
  const auto& u0 = basis_cols[0];
  const auto& u1 = basis_cols[1];
  const int r0 = pivot_rows[0], r1 = pivot_rows[1];
  long vden = 0;
  {
    Int dd = den;
    while (dd.divisible_by(Int(q))) {
      dd = divexact(dd, Int(q));
      vden++;
    }
  }
  PadicElem den_unit_inv = PadicElem(big, den).divexact_p(vden).inv();

  auto solve_pair = [&](const QuatR& target, PadicElem& c0, PadicElem& c1) {
    PadicElem t0 = target.c[r0], t1 = target.c[r1];
    PadicElem a00 = u0[(size_t)r0], a01 = u1[(size_t)r0];
    PadicElem a10 = u0[(size_t)r1], a11 = u1[(size_t)r1];
    PadicElem det = a00 * a11 - a01 * a10;
    long dvi = val_floor(det);
    if (dvi > 6) throw std::logic_error("build_splitting: singular pivot pair");
    PadicElem deti = det.divexact_p(dvi).inv();
    c0 = (t0 * a11 - t1 * a01).divexact_p(dvi) * deti;
    c1 = (a00 * t1 - a10 * t0).divexact_p(dvi) * deti;
  };

  for (int m = 0; m < 4; m++) {
    QuatR bm = embed_scaled_basis(m);
    SplitMat img = SplitMat::zero(big);
    for (int l = 0; l < 2; l++) {
      QuatR ul;
      const auto& u = l == 0 ? u0 : u1;
      for (int t = 0; t < 4; t++) ul.c[t] = u[(size_t)t];
      QuatR target = qr_mul(a, b, bm, ul);
      PadicElem c0(big), c1(big);
      solve_pair(target, c0, c1);
      for (int r = 0; r < 4; r++) {
        PadicElem resid = target.c[r] - c0 * u0[(size_t)r] - c1 * u1[(size_t)r];
        if (val_floor(resid) < digits) throw std::logic_error("build_splitting: inconsistent solve");
      }
      img.m[0][l] = c0;
      img.m[1][l] = c1;
    }
    SplitMat fin_img = SplitMat::zero(fin);
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) {
        PadicElem e = img.m[i][j].divexact_p(vden) * den_unit_inv;
        PadicElem red(fin);
        for (int t = 0; t < fin->f; t++) {
          red.coord(0, t) = e.coord(0, t);
          fin->reduce(red.coord(0, t));
        }
        fin_img.m[i][j] = red;
      }
    out.images[(size_t)m] = fin_img;
  }

  // sanity: homomorphism, det = nrd, surjective mod q
  PlaceEmbedding Ef = completion_embedding(fin, F, P);
  for (int m = 0; m < 4; m++) {
    PadicElem want = Ef(qnrd(O.A, O.basis[(size_t)m]));
    if (!(want - sm_det(out.images[(size_t)m])).is_exactly_zero_mod_cap())
      throw std::logic_error("build_splitting: det != nrd");
    for (int l = 0; l < 4; l++) {
      SplitMat lhs = out.apply(O, qmul(O.A, O.basis[(size_t)m], O.basis[(size_t)l]));
      SplitMat rhs = sm_mul(out.images[(size_t)m], out.images[(size_t)l]);
      for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
          if (!(lhs.m[i][j] - rhs.m[i][j]).is_exactly_zero_mod_cap())
            throw std::logic_error("build_splitting: not multiplicative");
    }
  }
  {
    LocalRing R1(F, P, 1);
    std::vector<std::array<LocalElem, 4>> rows;
    for (int m = 0; m < 4; m++) {
      auto lm = out.reduce(R1, out.images[(size_t)m]);
      rows.push_back({lm.m[0][0], lm.m[0][1], lm.m[1][0], lm.m[1][1]});
    }
    int rank = 0;
    for (int col = 0; col < 4 && rank < 4; col++) {
      int piv = -1;
      for (int r = rank; r < 4; r++)
        if (!(rows[(size_t)r][(size_t)col] == R1.zero())) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(rows[(size_t)rank], rows[(size_t)piv]);
      LocalElem inv = R1.inv(rows[(size_t)rank][(size_t)col]);
      for (int cc = 0; cc < 4; cc++)
        rows[(size_t)rank][(size_t)cc] = R1.mul(rows[(size_t)rank][(size_t)cc], inv);
      for (int r = 0; r < 4; r++)
        if (r != rank && !(rows[(size_t)r][(size_t)col] == R1.zero())) {
          LocalElem f = rows[(size_t)r][(size_t)col];
          for (int cc = 0; cc < 4; cc++)
            rows[(size_t)r][(size_t)cc] =
                R1.sub(rows[(size_t)r][(size_t)cc], R1.mul(f, rows[(size_t)rank][(size_t)cc]));
        }
      rank++;
    }
    if (rank != 4) throw std::logic_error("build_splitting: not surjective mod q");
  }
  return out;
}

}  // namespace hmf
