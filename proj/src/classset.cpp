#include "hmf/hecke.hpp"

namespace hmf {

LevelData LevelData::make(const PLevelRef& pl, const std::vector<LevelFactor>& aux) {
  LevelData L;
  L.F = pl->F;
  L.pl = pl;
  for (int i = 0; i < pl->nfac; i++) L.factors.push_back({pl->prime(i), pl->s});
  for (auto& f : aux) {
    if (f.prime.q == pl->p) throw std::invalid_argument("LevelData: auxiliary factor at p");
    L.factors.push_back(f);
  }
  for (auto& f : L.factors) L.rings.emplace_back(L.F, f.prime, f.e);
  return L;
}

Int LevelData::p1_size() const {
  Int n(1);
  for (size_t i = 0; i < factors.size(); i++) {
    // Nm^{e-1} (Nm + 1)
    Int nm = rings[i].norm_size();
    Int nm1 = pow_ui(Int(factors[i].prime.q), (unsigned long)(factors[i].prime.f * (factors[i].e - 1)));
    Int single = pow_ui(Int(factors[i].prime.q), (unsigned long)factors[i].prime.f);
    n *= nm1 * (single + Int(1));
  }
  return n;
}

std::string LevelData::str() const {
  std::string s;
  for (auto& f : factors) {
    if (!s.empty()) s += "*";
    s += f.prime.str();
    if (f.e > 1) s += "^" + std::to_string(f.e);
  }
  return s;
}

namespace {

std::vector<std::vector<P1Local>> enumerate_factors(const LevelData& L) {
  std::vector<std::vector<P1Local>> pts;
  for (auto& R : L.rings) pts.push_back(p1_enumerate(R));
  return pts;
}

}  // namespace

std::vector<P1Point> proj_line(const LevelData& level) {
  auto pts = enumerate_factors(level);
  std::vector<long> stride(level.nfactors(), 1);
  long total = 1;
  for (size_t fi = 0; fi < level.nfactors(); fi++) {
    stride[fi] = total;
    total *= (long)pts[fi].size();
  }
  std::vector<P1Point> out;
  out.reserve((size_t)total);
  for (long idx = 0; idx < total; idx++) {
    P1Point p(level.nfactors());
    for (size_t fi = 0; fi < level.nfactors(); fi++)
      p[fi] = pts[fi][(size_t)((idx / stride[fi]) % (long)pts[fi].size())];
    out.push_back(std::move(p));
  }
  return out;
}

uint64_t p1_point_key(const LevelData& L, const P1Point& pt) {
  uint64_t k = 1469598103934665603ull;
  for (size_t i = 0; i < pt.size(); i++) {
    uint64_t v = p1_key(L.rings[i], pt[i]);
    k = (k ^ v) * 1099511628211ull;
  }
  return k;
}

ClassSet class_set(const Order& O, const LevelData& level) {
  ClassSet cs;
  cs.level = level;
  cs.units = unit_group(O);
  const size_t nf = level.nfactors();
  const size_t nu = cs.units.reps.size();

  // splittings at each level factor, just enough digits
  std::vector<LocalSplitting> split;
  for (auto& f : level.factors) split.push_back(build_splitting(O, f.prime, f.e + 6));

  // unit images mod each factor
  std::vector<std::vector<LocalMat>> uimg(nf);
  for (size_t fi = 0; fi < nf; fi++) {
    uimg[fi].reserve(nu);
    for (auto& u : cs.units.reps) {
      LocalMat m = split[fi].reduce(level.rings[fi], split[fi].apply(O, u));
      if (!level.rings[fi].is_unit(lm_det(level.rings[fi], m)))
        throw std::logic_error("class_set: unit image not invertible");
      uimg[fi].push_back(m);
    }
  }

  // enumerate P^1 with a deterministic global index
  auto pts = enumerate_factors(level);
  std::vector<long> stride(nf, 1);
  long total = 1;
  for (size_t fi = 0; fi < nf; fi++) {
    stride[fi] = total;
    total *= (long)pts[fi].size();
  }
  auto point_at = [&](long idx) {
    P1Point p(nf);
    for (size_t fi = 0; fi < nf; fi++) p[fi] = pts[fi][(size_t)((idx / stride[fi]) % (long)pts[fi].size())];
    return p;
  };
  // index via per-factor maps
  std::vector<std::unordered_map<uint64_t, long>> fidx(nf);
  for (size_t fi = 0; fi < nf; fi++)
    for (size_t t = 0; t < pts[fi].size(); t++) fidx[fi][p1_key(level.rings[fi], pts[fi][t])] = (long)t;
  auto index_of = [&](const P1Point& p) {
    long idx = 0;
    for (size_t fi = 0; fi < nf; fi++) {
      auto it = fidx[fi].find(p1_key(level.rings[fi], p[fi]));
      if (it == fidx[fi].end()) throw std::logic_error("class_set: point not in enumeration");
      idx += it->second * stride[fi];
    }
    return idx;
  };

  cs.orbit_of_point.assign((size_t)total, -1);
  cs.transporter.assign((size_t)total, -1);
  for (long start = 0; start < total; start++) {
    if (cs.orbit_of_point[(size_t)start] >= 0) continue;
    long orbit_id = (long)cs.reps.size();
    P1Point rep = point_at(start);
    cs.reps.push_back(rep);
    long orbit_size = 0;
    for (size_t u = 0; u < nu; u++) {
      P1Point img(nf);
      for (size_t fi = 0; fi < nf; fi++) img[fi] = p1_apply(level.rings[fi], uimg[fi][u], rep[fi]);
      long idx = index_of(img);
      if (cs.orbit_of_point[(size_t)idx] < 0) {
        cs.orbit_of_point[(size_t)idx] = orbit_id;
        cs.transporter[(size_t)idx] = (long)u;
        orbit_size++;
      } else if (cs.orbit_of_point[(size_t)idx] != orbit_id) {
        throw std::logic_error("class_set: orbit collision");
      }
    }
    cs.stab_orders.push_back((long)nu / orbit_size);
  }
  // point_index as global map (index_of is cheap; keep the per-factor form)
  for (long idx = 0; idx < total; idx++)
    cs.point_index[p1_point_key(level, point_at(idx))] = idx;
  if ((long)cs.point_index.size() != total) throw std::logic_error("class_set: point key collision");
  cs.sufficiently_small = true;
  for (long s : cs.stab_orders)
    if (s != 1) cs.sufficiently_small = false;

  // integral 2x2 lifts of the reps, det = 1 mod every factor.
  // Per factor the chart gives the second column: (1,n) -> (0,1); (n,1) -> (-1,0).
  // CRT the four entries across factors.
  std::vector<FieldElem> idem(nf);
  {
    for (size_t fi = 0; fi < nf; fi++) {
      FieldElem M(1);
      for (size_t g = 0; g < nf; g++)
        if (g != fi)
          for (int t = 0; t < level.factors[g].e; t++) M = fe_mul(level.F, M, level.factors[g].prime.gen);
      const LocalRing& R = level.rings[fi];
      LocalElem inv = R.inv(R.reduce(M));
      FieldElem lift{Rat(inv.a), Rat(inv.b)};
      idem[fi] = fe_mul(level.F, M, lift);
    }
  }
  auto crt = [&](const std::vector<LocalElem>& vals) {
    FieldElem x(0);
    for (size_t fi = 0; fi < nf; fi++) {
      FieldElem lift{Rat(vals[fi].a), Rat(vals[fi].b)};
      x = x + fe_mul(level.F, lift, idem[fi]);
    }
    // reduce coordinates modulo the rational content of the level for size
    Int N(1);
    for (size_t fi = 0; fi < nf; fi++)
      N *= pow_ui(Int(level.factors[fi].prime.q), (unsigned long)level.factors[fi].e);
    x.x = Rat(fmod_pos(x.x.num(), N));
    x.y = Rat(fmod_pos(x.y.num(), N));
    return x;
  };
  for (auto& rep : cs.reps) {
    std::vector<LocalElem> e00, e01, e10, e11;
    for (size_t fi = 0; fi < nf; fi++) {
      const LocalRing& R = level.rings[fi];
      const P1Local& pl = rep[fi];
      LocalElem a = pl.first_unit ? R.one() : pl.n;
      LocalElem c = pl.first_unit ? pl.n : R.one();
      LocalElem b = pl.first_unit ? R.zero() : R.from_long(-1);
      LocalElem d = pl.first_unit ? R.one() : R.zero();
      e00.push_back(a);
      e01.push_back(b);
      e10.push_back(c);
      e11.push_back(d);
    }
    std::array<std::array<FieldElem, 2>, 2> t;
    t[0][0] = crt(e00);
    t[0][1] = crt(e01);
    t[1][0] = crt(e10);
    t[1][1] = crt(e11);
    // determinant must be a unit mod every factor
    FieldElem det = fe_mul(level.F, t[0][0], t[1][1]) - fe_mul(level.F, t[0][1], t[1][0]);
    for (size_t fi = 0; fi < nf; fi++)
      if (!level.rings[fi].is_unit(level.rings[fi].reduce(det)))
        throw std::logic_error("class_set: t-lift determinant not a unit");
    cs.t_lift.push_back(t);
  }
  return cs;
}

}  // namespace hmf
