#include "hmf/assemble.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace hmf {

namespace {

long val_floor(const PadicElem& x) {
  ExtRat v = x.valuation();
  if (!v.finite()) return x.ctx()->M + 1;
  return v.num / v.den;
}

// generalized binomial (m over t), m any integer, t >= 0
Int binom_gen(long m, long t) {
  if (t < 0) return Int(0);
  Int r(1);
  for (long i = 0; i < t; i++) r *= Int(m - i);
  for (long i = 2; i <= t; i++) r = divexact(r, Int(i));
  return r;
}

}  // namespace

Ctx make_run_context(const PLevelRef& pl, long p_digits) {
  long p = pl->p;
  // cyclotomic level covering the character values of the run: wild part is
  // p^{s-1} for odd p; conductor-8 characters at p = 2 only need -1
  int scyc = 0;
  if (p != 2 && pl->s >= 2) scyc = pl->s - 1;
  if (p == 2 && pl->c >= 4) scyc = pl->c - 2;
  long e = 1;
  if (scyc >= 1) {
    e = p - 1;
    for (int i = 0; i < scyc - 1; i++) e *= p;
  }
  if (pl->split.split) return PadicContext::make(p, 1, scyc, p_digits * e);
  return PadicContext::make(p, 2, scyc, p_digits * e, pl->F.T, pl->F.C);
}

std::vector<long> ApproxOperatorMatrix::row_floors() const {
  const PLevelRef& pl = kappa.psi.L;
  std::vector<long> fl;
  std::array<bool, 2> compact{false, false};
  for (int v = 0; v < 2; v++) {
    int comp = pl->split.split ? v : 0;
    for (int w : op_word)
      if (w == comp) compact[(size_t)v] = true;
  }
  for (auto& x : basis)
    for (long i = 0; i < h; i++) {
      long f = 0;
      for (int v = 0; v < 2; v++)
        if (compact[(size_t)v]) f += x[(size_t)v];
      fl.push_back(f);
      (void)i;
    }
  return fl;
}

OmegaEvaluator::OmegaEvaluator(const Ctx& ctx, const PLevelRef& pl,
                               const LocallyAlgebraicWeight& kappa, const std::vector<int>& op_word,
                               const AssemblyOptions& opt, long max_exp)
    : ctx_(ctx), pl_(pl), kappa_(kappa), word_(op_word), opt_(opt), max_exp_(max_exp) {
  for (int v = 0; v < 2; v++) {
    comp_of_place_.push_back(pl->split.split ? v : 0);
    frob_of_place_.push_back((!pl->split.split && v == 1 && !opt.verbatim_inert) ? 1 : 0);
  }
  op_count_comp_.assign((size_t)pl->nfac, 0);
  for (int w : op_word) op_count_comp_[(size_t)w]++;
}

PadicElem OmegaEvaluator::embed_entry(const PadicElem& plain, int comp, int place) const {
  (void)comp;
  const PadicContext& src = *plain.ctx();
  if (src.e != 1 || src.f > ctx_->f)
    throw std::invalid_argument("OmegaEvaluator: incompatible plain context");
  PadicElem out(ctx_);
  for (int t = 0; t < src.f; t++) {
    out.coord(0, t) = plain.coord(0, t);
    ctx_->reduce(out.coord(0, t));
  }
  if (frob_of_place_[(size_t)place]) out = out.frobenius();
  return out;
}

OmegaEvaluator::Prepared OmegaEvaluator::prepare(const HeckeMatrix& hm) const {
  Prepared pm;
  // psi at the lower-right entries mod p^c
  std::vector<LocalElem> dtup;
  for (int l = 0; l < pl_->nfac; l++) {
    const LocalRing& R = pl_->rings[(size_t)l];
    Int mod(R.modulus());
    const PadicElem& d = hm.comp[(size_t)l].m[1][1];
    long a = fmod_pos(d.coord(0, 0), mod).to_long();
    long b = d.ctx()->f == 2 ? fmod_pos(d.coord(0, 1), mod).to_long() : 0;
    dtup.push_back({a, b});
  }
  pm.psi_d = kappa_.psi.eval(ctx_, dtup);

  for (int v = 0; v < 2; v++) {
    int l = comp_of_place_[(size_t)v];
    const SplitMat& C = hm.comp[(size_t)l];
    Prepared::Place P;
    PadicElem a = embed_entry(C.m[0][0], l, v);
    PadicElem b = embed_entry(C.m[0][1], l, v);
    PadicElem cc = embed_entry(C.m[1][0], l, v);
    PadicElem d = embed_entry(C.m[1][1], l, v);
    long n_v = kappa_.kt.n[(size_t)v];
    long maxpow = max_exp_ + 1;
    auto powers = [&](const PadicElem& base, long count) {
      std::vector<PadicElem> pw;
      pw.reserve((size_t)count + 1);
      pw.push_back(PadicElem(ctx_, 1));
      for (long t = 1; t <= count; t++) pw.push_back(pw.back() * base);
      return pw;
    };
    P.apow = powers(a, maxpow);
    P.bpow = powers(b, 2 * maxpow);
    P.cpow = powers(cc, maxpow);
    P.d_neg_offset = std::max(0L, 2 * max_exp_ - n_v);
    {
      std::vector<PadicElem> pos = powers(d, std::max(n_v, 0L));
      std::vector<PadicElem> neg;
      if (P.d_neg_offset > 0) neg = powers(d.inv(), P.d_neg_offset);
      for (long ee = -P.d_neg_offset; ee <= std::max(n_v, 0L); ee++)
        P.dpow.push_back(ee >= 0 ? pos[(size_t)ee] : neg[(size_t)(-ee)]);
    }
    // det factor; normalization divides by pi once per application of this prime
    PadicElem det = sm_det(hm.comp[(size_t)l]);
    long cnt = op_count_comp_[(size_t)l];
    PadicElem det_use(ctx_);
    if (opt_.normalize && cnt > 0) {
      long dv = val_floor(det);
      if (dv != cnt) throw ShapeViolation("OmegaEvaluator: det valuation != operator count");
      PadicElem det_unit = det.divexact_p(cnt);
      SplittingType st;
      st.split = pl_->prime(l).f == 1;
      st.p1 = pl_->prime(l);
      PlaceEmbedding E = make_place_embedding(det.ctx(), pl_->F, st, 1);
      PadicElem ug = E(pl_->prime(l).gen).divexact_p(1);
      det_unit = det_unit * ug.inv().pow(cnt);
      det_use = embed_entry(det_unit, l, v);
    } else {
      det_use = embed_entry(det, l, v);
    }
    long vv = kappa_.kt.v[(size_t)v];
    P.detpow = powers(det_use, std::max(vv, 0L));
    pm.place.push_back(std::move(P));
  }
  return pm;
}

PadicElem OmegaEvaluator::entry(const Prepared& pm, const std::array<long, 2>& x,
                                const std::array<long, 2>& y) const {
  PadicElem out = pm.psi_d;
  for (int v = 0; v < 2; v++) {
    const auto& P = pm.place[(size_t)v];
    long n = kappa_.kt.n[(size_t)v];
    long xv = x[(size_t)v], yv = y[(size_t)v];
    PadicElem acc(ctx_);
    bool any = false;
    for (long t = std::max(0L, xv - yv); t <= xv; t++) {
      if (xv - t > yv) continue;
      Int co = binom_gen(n - yv, t) * binom_gen(yv, xv - t);
      if (co.is_zero()) continue;
      PadicElem term = P.apow[(size_t)(xv - t)] * P.cpow[(size_t)t];
      term = term * P.dpow[(size_t)(n - yv - t + P.d_neg_offset)];
      term = term * P.bpow[(size_t)(yv - xv + t)];
      term = term * co;
      acc = any ? acc + term : term;
      any = true;
    }
    if (!any) return PadicElem(ctx_);
    long vv = kappa_.kt.v[(size_t)v];
    out = out * P.detpow[(size_t)vv] * acc;
  }
  return out;
}

OmegaEvaluator::PlaceGrids OmegaEvaluator::generating_place_grids(const HeckeMatrix& hm,
                                                                  long T) const {
  Prepared pm = prepare(hm);
  PlaceGrids out;
  out.scalar = pm.psi_d * pm.place[0].detpow[(size_t)kappa_.kt.v[0]] *
               pm.place[1].detpow[(size_t)kappa_.kt.v[1]];
  for (int v = 0; v < 2; v++) {
    auto full = generating_grid_place(hm, T, v);
    out.place[(size_t)v] = std::move(full);
  }
  return out;
}

std::vector<std::vector<PadicElem>> OmegaEvaluator::generating_grid_place(const HeckeMatrix& hm,
                                                                          long T, int v) const {
  int l = comp_of_place_[(size_t)v];
  const SplitMat& C = hm.comp[(size_t)l];
  PadicElem a = embed_entry(C.m[0][0], l, v);
  PadicElem b = embed_entry(C.m[0][1], l, v);
  PadicElem cc = embed_entry(C.m[1][0], l, v);
  PadicElem d = embed_entry(C.m[1][1], l, v);
  long n = kappa_.kt.n[(size_t)v];
  auto pmul = [&](const std::vector<PadicElem>& u, const std::vector<PadicElem>& w) {
    std::vector<PadicElem> r((size_t)T, PadicElem(ctx_));
    for (long i = 0; i < T; i++) {
      if (u[(size_t)i].is_exactly_zero_mod_cap()) continue;
      for (long j = 0; i + j < T; j++) {
        if (w[(size_t)j].is_exactly_zero_mod_cap()) continue;
        r[(size_t)(i + j)] = r[(size_t)(i + j)] + u[(size_t)i] * w[(size_t)j];
      }
    }
    return r;
  };
  std::vector<PadicElem> lin((size_t)T, PadicElem(ctx_));
  lin[0] = d;
  if (T > 1) lin[1] = cc;
  std::vector<PadicElem> lin_ab((size_t)T, PadicElem(ctx_));
  lin_ab[0] = b;
  if (T > 1) lin_ab[1] = a;
  std::vector<PadicElem> inv((size_t)T, PadicElem(ctx_));
  {
    PadicElem di = d.inv();
    inv[0] = di;
    for (long k = 1; k < T; k++) inv[(size_t)k] = -(di * cc * inv[(size_t)(k - 1)]);
  }
  std::vector<PadicElem> cd((size_t)T, PadicElem(ctx_));
  cd[0] = PadicElem(ctx_, 1);
  for (long t = 0; t < n; t++) cd = pmul(cd, lin);
  std::vector<PadicElem> ab((size_t)T, PadicElem(ctx_));
  ab[0] = PadicElem(ctx_, 1);
  std::vector<std::vector<PadicElem>> grid((size_t)T,
                                           std::vector<PadicElem>((size_t)T, PadicElem(ctx_)));
  for (long y = 0; y < T; y++) {
    std::vector<PadicElem> prod = pmul(ab, cd);
    for (long x = 0; x < T; x++) grid[(size_t)x][(size_t)y] = prod[(size_t)x];
    ab = pmul(ab, lin_ab);
    cd = pmul(cd, inv);
  }
  return grid;
}

std::vector<std::vector<PadicElem>> OmegaEvaluator::generating_grid(const HeckeMatrix& hm,
                                                                    long T) const {
  Prepared pm = prepare(hm);
  std::vector<std::vector<std::vector<PadicElem>>> grid(2);
  for (int v = 0; v < 2; v++) grid[(size_t)v] = generating_grid_place(hm, T, v);
  std::vector<std::vector<PadicElem>> out;
  long npairs = T * T;
  out.assign((size_t)npairs, std::vector<PadicElem>((size_t)npairs, PadicElem(ctx_)));
  for (long x1 = 0; x1 < T; x1++)
    for (long x2 = 0; x2 < T; x2++)
      for (long y1 = 0; y1 < T; y1++)
        for (long y2 = 0; y2 < T; y2++)
          out[(size_t)(x1 * T + x2)][(size_t)(y1 * T + y2)] =
              pm.psi_d * pm.place[0].detpow[(size_t)kappa_.kt.v[0]] *
              pm.place[1].detpow[(size_t)kappa_.kt.v[1]] * grid[0][(size_t)x1][(size_t)y1] *
              grid[1][(size_t)x2][(size_t)y2];
  return out;
}

ApproxOperatorMatrix assemble(const HeckeLocalData& data, const LocallyAlgebraicWeight& kappa,
                              const std::vector<std::array<long, 2>>& basis, const Ctx& ctx,
                              const AssemblyOptions& opt) {
  const PLevelRef& pl = data.pl;
  if (!data.sufficiently_small) throw std::runtime_error("assemble: level not sufficiently small");
  if (!check_nebentypus(kappa.psi, kappa.kt.r))
    throw std::invalid_argument("assemble: nebentypus inconsistent");
  ApproxOperatorMatrix A;
  A.ctx = ctx;
  A.kappa = kappa;
  A.op_word = data.op_word;
  A.basis = basis;
  A.h = data.h;
  A.normalized = opt.normalize;
  const long R = (long)basis.size();
  const long n = R * data.h;
  A.e.assign((size_t)(n * n), PadicElem(ctx));

  long max_exp = 0;
  for (auto& x : basis) max_exp = std::max({max_exp, x[0], x[1]});
  OmegaEvaluator ev(ctx, pl, kappa, data.op_word, opt, max_exp);

  struct Slot {
    long i, j;
    OmegaEvaluator::Prepared pm;
  };
  std::vector<Slot> slots;
  for (long i = 0; i < data.h; i++)
    for (long j = 0; j < data.h; j++)
      for (auto& hm : data.at(i, j)) slots.push_back({i, j, ev.prepare(hm)});

  long nth = opt.nthreads > 0 ? opt.nthreads : (long)std::thread::hardware_concurrency();
  if (nth < 1) nth = 1;
  std::vector<std::thread> pool;
  std::atomic<long> next(0);
  auto work = [&]() {
    while (true) {
      long xy = next.fetch_add(1);
      if (xy >= R * R) break;
      long xi = xy / R, yi = xy % R;
      for (auto& sl : slots) {
        PadicElem v = ev.entry(sl.pm, basis[(size_t)xi], basis[(size_t)yi]);
        if (v.is_exactly_zero_mod_cap()) continue;
        PadicElem& dst = A.at(xi * data.h + sl.i, yi * data.h + sl.j);
        dst = dst + v;
      }
    }
  };
  for (long t = 0; t < nth; t++) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return A;
}

ApproxOperatorMatrix assemble_truncation(const HeckeLocalData& data,
                                         const LocallyAlgebraicWeight& kappa, long R, const Ctx& ctx,
                                         const AssemblyOptions& opt) {
  return assemble(data, kappa, bi_prefix(R), ctx, opt);
}

ApproxOperatorMatrix restrict_matrix(const ApproxOperatorMatrix& A, const SubspaceSpec& spec) {
  const PLevelRef& pl = A.kappa.psi.L;
  for (int v = 0; v < 2; v++) {
    long bound = spec.bounds[(size_t)v];
    if (bound < 0) continue;
    bool compact = false;
    int comp = pl->split.split ? v : 0;
    for (int w : A.op_word)
      if (w == comp) compact = true;
    if (bound != A.kappa.kt.n[(size_t)v] && !compact)
      throw UnstableSubspace("restrict_matrix: direction " + std::to_string(v + 1) +
                             " neither classical nor compact");
  }
  std::vector<long> keep;
  std::vector<std::array<long, 2>> nb;
  for (size_t t = 0; t < A.basis.size(); t++)
    if (spec.contains(A.basis[t])) {
      keep.push_back((long)t);
      nb.push_back(A.basis[t]);
    }
  ApproxOperatorMatrix B;
  B.ctx = A.ctx;
  B.kappa = A.kappa;
  B.op_word = A.op_word;
  B.basis = nb;
  B.h = A.h;
  B.normalized = A.normalized;
  long m = (long)nb.size() * A.h;
  B.e.assign((size_t)(m * m), PadicElem(A.ctx));
  for (size_t xr = 0; xr < keep.size(); xr++)
    for (size_t yr = 0; yr < keep.size(); yr++)
      for (long i = 0; i < A.h; i++)
        for (long j = 0; j < A.h; j++)
          B.at((long)xr * A.h + i, (long)yr * A.h + j) =
              A.at(keep[xr] * A.h + i, keep[yr] * A.h + j);
  return B;
}

}  // namespace hmf
