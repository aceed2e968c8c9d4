#include "hmf/weights.hpp"

#include <algorithm>
#include <numeric>

namespace hmf {

WeightTuple weight_tuple_from_k(const std::vector<long>& k) {
  if (k.empty()) throw std::invalid_argument("weight_tuple_from_k: empty k");
  long k0 = *std::max_element(k.begin(), k.end());
  WeightTuple t;
  t.k = k;
  for (long ki : k) {
    if (ki < 2) throw std::invalid_argument("weight_tuple_from_k: k_i < 2");
    if ((ki - k[0]) % 2 != 0) throw NonParitiousError("weight_tuple_from_k: non-paritious k");
    t.n.push_back(ki - 2);
    t.v.push_back((k0 - ki) / 2);
  }
  t.r = k0 - 2;
  for (size_t i = 0; i < k.size(); i++) t.w.push_back(t.n[i] + t.v[i] + 1);
  return t;
}

std::shared_ptr<const PLevel> PLevel::make(const RealQuadraticField& F, long p, int s) {
  auto L = std::make_shared<PLevel>();
  L->F = F;
  L->p = p;
  L->s = s;
  L->c = std::max(s, p == 2 ? 3 : 1);
  L->split = split_prime(F, p);
  L->nfac = L->split.split ? 2 : 1;
  for (int i = 0; i < L->nfac; i++) {
    L->rings.emplace_back(F, L->prime(i), L->c);
    L->srings.emplace_back(F, L->prime(i), std::max(s, 1));
  }
  for (int i = 0; i < L->nfac; i++) L->ugroups.emplace_back(L->rings[(size_t)i]);
  return L;
}

namespace {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

long group_mu_order(const UnitGroup& G, long p) {
  long n = G.order();
  while (n % p == 0) n /= p;
  return n;
}

// exponent A with x -> x^A the projection onto the prime-to-p torsion part
long mu_projection_exponent(const UnitGroup& G, long p) {
  long n = G.order();
  long P = 1;
  while (n % p == 0) {
    n /= p;
    P *= p;
  }
  long t = n;
  if (t == 1) return 0;
  long inv = 0;
  for (long x = 1; x <= t; x++)
    if ((__int128)x * (P % t) % t == 1 % t) {
      inv = x;
      break;
    }
  if (inv == 0) throw std::logic_error("mu_projection_exponent: no inverse");
  return P * inv;
}

// deterministic generator of the prime-to-p torsion part
LocalElem mu_generator(const LocalRing& R, const UnitGroup& G, long p) {
  long t = group_mu_order(G, p);
  if (t == 1) return R.one();
  long A = mu_projection_exponent(G, p);
  for (auto& u : R.all_units()) {
    LocalElem y = R.pow(u, A);
    long ord = 1;
    LocalElem z = y;
    while (!(z == R.one()) && ord <= t) {
      z = R.mul(z, y);
      ord++;
    }
    if (ord == t) return y;
  }
  throw std::logic_error("mu_generator: none found");
}

long mu_dlog(const LocalRing& R, const LocalElem& zgen, long t, const LocalElem& y) {
  LocalElem z = R.one();
  for (long k = 0; k < t; k++) {
    if (z == y) return k;
    z = R.mul(z, zgen);
  }
  throw std::logic_error("mu_dlog: element not in the mu part");
}

// p = 2 only: kill the odd part, then read the sign class of the principal
// unit mod 4 (a = 3 mod 4 means -1).
int sign_bit(const LocalRing& R, const UnitGroup& G, const LocalElem& u) {
  long n = G.order();
  long t = n;
  while (t % 2 == 0) t /= 2;
  long P = n / t;
  long inv = 1;
  if (P > 1) {
    inv = 0;
    for (long x = 1; x <= P; x += 2)
      if ((__int128)x * (t % P) % P == 1 % P) {
        inv = x;
        break;
      }
    if (inv == 0) throw std::logic_error("sign_bit: no inverse");
  }
  LocalElem z = R.pow(u, t * inv);
  long am4 = ((z.a % 4) + 4) % 4;
  if (z.b % 2 != 0) throw std::logic_error("sign_bit: projection not principal");
  if (am4 == 1) return 0;
  if (am4 == 3) return 1;
  throw std::logic_error("sign_bit: unexpected class");
}

}  // namespace

bool FiniteCharacter::trivial() const {
  for (auto& fa : a)
    for (long e : fa)
      if (e % m != 0) return false;
  return true;
}

long FiniteCharacter::eval_exp(const std::vector<LocalElem>& x) const {
  if ((int)x.size() != L->nfac) throw std::invalid_argument("FiniteCharacter::eval_exp: arity");
  long e = 0;
  for (int i = 0; i < L->nfac; i++) {
    const auto& dl = L->ugroups[(size_t)i].dlog(x[(size_t)i]);
    for (size_t j = 0; j < dl.size(); j++) e = (e + (long)dl[j] * (a[(size_t)i][j] % m)) % m;
  }
  return ((e % m) + m) % m;
}

PadicElem FiniteCharacter::eval(const Ctx& ctx, const std::vector<LocalElem>& x) const {
  long e = eval_exp(x);
  if (e == 0) return PadicElem(ctx, 1);
  // all values as powers of one fixed primitive m-th root
  return root_of_unity(ctx, m).pow(e);
}

std::vector<int> FiniteCharacter::conductor() const {
  std::vector<int> cond;
  for (int i = 0; i < L->nfac; i++) {
    const LocalRing& R = L->rings[(size_t)i];
    int ci = L->c;
    for (int cc = 0; cc <= L->c; cc++) {
      bool triv = true;
      LocalRing small = cc >= 1 ? LocalRing(L->F, L->prime(i), cc) : LocalRing();
      for (auto& u : R.all_units()) {
        bool in_kernel = cc == 0 ? true : (R.shrink(u, small) == small.one());
        if (!in_kernel) continue;
        std::vector<LocalElem> x;
        for (int k = 0; k < L->nfac; k++) x.push_back(k == i ? u : L->rings[(size_t)k].one());
        if (eval_exp(x) != 0) {
          triv = false;
          break;
        }
      }
      if (triv) {
        ci = cc;
        break;
      }
    }
    cond.push_back(ci);
  }
  return cond;
}

FiniteCharacter FiniteCharacter::times(const FiniteCharacter& other) const {
  if (L.get() != other.L.get()) throw std::invalid_argument("FiniteCharacter::times: level mismatch");
  FiniteCharacter r;
  r.L = L;
  r.m = lcm_long(m, other.m);
  r.a.resize(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    r.a[i].resize(a[i].size());
    for (size_t j = 0; j < a[i].size(); j++)
      r.a[i][j] = (a[i][j] * (r.m / m) + other.a[i][j] * (r.m / other.m)) % r.m;
  }
  r.reduce_order();
  return r;
}

FiniteCharacter FiniteCharacter::power(long j) const {
  FiniteCharacter r = *this;
  long jj = ((j % m) + m) % m;
  for (auto& fa : r.a)
    for (auto& e : fa) e = e * jj % m;
  r.reduce_order();
  return r;
}

void FiniteCharacter::reduce_order() {
  long g = m;
  for (auto& fa : a)
    for (long e : fa) g = std::gcd(g, e);
  if (g > 1) {
    m /= g;
    for (auto& fa : a)
      for (auto& e : fa) e /= g;
  }
  if (m < 1) m = 1;
}

FiniteCharacter tau_char(const PLevelRef& L) {
  FiniteCharacter tau;
  tau.L = L;
  long m = 1;
  for (int i = 0; i < L->nfac; i++) {
    long t = group_mu_order(L->ugroups[(size_t)i], L->p);
    long mf = (L->p == 2) ? lcm_long(std::max(t, 1L), 2L) : std::max(t, 1L);
    m = lcm_long(m, mf);
  }
  tau.m = m;
  for (int i = 0; i < L->nfac; i++) {
    const LocalRing& R = L->rings[(size_t)i];
    const UnitGroup& G = L->ugroups[(size_t)i];
    long t = group_mu_order(G, L->p);
    std::vector<long> row;
    if (t > 1) {
      long A = mu_projection_exponent(G, L->p);
      LocalElem zgen = mu_generator(R, G, L->p);
      for (auto& g : G.gens()) {
        long e = mu_dlog(R, zgen, t, R.pow(g, A)) * (m / t) % m;
        if (L->p == 2) e = (e + (long)sign_bit(R, G, g) * (m / 2)) % m;
        row.push_back(e);
      }
    } else {
      for (auto& g : G.gens()) {
        long e = (L->p == 2) ? (long)sign_bit(R, G, g) * (m / 2) % m : 0;
        row.push_back(e);
      }
    }
    tau.a.push_back(row);
  }
  return tau;
}

bool check_nebentypus(const FiniteCharacter& psi, long r) {
  const PLevelRef& L = psi.L;
  FieldElem eps = fundamental_unit(L->F);
  Rat neps = fe_norm(L->F, eps);
  std::vector<LocalElem> eps_t, m1_t;
  for (int i = 0; i < L->nfac; i++) {
    eps_t.push_back(L->rings[(size_t)i].reduce(eps));
    m1_t.push_back(L->rings[(size_t)i].from_long(-1));
  }
  if (psi.eval_exp(m1_t) != 0) return false;  // psi(-1) must equal Norm(-1)^r = 1
  long e = psi.eval_exp(eps_t);
  bool target_minus = (neps == Rat(-1)) && (r % 2 != 0);
  if (!target_minus) return e == 0;
  return psi.m % 2 == 0 && e == psi.m / 2;
}

std::vector<FiniteCharacter> all_psi_r(const PLevelRef& L, long r) {
  std::vector<std::pair<int, int>> slots;
  long m0 = 1;
  for (int i = 0; i < L->nfac; i++)
    for (size_t j = 0; j < L->ugroups[(size_t)i].orders().size(); j++) {
      slots.push_back({i, (int)j});
      m0 = lcm_long(m0, L->ugroups[(size_t)i].orders()[j]);
    }
  std::vector<FiniteCharacter> found;
  std::vector<long> choice(slots.size(), 0);
  while (true) {
    FiniteCharacter psi;
    psi.L = L;
    psi.m = m0;
    psi.a.resize((size_t)L->nfac);
    for (int i = 0; i < L->nfac; i++)
      psi.a[(size_t)i].assign(L->ugroups[(size_t)i].orders().size(), 0);
    for (size_t t = 0; t < slots.size(); t++) {
      long o = L->ugroups[(size_t)slots[t].first].orders()[(size_t)slots[t].second];
      psi.a[(size_t)slots[t].first][(size_t)slots[t].second] = choice[t] * (m0 / o) % m0;
    }
    auto cond = psi.conductor();
    bool ok = true;
    for (int ci : cond)
      if (ci != L->s) ok = false;
    if (ok && check_nebentypus(psi, r)) {
      psi.reduce_order();
      found.push_back(psi);
    }
    size_t t = 0;
    for (; t < slots.size(); t++) {
      long o = L->ugroups[(size_t)slots[t].first].orders()[(size_t)slots[t].second];
      if (++choice[t] < o) break;
      choice[t] = 0;
    }
    if (t == slots.size()) break;
  }
  return found;
}

FiniteCharacter make_psi_r(const PLevelRef& L, long r) {
  auto all = all_psi_r(L, r);
  if (all.empty()) throw std::runtime_error("make_psi_r: no character with the required nebentypus");
  return all.front();
}

LocallyAlgebraicWeight make_weight(const PLevelRef& L, const std::vector<long>& k,
                                   const FiniteCharacter& psi, const std::string& name) {
  if (psi.L.get() != L.get()) throw std::invalid_argument("make_weight: level mismatch");
  LocallyAlgebraicWeight kappa;
  kappa.kt = weight_tuple_from_k(k);
  if (kappa.g() != 2) throw std::invalid_argument("make_weight: two places expected");
  kappa.psi = psi;
  if (!check_nebentypus(psi, kappa.kt.r))
    throw std::invalid_argument("make_weight: nebentypus violated (space is zero)");
  kappa.name = name.empty()
                   ? "[" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "]psi"
                   : name;
  return kappa;
}

LocallyAlgebraicWeight tau_twist(const LocallyAlgebraicWeight& kappa, long j) {
  if (j == 0) return kappa;
  LocallyAlgebraicWeight out = kappa;
  out.psi = kappa.psi.times(tau_char(kappa.psi.L).power(j));
  out.name = kappa.name + "tau^" + std::to_string(j);
  return out;
}

std::pair<WeightRegion, ExtRat> classify_weight(const LocallyAlgebraicWeight& kappa) {
  const PLevelRef& L = kappa.psi.L;
  long p = L->p;
  long q = p == 2 ? 4 : p;
  // cyclotomic level needed for the character values
  int scyc = 0;
  {
    long mm = kappa.psi.m;
    int t = 0;
    while (mm % p == 0) {
      mm /= p;
      t++;
    }
    scyc = t;
    if (p == 2 && t == 1) scyc = 0;  // -1 is unramified
  }
  int f = L->split.split ? 1 : 2;
  Ctx ctx = (f == 2) ? PadicContext::make(p, 2, scyc, 48, L->F.T, L->F.C)
                     : PadicContext::make(p, 1, scyc, 48);
  std::vector<PadicElem> vals;
  if (L->split.split) {
    for (int i = 0; i < 2; i++) {
      PadicElem alg = PadicElem(ctx, 1 + q).pow(kappa.kt.k[(size_t)i]);
      std::vector<LocalElem> tup;
      for (int k = 0; k < L->nfac; k++)
        tup.push_back(k == i ? L->rings[(size_t)k].from_long(1 + q) : L->rings[(size_t)k].one());
      vals.push_back(alg * kappa.psi.eval(ctx, tup) - PadicElem(ctx, 1));
    }
  } else {
    FieldElem w{Rat(0), Rat(1)};
    std::vector<FieldElem> gammas = {FieldElem(1 + q),
                                     FieldElem(1) + fe_mul(L->F, FieldElem(q), w)};
    for (auto& gm : gammas) {
      PadicElem g1(ctx);
      g1.coord(0, 0) = gm.x.num();
      g1.coord(0, 1) = gm.y.num();
      ctx->reduce(g1.coord(0, 0));
      ctx->reduce(g1.coord(0, 1));
      PadicElem g2 = g1.frobenius();
      PadicElem alg = g1.pow(kappa.kt.k[0]) * g2.pow(kappa.kt.k[1]);
      std::vector<LocalElem> tup{L->rings[0].reduce(gm)};
      vals.push_back(alg * kappa.psi.eval(ctx, tup) - PadicElem(ctx, 1));
    }
  }
  ExtRat best = ExtRat::below();
  for (auto& v : vals) {
    ExtRat e = v.valuation();
    if (e < best) best = e;
  }
  long cut = p == 2 ? 3 : 1;
  WeightRegion region = best < ExtRat(cut) ? WeightRegion::QuasiBoundary : WeightRegion::Centre;
  return {region, best};
}

ComponentTag component_of(const LocallyAlgebraicWeight& kappa) {
  const PLevelRef& L = kappa.psi.L;
  ComponentTag tag;
  auto push_value = [&tag](long order_part, long exp_part, long M) {
    (void)order_part;
    long e = ((exp_part % M) + M) % M;
    if (e == 0) {
      tag.push_back({1, 0});
    } else {
      long g = std::gcd(e, M);
      tag.push_back({M / g, e / g});
    }
  };
  for (int i = 0; i < L->nfac; i++) {
    const LocalRing& R = L->rings[(size_t)i];
    const UnitGroup& G = L->ugroups[(size_t)i];
    long t = group_mu_order(G, L->p);
    if (t > 1) {
      LocalElem zgen = mu_generator(R, G, L->p);
      long na = L->split.split ? kappa.kt.n[(size_t)i] % t
                               : (kappa.kt.n[0] + L->p * kappa.kt.n[1]) % t;
      std::vector<LocalElem> tup;
      for (int k = 0; k < L->nfac; k++) tup.push_back(k == i ? zgen : L->rings[(size_t)k].one());
      long pe = kappa.psi.eval_exp(tup);
      long M = lcm_long(t, kappa.psi.m);
      push_value(t, na * (M / t) + pe * (M / kappa.psi.m), M);
    }
    if (L->p == 2) {
      long na = (kappa.kt.n[0] + kappa.kt.n[1]) % 2;
      std::vector<LocalElem> tup;
      for (int k = 0; k < L->nfac; k++)
        tup.push_back(k == i ? R.from_long(-1) : L->rings[(size_t)k].one());
      long pe = kappa.psi.eval_exp(tup);
      long M = lcm_long(2, kappa.psi.m);
      push_value(2, na * (M / 2) + pe * (M / kappa.psi.m), M);
    }
  }
  long rt = L->p == 2 ? 2 : L->p - 1;
  tag.push_back({rt, ((kappa.kt.r % rt) + rt) % rt});
  return tag;
}

}  // namespace hmf
