#include "hmf/quat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>

namespace hmf {

namespace {

// Deterministic associate normalization for HNF pivots: scan +-eps^t over a
// fixed window, pick the representative with the smallest coordinate size,
// ties broken lexicographically.
FieldElem canonical_associate(const RealQuadraticField& F, const FieldElem& x) {
  FieldElem eps = fundamental_unit(F);
  FieldElem eps_inv = fe_inv(F, eps);
  auto size_key = [](const FieldElem& v) {
    return abs(v.x.num()) * v.x.den() + abs(v.y.num()) * v.y.den();
  };
  auto lex_less = [](const FieldElem& u, const FieldElem& v) {
    if (u.x != v.x) return u.x < v.x;
    return u.y < v.y;
  };
  FieldElem best = x;
  Int best_key = size_key(x);
  for (int dir = 0; dir < 2; dir++) {
    FieldElem cur = x;
    const FieldElem& step = dir ? eps_inv : eps;
    for (int t = 0; t <= 4; t++) {
      if (t > 0) cur = fe_mul(F, cur, step);
      for (int sg = 0; sg < 2; sg++) {
        FieldElem cand = sg ? -cur : cur;
        Int k = size_key(cand);
        int c = cmp(k, best_key);
        if (c < 0 || (c == 0 && lex_less(cand, best))) {
          best = cand;
          best_key = k;
        }
      }
    }
  }
  return best;
}

Int coord_lcm_den(const QuatF& q) {
  Int l(1);
  for (auto& fe : q.c)
    for (const Rat* r : {&fe.x, &fe.y}) {
      Int g = gcd(l, r->den());
      l = divexact(l * r->den(), g);
    }
  return l;
}

FieldElem det4(const RealQuadraticField& F, const std::array<std::array<FieldElem, 4>, 4>& m) {
  static const int perms[24][4] = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1},
      {1, 0, 2, 3}, {1, 0, 3, 2}, {1, 2, 0, 3}, {1, 2, 3, 0}, {1, 3, 0, 2}, {1, 3, 2, 0},
      {2, 0, 1, 3}, {2, 0, 3, 1}, {2, 1, 0, 3}, {2, 1, 3, 0}, {2, 3, 0, 1}, {2, 3, 1, 0},
      {3, 0, 1, 2}, {3, 0, 2, 1}, {3, 1, 0, 2}, {3, 1, 2, 0}, {3, 2, 0, 1}, {3, 2, 1, 0}};
  FieldElem det;
  for (auto& p : perms) {
    int inv = 0;
    for (int u = 0; u < 4; u++)
      for (int v = u + 1; v < 4; v++)
        if (p[u] > p[v]) inv++;
    FieldElem term(1);
    for (int r = 0; r < 4; r++) term = fe_mul(F, term, m[r][p[r]]);
    det = (inv % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// q-adic valuation of a prime ideal on integral field elements (k-digit cap).
struct PrimeValuer {
  const RealQuadraticField* F;
  PrimeIdeal P;
  Int qk;
  Int root_lift;  // root of x^2 - Tx - C mod q^k (f = 1)
  int k = 40;

  PrimeValuer(const RealQuadraticField& F_, const PrimeIdeal& P_) : F(&F_), P(P_) {
    qk = pow_ui(Int(P.q), (unsigned long)k);
    if (P.f == 1) {
      // Hensel lift of the root
      Int r(P.omega_root);
      Int T(F->T), C(F->C);
      for (int it = 0; it < k + 2; it++) {
        Int fr = fmod_pos(r * r - T * r - C, qk);
        Int dr = fmod_pos(r * 2 - T, qk);
        // dr invertible mod q^k (roots simple mod q)
        Int dri;
        if (mpz_invert(dri.raw(), dr.raw(), qk.raw()) == 0)
          throw std::logic_error("PrimeValuer: non-invertible derivative");
        r = fmod_pos(r - fr * dri, qk);
      }
      root_lift = r;
    }
  }

  long val_int(const Int& v) const {
    if (v.is_zero()) return k;
    Int t;
    Int q((long)P.q);
    long c = (long)mpz_remove(t.raw(), v.raw(), q.raw());
    return c;
  }

  // valuation of an integral field element, exact for values < k
  long val(const FieldElem& x) const {
    if (x.is_zero()) return k;
    if (!x.is_integral()) throw std::invalid_argument("PrimeValuer: non-integral");
    if (P.f == 2) return std::min(val_int(x.x.num()), val_int(x.y.num()));
    Int t = fmod_pos(x.x.num() + x.y.num() * root_lift, qk);
    if (t.is_zero()) return k;
    return val_int(t);
  }

  long val_rat(const Rat& r) const { return val_int(r.num()) - val_int(r.den()); }

  // valuation of a field element with denominators
  long val_field(const FieldElem& x) const {
    Int den = Int(1);
    for (const Rat* c : {&x.x, &x.y}) {
      Int g = gcd(den, c->den());
      den = divexact(den * c->den(), g);
    }
    FieldElem scaled{x.x * Rat(den), x.y * Rat(den)};
    return val(scaled) - val_int(den);
  }
};

}  // namespace

std::array<QuatF, 4> of_module_hnf(const RealQuadraticField& F, const std::vector<QuatF>& gens) {
  // clear denominators
  Int den(1);
  for (auto& g : gens) {
    Int d = coord_lcm_den(g);
    Int gg = gcd(den, d);
    den = divexact(den * d, gg);
  }
  Rat scale{den};
  std::vector<std::array<FieldElem, 4>> rows;
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    std::array<FieldElem, 4> r;
    for (int m = 0; m < 4; m++) r[m] = {g.c[m].x * scale, g.c[m].y * scale};
    rows.push_back(r);
  }
  size_t pivot = 0;
  for (int col = 0; col < 4 && pivot < rows.size(); col++) {
    while (true) {
      // smallest-norm nonzero entry in this column at/below pivot
      long best = -1;
      Rat best_norm;
      for (size_t r = pivot; r < rows.size(); r++)
        if (!rows[r][col].is_zero()) {
          Rat n = fe_norm(F, rows[r][col]);
          if (n.sgn() < 0) n = -n;
          if (best < 0 || n < best_norm) {
            best = (long)r;
            best_norm = n;
          }
        }
      if (best < 0) break;  // column exhausted below pivot
      std::swap(rows[pivot], rows[(size_t)best]);
      bool clean = true;
      for (size_t r = pivot + 1; r < rows.size(); r++)
        if (!rows[r][col].is_zero()) {
          FieldElem q = fe_divrem(F, rows[r][col], rows[pivot][col]);
          for (int m = 0; m < 4; m++) rows[r][m] = rows[r][m] - fe_mul(F, q, rows[pivot][m]);
          if (!rows[r][col].is_zero()) clean = false;
        }
      if (clean) {
        pivot++;
        break;
      }
    }
    // drop zero rows
    std::vector<std::array<FieldElem, 4>> nz(rows.begin(), rows.begin() + (long)pivot);
    for (size_t r = pivot; r < rows.size(); r++) {
      bool z = true;
      for (int m = 0; m < 4; m++)
        if (!rows[r][m].is_zero()) z = false;
      if (!z) nz.push_back(rows[r]);
    }
    rows = std::move(nz);
  }
  if (pivot != 4) throw NotAnOrderError("of_module_hnf: rank < 4");
  rows.resize(4);
  // canonicalize pivots, then reduce above-pivot entries
  for (int r = 0; r < 4; r++) {
    FieldElem piv = rows[(size_t)r][r];
    FieldElem canon = canonical_associate(F, piv);
    FieldElem u = fe_div(F, canon, piv);
    for (int m = 0; m < 4; m++) rows[(size_t)r][m] = fe_mul(F, u, rows[(size_t)r][m]);
  }
  for (int r = 3; r >= 0; r--)
    for (int rr = r - 1; rr >= 0; rr--)
      if (!rows[(size_t)rr][r].is_zero()) {
        FieldElem q = fe_divrem(F, rows[(size_t)rr][r], rows[(size_t)r][r]);
        for (int m = 0; m < 4; m++)
          rows[(size_t)rr][m] = rows[(size_t)rr][m] - fe_mul(F, q, rows[(size_t)r][m]);
      }
  std::array<QuatF, 4> out;
  Rat inv_scale = Rat(Int(1), den);
  for (int r = 0; r < 4; r++)
    for (int m = 0; m < 4; m++)
      out[(size_t)r].c[(size_t)m] = {rows[(size_t)r][m].x * inv_scale, rows[(size_t)r][m].y * inv_scale};
  return out;
}

std::array<QuatF, 4> order_closure(const QuatAlg& A, std::vector<QuatF> gens, int max_rounds) {
  QuatF one{FieldElem(1)};
  gens.push_back(one);
  auto key_of = [&](const std::array<QuatF, 4>& b) {
    std::string k;
    for (auto& q : b)
      for (auto& fe : q.c) k += fe.x.str() + "|" + fe.y.str() + ";";
    return k;
  };
  std::array<QuatF, 4> basis = of_module_hnf(A.F, gens);
  for (int round = 0; round < max_rounds; round++) {
    std::vector<QuatF> all(basis.begin(), basis.end());
    for (int m = 0; m < 4; m++)
      for (int l = 0; l < 4; l++) all.push_back(qmul(A, basis[(size_t)m], basis[(size_t)l]));
    std::array<QuatF, 4> next = of_module_hnf(A.F, all);
    if (key_of(next) == key_of(basis)) return basis;
    basis = next;
  }
  throw NotAnOrderError("order_closure: did not stabilize");
}

FieldElem order_disc(const QuatAlg& A, const std::array<QuatF, 4>& basis) {
  std::array<std::array<FieldElem, 4>, 4> gram;
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++) gram[(size_t)i][(size_t)j] = qtrd(qmul(A, basis[(size_t)i], basis[(size_t)j]));
  return det4(A.F, gram);
}

bool verify_maximal_order(const Order& O) {
  // multiplicative closure
  try {
    std::vector<QuatF> gens(O.basis.begin(), O.basis.end());
    auto closed = order_closure(O.A, gens, 4);
    // same module: mutual membership
    Order tmp{O.A, closed};
    for (auto& b : O.basis)
      if (!order_coordinates(tmp, b)) return false;
    Order self{O.A, O.basis};
    for (auto& b : closed)
      if (!order_coordinates(self, b)) return false;
  } catch (const NotAnOrderError&) {
    return false;
  }
  FieldElem disc = order_disc(O.A, O.basis);
  Rat n = fe_norm(O.A.F, disc);
  return n == Rat(1) || n == Rat(-1);
}

std::optional<std::array<FieldElem, 4>> order_coordinates(const Order& O, const QuatF& x) {
  // solve sum_m c_m basis_m = x over F by Gaussian elimination
  const RealQuadraticField& F = O.A.F;
  std::array<std::array<FieldElem, 5>, 4> m;  // rows: coordinates, cols: basis index + rhs
  for (int r = 0; r < 4; r++) {
    for (int c = 0; c < 4; c++) m[(size_t)r][(size_t)c] = O.basis[(size_t)c].c[(size_t)r];
    m[(size_t)r][4] = x.c[(size_t)r];
  }
  std::array<int, 4> piv_row{-1, -1, -1, -1};
  int rank = 0;
  for (int c = 0; c < 4; c++) {
    int pr = -1;
    for (int r = 0; r < 4; r++) {
      bool used = false;
      for (int cc = 0; cc < c; cc++)
        if (piv_row[(size_t)cc] == r) used = true;
      if (!used && !m[(size_t)r][(size_t)c].is_zero()) {
        pr = r;
        break;
      }
    }
    if (pr < 0) throw std::logic_error("order_coordinates: singular basis");
    piv_row[(size_t)c] = pr;
    rank++;
    FieldElem inv = fe_inv(F, m[(size_t)pr][(size_t)c]);
    for (int cc = c; cc <= 4; cc++) m[(size_t)pr][(size_t)cc] = fe_mul(F, inv, m[(size_t)pr][(size_t)cc]);
    for (int r = 0; r < 4; r++)
      if (r != pr && !m[(size_t)r][(size_t)c].is_zero()) {
        FieldElem f = m[(size_t)r][(size_t)c];
        for (int cc = c; cc <= 4; cc++)
          m[(size_t)r][(size_t)cc] = m[(size_t)r][(size_t)cc] - fe_mul(F, f, m[(size_t)pr][(size_t)cc]);
      }
  }
  std::array<FieldElem, 4> coords;
  for (int c = 0; c < 4; c++) coords[(size_t)c] = m[(size_t)piv_row[(size_t)c]][4];
  for (auto& fe : coords)
    if (!fe.is_integral()) return std::nullopt;
  return coords;
}

Order maximal_order(const QuatAlg& A) {
  const RealQuadraticField& F = A.F;
  QuatF one{FieldElem(1)}, qi, qj, qk;
  qi.c[1] = FieldElem(1);
  qj.c[2] = FieldElem(1);
  qk.c[3] = FieldElem(1);
  auto basis = order_closure(A, {one, qi, qj, qk});

  auto disc_primes = [&](const FieldElem& disc) {
    std::vector<PrimeIdeal> out;
    Rat n = fe_norm(F, disc);
    Int num = abs(n.num()) * n.den();  // denominators only at primes already present
    std::vector<long> qs;
    Int rest = num;
    for (long q = 2; q < 1000000; q++) {
      if (rest.is_one()) break;
      if (rest.divisible_by(Int(q))) {
        qs.push_back(q);
        while (rest.divisible_by(Int(q))) rest = divexact(rest, Int(q));
      }
    }
    if (!rest.is_one()) throw std::runtime_error("maximal_order: disc norm too composite");
    for (long q : qs) {
      if (F.disc % q == 0)
        throw RamifiedPrimeError("maximal_order: algebra data meets a ramified prime");
      SplittingType st = split_prime(F, q);
      out.push_back(st.p1);
      if (st.split) out.push_back(st.p2);
    }
    return out;
  };

  for (int iter = 0; iter < 64; iter++) {
    FieldElem disc = order_disc(A, basis);
    Rat dn = fe_norm(F, disc);
    if (dn == Rat(1) || dn == Rat(-1)) return Order{A, basis};
    bool progressed = false;
    for (auto& P : disc_primes(disc)) {
      PrimeValuer V(F, P);
      long dv = V.val_field(disc);
      if (dv <= 0) continue;
      // residue representatives of O_F / P
      std::vector<FieldElem> reps;
      if (P.f == 1)
        for (long a = 0; a < P.q; a++) reps.push_back(FieldElem(a));
      else
        for (long a = 0; a < P.q; a++)
          for (long b = 0; b < P.q; b++) reps.push_back({Rat(a), Rat(b)});
      FieldElem ginv = fe_inv(F, P.gen);
      bool found = false;
      long ncand = 1;
      for (int m = 0; m < 4; m++) ncand *= (long)reps.size();
      for (long code = 1; code < ncand && !found; code++) {
        long c = code;
        QuatF x;
        for (int m = 0; m < 4; m++) {
          x = x + q_scale(F, reps[(size_t)(c % (long)reps.size())], basis[(size_t)m]);
          c /= (long)reps.size();
        }
        x = q_scale(F, ginv, x);
        FieldElem tr = qtrd(x);
        FieldElem nr = qnrd(A, x);
        if (!tr.is_integral() || !nr.is_integral()) continue;
        Order cur{A, basis};
        if (order_coordinates(cur, x)) continue;  // already inside
        try {
          std::vector<QuatF> gens(basis.begin(), basis.end());
          gens.push_back(x);
          auto bigger = order_closure(A, gens);
          FieldElem disc2 = order_disc(A, bigger);
          if (V.val_field(disc2) < dv) {
            basis = bigger;
            found = true;
            progressed = true;
          }
        } catch (const NotAnOrderError&) {
          continue;
        }
      }
    }
    if (!progressed)
      throw RamifiedPrimeError("maximal_order: no unit-disc order (finite ramification)");
  }
  throw std::runtime_error("maximal_order: iteration bound exceeded");
}

std::vector<QuatF> z_basis_of(const RealQuadraticField& F, const std::array<QuatF, 4>& basis) {
  std::vector<QuatF> zb;
  FieldElem w{Rat(0), Rat(1)};
  for (auto& b : basis) zb.push_back(b);
  for (auto& b : basis) zb.push_back(q_scale(F, w, b));
  return zb;
}

std::vector<QuatF> short_vectors(const QuatAlg& A, const std::vector<QuatF>& zbasis, const Int& bound) {
  const RealQuadraticField& F = A.F;
  const size_t n = zbasis.size();
  // bilinear form B(x,y) = Tr(trd(x conj(y))); Q(x) = B(x,x)/2 = Tr(nrd x)
  std::vector<std::vector<Rat>> G(n, std::vector<Rat>(n));
  for (size_t u = 0; u < n; u++)
    for (size_t v = 0; v < n; v++)
      G[u][v] = fe_trace(F, qtrd(qmul(A, zbasis[u], qconj(zbasis[v]))));
  // Cholesky-style decomposition: q(x) = sum_k D_k (x_k + sum_{l>k} U_{kl} x_l)^2
  std::vector<std::vector<Rat>> Q = G;
  std::vector<Rat> D(n);
  std::vector<std::vector<Rat>> U(n, std::vector<Rat>(n, Rat(0)));
  for (size_t k = 0; k < n; k++) {
    D[k] = Q[k][k];
    if (!(D[k] > Rat(0))) throw std::logic_error("short_vectors: form not positive definite");
    for (size_t l = k + 1; l < n; l++) U[k][l] = Q[k][l] / D[k];
    for (size_t u = k + 1; u < n; u++)
      for (size_t v = k + 1; v < n; v++) Q[u][v] = Q[u][v] - D[k] * U[k][u] * U[k][v];
  }
  Rat C = Rat(bound) * 2;  // enumerate B(x,x) <= 2*bound
  std::vector<long> x(n, 0);
  std::vector<QuatF> out;
  // recursive enumeration, highest index first
  std::function<void(int, Rat)> rec = [&](int k, Rat rem) {
    if (k < 0) {
      bool all0 = true;
      for (auto v : x)
        if (v) all0 = false;
      if (all0) return;
      // canonical sign: highest nonzero coordinate positive
      for (int m = (int)n - 1; m >= 0; m--) {
        if (x[(size_t)m] > 0) break;
        if (x[(size_t)m] < 0) return;
      }
      QuatF q;
      for (size_t m = 0; m < n; m++)
        if (x[m] != 0) q = q + q_scale(F, FieldElem(x[m]), zbasis[m]);
      out.push_back(q);
      return;
    }
    Rat c(0);
    for (size_t l = (size_t)k + 1; l < n; l++) c += U[(size_t)k][l] * Rat(x[l]);
    // loose double bounds, exact acceptance
    double cd = c.to_double();
    double r = std::sqrt(std::max(0.0, rem.to_double() / D[(size_t)k].to_double())) + 2.0;
    long lo = (long)std::floor(-cd - r), hi = (long)std::ceil(-cd + r);
    for (long v = lo; v <= hi; v++) {
      Rat t = Rat(v) + c;
      Rat term = D[(size_t)k] * t * t;
      if (term <= rem) {
        x[(size_t)k] = v;
        rec(k - 1, rem - term);
      }
    }
    x[(size_t)k] = 0;
  };
  rec((int)n - 1, C);
  return out;
}

UnitGroupData unit_group(const Order& O) {
  const RealQuadraticField& F = O.A.F;
  auto zb = z_basis_of(F, O.basis);
  auto vecs = short_vectors(O.A, zb, Int(2));
  UnitGroupData U;
  for (auto& v : vecs)
    if (qnrd(O.A, v) == FieldElem(1)) U.reps.push_back(v);
  // put identity first
  QuatF one{FieldElem(1)};
  for (size_t m = 0; m < U.reps.size(); m++)
    if (U.reps[m] == one || U.reps[m] == -one) {
      std::swap(U.reps[0], U.reps[m]);
      break;
    }
  if (U.reps.empty() || !(U.reps[0] == one || U.reps[0] == -one))
    throw EnumerationBoundExceeded("unit_group: identity not enumerated");
  U.reps[0] = one;
  // closure check modulo sign
  auto key = [](const QuatF& q) {
    std::string k;
    for (auto& fe : q.c) k += fe.x.str() + "," + fe.y.str() + ";";
    return k;
  };
  auto canon = [&](QuatF q) {
    for (int m = 0; m < 4; m++) {
      auto& fe = q.c[(size_t)m];
      if (fe.is_zero()) continue;
      int s = fe.x.is_zero() ? fe.y.sgn() : fe.x.sgn();
      if (s < 0) q = -q;
      break;
    }
    return q;
  };
  std::unordered_set<std::string> have;
  for (auto& u : U.reps) have.insert(key(canon(u)));
  for (auto& u : U.reps)
    for (auto& v : U.reps)
      if (!have.count(key(canon(qmul(O.A, u, v)))))
        throw EnumerationBoundExceeded("unit_group: not closed under multiplication");
  return U;
}

}  // namespace hmf
