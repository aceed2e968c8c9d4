#ifndef HMF_RESIDUE_HPP
#define HMF_RESIDUE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hmf/quadfield.hpp"

namespace hmf {

struct UnsupportedModulusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Element of O_F / q^e at one prime: a + b*w with 0 <= a,b < q^e (b = 0 when f = 1).
struct LocalElem {
  long a = 0, b = 0;
  friend bool operator==(const LocalElem& x, const LocalElem& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const LocalElem& x, const LocalElem& y) { return !(x == y); }
};

// Residue ring O_F / prime^e. f = 1: Z/q^e with w -> omega_root; f = 2: (Z/q^e)[w]/(w^2-Tw-C).
class LocalRing {
 public:
  LocalRing() = default;
  LocalRing(const RealQuadraticField& F, const PrimeIdeal& P, int e) : F_(F), P_(P), e_(e) {
    if (e < 1) throw UnsupportedModulusError("LocalRing: exponent < 1");
    m_ = 1;
    for (int i = 0; i < e; i++) {
      if (m_ > (long)1 << 40) throw UnsupportedModulusError("LocalRing: modulus too large");
      m_ *= P.q;
    }
    if (P.f == 1 && e > 1) {
      // Hensel-lift the omega root from mod q to mod q^e
      long r = P.omega_root;
      for (int it = 0; it < e + 2; it++) {
        long fr = mod(mulm(r, r) - mulm(mod(F.T), r) - mod(F.C));
        long dr = mod(2 * r - F.T);
        r = mod(r - mulm(fr, inv_mod(dr)));
      }
      if (mod(mulm(r, r) - mulm(mod(F.T), r) - mod(F.C)) != 0)
        throw std::logic_error("LocalRing: root lift failed");
      root_lift_ = r;
    } else {
      root_lift_ = P.omega_root;
    }
  }

  const RealQuadraticField& field() const { return F_; }
  const PrimeIdeal& prime() const { return P_; }
  int exponent() const { return e_; }
  long modulus() const { return m_; }
  int f() const { return P_.f; }
  long size() const { return P_.f == 1 ? m_ : m_ * m_; }
  Int norm_size() const { return pow_ui(Int(P_.q), (unsigned long)(P_.f * e_)); }

  LocalElem zero() const { return {}; }
  LocalElem one() const { return {1, 0}; }
  LocalElem from_long(long v) const { return {mod(v), 0}; }

  long omega_image() const { return root_lift_; }

  LocalElem reduce(const FieldElem& x) const {
    if (!x.is_integral()) throw std::invalid_argument("LocalRing::reduce: non-integral element");
    long a = mod_int(x.x.num());
    long b = mod_int(x.y.num());
    if (P_.f == 1) return {mod(a + mulm(b, root_lift_)), 0};
    return {a, b};
  }

  LocalElem add(const LocalElem& x, const LocalElem& y) const { return {mod(x.a + y.a), mod(x.b + y.b)}; }
  LocalElem sub(const LocalElem& x, const LocalElem& y) const { return {mod(x.a - y.a), mod(x.b - y.b)}; }
  LocalElem neg(const LocalElem& x) const { return {mod(-x.a), mod(-x.b)}; }
  LocalElem mul(const LocalElem& x, const LocalElem& y) const {
    if (P_.f == 1) return {mulm(x.a, y.a), 0};
    long bb = mulm(x.b, y.b);
    long a = mod(mulm(x.a, y.a) + mulm(bb, mod(F_.C)));
    long b = mod(mulm(x.a, y.b) + mulm(x.b, y.a) + mulm(bb, mod(F_.T)));
    return {a, b};
  }
  LocalElem conj(const LocalElem& x) const {
    if (P_.f == 1) return x;
    return {mod(x.a + mulm(x.b, mod(F_.T))), mod(-x.b)};
  }
  long norm(const LocalElem& x) const {
    // N(a+bw) = a^2 + Tab - Cb^2
    return mod(mulm(x.a, x.a) + mulm(mod(F_.T), mulm(x.a, x.b)) - mulm(mod(F_.C), mulm(x.b, x.b)));
  }

  bool is_unit(const LocalElem& x) const {
    long n = P_.f == 1 ? x.a : norm(x);
    return std::gcd(((n % P_.q) + P_.q) % P_.q, P_.q) == 1;
  }
  // local ring: non-unit == in the maximal ideal
  bool in_maximal_ideal(const LocalElem& x) const { return !is_unit(x); }

  LocalElem inv(const LocalElem& x) const {
    if (!is_unit(x)) throw std::domain_error("LocalRing::inv: non-unit");
    if (P_.f == 1) return {inv_mod(x.a), 0};
    long n = norm(x);
    LocalElem c = conj(x);
    long ni = inv_mod(n);
    return {mulm(c.a, ni), mulm(c.b, ni)};
  }

  LocalElem pow(LocalElem x, long e) const {
    LocalElem r = one();
    while (e > 0) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  // Image in O_F/q^e2 for e2 <= e.
  LocalElem shrink(const LocalElem& x, const LocalRing& smaller) const {
    return {x.a % smaller.m_, x.b % smaller.m_};
  }

  std::vector<LocalElem> all_elements() const {
    std::vector<LocalElem> v;
    if (P_.f == 1) {
      v.reserve(m_);
      for (long a = 0; a < m_; a++) v.push_back({a, 0});
    } else {
      v.reserve(m_ * m_);
      for (long a = 0; a < m_; a++)
        for (long b = 0; b < m_; b++) v.push_back({a, b});
    }
    return v;
  }

  std::vector<LocalElem> all_units() const {
    std::vector<LocalElem> v;
    for (auto& x : all_elements())
      if (is_unit(x)) v.push_back(x);
    return v;
  }

  uint64_t key(const LocalElem& x) const { return (uint64_t)x.a | ((uint64_t)x.b << 32); }

  long mod(long v) const { return ((v % m_) + m_) % m_; }

 private:
  long mulm(long x, long y) const { return (long)(((__int128)x * y) % m_); }
  long mod_int(const Int& v) const {
    Int r = fmod_pos(v, Int(m_));
    return r.to_long();
  }
  long inv_mod(long a) const {
    long t = 0, nt = 1, r = m_, nr = mod(a);
    while (nr != 0) {
      long q = r / nr;
      long tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (r != 1) throw std::domain_error("LocalRing: inverse of non-unit");
    return ((t % m_) + m_) % m_;
  }

  RealQuadraticField F_;
  PrimeIdeal P_;
  int e_ = 1;
  long m_ = 1;
  long root_lift_ = 0;
};

// 2x2 matrix over a LocalRing.
struct LocalMat {
  LocalElem m[2][2];
};

inline LocalMat lm_mul(const LocalRing& R, const LocalMat& x, const LocalMat& y) {
  LocalMat r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++)
      r.m[i][j] = R.add(R.mul(x.m[i][0], y.m[0][j]), R.mul(x.m[i][1], y.m[1][j]));
  return r;
}

inline LocalElem lm_det(const LocalRing& R, const LocalMat& x) {
  return R.sub(R.mul(x.m[0][0], x.m[1][1]), R.mul(x.m[0][1], x.m[1][0]));
}

inline LocalMat lm_inv(const LocalRing& R, const LocalMat& x) {
  LocalElem di = R.inv(lm_det(R, x));
  LocalMat r;
  r.m[0][0] = R.mul(x.m[1][1], di);
  r.m[0][1] = R.mul(R.neg(x.m[0][1]), di);
  r.m[1][0] = R.mul(R.neg(x.m[1][0]), di);
  r.m[1][1] = R.mul(x.m[0][0], di);
  return r;
}

// Normalized point of P^1(O_F/prime^e): (1 : n) with n arbitrary, or (n : 1) with n
// in the maximal ideal. Stored as the non-fixed coordinate plus which chart.
struct P1Local {
  LocalElem n;
  bool first_unit = true;  // true: (1, n); false: (n, 1)
  friend bool operator==(const P1Local& x, const P1Local& y) {
    return x.first_unit == y.first_unit && x.n == y.n;
  }
};

// Normalize a unimodular column (u, v).
inline P1Local p1_normalize(const LocalRing& R, const LocalElem& u, const LocalElem& v) {
  if (R.is_unit(u)) return {R.mul(v, R.inv(u)), true};
  if (!R.is_unit(v)) throw std::invalid_argument("p1_normalize: column not unimodular");
  return {R.mul(u, R.inv(v)), false};
}

inline P1Local p1_apply(const LocalRing& R, const LocalMat& g, const P1Local& pt) {
  LocalElem u = pt.first_unit ? R.one() : pt.n;
  LocalElem v = pt.first_unit ? pt.n : R.one();
  LocalElem nu = R.add(R.mul(g.m[0][0], u), R.mul(g.m[0][1], v));
  LocalElem nv = R.add(R.mul(g.m[1][0], u), R.mul(g.m[1][1], v));
  return p1_normalize(R, nu, nv);
}

inline std::vector<P1Local> p1_enumerate(const LocalRing& R) {
  std::vector<P1Local> pts;
  for (auto& x : R.all_elements()) pts.push_back({x, true});
  for (auto& x : R.all_elements())
    if (!R.is_unit(x)) pts.push_back({x, false});
  return pts;
}

inline uint64_t p1_key(const LocalRing& R, const P1Local& p) {
  return (R.key(p.n) << 1) | (p.first_unit ? 1u : 0u);
}

// Unit group of a LocalRing as an abstract abelian group with a fixed basis and
// a full discrete-log table. Sizes here are tiny; everything is brute force.
class UnitGroup {
 public:
  explicit UnitGroup(const LocalRing& R) : R_(&R) {
    auto units = R.all_units();
    long n = (long)units.size();
    // Sylow-wise greedy basis extraction.
    std::vector<long> qs;
    long m = n;
    for (long q = 2; q * q <= m; q++)
      if (m % q == 0) {
        qs.push_back(q);
        while (m % q == 0) m /= q;
      }
    if (m > 1) qs.push_back(m);
    for (long q : qs) {
      long qa = 1, t = n;
      while (t % q == 0) {
        t /= q;
        qa *= q;
      }
      // Sylow q-subgroup = image of x -> x^(n/qa).
      std::vector<LocalElem> syl;
      std::unordered_map<uint64_t, bool> seen;
      for (auto& u : units) {
        LocalElem s = R.pow(u, n / qa);
        if (!seen.count(R.key(s))) {
          seen[R.key(s)] = true;
          syl.push_back(s);
        }
      }
      // Greedy: repeatedly adjoin an element of maximal order in the quotient.
      std::unordered_map<uint64_t, bool> H;
      std::vector<LocalElem> Hlist{R.one()};
      H[R.key(R.one())] = true;
      while ((long)Hlist.size() < (long)syl.size()) {
        long best_ord = 0;
        LocalElem best;
        for (auto& c : syl) {
          long k = 1;
          LocalElem x = c;
          while (!H.count(R.key(x))) {
            x = R.mul(x, c);
            k++;
          }
          if (k > best_ord) {
            best_ord = k;
            best = c;
          }
        }
        gens_.push_back(best);
        orders_.push_back(best_ord);
        std::vector<LocalElem> nl;
        std::unordered_map<uint64_t, bool> nh;
        LocalElem pw = R.one();
        for (long j = 0; j < best_ord; j++) {
          for (auto& h : Hlist) {
            LocalElem x = R.mul(h, pw);
            if (!nh.count(R.key(x))) {
              nh[R.key(x)] = true;
              nl.push_back(x);
            }
          }
          pw = R.mul(pw, best);
        }
        Hlist = std::move(nl);
        H = std::move(nh);
      }
    }
    long prod = 1;
    for (long o : orders_) prod *= o;
    if (prod != n) throw std::logic_error("UnitGroup: basis extraction failed");
    // Full dlog table.
    std::vector<int> exp(gens_.size(), 0);
    build_dlog(0, R.one(), exp);
    if ((long)dlog_.size() != n) throw std::logic_error("UnitGroup: dlog table incomplete");
  }

  const LocalRing& ring() const { return *R_; }
  const std::vector<LocalElem>& gens() const { return gens_; }
  const std::vector<long>& orders() const { return orders_; }
  long order() const {
    long p = 1;
    for (long o : orders_) p *= o;
    return p;
  }

  const std::vector<int>& dlog(const LocalElem& x) const {
    auto it = dlog_.find(R_->key(x));
    if (it == dlog_.end()) throw std::domain_error("UnitGroup::dlog: not a unit");
    return it->second;
  }

 private:
  void build_dlog(size_t i, LocalElem acc, std::vector<int>& exp) {
    if (i == gens_.size()) {
      dlog_[R_->key(acc)] = exp;
      return;
    }
    LocalElem x = acc;
    for (long j = 0; j < orders_[i]; j++) {
      exp[i] = (int)j;
      build_dlog(i + 1, x, exp);
      x = R_->mul(x, gens_[i]);
    }
    exp[i] = 0;
  }

  const LocalRing* R_;
  std::vector<LocalElem> gens_;
  std::vector<long> orders_;
  std::unordered_map<uint64_t, std::vector<int>> dlog_;
};

}  // namespace hmf

#endif
