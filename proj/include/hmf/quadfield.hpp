#ifndef HMF_QUADFIELD_HPP
#define HMF_QUADFIELD_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmf/rational.hpp"

namespace hmf {

struct RamifiedPrimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// F = Q(sqrt d), integral basis (1, w) with w^2 = T*w + C:
//   d = 1 mod 4:  w = (1+sqrt d)/2, T = 1, C = (d-1)/4
//   otherwise:    w = sqrt d,       T = 0, C = d
struct RealQuadraticField {
  long d = 0;
  long T = 0, C = 0;
  long disc = 0;

  static RealQuadraticField make(long d) {
    if (d <= 1) throw std::invalid_argument("field: d must be > 1");
    for (long q = 2; q * q <= d; q++)
      if (d % (q * q) == 0) throw std::invalid_argument("field: d must be square-free");
    RealQuadraticField F;
    F.d = d;
    if (d % 4 == 1) {
      F.T = 1;
      F.C = (d - 1) / 4;
      F.disc = d;
    } else {
      F.T = 0;
      F.C = d;
      F.disc = 4 * d;
    }
    return F;
  }
};

// x + y*w, exact rational coordinates.
struct FieldElem {
  Rat x, y;

  FieldElem() = default;
  FieldElem(Rat x_, Rat y_) : x(std::move(x_)), y(std::move(y_)) {}
  FieldElem(long v) : x(v), y(0) {}

  bool is_zero() const { return x.is_zero() && y.is_zero(); }
  bool is_integral() const { return x.is_integer() && y.is_integer(); }

  friend bool operator==(const FieldElem& a, const FieldElem& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) { return {a.x + b.x, a.y + b.y}; }
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return {a.x - b.x, a.y - b.y}; }
  FieldElem operator-() const { return {-x, -y}; }

  std::string str() const { return "(" + x.str() + "," + y.str() + ")"; }
};

inline FieldElem fe_mul(const RealQuadraticField& F, const FieldElem& a, const FieldElem& b) {
  // (x1 + y1 w)(x2 + y2 w) = x1x2 + C y1y2 + (x1y2 + x2y1 + T y1y2) w
  Rat yy = a.y * b.y;
  return {a.x * b.x + yy * Rat(F.C), a.x * b.y + a.y * b.x + yy * Rat(F.T)};
}

inline FieldElem fe_conj(const RealQuadraticField& F, const FieldElem& a) {
  // wbar = T - w
  return {a.x + a.y * Rat(F.T), -a.y};
}

inline Rat fe_norm(const RealQuadraticField& F, const FieldElem& a) {
  // N(x + yw) = x^2 + T x y - C y^2
  return a.x * a.x + a.x * a.y * Rat(F.T) - a.y * a.y * Rat(F.C);
}

inline Rat fe_trace(const RealQuadraticField& F, const FieldElem& a) { return a.x * 2 + a.y * Rat(F.T); }

inline FieldElem fe_inv(const RealQuadraticField& F, const FieldElem& a) {
  Rat n = fe_norm(F, a);
  if (n.is_zero()) throw std::domain_error("fe_inv: zero element");
  FieldElem c = fe_conj(F, a);
  return {c.x / n, c.y / n};
}

inline FieldElem fe_div(const RealQuadraticField& F, const FieldElem& a, const FieldElem& b) {
  return fe_mul(F, a, fe_inv(F, b));
}

// Signed approximation of the two real embeddings; only used to order/select,
// exact checks happen separately.
inline double fe_embed1(const RealQuadraticField& F, const FieldElem& a) {
  double w = (F.T == 1) ? (1.0 + std::sqrt((double)F.d)) / 2.0 : std::sqrt((double)F.d);
  return a.x.to_double() + a.y.to_double() * w;
}
inline double fe_embed2(const RealQuadraticField& F, const FieldElem& a) {
  double w = (F.T == 1) ? (1.0 - std::sqrt((double)F.d)) / 2.0 : -std::sqrt((double)F.d);
  return a.x.to_double() + a.y.to_double() * w;
}

// Exact total positivity: x + y w >> 0 iff trace > 0 and norm > 0.
inline bool fe_totally_positive(const RealQuadraticField& F, const FieldElem& a) {
  return fe_trace(F, a).sgn() > 0 && fe_norm(F, a).sgn() > 0;
}

// Euclidean division in O_F (norm-Euclidean for the preset fields):
// returns q integral with |N(a - q b)| < |N(b)|.
inline FieldElem fe_divrem(const RealQuadraticField& F, const FieldElem& a, const FieldElem& b,
                           FieldElem* rem = nullptr) {
  FieldElem t = fe_div(F, a, b);
  Int qx = t.x.round(), qy = t.y.round();
  FieldElem best_q, best_r;
  Rat best_norm;
  bool have = false;
  for (long dx = -1; dx <= 1; dx++)
    for (long dy = -1; dy <= 1; dy++) {
      FieldElem q{Rat(qx + Int(dx)), Rat(qy + Int(dy))};
      FieldElem r = a - fe_mul(F, q, b);
      Rat nr = fe_norm(F, r);
      if (nr.sgn() < 0) nr = -nr;
      if (!have || nr < best_norm) {
        have = true;
        best_q = q;
        best_r = r;
        best_norm = nr;
      }
    }
  Rat nb = fe_norm(F, b);
  if (nb.sgn() < 0) nb = -nb;
  if (!(best_norm < nb))
    throw std::runtime_error("fe_divrem: Euclidean step failed (field not handled)");
  if (rem) *rem = best_r;
  return best_q;
}

// Fundamental unit, N-normalized: eps > 1 under embedding 1, generates O_F^x / {+-1}.
inline FieldElem fundamental_unit(const RealQuadraticField& F) {
  if (F.T == 1) {
    // minimal (x + y sqrt d)/2 with x^2 - d y^2 = +-4, y >= 1
    for (long y = 1;; y++) {
      for (int sg = -1; sg <= 1; sg += 2) {
        Int t = Int(F.d) * Int(y) * Int(y) + Int(4 * sg);
        if (t.sgn() < 0) continue;
        Int x = isqrt(t);
        if (x * x == t) {
          // (x + y sqrt d)/2 = (x - y)/2 + y w ; x = y d = y mod 2 holds
          long xl = x.to_long();
          if ((xl - y) % 2 != 0) continue;
          return {Rat((xl - y) / 2), Rat(y)};
        }
      }
      if (y > 100000) throw std::runtime_error("fundamental_unit: search bound exceeded");
    }
  } else {
    for (long y = 1;; y++) {
      for (int sg = -1; sg <= 1; sg += 2) {
        Int t = Int(F.d) * Int(y) * Int(y) + Int(sg);
        if (t.sgn() < 0) continue;
        Int x = isqrt(t);
        if (x * x == t) return {Rat(x), Rat(y)};
      }
      if (y > 100000) throw std::runtime_error("fundamental_unit: search bound exceeded");
    }
  }
}

// A prime of O_F above an unramified rational prime q.
struct PrimeIdeal {
  long q = 0;        // rational prime below
  int f = 1;         // residue degree
  long omega_root = 0;  // f = 1: w = omega_root mod the prime (0 <= root < q)
  FieldElem gen;     // global generator (class number one presets)
  int label = 1;     // 1 or 2 for split pairs, 1 for inert

  std::string str() const {
    return "p" + std::to_string(q) + (f == 2 ? "" : (label == 1 ? "a" : "b"));
  }
};

struct SplittingType {
  bool split = false;
  PrimeIdeal p1, p2;  // p2 used only when split
};

// Global generator of (q, w - r) (inert: q itself), |N| = q^f; small search.
inline FieldElem prime_generator(const RealQuadraticField& F, long q, int f, long root) {
  if (f == 2) return FieldElem(q);
  for (long bound = 1; bound <= 64; bound *= 2) {
    for (long b = -bound; b <= bound; b++)
      for (long a = -bound; a <= bound; a++) {
        if (a == 0 && b == 0) continue;
        if (((a + b * root) % q + q) % q != 0) continue;
        FieldElem e{Rat(a), Rat(b)};
        Rat n = fe_norm(F, e);
        if (n == Rat(q) || n == Rat(-q)) return e;
      }
  }
  throw std::runtime_error("prime_generator: no small generator found");
}

inline SplittingType split_prime(const RealQuadraticField& F, long p) {
  if (F.disc % p == 0)
    throw RamifiedPrimeError("split_prime: " + std::to_string(p) + " ramifies in Q(sqrt " +
                             std::to_string(F.d) + ")");
  // roots of x^2 - T x - C mod p
  std::vector<long> roots;
  for (long r = 0; r < p; r++)
    if (((r * r - F.T * r - F.C) % p + p) % p == 0) roots.push_back(r);
  SplittingType s;
  if (roots.empty()) {
    s.split = false;
    s.p1.q = p;
    s.p1.f = 2;
    s.p1.gen = FieldElem(p);
    s.p1.label = 1;
  } else {
    if (roots.size() != 2) throw std::logic_error("split_prime: unramified prime with double root");
    s.split = true;
    s.p1 = PrimeIdeal{p, 1, roots[0], prime_generator(F, p, 1, roots[0]), 1};
    s.p2 = PrimeIdeal{p, 1, roots[1], prime_generator(F, p, 1, roots[1]), 2};
  }
  return s;
}

// One prime-power factor of a level modulus.
struct LevelFactor {
  PrimeIdeal prime;
  int e = 1;
};

// Modulus n*p^s presented as pairwise-coprime prime-power factors.
struct IdealData {
  std::vector<LevelFactor> factors;

  Int residue_size(const RealQuadraticField&) const {
    Int n(1);
    for (auto& f : factors) n *= pow_ui(Int(f.prime.q), (unsigned long)(f.prime.f * f.e));
    return n;
  }
};

}  // namespace hmf

#endif
