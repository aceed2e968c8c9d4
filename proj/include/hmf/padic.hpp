#ifndef HMF_PADIC_HPP
#define HMF_PADIC_HPP

#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmf/rational.hpp"

namespace hmf {

struct NonUnitInverseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrecisionTooLowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rational extended by +infinity and a below-precision marker. Used for exact
// valuations and for slopes.
struct ExtRat {
  enum Kind { Finite, PlusInf, BelowPrec } kind = Finite;
  long num = 0;
  long den = 1;

  ExtRat() = default;
  ExtRat(long n, long d = 1) : kind(Finite), num(n), den(d) { normalize(); }
  static ExtRat inf() {
    ExtRat r;
    r.kind = PlusInf;
    return r;
  }
  static ExtRat below() {
    ExtRat r;
    r.kind = BelowPrec;
    return r;
  }

  bool finite() const { return kind == Finite; }

  void normalize() {
    if (den == 0) throw std::domain_error("ExtRat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend ExtRat operator+(const ExtRat& a, const ExtRat& b) {
    if (!a.finite() || !b.finite()) return inf();
    return ExtRat(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend ExtRat operator-(const ExtRat& a, const ExtRat& b) {
    return a + ExtRat(-b.num, b.den);
  }
  friend ExtRat operator*(const ExtRat& a, long k) {
    if (!a.finite()) return a;
    return ExtRat(a.num * k, a.den);
  }
  friend ExtRat operator/(const ExtRat& a, long k) {
    if (!a.finite()) return a;
    return ExtRat(a.num, a.den * k);
  }

  // Comparison treats PlusInf and BelowPrec as larger than any finite value.
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (!a.finite()) return false;
    if (!b.finite()) return true;
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.kind != b.kind) return false;
    if (!a.finite()) return true;
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a < b || a == b; }
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }

  double to_double() const { return finite() ? (double)num / den : 1e300; }
  std::string str() const {
    if (kind == PlusInf) return "inf";
    if (kind == BelowPrec) return ">=cap";
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

// L = Q_p(unramified of degree f, zeta_{p^s}); O_L represented as
// O_ur[pi]/(E(pi)) with O_ur = Z_p[w]/(g(w)), E = Phi_{p^s}(1+X) Eisenstein of
// degree e = phi(p^s). Elements carry coordinates c[j*f+i] of w^i pi^j, all
// capped mod p^N (flat absolute precision M = e*N in pi-adic digits).
class PadicContext : public std::enable_shared_from_this<PadicContext> {
 public:
  long p;
  int f;
  int s;
  int e;
  long N;  // p-digit cap
  long M;  // pi-digit cap = e*N
  long gT = 0, gC = 0;  // w^2 = gT*w + gC when f = 2
  Int pN;

  static std::shared_ptr<const PadicContext> make(long p, int f, int s, long M_req, long gT = 0,
                                                  long gC = 0) {
    auto c = std::shared_ptr<PadicContext>(new PadicContext());
    c->p = p;
    c->f = f;
    c->s = s;
    if (p < 2 || f < 1 || s < 0 || M_req < 1) throw std::invalid_argument("PadicContext: bad parameters");
    c->e = 1;
    if (s >= 1) {
      c->e = 1;
      for (int i = 0; i < s - 1; i++) c->e *= (int)p;
      c->e *= (int)(p - 1);
    }
    c->N = (M_req + c->e - 1) / c->e;
    c->M = c->N * c->e;
    c->pN = pow_ui(Int(p), (unsigned long)c->N);
    if (f == 1) {
      c->gT = 0;
      c->gC = 0;
    } else if (f == 2) {
      if (gT == 0 && gC == 0) {
        // default: first monic x^2 - Tx - C irreducible mod p
        bool found = false;
        for (long C = 1; C < p * p && !found; C++)
          for (long T = 0; T < p && !found; T++) {
            bool has_root = false;
            for (long r = 0; r < p; r++)
              if (((r * r - T * r - C) % p + p) % p == 0) has_root = true;
            if (!has_root) {
              c->gT = T;
              c->gC = C;
              found = true;
            }
          }
        if (!found) throw std::logic_error("PadicContext: no irreducible quadratic");
      } else {
        c->gT = gT;
        c->gC = gC;
        bool has_root = false;
        for (long r = 0; r < p; r++)
          if (((r * r - gT * r - gC) % p + p) % p == 0) has_root = true;
        if (has_root) throw std::invalid_argument("PadicContext: quadratic reducible mod p");
      }
    } else {
      throw std::invalid_argument("PadicContext: unramified degree > 2 unsupported");
    }
    c->build_eisenstein();
    return c;
  }

  int dim() const { return e * f; }

  void reduce(Int& v) const {
    if (p == 2)
      mpz_fdiv_r_2exp(v.raw(), v.raw(), (mp_bitcnt_t)N);
    else
      mpz_fdiv_r(v.raw(), v.raw(), pN.raw());
  }

  // exact p-valuation of a residue, capped at N
  long vp(const Int& v) const {
    if (v.is_zero()) return N;
    Int t;
    mp_bitcnt_t k;
    if (p == 2) {
      k = mpz_scan1(v.raw(), 0);
      return (long)k < N ? (long)k : N;
    }
    Int pp((long)p);
    k = mpz_remove(t.raw(), v.raw(), pp.raw());
    return (long)k < N ? (long)k : N;
  }

  const std::vector<std::vector<Int>>& reduction_rows() const { return red_; }
  const std::vector<Int>& eisenstein() const { return E_; }

 private:
  PadicContext() = default;

  void build_eisenstein() {
    E_.assign((size_t)e, Int(0));
    if (s == 0) {
      red_.clear();
      return;
    }
    // Phi_{p^s}(Y) = sum_{i<p} Y^{i p^{s-1}}; substitute Y = 1+X.
    long q = 1;
    for (int i = 0; i < s - 1; i++) q *= p;
    std::vector<Int> poly((size_t)e + 1, Int(0));
    for (long i = 0; i < p; i++) {
      unsigned long deg = (unsigned long)(i * q);
      // (1+X)^deg
      Int b(1);
      for (unsigned long k = 0; k <= deg && k <= (unsigned long)e; k++) {
        poly[k] += b;
        // b = binom(deg, k+1)
        b = divexact(b * (Int((long)deg) - Int((long)k)), Int((long)k + 1));
      }
    }
    if (!(poly[(size_t)e] == Int(1))) throw std::logic_error("PadicContext: Eisenstein degree mismatch");
    for (int j = 0; j < e; j++) E_[(size_t)j] = poly[(size_t)j];
    // pi^{e+t} rows for t = 0 .. e-2
    red_.assign((size_t)std::max(0, e - 1), std::vector<Int>((size_t)e, Int(0)));
    if (e >= 1 && !red_.empty()) {
      for (int j = 0; j < e; j++) red_[0][(size_t)j] = -E_[(size_t)j];
      for (int t = 1; t < e - 1; t++) {
        // pi * previous row
        Int top = red_[(size_t)t - 1][(size_t)e - 1];
        for (int j = e - 1; j >= 1; j--) red_[(size_t)t][(size_t)j] = red_[(size_t)t - 1][(size_t)j - 1];
        red_[(size_t)t][0] = Int(0);
        for (int j = 0; j < e; j++) red_[(size_t)t][(size_t)j] += top * red_[0][(size_t)j];
      }
      for (auto& row : red_)
        for (auto& v : row) reduce(v);
    }
  }

  std::vector<Int> E_;
  std::vector<std::vector<Int>> red_;
};

using Ctx = std::shared_ptr<const PadicContext>;

class PadicElem {
 public:
  PadicElem() = default;
  explicit PadicElem(Ctx ctx) : ctx_(std::move(ctx)), c_((size_t)ctx_->dim(), Int(0)) {}
  PadicElem(Ctx ctx, long v) : PadicElem(std::move(ctx)) {
    c_[0] = Int(v);
    ctx_->reduce(c_[0]);
  }
  PadicElem(Ctx ctx, const Int& v) : PadicElem(std::move(ctx)) {
    c_[0] = v;
    ctx_->reduce(c_[0]);
  }

  const Ctx& ctx() const { return ctx_; }
  bool valid() const { return (bool)ctx_; }
  const Int& coord(int j, int i) const { return c_[(size_t)(j * ctx_->f + i)]; }
  Int& coord(int j, int i) { return c_[(size_t)(j * ctx_->f + i)]; }
  const std::vector<Int>& coords() const { return c_; }
  std::vector<Int>& coords() { return c_; }

  static PadicElem pi(const Ctx& ctx) {
    PadicElem r(ctx);
    if (ctx->e == 1)
      r.c_[0] = Int(ctx->p);
    else
      r.coord(1, 0) = Int(1);
    return r;
  }
  static PadicElem w_gen(const Ctx& ctx) {
    PadicElem r(ctx);
    if (ctx->f < 2) throw std::invalid_argument("w_gen: f = 1");
    r.coord(0, 1) = Int(1);
    return r;
  }

  bool is_exactly_zero_mod_cap() const {
    for (auto& v : c_)
      if (!v.is_zero()) return false;
    return true;
  }

  friend PadicElem operator+(const PadicElem& a, const PadicElem& b) {
    check(a, b);
    PadicElem r(a.ctx_);
    for (size_t i = 0; i < r.c_.size(); i++) {
      r.c_[i] = a.c_[i] + b.c_[i];
      a.ctx_->reduce(r.c_[i]);
    }
    return r;
  }
  friend PadicElem operator-(const PadicElem& a, const PadicElem& b) {
    check(a, b);
    PadicElem r(a.ctx_);
    for (size_t i = 0; i < r.c_.size(); i++) {
      r.c_[i] = a.c_[i] - b.c_[i];
      a.ctx_->reduce(r.c_[i]);
    }
    return r;
  }
  PadicElem operator-() const {
    PadicElem r(ctx_);
    for (size_t i = 0; i < c_.size(); i++) {
      r.c_[i] = -c_[i];
      ctx_->reduce(r.c_[i]);
    }
    return r;
  }

  friend PadicElem operator*(const PadicElem& a, const PadicElem& b) {
    check(a, b);
    std::vector<Int> acc = raw_accumulator(*a.ctx_);
    mul_into(acc, a, b);
    return finalize(a.ctx_, acc);
  }

  // raw accumulator layout: (2e-1) rows of f coords, unreduced
  static std::vector<Int> raw_accumulator(const PadicContext& ctx) {
    return std::vector<Int>((size_t)((2 * ctx.e - 1) * ctx.f), Int(0));
  }

  static void mul_into(std::vector<Int>& acc, const PadicElem& a, const PadicElem& b) {
    const PadicContext& C = *a.ctx_;
    const int e = C.e, f = C.f;
    for (int ja = 0; ja < e; ja++)
      for (int jb = 0; jb < e; jb++) {
        const int j = ja + jb;
        if (f == 1) {
          mpz_addmul(acc[(size_t)j].raw(), a.coord(ja, 0).raw(), b.coord(jb, 0).raw());
        } else {
          // (a0+a1w)(b0+b1w) = a0b0 + gC a1b1 + (a0b1+a1b0+gT a1b1) w
          const Int &a0 = a.coord(ja, 0), &a1 = a.coord(ja, 1);
          const Int &b0 = b.coord(jb, 0), &b1 = b.coord(jb, 1);
          Int a1b1 = a1 * b1;
          mpz_addmul(acc[(size_t)(j * 2)].raw(), a0.raw(), b0.raw());
          if (C.gC != 0) {
            Int t = a1b1 * C.gC;
            acc[(size_t)(j * 2)] += t;
          }
          mpz_addmul(acc[(size_t)(j * 2 + 1)].raw(), a0.raw(), b1.raw());
          mpz_addmul(acc[(size_t)(j * 2 + 1)].raw(), a1.raw(), b0.raw());
          if (C.gT != 0) {
            Int t = a1b1 * C.gT;
            acc[(size_t)(j * 2 + 1)] += t;
          }
        }
      }
  }

  static PadicElem finalize(const Ctx& ctx, std::vector<Int>& acc) {
    const PadicContext& C = *ctx;
    const int e = C.e, f = C.f;
    PadicElem r(ctx);
    // fold pi^{e+t} rows
    for (int t = 2 * e - 2; t >= e; t--) {
      const auto& row = C.reduction_rows()[(size_t)(t - e)];
      for (int i = 0; i < f; i++) {
        Int& src = acc[(size_t)(t * f + i)];
        if (src.is_zero()) continue;
        for (int j = 0; j < e; j++) {
          if (row[(size_t)j].is_zero()) continue;
          mpz_addmul(acc[(size_t)(j * f + i)].raw(), src.raw(), row[(size_t)j].raw());
        }
      }
    }
    for (int j = 0; j < e; j++)
      for (int i = 0; i < f; i++) {
        r.coord(j, i) = acc[(size_t)(j * f + i)];
        C.reduce(r.coord(j, i));
      }
    return r;
  }

  // pi-adic valuation; exact whenever some coordinate is a unit below the cap.
  ExtRat valuation() const {
    const PadicContext& C = *ctx_;
    long best = C.M;
    bool any = false;
    for (int j = 0; j < C.e; j++) {
      long vj = C.N;
      for (int i = 0; i < C.f; i++) {
        long v = C.vp(coord(j, i));
        if (v < vj) vj = v;
      }
      if (vj < C.N) {
        long tot = j + C.e * vj;
        if (tot < best) {
          best = tot;
          any = true;
        }
      }
    }
    if (!any) return ExtRat::below();
    return ExtRat(best, C.e);
  }

  // Unit inverse (v(x) = 0 required).
  PadicElem inv() const {
    const PadicContext& C = *ctx_;
    ExtRat v = valuation();
    if (!(v.finite() && v.num == 0)) throw NonUnitInverseError("PadicElem::inv: non-unit");
    // start from inverse of the residue in F_{p^f}
    PadicElem y(ctx_);
    if (C.f == 1) {
      long a = fmod_pos(coord(0, 0), Int(C.p)).to_long();
      long ai = inv_mod_small(a, C.p);
      y.coord(0, 0) = Int(ai);
    } else {
      long a = fmod_pos(coord(0, 0), Int(C.p)).to_long();
      long b = fmod_pos(coord(0, 1), Int(C.p)).to_long();
      // (a+bw)^-1 = conj / norm in F_{p^2}
      long nrm = (((a * a + C.gT * a * b - C.gC * b * b) % C.p) + C.p) % C.p;
      long ni = inv_mod_small(nrm, C.p);
      long ca = ((a + C.gT * b) % C.p + C.p) % C.p;
      long cb = ((-b) % C.p + C.p) % C.p;
      y.coord(0, 0) = Int(ca * ni % C.p);
      y.coord(0, 1) = Int(cb * ni % C.p);
    }
    // Newton: y <- y(2 - x y); doubles pi-adic correctness each step.
    PadicElem two(ctx_, 2);
    long prec = 1;
    while (prec < C.M) {
      y = y * (two - (*this) * y);
      prec *= 2;
    }
    return y;
  }

  PadicElem pow(long n) const {
    if (n < 0) return inv().pow(-n);
    PadicElem r(ctx_, 1), x = *this;
    while (n > 0) {
      if (n & 1) r = r * x;
      x = x * x;
      n >>= 1;
    }
    return r;
  }

  // multiply by integer scalar
  friend PadicElem operator*(const PadicElem& a, const Int& k) {
    PadicElem r(a.ctx_);
    for (size_t i = 0; i < a.c_.size(); i++) {
      r.c_[i] = a.c_[i] * k;
      a.ctx_->reduce(r.c_[i]);
    }
    return r;
  }

  // exact division by p^k (every coordinate divisible; asserts)
  PadicElem divexact_p(long k) const {
    const PadicContext& C = *ctx_;
    Int pk = pow_ui(Int(C.p), (unsigned long)k);
    PadicElem r(ctx_);
    for (size_t i = 0; i < c_.size(); i++) {
      if (!c_[i].divisible_by(pk))
        throw std::domain_error("divexact_p: not divisible (precision misuse)");
      r.c_[i] = divexact(c_[i], pk);
    }
    return r;
  }

  friend bool operator==(const PadicElem& a, const PadicElem& b) {
    check(a, b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const PadicElem& a, const PadicElem& b) { return !(a == b); }

  std::string str() const {
    std::string out = "[";
    for (int j = 0; j < ctx_->e; j++)
      for (int i = 0; i < ctx_->f; i++) {
        if (j + i) out += ",";
        out += coord(j, i).str();
      }
    return out + "]";
  }

  // Teichmueller projection: limit of x^{p^f}.
  PadicElem teichmuller() const {
    PadicElem x = *this;
    long reps = ctx_->M + 2;
    long q = ctx_->p;
    for (int i = 1; i < ctx_->f; i++) q *= ctx_->p;
    for (long i = 0; i < reps; i++) {
      PadicElem nx = x.pow(q);
      if (nx == x) return x;
      x = nx;
    }
    throw std::logic_error("teichmuller: no convergence");
  }

  // Frobenius on the unramified part (f = 2), identity on pi.
  PadicElem frobenius() const {
    const PadicContext& C = *ctx_;
    if (C.f == 1) return *this;
    PadicElem r(ctx_);
    for (int j = 0; j < C.e; j++) {
      // c0 + c1 w -> (c0 + gT c1) - c1 w
      r.coord(j, 0) = coord(j, 0) + coord(j, 1) * C.gT;
      r.coord(j, 1) = -coord(j, 1);
      C.reduce(r.coord(j, 0));
      C.reduce(r.coord(j, 1));
    }
    return r;
  }

 private:
  static void check(const PadicElem& a, const PadicElem& b) {
    if (a.ctx_.get() != b.ctx_.get()) throw std::invalid_argument("PadicElem: context mismatch");
  }
  static long inv_mod_small(long a, long p) {
    long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
    while (nr != 0) {
      long q = r / nr;
      long tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (r != 1) throw std::domain_error("inv_mod_small: non-unit");
    return ((t % p) + p) % p;
  }

  Ctx ctx_;
  std::vector<Int> c_;
};

// zeta_{p^s} = 1 + pi, exact.
inline PadicElem zeta_ps(const Ctx& ctx) {
  if (ctx->s < 1) throw std::invalid_argument("zeta_ps: context has s = 0");
  PadicElem r = PadicElem::pi(ctx);
  r.coord(0, 0) = r.coord(0, 0) + Int(1);
  ctx->reduce(r.coord(0, 0));
  return r;
}

// Teichmueller generator of mu_{p^f - 1}: lift of a generator of the residue field.
inline PadicElem teichmuller_generator(const Ctx& ctx) {
  long q = ctx->p;
  for (int i = 1; i < ctx->f; i++) q *= ctx->p;
  if (q == 2) throw std::invalid_argument("teichmuller_generator: trivial mu group");
  // search a residue of multiplicative order q-1
  for (long a = 1; a < (ctx->f == 1 ? ctx->p : ctx->p * ctx->p); a++) {
    long c0 = a % ctx->p, c1 = (ctx->f == 2) ? a / ctx->p : 0;
    if (c0 == 0 && c1 == 0) continue;
    PadicElem x(ctx);
    x.coord(0, 0) = Int(c0);
    if (ctx->f == 2) x.coord(0, 1) = Int(c1);
    PadicElem t = x.teichmuller();
    if (t.is_exactly_zero_mod_cap()) continue;
    PadicElem one(ctx, 1);
    long ord = 1;
    PadicElem y = t;
    while (!(y == one) && ord <= q) {
      y = y * t;
      ord++;
    }
    if (ord == q - 1) return t;
  }
  throw std::logic_error("teichmuller_generator: none found");
}

// Primitive m-th root of unity in L, for m | (p^f - 1) * p^{s-1} * p-part shapes.
inline PadicElem root_of_unity(const Ctx& ctx, long m) {
  if (m == 1) return PadicElem(ctx, 1);
  long q = ctx->p;
  for (int i = 1; i < ctx->f; i++) q *= ctx->p;
  long mt = 1;  // tame part | q-1
  long mw = 1;  // wild part = power of p
  long rest = m;
  while (rest % ctx->p == 0) {
    mw *= ctx->p;
    rest /= ctx->p;
  }
  mt = rest;
  if ((q - 1) % mt != 0) throw std::invalid_argument("root_of_unity: tame order not available");
  PadicElem r(ctx, 1);
  if (mt > 1) r = r * teichmuller_generator(ctx).pow((q - 1) / mt);
  if (mw > 1) {
    if (ctx->p == 2 && mw == 2) {
      r = -r;  // zeta_2 = -1 is always present
    } else {
      long ps = 1;
      for (int i = 0; i < ctx->s; i++) ps *= ctx->p;
      if (ps % mw != 0) throw std::invalid_argument("root_of_unity: wild order not available");
      r = r * zeta_ps(ctx).pow(ps / mw);
    }
  }
  return r;
}

// Hensel root of x^2 - Tx - C in Z_p (the f = 1 part of ctx), root = r0 mod p
// with the two roots distinct mod p (p odd) or derivative odd (p = 2).
inline PadicElem hensel_quadratic_root(const Ctx& ctx, long T, long C, long r0) {
  PadicElem x(ctx, r0);
  PadicElem t(ctx, T), c(ctx, C), two(ctx, 2);
  for (long prec = 1; prec < ctx->M; prec *= 2) {
    PadicElem fx = x * x - t * x - c;
    PadicElem dfx = two * x - t;
    x = x - fx * dfx.inv();
  }
  PadicElem fx = x * x - t * x - c;
  if (!fx.is_exactly_zero_mod_cap()) throw PrecisionTooLowError("hensel_quadratic_root: no convergence");
  return x;
}

}  // namespace hmf

#endif
