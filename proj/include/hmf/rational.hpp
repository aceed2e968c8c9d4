#ifndef HMF_RATIONAL_HPP
#define HMF_RATIONAL_HPP

#include <gmp.h>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>

namespace hmf {

// Arbitrary-precision integer, value semantics over mpz.
class Int {
 public:
  Int() { mpz_init(z_); }
  Int(long v) { mpz_init_set_si(z_, v); }
  Int(const Int& o) { mpz_init_set(z_, o.z_); }
  Int(Int&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  explicit Int(const std::string& s) {
    if (mpz_init_set_str(z_, s.c_str(), 10) != 0) {
      mpz_clear(z_);
      throw std::invalid_argument("Int: bad literal " + s);
    }
  }
  ~Int() { mpz_clear(z_); }

  Int& operator=(const Int& o) {
    mpz_set(z_, o.z_);
    return *this;
  }
  Int& operator=(Int&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  Int& operator=(long v) {
    mpz_set_si(z_, v);
    return *this;
  }

  mpz_ptr raw() { return z_; }
  mpz_srcptr raw() const { return z_; }

  friend Int operator+(const Int& a, const Int& b) {
    Int r;
    mpz_add(r.z_, a.z_, b.z_);
    return r;
  }
  friend Int operator-(const Int& a, const Int& b) {
    Int r;
    mpz_sub(r.z_, a.z_, b.z_);
    return r;
  }
  friend Int operator*(const Int& a, const Int& b) {
    Int r;
    mpz_mul(r.z_, a.z_, b.z_);
    return r;
  }
  Int operator-() const {
    Int r;
    mpz_neg(r.z_, z_);
    return r;
  }
  Int& operator+=(const Int& o) {
    mpz_add(z_, z_, o.z_);
    return *this;
  }
  Int& operator-=(const Int& o) {
    mpz_sub(z_, z_, o.z_);
    return *this;
  }
  Int& operator*=(const Int& o) {
    mpz_mul(z_, z_, o.z_);
    return *this;
  }

  // Truncated division pair.
  friend void tdiv_qr(Int& q, Int& r, const Int& a, const Int& b) {
    mpz_tdiv_qr(q.z_, r.z_, a.z_, b.z_);
  }
  // Floor division.
  friend Int fdiv(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_q(r.z_, a.z_, b.z_);
    return r;
  }
  friend Int fmod_pos(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.z_, a.z_, b.z_);
    return r;
  }
  // Exact division; aborts in GMP if not exact (use only when provable).
  friend Int divexact(const Int& a, const Int& b) {
    Int r;
    mpz_divexact(r.z_, a.z_, b.z_);
    return r;
  }
  friend Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.z_, a.z_, b.z_);
    return r;
  }
  friend Int abs(const Int& a) {
    Int r;
    mpz_abs(r.z_, a.z_);
    return r;
  }
  friend Int pow_ui(const Int& a, unsigned long e) {
    Int r;
    mpz_pow_ui(r.z_, a.z_, e);
    return r;
  }
  // floor(sqrt(a)), a >= 0
  friend Int isqrt(const Int& a) {
    Int r;
    mpz_sqrt(r.z_, a.z_);
    return r;
  }

  bool divisible_by(const Int& b) const { return mpz_divisible_p(z_, b.z_) != 0; }
  int sgn() const { return mpz_sgn(z_); }
  bool is_zero() const { return mpz_sgn(z_) == 0; }
  bool is_one() const { return mpz_cmp_si(z_, 1) == 0; }
  bool odd() const { return mpz_odd_p(z_) != 0; }

  friend int cmp(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_); }
  friend bool operator==(const Int& a, const Int& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Int& a, const Int& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Int& a, const Int& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Int& a, const Int& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Int& a, const Int& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Int& a, const Int& b) { return cmp(a, b) >= 0; }
  friend bool operator==(const Int& a, long b) { return mpz_cmp_si(a.z_, b) == 0; }
  friend bool operator!=(const Int& a, long b) { return mpz_cmp_si(a.z_, b) != 0; }

  bool fits_slong() const { return mpz_fits_slong_p(z_) != 0; }
  long to_long() const {
    if (!fits_slong()) throw std::overflow_error("Int::to_long");
    return mpz_get_si(z_);
  }
  double to_double() const { return mpz_get_d(z_); }

  std::string str() const {
    char* s = mpz_get_str(nullptr, 10, z_);
    std::string out(s);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(s, out.size() + 1);
    return out;
  }

  size_t bit_length() const { return mpz_sizeinbase(z_, 2); }

 private:
  mpz_t z_;
};

inline Int operator*(const Int& a, long b) {
  Int r;
  mpz_mul_si(r.raw(), a.raw(), b);
  return r;
}
inline Int operator*(long a, const Int& b) { return b * a; }

// Exact rational, always reduced with positive denominator.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long v) : num_(v), den_(1) {}
  Rat(Int n) : num_(std::move(n)), den_(1) {}
  Rat(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_.is_one(); }
  int sgn() const { return num_.sgn(); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero()) throw std::domain_error("Rat: division by zero");
    return Rat(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rat operator-() const {
    Rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend int cmp(const Rat& a, const Rat& b) { return cmp(a.num_ * b.den_, b.num_ * a.den_); }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Rat& a, const Rat& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Rat& a, const Rat& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Rat& a, const Rat& b) { return cmp(a, b) >= 0; }

  Int floor() const { return fdiv(num_, den_); }
  // Nearest integer, ties toward +infinity.
  Int round() const { return fdiv(num_ * 2 + den_, den_ * 2); }

  double to_double() const { return num_.to_double() / den_.to_double(); }

  std::string str() const { return is_integer() ? num_.str() : num_.str() + "/" + den_.str(); }

 private:
  void reduce() {
    if (den_.is_zero()) throw std::domain_error("Rat: zero denominator");
    if (den_.sgn() < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = gcd(abs(num_), den_);
    if (!g.is_one() && !g.is_zero()) {
      num_ = divexact(num_, g);
      den_ = divexact(den_, g);
    }
    if (num_.is_zero()) den_ = 1;
  }

  Int num_, den_;
};

inline std::ostream& operator<<(std::ostream& os, const Int& v);
inline std::ostream& operator<<(std::ostream& os, const Rat& v);

}  // namespace hmf

#include <ostream>

namespace hmf {
inline std::ostream& operator<<(std::ostream& os, const Int& v) { return os << v.str(); }
inline std::ostream& operator<<(std::ostream& os, const Rat& v) { return os << v.str(); }
}  // namespace hmf

#endif
