#ifndef HMF_MONOMIAL_HPP
#define HMF_MONOMIAL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hmf {

// Basis ordering for g = 2: Bi(a, b) = (a+b+1)(a+b)/2 + b, with the corrected
// inverse (the degree-t block lists (t,0), (t-1,1), ..., (0,t)).
inline long bi(long a, long b) {
  if (a < 0 || b < 0) throw std::invalid_argument("bi: negative exponent");
  long t = a + b;
  return t * (t + 1) / 2 + b;
}

inline long b_of(long m) {
  if (m < 0) throw std::invalid_argument("b_of: negative index");
  // floor((-1 + sqrt(1+8m)) / 2), computed safely
  long t = (long)((std::sqrt(1.0 + 8.0 * (double)m) - 1.0) / 2.0);
  while (t * (t + 1) / 2 > m) t--;
  while ((t + 1) * (t + 2) / 2 <= m) t++;
  return t;
}

inline std::array<long, 2> bi_inv(long m) {
  long t = b_of(m);
  long b = m - t * (t + 1) / 2;
  return {t - b, b};
}

// Subspace descriptions: Classical(n) is the box x_i <= n_i; Box allows an
// infinite direction (-1) that is truncated by the caller's R.
struct SubspaceSpec {
  enum Kind { Classical, Box } kind = Classical;
  std::array<long, 2> bounds{0, 0};  // -1 = unbounded (Box only)

  static SubspaceSpec classical(long n1, long n2) { return {Classical, {n1, n2}}; }
  static SubspaceSpec box(long n1, long n2) { return {Box, {n1, n2}}; }

  bool contains(const std::array<long, 2>& x) const {
    for (int i = 0; i < 2; i++)
      if (bounds[(size_t)i] >= 0 && x[(size_t)i] > bounds[(size_t)i]) return false;
    return true;
  }
};

// First R monomials in Bi order (the standard truncation basis).
inline std::vector<std::array<long, 2>> bi_prefix(long R) {
  std::vector<std::array<long, 2>> v;
  v.reserve((size_t)R);
  for (long m = 0; m < R; m++) v.push_back(bi_inv(m));
  return v;
}

// Monomials of a subspace, in Bi order; for unbounded directions the scan is
// truncated once indices exceed the Bi-prefix of length limit.
inline std::vector<std::array<long, 2>> subspace_basis(const SubspaceSpec& spec, long limit) {
  std::vector<std::array<long, 2>> v;
  for (long m = 0; m < limit; m++) {
    auto x = bi_inv(m);
    if (spec.contains(x)) v.push_back(x);
  }
  return v;
}

}  // namespace hmf

#endif
