#ifndef HMF_SLOPES_HPP
#define HMF_SLOPES_HPP

#include "hmf/assemble.hpp"

namespace hmf {

// Characteristic polynomial det(X I - A) by the division-free Berkowitz
// recursion: coefficients c[0..n] with c[n] = 1, exact mod the context cap.
std::vector<PadicElem> charpoly(const ApproxOperatorMatrix& A, int nthreads = 0);

// slope/multiplicity pair
struct SmPair {
  ExtRat slope;
  long mult = 0;
  bool certified = true;
  friend bool operator==(const SmPair& a, const SmPair& b) {
    return a.slope == b.slope && a.mult == b.mult;
  }
};

struct SMSet {
  std::vector<SmPair> pairs;    // strictly increasing slopes
  ExtRat trust = ExtRat::inf();  // slopes strictly below this are certified

  long total_mult() const {
    long t = 0;
    for (auto& p : pairs) t += p.mult;
    return t;
  }
  std::string str() const;
  // the certified prefix only
  SMSet certified_prefix() const;
};

SMSet parse_smset(const std::string& text);

struct NewtonPolygon {
  // lower hulls: with unknown coefficients at the precision floor, and with
  // them ignored; agreement certifies
  std::vector<std::pair<long, ExtRat>> hull_low, hull_high;
  SMSet slopes;
};

// floors: optional rigorous per-index valuation floor (p-units) for unknown
// coefficients, e.g. from the block structure; may be empty.
NewtonPolygon newton_slopes(const std::vector<PadicElem>& coeffs,
                            const std::vector<long>& floors = {});

// Newton polygon of an assembled matrix, floors from its row structure.
NewtonPolygon matrix_slopes(const ApproxOperatorMatrix& A, int nthreads = 0);

// Hodge-type lower bound: slope i with multiplicity s(i) h, s(i) = C(i+g-1, g-1).
struct HodgeBound {
  long h = 0;
  int g = 2;
  std::vector<std::pair<long, long>> vertices;  // (index, value) prefix
  // cumulative value at index k
  long value_at(long k) const;
};

HodgeBound hodge_bound(long h, int g, long count);

bool verify_np_above_hodge(const NewtonPolygon& np, const HodgeBound& hb);

// floor(b(R)/h): provable number of smallest truncation slopes that agree
// with the compact operator.
long trust_count(long R, long h);

// Longest common certified prefix of two slope sets (empirical stabilization).
SMSet stable_prefix(const SMSet& a, const SMSet& b);

}  // namespace hmf

#endif
