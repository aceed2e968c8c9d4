#ifndef HMF_SPLITTING_HPP
#define HMF_SPLITTING_HPP

#include "hmf/padic.hpp"
#include "hmf/quat.hpp"
#include "hmf/residue.hpp"

namespace hmf {

// 2x2 matrix over a padic context.
struct SplitMat {
  PadicElem m[2][2];

  static SplitMat zero(const Ctx& c) {
    SplitMat r;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) r.m[i][j] = PadicElem(c);
    return r;
  }
  static SplitMat identity(const Ctx& c) {
    SplitMat r = zero(c);
    r.m[0][0] = PadicElem(c, 1);
    r.m[1][1] = PadicElem(c, 1);
    return r;
  }
};

SplitMat sm_mul(const SplitMat& a, const SplitMat& b);
SplitMat sm_add(const SplitMat& a, const SplitMat& b);
PadicElem sm_det(const SplitMat& a);
SplitMat sm_scale(const SplitMat& a, const PadicElem& s);
// inverse for unit determinant
SplitMat sm_inv(const SplitMat& a);
// adjugate (d, -b; -c, a)
SplitMat sm_adj(const SplitMat& a);
SplitMat sm_frobenius(const SplitMat& a);

// Embedding of F into the completion at one prime above p (split: Hensel
// root branch; inert: omega -> w). Handles rationals with p-unit denominators.
struct PlaceEmbedding {
  Ctx ctx;
  RealQuadraticField F;
  PadicElem omega_img;

  PadicElem operator()(const FieldElem& x) const;
  PadicElem embed_rat(const Rat& r) const;
};

// ctx must be plain for split primes (f = 1) and carry the field's quadratic
// (gT, gC) = (T, C) for inert ones. place is 1 or 2; for split primes place i
// uses prime label i's root, for inert place 2 composes with Frobenius.
PlaceEmbedding make_place_embedding(const Ctx& ctx, const RealQuadraticField& F,
                                    const SplittingType& split, int place);

// The splitting O_D tensor O_q = M_2(O_q) at one unramified prime, to padic
// precision. images[m] = sigma(basis[m]).
struct LocalSplitting {
  Ctx ctx;                 // plain context at the prime's residue characteristic
  PrimeIdeal P;
  std::array<SplitMat, 4> images;

  // sigma of an order element (must lie in the order)
  SplitMat apply(const Order& O, const QuatF& x) const;
  // entries reduced into O_F/q^e
  LocalMat reduce(const LocalRing& R, const SplitMat& s) const;
};

// digits = p-adic digits carried (inflated internally while constructing).
LocalSplitting build_splitting(const Order& O, const PrimeIdeal& P, long digits);

}  // namespace hmf

#endif
