#ifndef HMF_HECKE_HPP
#define HMF_HECKE_HPP

#include <cstdint>
#include <unordered_map>

#include "hmf/splitting.hpp"
#include "hmf/weights.hpp"

namespace hmf {

struct PrincipalizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One point of P^1(O_F / n p^s): normalized local points, one per level factor.
using P1Point = std::vector<P1Local>;

// The level n p^s: factor 0..(nfac-1) are the primes above p with exponent s,
// the rest the auxiliary factors.
struct LevelData {
  RealQuadraticField F;
  PLevelRef pl;
  std::vector<LevelFactor> factors;
  std::vector<LocalRing> rings;

  static LevelData make(const PLevelRef& pl, const std::vector<LevelFactor>& aux);
  size_t nfactors() const { return factors.size(); }
  Int p1_size() const;
  std::string str() const;
};

// Class set of (D, U_0(n p^s)) via unit orbits on P^1.
struct ClassSet {
  LevelData level;
  UnitGroupData units;
  std::vector<P1Point> reps;              // one normalized point per orbit
  std::vector<long> orbit_of_point;       // indexed by point key order
  std::unordered_map<uint64_t, long> point_index;  // point key -> index in enumeration
  std::vector<long> transporter;          // per point: unit index u with u*rep ~ point
  std::vector<long> stab_orders;
  bool sufficiently_small = false;
  std::vector<std::array<std::array<FieldElem, 2>, 2>> t_lift;  // per orbit: 2x2 over O_F

  long h() const { return (long)reps.size(); }
};

uint64_t p1_point_key(const LevelData& L, const P1Point& pt);

// full list of normalized representatives of P^1(O_F / n p^s), CRT order
std::vector<P1Point> proj_line(const LevelData& level);

ClassSet class_set(const Order& O, const LevelData& level);

// Shared context for Hecke computations at a fixed order and level.
struct HeckeContext {
  Order O;
  LevelData level;
  ClassSet cs;
  long digits = 64;  // p-adic digits carried at the primes above p
  std::vector<LocalSplitting> psplit;          // per prime above p, precision `digits`
  std::vector<LocalSplitting> level_split;     // per level factor, small precision
  std::vector<LocalMat> unit_images_flat;      // [factor * nunits + u]

  const LocalMat& unit_image(size_t factor, size_t u) const {
    return unit_images_flat[factor * cs.units.reps.size() + u];
  }
};

HeckeContext make_hecke_context(const Order& O, const LevelData& level, long digits);

// One coset matrix (gamma_beta u_beta)_p: a 2x2 over the completion at every
// prime above p (entries in the plain padic contexts of psplit).
struct HeckeMatrix {
  std::vector<SplitMat> comp;
};

// Theta data for one U_P operator (P = prime index into pl) or a composite.
struct HeckeLocalData {
  PLevelRef pl;
  std::vector<int> op_word;  // prime indices, one per U_P factor (composites)
  long digits = 0;
  long h = 0;
  bool sufficiently_small = true;
  // T[i*h + j] = list of coset matrices for Theta(i, j)
  std::vector<std::vector<HeckeMatrix>> T;

  const std::vector<HeckeMatrix>& at(long i, long j) const { return T[(size_t)(i * h + j)]; }
};

// Builds the U_P data at prime index pi (0-based into the primes above p).
HeckeLocalData hecke_data(const HeckeContext& H, int pi);

// Composite operator: first A then B (their matrix products A*B per coset path).
HeckeLocalData hecke_compose(const HeckeContext& H, const HeckeLocalData& A,
                             const HeckeLocalData& B);

}  // namespace hmf

#endif
