#ifndef HMF_WEIGHTS_HPP
#define HMF_WEIGHTS_HPP

#include <memory>
#include <string>
#include <vector>

#include "hmf/padic.hpp"
#include "hmf/residue.hpp"

namespace hmf {

struct NonParitiousError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (k, r, n, v, w) with n = k-2, n+2v = (r,...,r), w = n+v+1.
struct WeightTuple {
  std::vector<long> k, n, v, w;
  long r = 0;
  int g() const { return (int)k.size(); }
};

WeightTuple weight_tuple_from_k(const std::vector<long>& k);

// Everything living at p for a fixed run: the primes above p, the wild level
// s, and the residue unit groups (O_p / p^c)^x used by all finite characters.
// c = max(s, 3) for p = 2 and max(s, 1) otherwise, so tau always fits.
struct PLevel {
  RealQuadraticField F;
  long p = 0;
  int s = 1;
  int c = 1;
  SplittingType split;
  int nfac = 1;
  std::vector<LocalRing> rings;          // per factor, modulus p^c
  std::vector<UnitGroup> ugroups;        // matching rings
  std::vector<LocalRing> srings;         // per factor, modulus p^s (character level)

  static std::shared_ptr<const PLevel> make(const RealQuadraticField& F, long p, int s);
  const PrimeIdeal& prime(int i) const { return i == 0 ? split.p1 : split.p2; }
};

using PLevelRef = std::shared_ptr<const PLevel>;

// Finite character of (O_p / p^c)^x with values in mu_m, stored by the value
// exponents on the fixed unit-group basis.
struct FiniteCharacter {
  PLevelRef L;
  long m = 1;                           // value order
  std::vector<std::vector<long>> a;     // per factor, per generator: exponent of value in Z/m

  bool trivial() const;
  // value exponent in Z/m at a tuple of units (one LocalElem mod p^c per factor)
  long eval_exp(const std::vector<LocalElem>& x) const;
  PadicElem eval(const Ctx& ctx, const std::vector<LocalElem>& x) const;
  // per-factor conductor exponents (<= c)
  std::vector<int> conductor() const;

  FiniteCharacter times(const FiniteCharacter& other) const;
  FiniteCharacter power(long j) const;
  void reduce_order();  // shrink m to the actual value order
};

// Characters of interest ------------------------------------------------------

// The torsion-projection character tau (mu-part times sign part for p = 2).
FiniteCharacter tau_char(const PLevelRef& L);

// Deterministic search: character of conductor exactly p^s with
// psi(eps) = Norm(eps)^r and psi(-1) = 1. Throws if none exists.
FiniteCharacter make_psi_r(const PLevelRef& L, long r);

// All characters satisfying the constraint (for tests / exploration).
std::vector<FiniteCharacter> all_psi_r(const PLevelRef& L, long r);

bool check_nebentypus(const FiniteCharacter& psi, long r);

// Locally algebraic weight ----------------------------------------------------

struct LocallyAlgebraicWeight {
  WeightTuple kt;
  FiniteCharacter psi;  // finite part, tau twists folded in
  std::string name;

  int g() const { return kt.g(); }
};

LocallyAlgebraicWeight make_weight(const PLevelRef& L, const std::vector<long>& k,
                                   const FiniteCharacter& psi, const std::string& name = "");

LocallyAlgebraicWeight tau_twist(const LocallyAlgebraicWeight& kappa, long j);

// Classification --------------------------------------------------------------

enum class WeightRegion { Centre, QuasiBoundary };

// val_p(w(kappa)) = min_i v(kappa_i(gamma_i) - 1) over topological generators
// 1+q per Z_p-factor; region per the p-odd (<1) / p=2 (<3) cut.
std::pair<WeightRegion, ExtRat> classify_weight(const LocallyAlgebraicWeight& kappa);

// Component tag: restriction of the weight character to the torsion subgroup,
// as (order, exponent) pairs over a canonical torsion generator list.
using ComponentTag = std::vector<std::pair<long, long>>;
ComponentTag component_of(const LocallyAlgebraicWeight& kappa);

}  // namespace hmf

#endif
