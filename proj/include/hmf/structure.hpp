#ifndef HMF_STRUCTURE_HPP
#define HMF_STRUCTURE_HPP

#include "hmf/slopes.hpp"

namespace hmf {

// Seed family B(t) for the slope-generation recipe. Split examples are
// t-independent (Single); the inert example keys on (t1 - t2) mod 3 by
// default (the table-consistent assignment; the mod-6 text reading is also
// expressible by choosing mod = 6 and six seed slots).
struct SeedMap {
  enum Keying { Single, DiffMod } keying = Single;
  long mod = 1;
  std::vector<SMSet> seeds;

  const SMSet& at(long t1, long t2) const {
    if (keying == Single) return seeds.at(0);
    long c = ((t1 - t2) % mod + mod) % mod;
    return seeds.at((size_t)c);
  }
};

// union over t in Z_{>=0}^2 of B(t) + l(t), keeping pairs with slope <= bound
SMSet generate_conjectured(const SeedMap& seed, const ExtRat& bound);

// union over the classical box t_i in [0, k_i - 2]
SMSet classical_prediction(const SeedMap& seed, const std::vector<long>& k);

// Atkin-Lehner symmetry ------------------------------------------------------

struct ALReport {
  bool symmetric = false;
  ExtRat centre;
  std::vector<std::pair<ExtRat, long>> violations;  // slope, unmatched multiplicity
};

// pairing alpha <-> centre - alpha on the multiset
ALReport al_check(const SMSet& sm, const ExtRat& centre);

// centre of the pairing for the (normalized) operator given by word:
// sum_{P in word, distinct} f_P (k0 - 1) - 2 v_P(kappa)
ExtRat al_centre(const LocallyAlgebraicWeight& kappa, const PLevelRef& pl,
                 const std::vector<int>& op_word);

// Partial-slope grids ---------------------------------------------------------

struct PartialGrid {
  std::vector<ExtRat> xs, ys;  // U_P1 (horizontal) and U_P2 (vertical) slopes
  std::vector<long> mult;      // row-major: mult[row * xs.size() + col]
  bool unique = false;
  long kernel_dim = 0;

  long at(size_t row, size_t col) const { return mult[row * xs.size() + col]; }
  long total() const {
    long t = 0;
    for (long m : mult) t += m;
    return t;
  }
};

struct InfeasibleGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// constraints: the two axis multisets, plus slope multisets of
// U_P1^a U_P2^b for extra (a, b) pairs, plus central AL symmetry.
PartialGrid partial_grid_solve(const SMSet& u1, const SMSet& u2,
                               const std::vector<std::pair<std::pair<long, long>, SMSet>>& powers,
                               bool al_symmetry);

// Overconvergent partial-slope recovery: products[n] = slopes of U_p U_P^n.
// Returns the stabilized union of T(s); throws if no stabilization.
struct NoStabilization : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::vector<ExtRat> recover_partial_slopes(const std::vector<SMSet>& products);

// Arithmetic-progression structure --------------------------------------------

struct APReport {
  bool consistent = false;
  ExtRat delta;  // common difference of the ladder grid
  // per residue class: start value and the count increments; empty if failed
  std::vector<std::pair<ExtRat, std::vector<long>>> ladders;
  std::string witness;  // human-readable failure point
};

APReport ap_detect(const SMSet& sm);

// comparison helpers -----------------------------------------------------------

// multiset equality of the prefixes with slope <= bound
bool smset_prefix_equal(const SMSet& a, const SMSet& b, const ExtRat& bound);

// componentwise multiplicity <= (a inside b)
bool smset_submultiset(const SMSet& a, const SMSet& b);

}  // namespace hmf

#endif
