#ifndef HMF_CACHE_HPP
#define HMF_CACHE_HPP

#include "hmf/assemble.hpp"

namespace hmf {

struct CacheVersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HashMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Provenance hash of the inputs that determine Hecke data byte-for-byte.
uint64_t provenance_hash(const Order& O, const LevelData& level, long digits);

struct HeckeCacheData {
  long h = 0;
  bool sufficiently_small = true;
  std::vector<long> stab_orders;
  std::vector<HeckeLocalData> per_prime;
};

// Self-describing binary container; byte-stable round trip.
void cache_save(const std::string& path, const Order& O, const LevelData& level, long digits,
                const ClassSet& cs, const std::vector<HeckeLocalData>& per_prime);

HeckeCacheData cache_load(const std::string& path, const Order& O, const LevelData& level,
                          long digits);

// Assembled-matrix dump (resume long runs at the charpoly stage).
void matrix_save(const std::string& path, const ApproxOperatorMatrix& A);
ApproxOperatorMatrix matrix_load(const std::string& path, const PLevelRef& pl,
                                 const LocallyAlgebraicWeight& kappa);

}  // namespace hmf

#endif
