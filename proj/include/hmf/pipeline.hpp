#ifndef HMF_PIPELINE_HPP
#define HMF_PIPELINE_HPP

#include "hmf/cache.hpp"
#include "hmf/structure.hpp"

namespace hmf {

struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightSpec {
  std::vector<long> k{2, 2};
  long tau_power = 0;
  bool auto_char = true;                   // psi_r matched to the parity of r(k)
  long char_m = 1;                         // explicit character: value order ...
  std::vector<std::vector<long>> char_exps;  // ... and exponents per factor/generator
};

struct RunConfig {
  long d = 13;
  long p = 3;
  int s = 2;
  std::vector<std::pair<long, int>> aux;  // (q, split label); label 1 for inert q
  std::vector<WeightSpec> weights;
  std::vector<std::string> ops{"Up"};
  std::vector<long> Rs{0};  // monomials per summand; 0 = classical subspace
  ExtRat slope_bound = ExtRat(5);
  long precision = 0;  // p-digit override; 0 = adaptive
  std::string cache_dir;
  std::string out_dir;
  std::string format = "jsonl";
  bool normalize = true;
  bool verbatim_inert = false;
  int nthreads = 0;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

struct SlopeRecord {
  std::string weight;
  std::string op;
  long R = 0;  // 0 = classical
  long n = 0;
  long precision_digits = 0;
  SMSet slopes;
  bool hodge_ok = true;
  std::string region;  // centre / quasi-boundary, with val_p(w(kappa))
  double seconds = 0;
};

struct SlopeReport {
  std::vector<SlopeRecord> records;
};

// Shared machinery for one (field, level): order, class set, Theta data.
struct Session {
  RunConfig cfg;
  Order O;
  PLevelRef pl;
  LevelData level;
  long digits = 0;
  bool sufficiently_small = true;
  long h = 0;
  std::vector<HeckeLocalData> prime_data;
  std::unique_ptr<HeckeContext> H;  // present when computed fresh (not cache)

  LocallyAlgebraicWeight weight(const WeightSpec& ws) const;
  HeckeLocalData op_data(const std::string& op) const;
};

// digits = p-adic digits to carry in Theta matrices (0 = modest default).
Session make_session(const RunConfig& cfg, long digits = 0);

std::vector<int> parse_op_word(const std::string& op, int nfac);

// adaptive p-digit requirement for certifying slopes <= bound on an n x n
// truncation whose predicted slope multiset is `pred`
long precision_for(const SMSet& pred, const ExtRat& bound, long n);

// full pipeline per the config (assembles, takes slopes, compares to Hodge)
SlopeReport run(const RunConfig& cfg);

// classical slope multiset of one weight/operator (exact)
SMSet classical_slopes(Session& S, const LocallyAlgebraicWeight& kappa, const std::string& op);

// overconvergent truncation slopes with adaptive precision; the returned
// record holds the certified-prefix bookkeeping
SlopeRecord overconvergent_slopes(Session& S, const LocallyAlgebraicWeight& kappa,
                                  const std::string& op, long R, const ExtRat& bound);

// seeds = classical multisets at the smallest classical weight, twisted by
// tau^c for c = 0..mod-1 (DiffMod keying), or just c = 0 (Single)
SeedMap seed_from_smallest_classical(Session& S, SeedMap::Keying keying, long mod);

}  // namespace hmf

#endif
