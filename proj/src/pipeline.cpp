#include "hmf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hmf/presets.hpp"

namespace hmf {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::vector<long> parse_longs(const std::string& s, char sep = ',') {
  std::vector<long> out;
  std::string cur;
  for (char c : s + std::string(1, sep)) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(std::stol(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "field")
    cfg.d = std::stol(value);
  else if (key == "prime")
    cfg.p = std::stol(value);
  else if (key == "wild")
    cfg.s = (int)std::stol(value);
  else if (key == "aux") {
    auto v = parse_longs(value, ' ');
    if (v.empty()) throw ConfigInvalid("aux: expected 'q [label]'");
    cfg.aux.push_back({v[0], v.size() > 1 ? (int)v[1] : 1});
  } else if (key == "weight") {
    // "k1,k2 [tau-power]"
    std::istringstream ss(value);
    std::string ks;
    ss >> ks;
    WeightSpec w;
    w.k = parse_longs(ks);
    if (w.k.size() != 2) throw ConfigInvalid("weight: expected k1,k2");
    long tp = 0;
    if (ss >> tp) w.tau_power = tp;
    cfg.weights.push_back(w);
  } else if (key == "charx") {
    // explicit character for the last weight: "m e11,e12 [e21,e22]"
    if (cfg.weights.empty()) throw ConfigInvalid("charx: no weight to attach to");
    std::istringstream ss(value);
    long m = 0;
    ss >> m;
    if (m < 1) throw ConfigInvalid("charx: bad value order");
    WeightSpec& w = cfg.weights.back();
    w.auto_char = false;
    w.char_m = m;
    std::string tok;
    while (ss >> tok) w.char_exps.push_back(parse_longs(tok));
  } else if (key == "op")
    cfg.ops = {value};
  else if (key == "op+")
    cfg.ops.push_back(value);
  else if (key == "R")
    cfg.Rs = parse_longs(value);
  else if (key == "slope-bound") {
    auto slash = value.find('/');
    cfg.slope_bound = slash == std::string::npos
                          ? ExtRat(std::stol(value))
                          : ExtRat(std::stol(value.substr(0, slash)),
                                   std::stol(value.substr(slash + 1)));
  } else if (key == "precision")
    cfg.precision = std::stol(value);
  else if (key == "cache-dir")
    cfg.cache_dir = value;
  else if (key == "out")
    cfg.out_dir = value;
  else if (key == "format")
    cfg.format = value;
  else if (key == "normalize")
    cfg.normalize = value != "0" && value != "false";
  else if (key == "verbatim-inert")
    cfg.verbatim_inert = value == "1" || value == "true";
  else if (key == "threads")
    cfg.nthreads = (int)std::stol(value);
  else
    throw ConfigInvalid("unknown config key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config " + path);
  RunConfig cfg;
  cfg.ops.clear();
  cfg.Rs.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos) throw ConfigInvalid("bad config line: " + line);
    std::string key = line.substr(0, sp);
    std::string value = line.substr(sp + 1);
    if (key == "op" && !cfg.ops.empty()) key = "op+";
    apply_config_line(cfg, key, value);
  }
  if (cfg.ops.empty()) cfg.ops = {"Up"};
  if (cfg.Rs.empty()) cfg.Rs = {0};
  return cfg;
}

std::vector<int> parse_op_word(const std::string& op, int nfac) {
  // "Up", "Up1", "Up2", products like "Up1^2*Up2" (or without '*')
  std::vector<int> word;
  size_t i = 0;
  while (i < op.size()) {
    if (op[i] == '*' || op[i] == ' ') {
      i++;
      continue;
    }
    if (op.compare(i, 2, "Up") != 0) throw ConfigInvalid("bad operator: " + op);
    i += 2;
    int prime = -1;  // -1 = all primes
    if (i < op.size() && (op[i] == '1' || op[i] == '2')) {
      prime = op[i] - '1';
      i++;
    }
    long e = 1;
    if (i < op.size() && op[i] == '^') {
      size_t j = i + 1;
      std::string num;
      while (j < op.size() && isdigit((unsigned char)op[j])) num += op[j++];
      if (num.empty()) throw ConfigInvalid("bad exponent in " + op);
      e = std::stol(num);
      i = j;
    }
    for (long t = 0; t < e; t++) {
      if (prime < 0)
        for (int l = 0; l < nfac; l++) word.push_back(l);
      else
        word.push_back(prime);
    }
  }
  if (word.empty()) throw ConfigInvalid("empty operator: " + op);
  for (int w : word)
    if (w >= nfac) throw ConfigInvalid("operator names a prime that does not exist: " + op);
  return word;
}

LocallyAlgebraicWeight Session::weight(const WeightSpec& ws) const {
  WeightTuple kt = weight_tuple_from_k(ws.k);
  FiniteCharacter psi;
  if (ws.auto_char) {
    psi = make_psi_r(pl, kt.r);
  } else {
    psi.L = pl;
    psi.m = ws.char_m;
    psi.a = ws.char_exps;
  }
  std::string nm = "[" + std::to_string(ws.k[0]) + "," + std::to_string(ws.k[1]) + "]psi" +
                   std::to_string(((kt.r % 2) + 2) % 2 == 0 ? 2 : 1);
  auto kappa = make_weight(pl, ws.k, psi, nm);
  if (ws.tau_power != 0) kappa = tau_twist(kappa, ws.tau_power);
  return kappa;
}

HeckeLocalData Session::op_data(const std::string& op) const {
  auto word = parse_op_word(op, pl->nfac);
  if (!H && prime_data.empty()) throw std::logic_error("Session::op_data: no Theta data");
  HeckeLocalData out = prime_data.at((size_t)word[0]);
  for (size_t t = 1; t < word.size(); t++) {
    // composition only needs matrix products; the context argument is unused
    out = hecke_compose(*H, out, prime_data.at((size_t)word[t]));
  }
  return out;
}

Session make_session(const RunConfig& cfg, long digits) {
  Session S;
  S.cfg = cfg;
  S.O = preset_order(cfg.d);
  S.pl = PLevel::make(S.O.A.F, cfg.p, cfg.s);
  std::vector<LevelFactor> aux;
  for (auto& [q, label] : cfg.aux) {
    auto st = split_prime(S.O.A.F, q);
    if (!st.split && label != 1) throw ConfigInvalid("aux prime is inert; label must be 1");
    aux.push_back({label == 2 ? st.p2 : st.p1, 1});
  }
  S.level = LevelData::make(S.pl, aux);
  S.digits = digits > 0 ? digits : (cfg.precision > 0 ? cfg.precision : 64);

  std::string cache_path;
  if (!cfg.cache_dir.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  (unsigned long long)provenance_hash(S.O, S.level, S.digits));
    cache_path = cfg.cache_dir + "/hecke_" + buf + ".bin";
  }
  bool loaded = false;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    auto data = cache_load(cache_path, S.O, S.level, S.digits);
    S.h = data.h;
    S.sufficiently_small = data.sufficiently_small;
    S.prime_data = std::move(data.per_prime);
    loaded = true;
  }
  // class set and context are always rebuilt (cheap); Theta data reused
  S.H = std::make_unique<HeckeContext>(make_hecke_context(S.O, S.level, S.digits));
  S.sufficiently_small = S.H->cs.sufficiently_small;
  S.h = S.H->cs.h();
  if (!loaded) {
    for (int l = 0; l < S.pl->nfac; l++) S.prime_data.push_back(hecke_data(*S.H, l));
    if (!cache_path.empty())
      cache_save(cache_path, S.O, S.level, S.digits, S.H->cs, S.prime_data);
  }
  return S;
}

long precision_for(const SMSet& pred, const ExtRat& bound, long n) {
  double cum = 0;
  long count = 0;
  for (auto& p : pred.pairs)
    if (p.slope <= bound) {
      cum += p.slope.to_double() * (double)p.mult;
      count += p.mult;
    }
  double tail_slope = bound.to_double() + 1.0;
  double tail = count < n ? tail_slope * (double)(n - count) : 0.0;
  return (long)(cum + tail) + 20;
}

SMSet classical_slopes(Session& S, const LocallyAlgebraicWeight& kappa, const std::string& op) {
  HeckeLocalData data = S.op_data(op);
  // exact classical computation: all coefficient valuations below the cap
  long n = S.h;
  for (long ki : kappa.kt.k) n *= ki - 1;
  long k0 = *std::max_element(kappa.kt.k.begin(), kappa.kt.k.end());
  long slope_cap = 0;  // worst-case slope over the word, with multiplicity
  for (int w : data.op_word) slope_cap += S.pl->prime(w).f * (k0 - 1);
  long digits = n * slope_cap / 2 + 24;
  if (S.cfg.precision > 0) digits = S.cfg.precision;
  if (digits > S.digits) {
    Session big = make_session(S.cfg, digits + 8);
    return classical_slopes(big, kappa, op);
  }
  Ctx ctx = make_run_context(S.pl, digits);
  AssemblyOptions opt;
  opt.normalize = S.cfg.normalize;
  opt.verbatim_inert = S.cfg.verbatim_inert;
  opt.nthreads = S.cfg.nthreads;
  long R_env = 0;
  {
    // smallest Bi prefix containing the classical box
    long need = bi(kappa.kt.n[0], 0) + 1;
    need = std::max(need, bi(0, kappa.kt.n[1]) + 1);
    need = std::max(need, bi(kappa.kt.n[0], kappa.kt.n[1]) + 1);
    R_env = need;
  }
  auto basis = subspace_basis(SubspaceSpec::classical(kappa.kt.n[0], kappa.kt.n[1]), R_env);
  auto A = assemble(data, kappa, basis, ctx, opt);
  if (A.n() != n) throw std::logic_error("classical_slopes: dimension mismatch");
  auto np = matrix_slopes(A, S.cfg.nthreads);
  if (!(np.slopes.trust == ExtRat::inf()))
    throw PrecisionTooLowError("classical_slopes: polygon not fully certified; raise precision");
  return np.slopes;
}

SlopeRecord overconvergent_slopes(Session& S, const LocallyAlgebraicWeight& kappa,
                                  const std::string& op, long R, const ExtRat& bound) {
  SlopeRecord rec;
  rec.weight = kappa.name;
  rec.op = op;
  rec.R = R;
  double t0 = now_seconds();

  // predicted multiset: the weight's own classical multiset fed through the
  // slope-generation recipe (heuristic input only; certification is post hoc)
  SMSet seed_sm = classical_slopes(S, kappa, op);
  SeedMap seed;
  seed.keying = SeedMap::Single;
  // scale the classical multiset of the full weight down to a single-cell
  // seed: use the smallest-weight classical set directly when available
  seed.seeds = {seed_sm};
  SMSet pred = generate_conjectured(seed, bound + ExtRat(1));

  long n = R * S.h;
  long digits = S.cfg.precision > 0 ? S.cfg.precision : precision_for(pred, bound, n);
  for (int attempt = 0;; attempt++) {
    Session* sess = &S;
    Session big;
    if (digits + 8 > S.digits) {
      big = make_session(S.cfg, digits + 8);
      sess = &big;
    }
    Ctx ctx = make_run_context(sess->pl, digits);
    AssemblyOptions opt;
    opt.normalize = S.cfg.normalize;
    opt.verbatim_inert = S.cfg.verbatim_inert;
    opt.nthreads = S.cfg.nthreads;
    // assembled-matrix dump: long runs resume at the char-poly stage
    std::string dump_path;
    if (!S.cfg.cache_dir.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%016llx",
                    (unsigned long long)provenance_hash(sess->O, sess->level, digits));
      std::filesystem::create_directories(S.cfg.cache_dir);
      dump_path = S.cfg.cache_dir + "/matrix_" + buf + "_" + kappa.name + "_" + op + "_R" +
                  std::to_string(R) + ".bin";
      for (auto& c : dump_path)
        if (c == '[' || c == ']' || c == ',' || c == '*' || c == '^') c = '_';
    }
    ApproxOperatorMatrix A;
    bool loaded = false;
    if (!dump_path.empty() && std::filesystem::exists(dump_path)) {
      try {
        A = matrix_load(dump_path, sess->pl, kappa);
        loaded = true;
      } catch (const std::exception&) {
        loaded = false;
      }
    }
    if (!loaded) {
      HeckeLocalData data = sess->op_data(op);
      A = assemble_truncation(data, kappa, R, ctx, opt);
      if (!dump_path.empty()) matrix_save(dump_path, A);
    }
    auto np = matrix_slopes(A, S.cfg.nthreads);
    rec.n = A.n();
    rec.precision_digits = digits;
    rec.slopes = np.slopes;
    rec.hodge_ok = verify_np_above_hodge(np, hodge_bound(S.h, 2, A.n() + 1));
    if (bound < np.slopes.trust || S.cfg.precision > 0 || attempt >= 2) break;
    digits = digits * 3 / 2 + 16;
  }
  rec.seconds = now_seconds() - t0;
  return rec;
}

namespace {

struct EmptySmallestWeight : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lexicographic scan for the smallest honest classical weight whose component
// tag matches `target` (empty = no constraint)
LocallyAlgebraicWeight smallest_classical_weight(Session& S, const ComponentTag* target) {
  for (long k1 = 2; k1 <= 10; k1++)
    for (long k2 = 2; k2 <= 10; k2++) {
      std::vector<long> k{k1, k2};
      WeightTuple kt;
      try {
        kt = weight_tuple_from_k(k);
      } catch (const std::exception&) {
        continue;
      }
      FiniteCharacter psi;
      try {
        psi = make_psi_r(S.pl, kt.r);
      } catch (const std::exception&) {
        continue;
      }
      LocallyAlgebraicWeight kappa;
      try {
        kappa = make_weight(S.pl, k, psi);
      } catch (const std::exception&) {
        continue;
      }
      if (target && component_of(kappa) != *target) continue;
      return kappa;
    }
  throw EmptySmallestWeight("smallest_classical_weight: scan exhausted");
}

// leftover = union over `shifts` of (B + shift): recover B by peeling from the
// smallest slope
SMSet peel_shifted_union(SMSet leftover, std::vector<long> shifts) {
  std::sort(shifts.begin(), shifts.end());
  long count0 = 0;
  for (long s : shifts)
    if (s == shifts[0]) count0++;
  std::map<std::pair<long, long>, long> left;  // (num, den) -> mult
  for (auto& p : leftover.pairs) left[{p.slope.num, p.slope.den}] = p.mult;
  SMSet B;
  while (!left.empty()) {
    auto it = std::min_element(left.begin(), left.end(), [](auto& a, auto& b) {
      return (__int128)a.first.first * b.first.second < (__int128)b.first.first * a.first.second;
    });
    ExtRat s(it->first.first, it->first.second);
    long m = it->second;
    if (m % count0 != 0)
      throw std::runtime_error("seed deconvolution: multiplicity not divisible at " + s.str());
    long q = m / count0;
    ExtRat b = s - ExtRat(shifts[0]);
    B.pairs.push_back({b, q, true});
    for (long sh : shifts) {
      ExtRat v = b + ExtRat(sh);
      auto jt = left.find({v.num, v.den});
      if (jt == left.end() || jt->second < q)
        throw std::runtime_error("seed deconvolution: missing shifted copy at " + v.str());
      jt->second -= q;
      if (jt->second == 0) left.erase(jt);
    }
  }
  return B;
}

}  // namespace

SeedMap seed_from_smallest_classical(Session& S, SeedMap::Keying keying, long mod) {
  SeedMap seed;
  seed.keying = keying;
  seed.mod = keying == SeedMap::Single ? 1 : mod;
  long classes = keying == SeedMap::Single ? 1 : mod;
  seed.seeds.assign((size_t)classes, SMSet{});
  std::vector<bool> have((size_t)classes, false);

  // class 0: the smallest classical weight outright
  LocallyAlgebraicWeight pivot = smallest_classical_weight(S, nullptr);
  seed.seeds[0] = classical_slopes(S, pivot, "Up");
  have[0] = true;
  if (seed.seeds[0].total_mult() != S.h)
    throw std::runtime_error("seed_from_smallest_classical: class-0 seed total != h");
  if (classes == 1) return seed;

  for (long c = 1; c < classes; c++) {
    if (have[(size_t)c]) continue;
    // target component of the (formal) tau^c twist of the pivot
    ComponentTag target = component_of(tau_twist(pivot, c));
    // direct route: an honest twisted weight of the same size
    bool direct = false;
    try {
      LocallyAlgebraicWeight tw = tau_twist(pivot, c);
      if (check_nebentypus(tw.psi, tw.kt.r)) {
        seed.seeds[(size_t)c] = classical_slopes(S, tw, "Up");
        have[(size_t)c] = true;
        direct = true;
      }
    } catch (const std::exception&) {
    }
    if (direct) continue;
    // fallback: smallest honest weight of the target component, then remove
    // the box cells whose seed class is already known and peel the rest.
    // Paritious weights only reach even twist classes; odd ones are resolved
    // afterwards from their conjugate class.
    LocallyAlgebraicWeight kappa;
    try {
      kappa = smallest_classical_weight(S, &target);
    } catch (const EmptySmallestWeight&) {
      continue;
    }
    SMSet classical = classical_slopes(S, kappa, "Up");
    std::map<std::pair<long, long>, long> left;
    for (auto& p : classical.pairs) left[{p.slope.num, p.slope.den}] = p.mult;
    std::vector<long> unknown_shifts;
    std::vector<long> unknown_classes;
    for (long t1 = 0; t1 <= kappa.kt.k[0] - 2; t1++)
      for (long t2 = 0; t2 <= kappa.kt.k[1] - 2; t2++) {
        long cls = (((t1 - t2) % seed.mod) + seed.mod) % seed.mod;
        // a cell's own class is relative to this component's keying: the cell
        // (t1, t2) of kappa uses the seed of the pivot class c + (t1 - t2)
        long pivot_cls = (((c + t1 - t2) % seed.mod) + seed.mod) % seed.mod;
        (void)cls;
        if (have[(size_t)pivot_cls]) {
          for (auto& p : seed.seeds[(size_t)pivot_cls].pairs) {
            ExtRat v = p.slope + ExtRat(t1 + t2);
            auto jt = left.find({v.num, v.den});
            if (jt == left.end() || jt->second < p.mult)
              throw std::runtime_error("seed_from_smallest_classical: known cell does not embed");
            jt->second -= p.mult;
            if (jt->second == 0) left.erase(jt);
          }
        } else {
          unknown_shifts.push_back(t1 + t2);
          unknown_classes.push_back(pivot_cls);
        }
      }
    SMSet leftover;
    for (auto& [k, v] : left)
      if (v > 0) leftover.pairs.push_back({ExtRat(k.first, k.second), v, true});
    std::sort(leftover.pairs.begin(), leftover.pairs.end(),
              [](const SmPair& a, const SmPair& b) { return a.slope < b.slope; });
    SMSet B = peel_shifted_union(leftover, unknown_shifts);
    if (B.total_mult() != S.h)
      throw std::runtime_error("seed_from_smallest_classical: peeled seed total != h");
    for (long cls : unknown_classes)
      if (!have[(size_t)cls]) {
        seed.seeds[(size_t)cls] = B;
        have[(size_t)cls] = true;
      }
  }
  // unreachable odd classes inherit their Galois-conjugate twist's multiset
  for (long c = 1; c < classes; c++)
    if (!have[(size_t)c] && have[(size_t)(classes - c)]) {
      seed.seeds[(size_t)c] = seed.seeds[(size_t)(classes - c)];
      have[(size_t)c] = true;
    }
  for (long c = 0; c < classes; c++)
    if (!have[(size_t)c])
      throw EmptySmallestWeight("seed_from_smallest_classical: class " + std::to_string(c) +
                                " unresolved");
  return seed;
}

SlopeReport run(const RunConfig& cfg) {
  SlopeReport rep;
  if (cfg.weights.empty()) return rep;
  Session S = make_session(cfg);
  for (auto& ws : cfg.weights) {
    auto kappa = S.weight(ws);
    auto cls = classify_weight(kappa);
    std::string region = (cls.first == WeightRegion::QuasiBoundary ? "quasi-boundary " : "centre ") +
                         std::string("val=") + cls.second.str();
    for (auto& op : cfg.ops)
      for (long R : cfg.Rs) {
        if (R == 0) {
          SlopeRecord rec;
          rec.weight = kappa.name;
          rec.op = op;
          rec.R = 0;
          double t0 = now_seconds();
          rec.slopes = classical_slopes(S, kappa, op);
          long n = S.h;
          for (long ki : ws.k) n *= ki - 1;
          rec.n = n;
          rec.region = region;
          rec.seconds = now_seconds() - t0;
          rep.records.push_back(rec);
        } else {
          auto rec = overconvergent_slopes(S, kappa, op, R, cfg.slope_bound);
          rec.region = region;
          rep.records.push_back(rec);
        }
      }
  }
  return rep;
}

}  // namespace hmf
