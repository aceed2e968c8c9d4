// Command-line front end: builds Hecke data, computes slope tables, runs the
// structural checks, and emits json-lines / tsv / svg.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "hmf/emit.hpp"
#include "hmf/presets.hpp"

using namespace hmf;

namespace {

void parse_level(RunConfig& cfg, const std::string& level) {
  // "9" (p-power), "8*11b", "3*11a" ...
  std::string tok;
  std::vector<std::string> parts;
  for (char c : level + "*") {
    if (c == '*') {
      if (!tok.empty()) parts.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  cfg.aux.clear();
  bool have_p = false;
  for (auto& part : parts) {
    if (isalpha((unsigned char)part.back())) {
      int label = part.back() == 'b' ? 2 : 1;
      cfg.aux.push_back({std::stol(part.substr(0, part.size() - 1)), label});
      continue;
    }
    long v = std::stol(part);
    int s = 0;
    while (v % cfg.p == 0) {
      v /= cfg.p;
      s++;
    }
    if (v != 1 || s < 1)
      throw ConfigInvalid("level part " + part + " is not a power of the prime");
    cfg.s = s;
    have_p = true;
  }
  if (!have_p) throw ConfigInvalid("level must contain a positive power of p");
}

void add_run_flags(CLI::App* app, RunConfig& cfg, std::string& level, std::string& config_file,
                   std::vector<std::string>& weights, std::vector<std::string>& ops,
                   std::vector<long>& Rs, std::string& bound, std::string& charspec) {
  app->add_option("--config", config_file, "config file (key value lines)");
  app->add_option("--field", cfg.d, "square-free d of Q(sqrt d)");
  app->add_option("--prime", cfg.p, "rational prime p");
  app->add_option("--level", level, "level, e.g. 9 or 8*11b (p-power times auxiliary primes)");
  app->add_option("--weight", weights, "weight k1,k2 with optional tau twist k1,k2@t");

  app->add_option("--char", charspec,
                  "finite character: auto (default) or 'm e11,e12[ e21,e22]' exponents");
  app->add_option("--op", ops, "operator: Up, Up1, Up2, or products like Up1^2*Up2");
  app->add_option("--R", Rs, "monomials per summand (0 = classical subspace)");
  app->add_option("--slope-bound", bound, "certify slopes up to this bound (rational)");
  app->add_option("--precision", cfg.precision, "p-adic digits override (0 = adaptive)");
  app->add_option("--cache-dir", cfg.cache_dir, "Theta-data cache directory");
  app->add_option("--out", cfg.out_dir, "output directory");
  app->add_option("--format", cfg.format, "jsonl or tsv");
  app->add_option("--threads", cfg.nthreads, "worker threads");
  app->add_flag("--no-normalize", [&cfg](size_t) { cfg.normalize = false; },
                "skip the pi^{-v} operator normalization");
  app->add_flag("--verbatim-inert", cfg.verbatim_inert,
                "evaluate both infinite places without the Frobenius twist");
}

void finish_config(RunConfig& cfg, const std::string& level, const std::string& config_file,
                   const std::vector<std::string>& weights, const std::vector<std::string>& ops,
                   const std::vector<long>& Rs, const std::string& bound,
                   const std::string& charspec) {
  if (!config_file.empty()) cfg = parse_config_file(config_file);
  if (!level.empty()) parse_level(cfg, level);
  if (!weights.empty()) {
    cfg.weights.clear();
    for (auto& w : weights) {
      WeightSpec ws;
      auto at = w.find('@');
      std::string ks = at == std::string::npos ? w : w.substr(0, at);
      if (at != std::string::npos) ws.tau_power = std::stol(w.substr(at + 1));
      auto comma = ks.find(',');
      if (comma == std::string::npos) throw ConfigInvalid("weight must be k1,k2");
      ws.k = {std::stol(ks.substr(0, comma)), std::stol(ks.substr(comma + 1))};
      cfg.weights.push_back(ws);
    }
  }
  if (!charspec.empty() && charspec != "auto")
    for (auto& w : cfg.weights) {
      RunConfig tmp = cfg;
      tmp.weights = {w};
      apply_config_line(tmp, "charx", charspec);
      w = tmp.weights.back();
    }
  if (!ops.empty()) cfg.ops = ops;
  if (!Rs.empty()) cfg.Rs = Rs;
  if (!bound.empty()) {
    auto slash = bound.find('/');
    cfg.slope_bound = slash == std::string::npos
                          ? ExtRat(std::stol(bound))
                          : ExtRat(std::stol(bound.substr(0, slash)),
                                   std::stol(bound.substr(slash + 1)));
  }
}

void print_report(const SlopeReport& rep) {
  for (auto& rec : rep.records) {
    std::cout << rec.weight << "  " << rec.op;
    if (rec.R > 0)
      std::cout << "  R=" << rec.R << " (n=" << rec.n << ", " << rec.precision_digits
                << " digits, trust<" << rec.slopes.trust.str() << ")";
    else
      std::cout << "  classical (n=" << rec.n << ")";
    std::cout << "\n  " << rec.slopes.str() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slopes of U_p operators on quaternionic Hilbert modular forms"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string level, config_file, bound, charspec;
  std::vector<std::string> weights, ops;
  std::vector<long> Rs;

  auto* hecke = app.add_subcommand("hecke", "build and cache class set + Theta data");
  add_run_flags(hecke, cfg, level, config_file, weights, ops, Rs, bound, charspec);

  auto* slopes = app.add_subcommand("slopes", "assemble truncations and take Newton slopes");
  add_run_flags(slopes, cfg, level, config_file, weights, ops, Rs, bound, charspec);

  auto* classical = app.add_subcommand("classical", "slopes on the classical subspace");
  add_run_flags(classical, cfg, level, config_file, weights, ops, Rs, bound, charspec);

  auto* conjecture = app.add_subcommand("conjecture", "seed slopes and the generated prediction");
  add_run_flags(conjecture, cfg, level, config_file, weights, ops, Rs, bound, charspec);
  long conj_mod = 0;
  conjecture->add_option("--seed-mod", conj_mod, "seed keying modulus (0 = single seed)");

  auto* grid = app.add_subcommand("grid", "partial-slope grid on the classical subspace");
  add_run_flags(grid, cfg, level, config_file, weights, ops, Rs, bound, charspec);

  auto* hodge = app.add_subcommand("hodge", "lower-bound polygon vertices");
  long hodge_h = 12, hodge_count = 100;
  int hodge_g = 2;
  hodge->add_option("--class-number", hodge_h, "h (block count)");
  hodge->add_option("--degree", hodge_g, "g (number of variables)");
  hodge->add_option("--count", hodge_count, "number of slopes to cover");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(hodge)) {
      auto hb = hodge_bound(hodge_h, hodge_g, hodge_count);
      for (auto& [k, v] : hb.vertices) std::cout << "(" << k << "," << v << ")\n";
      return 0;
    }
    finish_config(cfg, level, config_file, weights, ops, Rs, bound, charspec);

    if (app.got_subcommand(hecke)) {
      if (cfg.cache_dir.empty()) cfg.cache_dir = "cache";
      Session S = make_session(cfg, cfg.precision > 0 ? cfg.precision : 64);
      std::cout << "level " << S.level.str() << ": h = " << S.h
                << (S.sufficiently_small ? " (sufficiently small)" : " (NOT sufficiently small)")
                << ", Theta data cached under " << cfg.cache_dir << "\n";
      return 0;
    }
    if (app.got_subcommand(classical)) cfg.Rs = {0};
    if (app.got_subcommand(slopes) || app.got_subcommand(classical)) {
      SlopeReport rep = run(cfg);
      print_report(rep);
      if (!cfg.out_dir.empty()) emit_report(rep, cfg.format, cfg.out_dir);
      return 0;
    }
    if (app.got_subcommand(conjecture)) {
      Session S = make_session(cfg);
      SeedMap seed = seed_from_smallest_classical(
          S, conj_mod > 0 ? SeedMap::DiffMod : SeedMap::Single, conj_mod);
      for (size_t c = 0; c < seed.seeds.size(); c++)
        std::cout << "seed[" << c << "] = " << seed.seeds[c].str() << "\n";
      auto gen = generate_conjectured(seed, cfg.slope_bound);
      std::cout << "generated (bound " << cfg.slope_bound.str() << "): " << gen.str() << "\n";
      for (auto& ws : cfg.weights) {
        auto pred = classical_prediction(seed, ws.k);
        std::cout << "classical prediction [" << ws.k[0] << "," << ws.k[1] << "]: " << pred.str()
                  << "\n";
      }
      return 0;
    }
    if (app.got_subcommand(grid)) {
      if (cfg.weights.empty()) throw ConfigInvalid("grid: need a weight");
      Session S = make_session(cfg);
      if (S.pl->nfac != 2) throw ConfigInvalid("grid: split primes only");
      auto kappa = S.weight(cfg.weights[0]);
      auto u1 = classical_slopes(S, kappa, "Up1");
      auto u2 = classical_slopes(S, kappa, "Up2");
      auto up = classical_slopes(S, kappa, "Up");
      std::vector<std::pair<std::pair<long, long>, SMSet>> powers{{{1, 1}, up}};
      PartialGrid G = partial_grid_solve(u1, u2, powers, true);
      if (!G.unique) {
        auto up21 = classical_slopes(S, kappa, "Up1*Up2^2");
        powers.push_back({{1, 2}, up21});
        G = partial_grid_solve(u1, u2, powers, true);
      }
      std::cout << "grid " << kappa.name << (G.unique ? " (unique)" : " (one vertex)") << "\n";
      for (size_t r = G.ys.size(); r-- > 0;) {
        for (size_t c = 0; c < G.xs.size(); c++) std::cout << G.at(r, c) << "\t";
        std::cout << "\n";
      }
      if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        emit_svg_grid(G, kappa.name, cfg.out_dir + "/grid.svg");
        std::cout << "wrote " << cfg.out_dir << "/grid.svg\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
