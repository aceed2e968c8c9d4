#include "hmf/structure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace hmf {

namespace {

struct RatKey {
  long num, den;
  RatKey(const ExtRat& e) : num(e.num), den(e.den) {
    if (!e.finite()) throw std::invalid_argument("RatKey: non-finite slope");
  }
  bool operator<(const RatKey& o) const {
    return (__int128)num * o.den < (__int128)o.num * den;
  }
};

SMSet from_map(const std::map<RatKey, long>& m) {
  SMSet s;
  for (auto& [k, v] : m)
    if (v != 0) s.pairs.push_back({ExtRat(k.num, k.den), v, true});
  return s;
}

}  // namespace

SMSet generate_conjectured(const SeedMap& seed, const ExtRat& bound) {
  std::map<RatKey, long> acc;
  long lmax = bound.finite() ? bound.num / bound.den : 0;
  if (!bound.finite()) throw std::invalid_argument("generate_conjectured: finite bound required");
  for (long l = 0; l <= lmax; l++)
    for (long t1 = 0; t1 <= l; t1++) {
      long t2 = l - t1;
      const SMSet& B = seed.at(t1, t2);
      for (auto& p : B.pairs) {
        ExtRat s = p.slope + ExtRat(l);
        if (s <= bound) acc[RatKey(s)] += p.mult;
      }
    }
  return from_map(acc);
}

SMSet classical_prediction(const SeedMap& seed, const std::vector<long>& k) {
  if (k.size() != 2) throw std::invalid_argument("classical_prediction: two weights expected");
  std::map<RatKey, long> acc;
  for (long t1 = 0; t1 <= k[0] - 2; t1++)
    for (long t2 = 0; t2 <= k[1] - 2; t2++) {
      const SMSet& B = seed.at(t1, t2);
      for (auto& p : B.pairs) acc[RatKey(p.slope + ExtRat(t1 + t2))] += p.mult;
    }
  return from_map(acc);
}

ALReport al_check(const SMSet& sm, const ExtRat& centre) {
  ALReport rep;
  rep.centre = centre;
  rep.symmetric = true;
  std::map<RatKey, long> m;
  for (auto& p : sm.pairs) m[RatKey(p.slope)] = p.mult;
  for (auto& p : sm.pairs) {
    ExtRat mirror = centre - p.slope;
    long other = 0;
    auto it = m.find(RatKey(mirror));
    if (it != m.end()) other = it->second;
    if (other != p.mult) {
      rep.symmetric = false;
      rep.violations.push_back({p.slope, p.mult - other});
    }
  }
  return rep;
}

ExtRat al_centre(const LocallyAlgebraicWeight& kappa, const PLevelRef& pl,
                 const std::vector<int>& op_word) {
  long k0 = *std::max_element(kappa.kt.k.begin(), kappa.kt.k.end());
  std::vector<int> primes = op_word;
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  long fsum = 0, vsum = 0;
  for (int pi : primes) {
    fsum += pl->prime(pi).f;
    for (int v = 0; v < 2; v++) {
      int comp = pl->split.split ? v : 0;
      if (comp == pi) vsum += kappa.kt.v[(size_t)v];
    }
  }
  return ExtRat(fsum * (k0 - 1) - 2 * vsum);
}

namespace {

// exact rational linear solve: returns particular solution + kernel basis
struct LinSolve {
  bool feasible = true;
  std::vector<Rat> particular;
  std::vector<std::vector<Rat>> kernel;
};

LinSolve solve_rational(std::vector<std::vector<Rat>> A, std::vector<Rat> rhs, size_t nvar) {
  LinSolve out;
  size_t rows = A.size();
  std::vector<long> pivot_of_row;
  size_t rank = 0;
  for (size_t col = 0; col < nvar && rank < rows; col++) {
    size_t piv = rank;
    while (piv < rows && A[piv][col].is_zero()) piv++;
    if (piv == rows) continue;
    std::swap(A[rank], A[piv]);
    std::swap(rhs[rank], rhs[piv]);
    Rat inv = Rat(Int(1)) / A[rank][col];
    for (size_t c = col; c < nvar; c++) A[rank][c] *= inv;
    rhs[rank] *= inv;
    for (size_t r = 0; r < rows; r++)
      if (r != rank && !A[r][col].is_zero()) {
        Rat f = A[r][col];
        for (size_t c = col; c < nvar; c++) A[r][c] -= f * A[rank][c];
        rhs[r] -= f * rhs[rank];
      }
    pivot_of_row.push_back((long)col);
    rank++;
  }
  for (size_t r = rank; r < rows; r++)
    if (!rhs[r].is_zero()) {
      out.feasible = false;
      return out;
    }
  out.particular.assign(nvar, Rat(0));
  std::vector<bool> is_pivot(nvar, false);
  for (size_t r = 0; r < rank; r++) {
    out.particular[(size_t)pivot_of_row[r]] = rhs[r];
    is_pivot[(size_t)pivot_of_row[r]] = true;
  }
  for (size_t col = 0; col < nvar; col++) {
    if (is_pivot[col]) continue;
    std::vector<Rat> kv(nvar, Rat(0));
    kv[col] = Rat(1);
    for (size_t r = 0; r < rank; r++) kv[(size_t)pivot_of_row[r]] = -A[r][col];
    out.kernel.push_back(kv);
  }
  return out;
}

}  // namespace

PartialGrid partial_grid_solve(const SMSet& u1, const SMSet& u2,
                               const std::vector<std::pair<std::pair<long, long>, SMSet>>& powers,
                               bool al_symmetry) {
  PartialGrid G;
  for (auto& p : u1.pairs) G.xs.push_back(p.slope);
  for (auto& p : u2.pairs) G.ys.push_back(p.slope);
  const size_t nx = G.xs.size(), ny = G.ys.size();
  const size_t ncell = nx * ny;
  auto cell = [&](size_t row, size_t col) { return row * nx + col; };
  // fold the Atkin-Lehner symmetries (per-prime axis flips, hence also the
  // central one) into orbit variables up front
  std::vector<long> fold(ncell);
  size_t nvar = 0;
  {
    std::vector<long> tmp(ncell, -1);
    for (size_t r = 0; r < ny; r++)
      for (size_t c = 0; c < nx; c++) {
        size_t rep = cell(r, c);
        if (al_symmetry) {
          for (size_t rr : {r, ny - 1 - r})
            for (size_t cc : {c, nx - 1 - c}) rep = std::min(rep, cell(rr, cc));
        }
        if (tmp[rep] < 0) tmp[rep] = (long)nvar++;
        fold[cell(r, c)] = tmp[rep];
      }
  }
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> rhs;
  auto add_sum_eq = [&](const std::vector<size_t>& cells, long want) {
    std::vector<Rat> eq(nvar, Rat(0));
    for (size_t t : cells) eq[(size_t)fold[t]] += Rat(1);
    A.push_back(std::move(eq));
    rhs.push_back(Rat(want));
  };
  for (size_t c = 0; c < nx; c++) {
    std::vector<size_t> cells;
    for (size_t r = 0; r < ny; r++) cells.push_back(cell(r, c));
    add_sum_eq(cells, u1.pairs[c].mult);
  }
  for (size_t r = 0; r < ny; r++) {
    std::vector<size_t> cells;
    for (size_t c = 0; c < nx; c++) cells.push_back(cell(r, c));
    add_sum_eq(cells, u2.pairs[r].mult);
  }
  for (auto& [ab, sm] : powers) {
    std::map<RatKey, long> values;
    for (auto& p : sm.pairs) values[RatKey(p.slope)] = p.mult;
    std::map<RatKey, std::vector<size_t>> groups;
    for (size_t r = 0; r < ny; r++)
      for (size_t c = 0; c < nx; c++)
        groups[RatKey(G.xs[c] * ab.first + G.ys[r] * ab.second)].push_back(cell(r, c));
    for (auto& [key, cells] : groups) {
      long want = 0;
      auto it = values.find(key);
      if (it != values.end()) want = it->second;
      add_sum_eq(cells, want);
    }
    for (auto& [key, want] : values)
      if (!groups.count(key))
        throw InfeasibleGrid("partial_grid_solve: power multiset value outside the grid");
  }
  LinSolve sol = solve_rational(std::move(A), std::move(rhs), nvar);
  if (!sol.feasible) throw InfeasibleGrid("partial_grid_solve: inconsistent constraints");
  G.kernel_dim = (long)sol.kernel.size();
  G.unique = sol.kernel.empty();
  auto integral_nonneg = [&](const std::vector<Rat>& x) {
    for (auto& v : x)
      if (!v.is_integer() || v.sgn() < 0) return false;
    return true;
  };
  std::vector<Rat> x = sol.particular;
  if (!integral_nonneg(x)) {
    if (sol.kernel.empty()) throw InfeasibleGrid("partial_grid_solve: no nonnegative solution");
    // pruned search over integer kernel coefficients: once every kernel vector
    // touching a variable is assigned, that variable must be a nonneg integer
    const size_t kd = sol.kernel.size();
    long bound = 0;
    for (auto& p : u1.pairs) bound = std::max(bound, p.mult);
    for (auto& p : u2.pairs) bound = std::max(bound, p.mult);
    std::vector<long> last_touch(nvar, -1);
    for (size_t v = 0; v < nvar; v++)
      for (size_t t = 0; t < kd; t++)
        if (!sol.kernel[t][v].is_zero()) last_touch[v] = (long)t;
    std::vector<Rat> cur = sol.particular;
    std::vector<long> coef(kd, 0);
    bool found = false;
    long nodes = 0;
    std::function<void(size_t)> dfs = [&](size_t i) {
      if (found || ++nodes > 2000000) return;
      if (i == kd) {
        if (integral_nonneg(cur)) {
          x = cur;
          found = true;
        }
        return;
      }
      for (long cc = -bound; cc <= bound && !found; cc++) {
        coef[i] = cc;
        std::vector<Rat> save = cur;
        if (cc != 0)
          for (size_t v = 0; v < nvar; v++)
            if (!sol.kernel[i][v].is_zero()) cur[v] += sol.kernel[i][v] * Rat(cc);
        bool feas = true;
        for (size_t v = 0; v < nvar && feas; v++)
          if (last_touch[v] <= (long)i && (!cur[v].is_integer() || cur[v].sgn() < 0)) feas = false;
        if (feas) dfs(i + 1);
        cur = std::move(save);
      }
    };
    dfs(0);
    if (!found)
      throw InfeasibleGrid("partial_grid_solve: no nonnegative integer point found (kernel dim " +
                           std::to_string(kd) + ")");
  }
  G.mult.assign(ncell, 0);
  for (size_t r = 0; r < ny; r++)
    for (size_t c = 0; c < nx; c++) G.mult[cell(r, c)] = x[(size_t)fold[cell(r, c)]].num().to_long();
  return G;
}

std::vector<ExtRat> recover_partial_slopes(const std::vector<SMSet>& products) {
  if (products.size() < 3)
    throw std::invalid_argument("recover_partial_slopes: need powers n = 0, 1, 2 at least");
  std::vector<ExtRat> out;
  for (auto& sp : products[0].pairs) {
    ExtRat s = sp.slope;
    std::vector<ExtRat> inter;
    bool have = false, stable = false;
    for (size_t n = 1; n < products.size() && !stable; n++) {
      std::vector<ExtRat> cand;
      for (auto& tp : products[n].pairs) {
        ExtRat u = (tp.slope - s) / (long)n;
        if (!(u < ExtRat(0))) cand.push_back(u);
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      if (!have) {
        inter = cand;
        have = true;
        continue;
      }
      std::vector<ExtRat> merged;
      std::set_intersection(inter.begin(), inter.end(), cand.begin(), cand.end(),
                            std::back_inserter(merged));
      stable = merged == inter;
      inter = std::move(merged);
    }
    if (!stable)
      throw NoStabilization("recover_partial_slopes: T(" + s.str() + ") did not stabilize");
    for (auto& u : inter) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// A union of arithmetic progressions with common difference delta, each
// running uninterrupted once started, is a suffix-closed subset of the delta
// grid. With delta = the grid gcd of the observed values, consistency is
// exactly "no hole between the smallest and largest observed value".
APReport ap_detect(const SMSet& sm) {
  APReport rep;
  if (sm.pairs.size() < 2) {
    rep.consistent = true;
    rep.delta = ExtRat(1);
    if (!sm.pairs.empty()) rep.ladders.push_back({sm.pairs[0].slope, {sm.pairs[0].mult}});
    return rep;
  }
  long D = 1;
  for (auto& p : sm.pairs) D = std::lcm(D, p.slope.den);
  long g = 0;
  long base = sm.pairs[0].slope.num * (D / sm.pairs[0].slope.den);
  for (auto& p : sm.pairs) {
    long scaled = p.slope.num * (D / p.slope.den) - base;
    g = std::gcd(g, scaled < 0 ? -scaled : scaled);
  }
  if (g == 0) g = D;
  rep.delta = ExtRat(g, D);
  std::map<long, long> steps;  // grid step -> multiplicity
  for (auto& p : sm.pairs) steps[(p.slope.num * (D / p.slope.den) - base) / g] = p.mult;
  rep.consistent = true;
  long first = steps.begin()->first, last = steps.rbegin()->first;
  std::vector<long> profile;
  for (long k = first; k <= last; k++) {
    auto it = steps.find(k);
    long cur = it == steps.end() ? 0 : it->second;
    if (cur == 0 && rep.consistent) {
      rep.consistent = false;
      ExtRat where(base + k * g, D);
      rep.witness = "grid hole at slope " + where.str() + " (difference " + rep.delta.str() + ")";
    }
    profile.push_back(cur);
  }
  if (rep.consistent) rep.ladders.push_back({ExtRat(base + first * g, D), profile});
  return rep;
}

bool smset_prefix_equal(const SMSet& a, const SMSet& b, const ExtRat& bound) {
  size_t i = 0, j = 0;
  while (true) {
    while (i < a.pairs.size() && bound < a.pairs[i].slope) i = a.pairs.size();
    while (j < b.pairs.size() && bound < b.pairs[j].slope) j = b.pairs.size();
    bool ae = i >= a.pairs.size(), be = j >= b.pairs.size();
    if (ae && be) return true;
    if (ae != be) return false;
    if (!(a.pairs[i].slope == b.pairs[j].slope) || a.pairs[i].mult != b.pairs[j].mult) return false;
    i++;
    j++;
  }
}

bool smset_submultiset(const SMSet& a, const SMSet& b) {
  std::map<RatKey, long> m;
  for (auto& p : b.pairs) m[RatKey(p.slope)] = p.mult;
  for (auto& p : a.pairs) {
    auto it = m.find(RatKey(p.slope));
    if (it == m.end() || it->second < p.mult) return false;
  }
  return true;
}

}  // namespace hmf
