#include <algorithm>
#include <sstream>

#include "hmf/slopes.hpp"

namespace hmf {

namespace {

// (v2-v1)/(k2-k1) <= (v3-v2)/(k3-k2), exact; infinite values compare above all
bool turn_keeps_lower(long k1, const ExtRat& v1, long k2, const ExtRat& v2, long k3,
                      const ExtRat& v3) {
  // keep the middle point iff slope(1->2) < slope(2->3):
  // (v2-v1)(k3-k2) < (v3-v2)(k2-k1) over common denominators
  long d12 = v1.den * v2.den;
  long d23 = v2.den * v3.den;
  __int128 l = ((__int128)v2.num * v1.den - (__int128)v1.num * v2.den) * (k3 - k2) * d23;
  __int128 r = ((__int128)v3.num * v2.den - (__int128)v2.num * v3.den) * (k2 - k1) * d12;
  return l < r;
}

std::vector<std::pair<long, ExtRat>> lower_hull(const std::vector<std::pair<long, ExtRat>>& pts) {
  std::vector<std::pair<long, ExtRat>> hull;
  for (auto& p : pts) {
    while (hull.size() >= 2 &&
           !turn_keeps_lower(hull[hull.size() - 2].first, hull[hull.size() - 2].second,
                             hull.back().first, hull.back().second, p.first, p.second))
      hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

// Eigenvalue valuations are the negated hull slopes; the segment ending at
// k = n carries the smallest ones, so walk the hull right to left.
SMSet slopes_from_hull(const std::vector<std::pair<long, ExtRat>>& hull) {
  SMSet s;
  for (size_t t = hull.size(); t-- > 1;) {
    long dk = hull[t].first - hull[t - 1].first;
    ExtRat dv = hull[t - 1].second - hull[t].second;
    ExtRat slope = dv / dk;
    if (!s.pairs.empty() && s.pairs.back().slope == slope)
      s.pairs.back().mult += dk;
    else
      s.pairs.push_back({slope, dk, true});
  }
  return s;
}

}  // namespace

std::string SMSet::str() const {
  std::string out;
  for (auto& p : pairs) {
    if (!out.empty()) out += ", ";
    out += "(" + p.slope.str() + "," + std::to_string(p.mult) + ")";
    if (!p.certified) out += "?";
  }
  return out;
}

SMSet SMSet::certified_prefix() const {
  SMSet s;
  s.trust = trust;
  for (auto& p : pairs)
    if (p.certified) s.pairs.push_back(p);
  return s;
}

SMSet parse_smset(const std::string& text) {
  SMSet s;
  std::string t;
  for (char c : text)
    if (!isspace((unsigned char)c)) t += c;
  size_t pos = 0;
  while (pos < t.size()) {
    if (t[pos] == ',' ) { pos++; continue; }
    if (t[pos] != '(') throw std::invalid_argument("parse_smset: expected ( at " + t.substr(pos));
    size_t close = t.find(')', pos);
    if (close == std::string::npos) throw std::invalid_argument("parse_smset: unbalanced");
    std::string body = t.substr(pos + 1, close - pos - 1);
    size_t comma = body.rfind(',');
    if (comma == std::string::npos) throw std::invalid_argument("parse_smset: bad pair " + body);
    std::string sl = body.substr(0, comma), mu = body.substr(comma + 1);
    long num, den = 1;
    size_t slash = sl.find('/');
    if (slash == std::string::npos)
      num = std::stol(sl);
    else {
      num = std::stol(sl.substr(0, slash));
      den = std::stol(sl.substr(slash + 1));
    }
    s.pairs.push_back({ExtRat(num, den), std::stol(mu), true});
    pos = close + 1;
  }
  // enforce sorted strictly increasing
  for (size_t i = 0; i + 1 < s.pairs.size(); i++)
    if (!(s.pairs[i].slope < s.pairs[i + 1].slope))
      throw std::invalid_argument("parse_smset: slopes not increasing");
  return s;
}

NewtonPolygon newton_slopes(const std::vector<PadicElem>& coeffs, const std::vector<long>& floors) {
  if (coeffs.empty()) throw std::invalid_argument("newton_slopes: empty");
  const Ctx& ctx = coeffs[0].ctx() ? coeffs[0].ctx() : coeffs.back().ctx();
  const long n = (long)coeffs.size() - 1;
  ExtRat cap(ctx->M, ctx->e);
  std::vector<std::pair<long, ExtRat>> pts_low, pts_high;
  std::vector<bool> exact((size_t)n + 1, false);
  for (long k = 0; k <= n; k++) {
    ExtRat v = coeffs[(size_t)k].valuation();
    if (v.finite()) {
      exact[(size_t)k] = true;
      pts_low.push_back({k, v});
      pts_high.push_back({k, v});
    } else {
      ExtRat floor_v = cap;
      if (!floors.empty() && floors[(size_t)k] > 0) {
        ExtRat f((long)floors[(size_t)k], 1);
        if (cap < f) floor_v = f;
      }
      pts_low.push_back({k, floor_v});
    }
  }
  NewtonPolygon np;
  np.hull_low = lower_hull(pts_low);
  np.hull_high = lower_hull(pts_high);
  np.slopes = slopes_from_hull(np.hull_low);
  // certification: shared vertex suffix (from the k = n side) on exact points
  size_t agree = 0;  // number of shared trailing vertices
  while (agree < np.hull_low.size() && agree < np.hull_high.size()) {
    auto& a = np.hull_low[np.hull_low.size() - 1 - agree];
    auto& b = np.hull_high[np.hull_high.size() - 1 - agree];
    if (a.first != b.first || !(a.second == b.second) || !exact[(size_t)a.first]) break;
    agree++;
  }
  ExtRat trust = ExtRat::inf();
  if (agree < np.hull_low.size()) {
    if (agree < 2)
      trust = ExtRat(-1);  // nothing certified
    else {
      // first unshared segment, just left of the shared suffix
      size_t j = np.hull_low.size() - agree;
      long dk = np.hull_low[j].first - np.hull_low[j - 1].first;
      trust = (np.hull_low[j - 1].second - np.hull_low[j].second) / dk;
    }
  }
  np.slopes.trust = trust;
  for (auto& p : np.slopes.pairs) p.certified = p.slope < trust;
  return np;
}

NewtonPolygon matrix_slopes(const ApproxOperatorMatrix& A, int nthreads) {
  auto cp = charpoly(A, nthreads);
  // rigorous coefficient floors: c_j sums principal (n-j)-minors, each
  // divisible by the product of its row floors, so v(c_j) >= the sum of the
  // (n-j) smallest row floors
  std::vector<long> rf = A.row_floors();
  std::sort(rf.begin(), rf.end());
  std::vector<long> pref(rf.size() + 1, 0);
  for (size_t t = 0; t < rf.size(); t++) pref[t + 1] = pref[t] + rf[t];
  std::vector<long> floors(cp.size(), 0);
  for (size_t j = 0; j < cp.size(); j++) floors[j] = pref[rf.size() - j];
  return newton_slopes(cp, floors);
}

long HodgeBound::value_at(long k) const {
  // piecewise linear through the vertices
  for (size_t t = 0; t + 1 < vertices.size(); t++) {
    if (k >= vertices[t].first && k <= vertices[t + 1].first) {
      long dk = vertices[t + 1].first - vertices[t].first;
      long dv = vertices[t + 1].second - vertices[t].second;
      // integer by construction on segment ends; interpolate in rationals
      return vertices[t].second + (k - vertices[t].first) * dv / dk;
    }
  }
  throw std::out_of_range("HodgeBound::value_at");
}

HodgeBound hodge_bound(long h, int g, long count) {
  HodgeBound hb;
  hb.h = h;
  hb.g = g;
  long idx = 0, val = 0, slope = 0;
  hb.vertices.push_back({0, 0});
  while (idx < count) {
    // s(i) = C(i+g-1, g-1)
    long s = 1;
    for (int t = 1; t < g; t++) s = s * (slope + t) / t;
    long block = s * h;
    idx += block;
    val += block * slope;
    hb.vertices.push_back({idx, val});
    slope++;
  }
  return hb;
}

bool verify_np_above_hodge(const NewtonPolygon& np, const HodgeBound& hb) {
  // cumulative sum of the m smallest operator slopes is hull_low(n - m);
  // compare against the Hodge cumulative at m for every m
  if (np.hull_low.empty()) return true;
  long n = np.hull_low.back().first;
  size_t seg = 0;
  for (long m = 0; m <= n; m++) {
    long k = n - m;
    while (seg + 1 < np.hull_low.size() && np.hull_low[seg + 1].first < k) seg++;
    const auto& A = np.hull_low[seg];
    const auto& B = np.hull_low[std::min(seg + 1, np.hull_low.size() - 1)];
    ExtRat v;
    if (B.first == A.first)
      v = A.second;
    else {
      long dk = B.first - A.first;
      v = A.second + (B.second - A.second) * (k - A.first) / dk;
    }
    long hodge = hb.value_at(std::min(m, hb.vertices.back().first));
    if (v < ExtRat(hodge)) return false;
    seg = 0;  // k decreases; restart the scan (hull sizes are small)
  }
  return true;
}

long trust_count(long R, long h) { return b_of(R) / h; }

SMSet stable_prefix(const SMSet& a, const SMSet& b) {
  SMSet out;
  size_t i = 0;
  while (i < a.pairs.size() && i < b.pairs.size()) {
    if (!(a.pairs[i] == b.pairs[i])) break;
    if (!a.pairs[i].certified || !b.pairs[i].certified) break;
    out.pairs.push_back(a.pairs[i]);
    i++;
  }
  ExtRat t = a.trust < b.trust ? a.trust : b.trust;
  out.trust = t;
  return out;
}

}  // namespace hmf
