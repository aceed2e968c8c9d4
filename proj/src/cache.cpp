#include "hmf/cache.hpp"

#include <cstring>
#include <fstream>

namespace hmf {

namespace {

constexpr uint32_t kFormatVersion = 1;

struct Writer {
  std::string buf;

  void u8(uint8_t v) { buf.push_back((char)v); }
  void u32(uint32_t v) {
    for (int i = 3; i >= 0; i--) buf.push_back((char)((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 7; i >= 0; i--) buf.push_back((char)((v >> (8 * i)) & 0xff));
  }
  void i64(long v) { u64((uint64_t)v); }
  // signed big-endian byte string
  void big(const Int& v) {
    u8(v.sgn() < 0 ? 1 : 0);
    size_t count = 0;
    Int a = abs(v);
    std::string bytes;
    if (!a.is_zero()) {
      size_t words = (mpz_sizeinbase(a.raw(), 2) + 7) / 8;
      bytes.resize(words);
      mpz_export(bytes.data(), &count, 1, 1, 1, 0, a.raw());
      bytes.resize(count);
    }
    u32((uint32_t)bytes.size());
    buf += bytes;
  }
  void rat(const Rat& r) {
    big(r.num());
    big(r.den());
  }
  void fe(const FieldElem& x) {
    rat(x.x);
    rat(x.y);
  }
  void str(const std::string& s) {
    u32((uint32_t)s.size());
    buf += s;
  }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  explicit Reader(const std::string& b) : buf(b) {}
  void need(size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error("cache: truncated file");
  }
  uint8_t u8() {
    need(1);
    return (uint8_t)buf[pos++];
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; i++) v = (v << 8) | (uint8_t)buf[pos++];
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v = (v << 8) | (uint8_t)buf[pos++];
    return v;
  }
  long i64() { return (long)u64(); }
  Int big() {
    uint8_t sg = u8();
    uint32_t len = u32();
    need(len);
    Int v;
    if (len) mpz_import(v.raw(), len, 1, 1, 1, 0, buf.data() + pos);
    pos += len;
    return sg ? -v : v;
  }
  Rat rat() {
    Int n = big();
    Int d = big();
    return Rat(std::move(n), std::move(d));
  }
  FieldElem fe() {
    Rat a = rat();
    Rat b = rat();
    return FieldElem{a, b};
  }
  std::string str() {
    uint32_t len = u32();
    need(len);
    std::string s = buf.substr(pos, len);
    pos += len;
    return s;
  }
};

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

void write_header(Writer& w, const Order& O, const LevelData& level, long digits) {
  w.i64(O.A.F.d);
  w.fe(O.A.a);
  w.fe(O.A.b);
  for (auto& q : O.basis)
    for (auto& c : q.c) w.fe(c);
  w.u32((uint32_t)level.factors.size());
  for (auto& f : level.factors) {
    w.i64(f.prime.q);
    w.u8((uint8_t)f.prime.f);
    w.u8((uint8_t)f.prime.label);
    w.i64(f.prime.omega_root);
    w.fe(f.prime.gen);
    w.u32((uint32_t)f.e);
  }
  w.i64(level.pl->p);
  w.u32((uint32_t)level.pl->s);
  w.i64(digits);
}

void write_padic(Writer& w, const PadicElem& x) {
  for (auto& c : x.coords()) w.big(c);
}

PadicElem read_padic(Reader& r, const Ctx& ctx) {
  PadicElem x(ctx);
  for (auto& c : x.coords()) {
    c = r.big();
    ctx->reduce(c);
  }
  return x;
}

}  // namespace

uint64_t provenance_hash(const Order& O, const LevelData& level, long digits) {
  Writer w;
  write_header(w, O, level, digits);
  return fnv1a(w.buf);
}

void cache_save(const std::string& path, const Order& O, const LevelData& level, long digits,
                const ClassSet& cs, const std::vector<HeckeLocalData>& per_prime) {
  Writer body;
  // class set summary
  body.i64(cs.h());
  body.u8(cs.sufficiently_small ? 1 : 0);
  for (long s : cs.stab_orders) body.i64(s);
  // per-prime data
  body.u32((uint32_t)per_prime.size());
  for (auto& d : per_prime) {
    body.u32((uint32_t)d.op_word.size());
    for (int wdi : d.op_word) body.u32((uint32_t)wdi);
    body.i64(d.digits);
    body.i64(d.h);
    body.u8(d.sufficiently_small ? 1 : 0);
    for (auto& lst : d.T) {
      body.u32((uint32_t)lst.size());
      for (auto& hm : lst) {
        body.u32((uint32_t)hm.comp.size());
        for (auto& sm : hm.comp)
          for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++) write_padic(body, sm.m[i][j]);
      }
    }
  }
  Writer out;
  out.buf += "HMFC";
  out.u32(kFormatVersion);
  write_header(out, O, level, digits);
  out.u64(provenance_hash(O, level, digits));
  out.u64(fnv1a(body.buf));
  out.u64((uint64_t)body.buf.size());
  out.buf += body.buf;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cache_save: cannot write " + path);
  f.write(out.buf.data(), (long)out.buf.size());
}

HeckeCacheData cache_load(const std::string& path, const Order& O, const LevelData& level,
                          long digits) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cache_load: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(data);
  r.need(4);
  if (data.substr(0, 4) != "HMFC") throw CacheVersionMismatch("cache_load: bad magic");
  r.pos = 4;
  if (r.u32() != kFormatVersion) throw CacheVersionMismatch("cache_load: format version");
  // skip header by re-serializing the expected one and comparing
  Writer expect;
  write_header(expect, O, level, digits);
  r.need(expect.buf.size());
  if (data.compare(r.pos, expect.buf.size(), expect.buf) != 0)
    throw HashMismatch("cache_load: header differs from the requested inputs");
  r.pos += expect.buf.size();
  uint64_t prov = r.u64();
  if (prov != provenance_hash(O, level, digits)) throw HashMismatch("cache_load: provenance hash");
  uint64_t body_hash = r.u64();
  uint64_t body_size = r.u64();
  r.need(body_size);
  std::string body = data.substr(r.pos, body_size);
  if (fnv1a(body) != body_hash) throw HashMismatch("cache_load: content hash");
  Reader rb(body);
  HeckeCacheData out;
  out.h = rb.i64();
  out.sufficiently_small = rb.u8() != 0;
  for (long i = 0; i < out.h; i++) out.stab_orders.push_back(rb.i64());
  uint32_t nprime = rb.u32();
  // plain contexts for the matrix entries
  const PLevelRef& pl = level.pl;
  std::vector<Ctx> pctx;
  for (int l = 0; l < pl->nfac; l++) {
    const PrimeIdeal& P = pl->prime(l);
    pctx.push_back(P.f == 2 ? PadicContext::make(P.q, 2, 0, digits + 8, level.F.T, level.F.C)
                            : PadicContext::make(P.q, 1, 0, digits + 8));
  }
  for (uint32_t t = 0; t < nprime; t++) {
    HeckeLocalData d;
    d.pl = pl;
    uint32_t wl = rb.u32();
    for (uint32_t i = 0; i < wl; i++) d.op_word.push_back((int)rb.u32());
    d.digits = rb.i64();
    d.h = rb.i64();
    d.sufficiently_small = rb.u8() != 0;
    d.T.assign((size_t)(d.h * d.h), {});
    for (auto& lst : d.T) {
      uint32_t cnt = rb.u32();
      for (uint32_t c = 0; c < cnt; c++) {
        HeckeMatrix hm;
        uint32_t ncomp = rb.u32();
        for (uint32_t l = 0; l < ncomp; l++) {
          SplitMat sm = SplitMat::zero(pctx[(size_t)l]);
          for (int i = 0; i < 2; i++)
            for (int j = 0; j < 2; j++) sm.m[i][j] = read_padic(rb, pctx[(size_t)l]);
          hm.comp.push_back(sm);
        }
        lst.push_back(std::move(hm));
      }
    }
    out.per_prime.push_back(std::move(d));
  }
  return out;
}

void matrix_save(const std::string& path, const ApproxOperatorMatrix& A) {
  Writer out;
  out.buf += "HMFM";
  out.u32(kFormatVersion);
  out.str(A.kappa.name);
  out.u32((uint32_t)A.op_word.size());
  for (int w : A.op_word) out.u32((uint32_t)w);
  out.u8(A.normalized ? 1 : 0);
  out.i64(A.h);
  // context shape
  out.i64(A.ctx->p);
  out.u32((uint32_t)A.ctx->f);
  out.u32((uint32_t)A.ctx->s);
  out.i64(A.ctx->N);
  out.u32((uint32_t)A.basis.size());
  for (auto& x : A.basis) {
    out.i64(x[0]);
    out.i64(x[1]);
  }
  Writer body;
  for (auto& e : A.e) write_padic(body, e);
  out.u64(fnv1a(body.buf));
  out.buf += body.buf;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("matrix_save: cannot write " + path);
  f.write(out.buf.data(), (long)out.buf.size());
}

ApproxOperatorMatrix matrix_load(const std::string& path, const PLevelRef& pl,
                                 const LocallyAlgebraicWeight& kappa) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("matrix_load: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(data);
  r.need(4);
  if (data.substr(0, 4) != "HMFM") throw CacheVersionMismatch("matrix_load: bad magic");
  r.pos = 4;
  if (r.u32() != kFormatVersion) throw CacheVersionMismatch("matrix_load: format version");
  ApproxOperatorMatrix A;
  A.kappa = kappa;
  std::string name = r.str();
  if (name != kappa.name) throw HashMismatch("matrix_load: weight mismatch (" + name + ")");
  uint32_t wl = r.u32();
  for (uint32_t i = 0; i < wl; i++) A.op_word.push_back((int)r.u32());
  A.normalized = r.u8() != 0;
  A.h = r.i64();
  long p = r.i64();
  int fdeg = (int)r.u32();
  int s = (int)r.u32();
  long N = r.i64();
  long e = 1;
  if (s >= 1) {
    e = p - 1;
    for (int i = 0; i < s - 1; i++) e *= p;
  }
  A.ctx = (fdeg == 2) ? PadicContext::make(p, 2, s, N * e, pl->F.T, pl->F.C)
                      : PadicContext::make(p, 1, s, N * e);
  uint32_t nb = r.u32();
  for (uint32_t i = 0; i < nb; i++) {
    long a = r.i64();
    long b = r.i64();
    A.basis.push_back({a, b});
  }
  uint64_t want_hash = r.u64();
  std::string body = data.substr(r.pos);
  if (fnv1a(body) != want_hash) throw HashMismatch("matrix_load: content hash");
  long n = A.n();
  A.e.reserve((size_t)(n * n));
  for (long i = 0; i < n * n; i++) A.e.push_back(read_padic(r, A.ctx));
  return A;
}

}  // namespace hmf
