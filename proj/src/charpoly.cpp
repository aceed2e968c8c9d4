#include <atomic>
#include <thread>

#include "hmf/slopes.hpp"

namespace hmf {

// Berkowitz: for each leading principal submatrix A_r, the characteristic
// polynomial vector (top coefficient first) is the product of Toeplitz
// matrices built from q_0 = 1, q_1 = -A[r-1][r-1], q_k = -(R A_{r-1}^{k-2} S).
std::vector<PadicElem> charpoly(const ApproxOperatorMatrix& A, int nthreads) {
  const Ctx& ctx = A.ctx;
  const long n = A.n();
  long nth = nthreads > 0 ? nthreads : (long)std::thread::hardware_concurrency();
  if (nth < 1) nth = 1;

  std::vector<PadicElem> c{PadicElem(ctx, 1)};  // charpoly of the empty matrix
  std::vector<PadicElem> u, unew;
  for (long r = 1; r <= n; r++) {
    // q-sequence of length r+1
    std::vector<PadicElem> q((size_t)r + 1, PadicElem(ctx));
    q[0] = PadicElem(ctx, 1);
    q[1] = -A.at(r - 1, r - 1);
    if (r >= 2) {
      u.assign((size_t)(r - 1), PadicElem(ctx));
      for (long t = 0; t < r - 1; t++) u[(size_t)t] = A.at(t, r - 1);
      for (long k = 2; k <= r; k++) {
        // q_k = -(Row . u)
        {
          std::vector<Int> acc = PadicElem::raw_accumulator(*ctx);
          for (long t = 0; t < r - 1; t++)
            PadicElem::mul_into(acc, A.at(r - 1, t), u[(size_t)t]);
          q[(size_t)k] = -PadicElem::finalize(ctx, acc);
        }
        if (k == r) break;
        // u <- A_{r-1} u, threaded by rows
        unew.assign((size_t)(r - 1), PadicElem(ctx));
        if (nth == 1 || r < 48) {
          for (long row = 0; row < r - 1; row++) {
            std::vector<Int> acc = PadicElem::raw_accumulator(*ctx);
            for (long t = 0; t < r - 1; t++) PadicElem::mul_into(acc, A.at(row, t), u[(size_t)t]);
            unew[(size_t)row] = PadicElem::finalize(ctx, acc);
          }
        } else {
          std::atomic<long> next(0);
          auto work = [&]() {
            while (true) {
              long row = next.fetch_add(1);
              if (row >= r - 1) break;
              std::vector<Int> acc = PadicElem::raw_accumulator(*ctx);
              for (long t = 0; t < r - 1; t++) PadicElem::mul_into(acc, A.at(row, t), u[(size_t)t]);
              unew[(size_t)row] = PadicElem::finalize(ctx, acc);
            }
          };
          std::vector<std::thread> pool;
          for (long t = 0; t < nth; t++) pool.emplace_back(work);
          for (auto& th : pool) th.join();
        }
        std::swap(u, unew);
      }
    }
    // c <- Toeplitz(q) * c : cnew[i] = sum_{j<=i, i-j<=r} q_{i-j} c[j]
    std::vector<PadicElem> cnew((size_t)r + 1, PadicElem(ctx));
    for (long i = 0; i <= r; i++) {
      std::vector<Int> acc = PadicElem::raw_accumulator(*ctx);
      bool any = false;
      for (long j = std::max(0L, i - r); j <= std::min(i, r - 1 + 0L); j++) {
        if (j >= (long)c.size()) continue;
        PadicElem::mul_into(acc, q[(size_t)(i - j)], c[(size_t)j]);
        any = true;
      }
      cnew[(size_t)i] = any ? PadicElem::finalize(ctx, acc) : PadicElem(ctx);
    }
    c = std::move(cnew);
  }
  // c[i] is the coefficient of X^{n-i}; return cp[k] = coefficient of X^k
  std::vector<PadicElem> cp((size_t)n + 1, PadicElem(ctx));
  for (long i = 0; i <= n; i++) cp[(size_t)(n - i)] = c[(size_t)i];
  return cp;
}

}  // namespace hmf
