#ifndef HMF_ASSEMBLE_HPP
#define HMF_ASSEMBLE_HPP

#include "hmf/hecke.hpp"
#include "hmf/monomial.hpp"

namespace hmf {

struct ShapeViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnstableSubspace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyOptions {
  bool normalize = true;
  bool verbatim_inert = false;  // evaluate every place with the identity embedding
  int nthreads = 0;             // 0 = hardware
};

// Finite approximation of a compact operator: (R h) x (R h) over the big
// context, blocked h x h per monomial pair.
struct ApproxOperatorMatrix {
  Ctx ctx;
  LocallyAlgebraicWeight kappa;
  std::vector<int> op_word;
  std::vector<std::array<long, 2>> basis;  // monomials, one block each
  long h = 0;
  bool normalized = true;
  std::vector<PadicElem> e;  // row-major, n x n

  long n() const { return (long)basis.size() * h; }
  const PadicElem& at(long r, long c) const { return e[(size_t)(r * n() + c)]; }
  PadicElem& at(long r, long c) { return e[(size_t)(r * n() + c)]; }

  // rigorous per-row valuation floors (the b(x) pattern), in p-units
  std::vector<long> row_floors() const;
};

// Per-place evaluation data of one coset matrix, with power caches.
class OmegaEvaluator {
 public:
  OmegaEvaluator(const Ctx& ctx, const PLevelRef& pl, const LocallyAlgebraicWeight& kappa,
                 const std::vector<int>& op_word, const AssemblyOptions& opt, long max_exp);

  // per-matrix preparation (embeds entries, caches powers, evaluates psi(d))
  struct Prepared {
    PadicElem psi_d;
    // per place: powers of a, b, c; d-powers (offset indexing); det-power values
    struct Place {
      std::vector<PadicElem> apow, bpow, cpow;
      std::vector<PadicElem> dpow;  // exponent i - d_neg_offset
      long d_neg_offset = 0;
      std::vector<PadicElem> detpow;  // (normalized) det powers up to v_v
    };
    std::vector<Place> place;
  };
  Prepared prepare(const HeckeMatrix& hm) const;

  // the (x, y) entry of the prepared matrix action
  PadicElem entry(const Prepared& pm, const std::array<long, 2>& x,
                  const std::array<long, 2>& y) const;

  // independent route: formal power-series expansion of the generating
  // function, all entries x, y < T at once
  std::vector<std::vector<PadicElem>> generating_grid(const HeckeMatrix& hm, long T) const;

  // per-place factor grids of the series route: entry(x, y) =
  // scalar * place[0][x1][y1] * place[1][x2][y2]
  struct PlaceGrids {
    PadicElem scalar;
    std::array<std::vector<std::vector<PadicElem>>, 2> place;
  };
  PlaceGrids generating_place_grids(const HeckeMatrix& hm, long T) const;

  const Ctx& ctx() const { return ctx_; }

 private:
  PadicElem embed_entry(const PadicElem& plain, int comp, int place) const;
  std::vector<std::vector<PadicElem>> generating_grid_place(const HeckeMatrix& hm, long T,
                                                            int place) const;

  Ctx ctx_;
  PLevelRef pl_;
  LocallyAlgebraicWeight kappa_;
  std::vector<int> word_;
  AssemblyOptions opt_;
  long max_exp_;
  std::vector<int> comp_of_place_;   // place v -> local component index
  std::vector<int> frob_of_place_;   // 1 if Frobenius twist applies
  std::vector<long> op_count_comp_;  // multiplicity of each component in the word
};

// Assemble the operator on the given monomial basis.
ApproxOperatorMatrix assemble(const HeckeLocalData& data, const LocallyAlgebraicWeight& kappa,
                              const std::vector<std::array<long, 2>>& basis, const Ctx& ctx,
                              const AssemblyOptions& opt = {});

// Convenience: Bi-prefix truncation of length R monomials.
ApproxOperatorMatrix assemble_truncation(const HeckeLocalData& data,
                                         const LocallyAlgebraicWeight& kappa, long R, const Ctx& ctx,
                                         const AssemblyOptions& opt = {});

// Principal submatrix on a stable subspace.
ApproxOperatorMatrix restrict_matrix(const ApproxOperatorMatrix& A, const SubspaceSpec& spec);

// The big L-context for a run at this level/weight.
Ctx make_run_context(const PLevelRef& pl, long p_digits);

}  // namespace hmf

#endif
