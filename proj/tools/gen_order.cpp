// Derives the bundled maximal-order presets: maximalizes a totally definite
// presentation of the trivial-discriminant quaternion algebra over Q(sqrt d)
// for d in {5, 13, 17} and writes data/presets/order_dN.txt.

#include <cstdio>
#include <vector>

#include "hmf/presets.hpp"
#include "hmf/quat.hpp"

using namespace hmf;

static bool try_presentation(const RealQuadraticField& F, const FieldElem& a, const FieldElem& b,
                             Order& out) {
  if (!fe_totally_positive(F, -a) || !fe_totally_positive(F, -b)) return false;
  // avoid primes ramified in F inside the norms
  Rat na = fe_norm(F, a), nb = fe_norm(F, b);
  if ((na.num() * nb.num()).divisible_by(Int(F.disc))) return false;
  QuatAlg A{F, a, b};
  try {
    out = maximal_order(A);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

int main() {
  for (long d : {5L, 13L, 17L}) {
    auto F = RealQuadraticField::make(d);
    Order O;
    bool ok = false;
    // (-1,-1) works when 2 is inert; otherwise scan small totally negative pairs
    std::vector<FieldElem> cands;
    for (long x = -6; x <= 6; x++)
      for (long y = -4; y <= 4; y++) {
        FieldElem e{Rat(x), Rat(y)};
        if (!e.is_zero() && fe_totally_positive(F, -e)) cands.push_back(e);
      }
    // prefer small ones; (-1, -1) first
    FieldElem minus1(-1);
    if (try_presentation(F, minus1, minus1, O)) ok = true;
    for (size_t ia = 0; ia < cands.size() && !ok; ia++)
      for (size_t ib = ia; ib < cands.size() && !ok; ib++)
        if (try_presentation(F, cands[ia], cands[ib], O)) ok = true;
    if (!ok) {
      std::fprintf(stderr, "d=%ld: no presentation found\n", d);
      return 1;
    }
    long nunits = (long)unit_group(O).reps.size();
    std::printf("d=%ld: a=(%s) b=(%s) |O^x/O_F^x| = %ld\n", d, O.A.a.str().c_str(),
                O.A.b.str().c_str(), nunits);
    write_order_file(data_dir() + "/presets/order_d" + std::to_string(d) + ".txt", O);
  }
  return 0;
}
