#ifndef HMF_QUAT_HPP
#define HMF_QUAT_HPP

#include <array>
#include <vector>

#include "hmf/quadfield.hpp"

namespace hmf {

struct NotAnOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EnumerationBoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quaternion over F on the basis (1, i, j, k), k = ij, i^2 = a, j^2 = b.
struct QuatF {
  std::array<FieldElem, 4> c;

  QuatF() = default;
  explicit QuatF(FieldElem scalar) { c[0] = std::move(scalar); }

  bool is_zero() const {
    for (auto& x : c)
      if (!x.is_zero()) return false;
    return true;
  }
  friend bool operator==(const QuatF& x, const QuatF& y) { return x.c == y.c; }
  friend QuatF operator+(const QuatF& x, const QuatF& y) {
    QuatF r;
    for (int m = 0; m < 4; m++) r.c[m] = x.c[m] + y.c[m];
    return r;
  }
  friend QuatF operator-(const QuatF& x, const QuatF& y) {
    QuatF r;
    for (int m = 0; m < 4; m++) r.c[m] = x.c[m] - y.c[m];
    return r;
  }
  QuatF operator-() const {
    QuatF r;
    for (int m = 0; m < 4; m++) r.c[m] = -c[m];
    return r;
  }
};

// Totally definite quaternion algebra (a, b / F) with its maximal order basis.
struct QuatAlg {
  RealQuadraticField F;
  FieldElem a, b;
};

inline QuatF qmul(const QuatAlg& A, const QuatF& x, const QuatF& y) {
  const RealQuadraticField& F = A.F;
  auto mul = [&](const FieldElem& u, const FieldElem& v) { return fe_mul(F, u, v); };
  const FieldElem &t1 = x.c[0], &x1 = x.c[1], &y1 = x.c[2], &z1 = x.c[3];
  const FieldElem &t2 = y.c[0], &x2 = y.c[1], &y2 = y.c[2], &z2 = y.c[3];
  QuatF r;
  r.c[0] = mul(t1, t2) + fe_mul(F, A.a, mul(x1, x2)) + fe_mul(F, A.b, mul(y1, y2)) -
           fe_mul(F, fe_mul(F, A.a, A.b), mul(z1, z2));
  r.c[1] = mul(t1, x2) + mul(x1, t2) - fe_mul(F, A.b, mul(y1, z2) - mul(z1, y2));
  r.c[2] = mul(t1, y2) + mul(y1, t2) + fe_mul(F, A.a, mul(x1, z2) - mul(z1, x2));
  r.c[3] = mul(t1, z2) + mul(z1, t2) + mul(x1, y2) - mul(y1, x2);
  return r;
}

inline QuatF qconj(const QuatF& x) {
  QuatF r = x;
  for (int m = 1; m < 4; m++) r.c[m] = -x.c[m];
  return r;
}

inline FieldElem qtrd(const QuatF& x) { return x.c[0] + x.c[0]; }

inline FieldElem qnrd(const QuatAlg& A, const QuatF& x) {
  const RealQuadraticField& F = A.F;
  return fe_mul(F, x.c[0], x.c[0]) - fe_mul(F, A.a, fe_mul(F, x.c[1], x.c[1])) -
         fe_mul(F, A.b, fe_mul(F, x.c[2], x.c[2])) +
         fe_mul(F, fe_mul(F, A.a, A.b), fe_mul(F, x.c[3], x.c[3]));
}

inline QuatF q_scale(const RealQuadraticField& F, const FieldElem& s, const QuatF& x) {
  QuatF r;
  for (int m = 0; m < 4; m++) r.c[m] = fe_mul(F, s, x.c[m]);
  return r;
}

// Maximal order with a fixed O_F-basis.
struct Order {
  QuatAlg A;
  std::array<QuatF, 4> basis;
};

// O_F-module machinery -------------------------------------------------------

// Row-style HNF of the O_F-span of the given quaternions (coordinates may be
// rational; denominators are cleared internally). Returns 4 basis elements in
// upper-triangular form. Throws if rank < 4.
std::array<QuatF, 4> of_module_hnf(const RealQuadraticField& F, const std::vector<QuatF>& gens);

// Multiplicative closure of the O_F-span of gens (must contain 1); returns an
// order basis, or throws NotAnOrderError if closure does not stabilize.
std::array<QuatF, 4> order_closure(const QuatAlg& A, std::vector<QuatF> gens, int max_rounds = 16);

// det of the trace form Gram det(trd(b_i b_j)); the reduced discriminant
// squared, as an element of F (integral for orders).
FieldElem order_disc(const QuatAlg& A, const std::array<QuatF, 4>& basis);

// True iff basis spans a multiplicatively closed O_F-module with unit disc.
bool verify_maximal_order(const Order& O);

// Discriminant-reducing saturation from the standard basis; throws if the
// algebra is ramified at a finite prime (no unit-disc order exists).
Order maximal_order(const QuatAlg& A);

// Coordinates of x on the order basis, if x lies in the order.
std::optional<std::array<FieldElem, 4>> order_coordinates(const Order& O, const QuatF& x);

// Unit group ------------------------------------------------------------------

// One representative per {+-1}-pair of the reduced-norm-one units; closed under
// multiplication modulo sign. Projective unit group O_D^x / O_F^x for fields
// whose fundamental unit has norm -1 (all presets).
struct UnitGroupData {
  std::vector<QuatF> reps;  // reps[0] = 1
};

UnitGroupData unit_group(const Order& O);

// Short vectors ---------------------------------------------------------------

// All nonzero x (mod sign) in the Z-lattice with Z-basis `zbasis` satisfying
// Tr_{F/Q}(nrd(x)) <= bound.
std::vector<QuatF> short_vectors(const QuatAlg& A, const std::vector<QuatF>& zbasis, const Int& bound);

// The 8-element Z-basis {b_m, w b_m} of the O_F-module spanned by basis.
std::vector<QuatF> z_basis_of(const RealQuadraticField& F, const std::array<QuatF, 4>& basis);

}  // namespace hmf

#endif
