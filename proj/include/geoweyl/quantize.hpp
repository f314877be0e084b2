#pragma once

// Ordered quantization of polynomial-in-momentum symbols: builds the operator
// Op_tau(a) applied to a scalar operand, as a covariant differential operator
// with exact curvature coefficients.
//
// Each momentum factor of the symbol is routed to one of four roles: a left
// derivative (weight tau), a right derivative on the operand (weight 1-tau),
// or one of the two derivative slots of the inverse square root of the
// geodesic spreading determinant taken at coincidence (extra hbar, weights
// tau / 1-tau).  The spreading-determinant tables are generated from the
// two-point expansion of its logarithm.

#include <geoweyl/triangle.hpp>

#include <map>
#include <utility>
#include <vector>

namespace geoweyl {

// atom id of the scalar operand the quantized operator acts on
inline constexpr std::int32_t OPERAND = 3;

// free-label bases used by the coincidence tables: first/second derivative
// group of the two-point function
inline constexpr std::int32_t XI_X = 400;
inline constexpr std::int32_t XI_Y = 420;

// log Delta^{1/2}(exp_z u1, exp_z u2) as a series in (VEC_U1, VEC_U2);
// symmetric under u1 <-> u2, vanishes on the diagonal, reduces to the
// one-point series at u1 = 0
Poly zeta_two_point(int order);

// coincidence-limit derivative tables of Delta^{-1/2}(x, y):
//   mixed[{j,m}] = symmetrized [nabla^j nabla'^m Delta^{-1/2}]| with the j
//                  first-point indices opened on labels XI_X+0.. and the m
//                  second-point indices on XI_Y+0..
//   weyl[n]     = (-i)^n sum_{j+m=n} (-1)^j binom(n,j) [nabla^j nabla'^m ...]
//                 opened on XI_X+0.. (the balanced combination; odd n vanish)
struct XiTable {
  std::map<std::pair<int, int>, Poly> mixed;
  std::vector<Poly> weyl;
  int order{0};
};
const XiTable& xi_table(int order);

// quantizes a symbol polynomial in p (Mom-bound slots, curvature coefficient
// factors) at ordering parameter tau and applies it to the scalar operand
// atom; the result is a Poly in the operand's covariant derivatives with one
// hbar per momentum factor
Poly quantize_polynomial(const Poly& symbol, const Rat& tau);

}  // namespace geoweyl
