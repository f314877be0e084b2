#pragma once

// Perturbative solution of the geodesic triangle system relating the
// midpoint-construction vectors (v1, v2, w, w~) to the half-chords (u1, u2),
// and assembly of the geometric factor Lambda in log form.

#include <geoweyl/series.hpp>

namespace geoweyl {

inline constexpr std::int32_t VEC_U1 = 1;
inline constexpr std::int32_t VEC_U2 = 2;

struct TriangleSolution {
  Poly v1, v2, w, wt;  // vector series in (VEC_U1, VEC_U2)
  int order{0};
};

// even/odd part of the geodesic defect in its first argument; both are
// series in (VEC_U, VEC_V) like geodesic_defect
Poly defect_even(int order);
Poly defect_odd(int order);

// substitutes vector series (a, b) for the two arguments (VEC_U, VEC_V) of a
// defect-like series; a and b may themselves depend on any vector ids
Poly apply_uv(const Poly& f, const Poly& a, const Poly& b, int order);

// fixed-point solution; iterates exactly `order` times and verifies
// stability with one extra sweep
const TriangleSolution& solve_triangle(int order);

// log of 2^{-d} |d(w,w~)/d(u1,u2)| via the trace-log expansion
Poly jacobian_log(int order);

// log Lambda(z, u1, u2)
Poly lambda_log(int order);

}  // namespace geoweyl
