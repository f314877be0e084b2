#pragma once

// Covariant expansions around a base point: truncated polynomial series in
// formal parallel-transported vectors, with exact tensor coefficients.
//
// A series is a Poly whose terms carry Vec-bound slots; the total number of
// Vec slots of a term is its degree.  Scalar series have no free index,
// vector series carry the single free index IDX_OUT (upper).  Bare vector
// monomials (no curvature factor) are encoded through metric placeholder
// factors, e.g. u^mu = g^mu_alpha u^alpha.

#include <geoweyl/tensor.hpp>

namespace geoweyl {

inline constexpr std::int32_t IDX_OUT = 0;  // open index label of vector series
inline constexpr std::int32_t VEC_U = 1;    // expansion vector / first argument
inline constexpr std::int32_t VEC_V = 2;    // shift vector / second argument

// total number of Vec-bound slots (optionally of one vector id)
int vec_degree(const Term& t);
int vec_degree(const Term& t, std::int32_t vid);

// drops terms of total degree > order
Poly truncate_degree(Poly p, int order);

// keeps terms whose per-vector degrees match exactly (-1 = any)
Poly select_degree(const Poly& p, std::int32_t vid, int deg, std::int32_t vid2 = -1,
                   int deg2 = -1);

// relabels Vec id `vid` -> `to_vid`, multiplying each term by per_slot once
// per relabeled slot (used for u -> 2u, v -> -u substitutions)
Poly map_vec(Poly p, std::int32_t vid, std::int32_t to_vid, const GQ& per_slot);

// covariant Taylor shift: sum_m (1/m!) (Vec(vid) . nabla)^m s, truncated
Poly cov_taylor(const Poly& s, std::int32_t vid, int order);

// substitutes the vector series `repl` (free index IDX_OUT) for every
// Vec(vid) slot of `host`, multilinearly; repl must not itself contain
// Vec(vid) slots.  Truncates at `order`.
Poly compose_vec(Poly host, std::int32_t vid, const Poly& repl, int order);

// formal derivative d/du^out_label: each Vec(vid) slot opened in turn
Poly vec_partial(const Poly& s, std::int32_t vid, std::int32_t out_label);

// the identity vector series u^mu
Poly vec_identity(std::int32_t vid);

// log Delta^{1/2}(z, z+u) as a series in u = VEC_U; starts at degree 2
const Poly& zeta_series(int order);

// log Delta^{1/2}(z+v, z+v+<u>_v) in (u, v) = (VEC_U, VEC_V)
Poly zeta_shifted(int order);

// log Delta^{1/2}(z-u, z+u); only even degrees survive
const Poly& zeta_symmetric(int order);

// log Delta^{1/2}(z+v-<u>_v, z+v+<u>_v) in (u, v)
Poly zeta_shifted_symmetric(int order);

// geodesic defect delta(u,v)^mu: failure of exp_{exp_z(v)}(<u>_v) to equal
// exp_z(u+v); bilinear-and-higher in (u, v), free index IDX_OUT
const Poly& geodesic_defect(int order);

}  // namespace geoweyl
