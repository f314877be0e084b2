#pragma once

// Deformation-quantization product of symbols on a curved cotangent bundle,
// expanded in powers of hbar.
//
// The integrand of the product formula is assembled as a truncated series in
// the two half-chord vectors (VEC_U1, VEC_U2): the exponentiated geometric
// factor and oscillatory phase, times the pulled-back symbols.  The Gaussian
// integral over the chords and auxiliary momenta is evaluated exactly by
// pairing enumeration (wick_evaluate).  The grade of a term is stored in
// Term::hbar: each pairing contributes +1 and each explicit momentum factor
// carries -1, so a term of final grade n has exactly n more vertical than
// horizontal "excess" derivatives.

#include <geoweyl/triangle.hpp>

#include <string>
#include <vector>

namespace geoweyl {

inline constexpr std::int32_t ATOM_A = 0;
inline constexpr std::int32_t ATOM_B = 1;
inline constexpr std::int32_t ATOM_C = 2;

// which atom names constitute the left/right symbol of a product (pairing
// with the auxiliary momenta p1/p2 must know which factors belong where)
struct StarSides {
  std::vector<std::int32_t> left{ATOM_A};
  std::vector<std::int32_t> right{ATOM_B};
};

// drops terms whose guaranteed final grade hbar + (vector degree) exceeds
// `order`; exact for the product pipeline since every chord slot is consumed
// by exactly one pairing
Poly grade_truncate(Poly p, int order);

// log of the nonlinear phase correction: 2i p.(w + u1 - u2) with the linear
// part removed; series in (VEC_U1, VEC_U2), one Mom contraction and grade -1
// per term
Poly phase_log(int order);

// covariant Taylor expansion of a symbol about the base point, evaluated
// along the vector series `shift` (free index IDX_OUT)
Poly pullback(const Poly& sym, const Poly& shift, int order);

// splits every momentum contraction of `p` into (actual + auxiliary) with the
// given auxiliary id; used on the pulled-back symbols, whose momentum
// argument is shifted by the conjugate integration variable
Poly mom_split(const Poly& p, std::int32_t aux_id);

// evaluates the Gaussian pairing exponential on the assembled integrand:
// every VEC_U1 slot pairs with +i/2 against the right symbol's momentum
// dependence (vertical derivative of a right atom, or an auxiliary-2 slot),
// every VEC_U2 slot with -i/2 against the left; terms with unconsumable
// chords or auxiliaries vanish.  Throws on foreign vector ids.
Poly wick_evaluate(const Poly& prod, const StarSides& sides, int order);

// full product pipeline; result[n] is the grade-n part, canonicalized
std::vector<Poly> star_product(const Poly& a, const Poly& b, const StarSides& sides, int order);

// product of the two generic atoms a and b
std::vector<Poly> star_expansion(int order);

// flat-space counterpart, built directly from the binomial closed form of
// the constant-coefficient pairing exponential (independent of the curved
// pipeline; used as an oracle)
std::vector<Poly> moyal_expansion(int order);

// structural identities satisfied by every term of a two-symbol product:
// with r the grade, s the number of curvature factors, eta the number of
// momentum factors, alpha/beta the horizontal/vertical derivative counts of
// the two atoms: r = |b1|+|b2|-eta, r = 2s + (curvature tails) + |a1|+|a2|,
// and for curvature terms s >= max(1,eta), |b1| >= max(1,eta+|a2|),
// |b2| >= max(1,eta+|a1|).
bool verify_term_structure(const Term& t, std::string* diag = nullptr);

// change-of-parameter translation between quantization conventions:
// applies sum_n (dtau^n/n!) (-i hbar d_p . nabla)^n, truncated at `order`
Poly tau_translate(const Poly& sym, const Rat& dtau, int order);

// ---- small helpers shared by the tests -------------------------------------

Poly rename_atom(Poly p, std::int32_t from, std::int32_t to);
Poly conj_coeffs(Poly p);

}  // namespace geoweyl
