#pragma once

// Coincidence limits of covariant derivatives of the world function.
//
// Conventions for free labels:
//   sigma_table(n)       -> [sigma_{F1...Fn}] with all-unprimed derivative
//                           labels 1..n in tail order.
//   mixed_limit(k,m)     -> [sigma_{A1..Ak B1'..Bm'}]: k unprimed derivatives
//                           (labels 1..k, applied first) followed by m primed
//                           ones (labels 101..100+m).
//   coincidence_entry(m,n) -> [sigma^mu_{(a1'..am')(b1'..bn')}]: head index
//                           MU (=0, upper, at the base point), first group
//                           symmetrized over labels 201..200+m, second over
//                           301..300+n.
//
// All results are canonicalized one-point curvature polynomials; mixed-prime
// limits are produced exclusively by the derivative-across-the-bracket rule
// from the all-unprimed table.

#include <geoweyl/tensor.hpp>

namespace geoweyl {

inline constexpr std::int32_t MU = 0;
inline constexpr std::int32_t UNPRIMED_BASE = 0;    // labels 1..k
inline constexpr std::int32_t PRIMED_BASE = 100;    // labels 101..100+m
inline constexpr std::int32_t GROUP_A_BASE = 200;   // entry first group
inline constexpr std::int32_t GROUP_B_BASE = 300;   // entry second group

// [sigma_{F1...Fn}] for the given tail length; memoized.
const Poly& sigma_table(int n);

// general limit of a sigma factor with the given (all-unprimed) tail slots,
// in any order; reorders toward the canonical order emitting curvature
// corrections, then instantiates the table
Poly sigma_limit(const std::vector<Slot>& tail);

// [sigma_{A1..Ak B1'..Bm'}]; memoized.
const Poly& mixed_limit(int k, int m);

// symmetrized two-group table entry with a raised head index
const Poly& coincidence_entry(int m, int n);

// maximum supported order (tail length of sigma_table); requests beyond this
// throw std::out_of_range
inline constexpr int SIGMA_ORDER_CAP = 9;

}  // namespace geoweyl
