#pragma once

// Abstract-index tensor polynomials over exact Gaussian rationals.
//
// Terms are products of factors (curvature tensors, world-function
// derivatives, symbol atoms) whose index slots are bound to free labels,
// contraction partners, formal vectors, or the momentum covector.  The
// metric is implicit: contracting a pair never records a metric factor and
// index variance is kept for display only.  Canonicalization produces a
// deterministic normal form (minimal representative over the monoterm
// symmetry groups, derivative tails in a fixed order with curvature
// corrections, Bianchi-type multiterm relations reduced by exact linear
// algebra), so equal polynomials compare equal term-for-term.

#include <geoweyl/gq.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoweyl {

enum class Bind : std::uint8_t {
  Free,   // named free index (id = label)
  Dummy,  // contraction pair (id shared by exactly two slots in a term)
  Vec,    // contracted against a formal expansion vector (id = vector id)
  Mom,    // contracted against the momentum covector p
  PAux,   // contracted against an auxiliary momentum p_1/p_2 (id = 1 or 2)
};

struct Slot {
  Bind bind{Bind::Free};
  std::int32_t id{0};
  bool up{false};     // variance, display only
  bool primed{false}; // second-point tag on bitensor derivative indices

  friend bool operator==(const Slot&, const Slot&) = default;
};

inline Slot free_lo(std::int32_t id, bool primed = false) { return {Bind::Free, id, false, primed}; }
inline Slot free_up(std::int32_t id, bool primed = false) { return {Bind::Free, id, true, primed}; }
inline Slot dummy_lo(std::int32_t id) { return {Bind::Dummy, id, false, false}; }
inline Slot dummy_up(std::int32_t id) { return {Bind::Dummy, id, true, false}; }
inline Slot vec_lo(std::int32_t vid, bool primed = false) { return {Bind::Vec, vid, false, primed}; }
inline Slot mom_up() { return {Bind::Mom, 0, true, false}; }

enum class Head : std::uint8_t {
  Riemann,  // 4 principal slots, R_{abcd} with Ric_{bd} = R^a{}_{b a d}
  Ricci,    // 2 principal slots; self-contracted pair encodes the scalar R
  Metric,   // 2 principal slots; survives only fully uncontracted
  Sigma,    // world-function derivative; all indices live in the tail
  Atom,     // symbol atom: ordered horizontal tail + vertical slots
};

struct Factor {
  Head head{Head::Metric};
  std::int32_t atom{0};         // Atom: name id (0=a, 1=b, 2=c)
  std::vector<Slot> prin;       // principal slots (4 Riemann, 2 Ricci/Metric)
  std::vector<Slot> tail;       // covariant-derivative tail, application order:
                                //   X_{;t1 t2} = nabla_{t2} nabla_{t1} X
  std::vector<Slot> vert;       // Atom only: vertical (momentum) derivative slots

  friend bool operator==(const Factor&, const Factor&) = default;
};

Factor riemann(Slot a, Slot b, Slot c, Slot d);
Factor ricci(Slot a, Slot b);
Factor ricci_scalar();  // scalar curvature R
Factor metric(Slot a, Slot b);
Factor sigma(std::vector<Slot> tail);
Factor atom(std::int32_t name);

struct Term {
  GQ c{1};
  std::int32_t hbar{0};
  std::vector<Factor> fs;
};

struct Poly {
  std::vector<Term> ts;

  Poly() = default;
  explicit Poly(Term t) : ts{std::move(t)} {}
  static Poly zero() { return {}; }
  static Poly constant(GQ q) {
    Poly p;
    p.ts.push_back({std::move(q), 0, {}});
    return p;
  }
  bool is_zero() const { return ts.empty(); }
};

// ---- arithmetic ------------------------------------------------------------

Poly add(Poly a, const Poly& b);
Poly sub(Poly a, const Poly& b);
Poly scale(Poly a, const GQ& q);
Poly mul_term(const Term& a, const Term& b);  // dummies of b renamed fresh
Poly mul(const Poly& a, const Poly& b);

// Renames all dummy ids of t to be >= base; returns new max+1.
std::int32_t shift_dummies(Term& t, std::int32_t base);
std::int32_t max_dummy(const Term& t);

// ---- derivatives -----------------------------------------------------------

// Covariant derivative nabla_d by Leibniz; d is appended to each factor tail.
// Metric factors are skipped (covariantly constant); Atom factors receive d
// as a horizontal index.
Poly cov_deriv(const Poly& p, const Slot& d);

// Vertical derivative with the given replacement slot r (the new open index):
// each Atom factor gains r as a vertical slot, and each Mom-bound slot is
// rebound to r in turn.
Poly vert_deriv(const Poly& p, const Slot& r);

// ---- substitutions ---------------------------------------------------------

// Replaces every slot bound Free with id `from` by the binding of `to`
// (keeping variance/prime of the original unless to.bind == Bind::Dummy, in
// which case the dummy id is used as-is — caller provides a fresh pair id).
Term subst_free(Term t, std::int32_t from, const Slot& to);
Poly subst_free(Poly p, std::int32_t from, const Slot& to);

// Relabel free index `from` -> free index `to_id` throughout.
Poly rename_free(Poly p, std::int32_t from, std::int32_t to_id);

// ---- symmetrization --------------------------------------------------------

// Average over all permutations of the listed free labels.
Poly symmetrize(const Poly& p, const std::vector<std::int32_t>& frees);

// ---- canonical form --------------------------------------------------------

struct CanonOptions {
  bool sort_tails = true;     // bubble tails into canonical order with
                              // curvature corrections (never for Sigma)
  bool bianchi = true;        // multiterm Bianchi reduction
};

Poly canonicalize(const Poly& p, const CanonOptions& opt = {});

// Monoterm-only canonical key of a term (after orientation/permutation
// minimization); sign is folded into the coefficient.  Exposed for tests.
std::string canonical_key(const Term& t);

bool poly_equal(const Poly& a, const Poly& b);

// ---- commutation (exposed for tests and the sigma engine) ------------------

// Swaps adjacent derivative-tail entries pos,pos+1 of factor fi and returns
// the equivalent polynomial (swapped term + curvature corrections).
Poly commute_adjacent(const Term& t, std::size_t fi, std::size_t pos);

// ---- display ---------------------------------------------------------------

struct NameTable {
  // maps for pretty-printing; defaults cover the labels used in tests/CLI
  std::map<std::int32_t, std::string> free_names;
  std::map<std::int32_t, std::string> vec_names;
  std::map<std::int32_t, std::string> atom_names{{0, "a"}, {1, "b"}, {2, "c"}};
};

std::string to_text(const Poly& p, const NameTable& names = {});
std::string to_latex(const Poly& p, const NameTable& names = {});
std::string to_json(const Poly& p, const NameTable& names = {});

struct dimension_dependent_trace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace geoweyl
