#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <geoweyl/series.hpp>

using namespace geoweyl;

namespace {

Poly term(GQ c, std::vector<Factor> fs) { return Poly(Term{std::move(c), 0, std::move(fs)}); }

Factor ric_t(Slot a, Slot b, std::vector<Slot> tail) {
  Factor f = ricci(a, b);
  f.tail = std::move(tail);
  return f;
}

const Slot U = vec_lo(VEC_U);
const Slot V = vec_lo(VEC_V);

}  // namespace

TEST_CASE("log-density expansion goldens") {
  const Poly& z = zeta_series(4);
  CHECK(select_degree(z, VEC_U, 0).is_zero());
  CHECK(select_degree(z, VEC_U, 1).is_zero());
  CHECK(poly_equal(select_degree(z, VEC_U, 2), term(GQ(1, 12), {ricci(U, U)})));
  CHECK(poly_equal(select_degree(z, VEC_U, 3), term(GQ(1, 24), {ric_t(U, U, {U})})));
  Poly deg4 = add(term(GQ(1, 80), {ric_t(U, U, {U, U})}),
                  term(GQ(1, 360), {riemann(dummy_up(0), U, dummy_lo(1), U),
                                    riemann(dummy_up(1), U, dummy_lo(0), U)}));
  CHECK(poly_equal(select_degree(z, VEC_U, 4), deg4));
}

TEST_CASE("shifted log-density expansion") {
  Poly zs = zeta_shifted(4);
  // v-degree-0 part is the unshifted series
  CHECK(poly_equal(select_degree(zs, VEC_V, 0), zeta_series(4)));
  CHECK(poly_equal(select_degree(zs, VEC_U, 2, VEC_V, 1),
                   term(GQ(1, 12), {ric_t(U, U, {V})})));
  CHECK(poly_equal(select_degree(zs, VEC_U, 3, VEC_V, 1),
                   term(GQ(1, 24), {ric_t(U, U, {U, V})})));
  CHECK(poly_equal(select_degree(zs, VEC_U, 2, VEC_V, 2),
                   term(GQ(1, 24), {ric_t(U, U, {V, V})})));
}

TEST_CASE("symmetric log-density expansion") {
  const Poly& z = zeta_symmetric(6);
  CHECK(poly_equal(select_degree(z, VEC_U, 2), term(GQ(1, 3), {ricci(U, U)})));
  Poly deg4 = add(term(GQ(1, 30), {ric_t(U, U, {U, U})}),
                  term(GQ(2, 45), {riemann(dummy_up(0), U, dummy_lo(1), U),
                                   riemann(dummy_up(1), U, dummy_lo(0), U)}));
  CHECK(poly_equal(select_degree(z, VEC_U, 4), deg4));
  // odd orders vanish by the two-point exchange symmetry
  for (int n : {3, 5}) CHECK(select_degree(z, VEC_U, n).is_zero());
}

TEST_CASE("shifted symmetric log-density expansion") {
  Poly zss = zeta_shifted_symmetric(4);
  CHECK(poly_equal(select_degree(zss, VEC_V, 0), zeta_symmetric(4)));
  CHECK(poly_equal(select_degree(zss, VEC_U, 2, VEC_V, 1),
                   term(GQ(1, 3), {ric_t(U, U, {V})})));
  CHECK(poly_equal(select_degree(zss, VEC_U, 2, VEC_V, 2),
                   term(GQ(1, 6), {ric_t(U, U, {V, V})})));
}

TEST_CASE("geodesic defect series") {
  const Poly& d = geodesic_defect(4);
  // no pure-u or pure-v monomials
  for (int k = 1; k <= 4; ++k) {
    CHECK(select_degree(d, VEC_V, 0, VEC_U, k).is_zero());
    CHECK(select_degree(d, VEC_U, 0, VEC_V, k).is_zero());
  }
  CHECK(select_degree(d, VEC_U, 1, VEC_V, 1).is_zero());
  CHECK(poly_equal(select_degree(d, VEC_U, 2, VEC_V, 1),
                   term(GQ(-1, 3), {riemann(free_up(IDX_OUT), U, V, U)})));
  CHECK(poly_equal(select_degree(d, VEC_U, 1, VEC_V, 2),
                   term(GQ(1, 6), {riemann(free_up(IDX_OUT), V, U, V)})));
}

TEST_CASE("series utilities") {
  // composing the identity changes nothing
  const Poly& d = geodesic_defect(3);
  const std::int32_t scratch = 7;
  Poly host = map_vec(d, VEC_U, scratch, GQ(1));
  CHECK(poly_equal(compose_vec(host, scratch, vec_identity(VEC_U), 3), d));
  // partial derivative of u^mu is the unit matrix
  Poly id = vec_identity(VEC_U);
  Poly dd = vec_partial(id, VEC_U, 5);
  CHECK(poly_equal(dd, Poly(Term{GQ(1), 0, {metric(free_up(IDX_OUT), free_lo(5))}})));
}
