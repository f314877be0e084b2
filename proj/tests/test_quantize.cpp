#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <geoweyl/quantize.hpp>

using namespace geoweyl;

namespace {

Term T(GQ c, int hb, std::vector<Factor> fs) { return Term{std::move(c), hb, std::move(fs)}; }

GQ qi(long n, long d) { return GQ(Rat(0), Rat(n, d)); }

Poly build(std::vector<Term> ts) {
  Poly p;
  p.ts = std::move(ts);
  return p;
}

Factor op_with(std::vector<Slot> tail) {
  Factor f = atom(OPERAND);
  f.tail = std::move(tail);
  return f;
}

// relabel one formal vector onto another without weight
Poly rename_vec(Poly p, std::int32_t from, std::int32_t to) {
  return map_vec(std::move(p), from, to, GQ(1));
}

}  // namespace

TEST_CASE("two-point log-determinant series") {
  const int N = 4;
  Poly z2 = zeta_two_point(N);

  SUBCASE("symmetric under swapping the endpoints") {
    Poly sw = rename_vec(z2, VEC_U1, 9);
    sw = rename_vec(sw, VEC_U2, VEC_U1);
    sw = rename_vec(sw, 9, VEC_U2);
    CHECK(poly_equal(z2, sw));
  }

  SUBCASE("vanishes on the diagonal") {
    Poly diag = canonicalize(rename_vec(z2, VEC_U2, VEC_U1));
    CHECK(diag.is_zero());
  }

  SUBCASE("reduces to the one-point series at u1 = 0") {
    Poly red = rename_vec(select_degree(z2, VEC_U1, 0), VEC_U2, VEC_U);
    CHECK(poly_equal(red, zeta_series(N)));
  }

  SUBCASE("no linear terms") {
    CHECK(select_degree(z2, VEC_U1, 1, VEC_U2, 0).is_zero());
    CHECK(select_degree(z2, VEC_U1, 0, VEC_U2, 1).is_zero());
  }
}

TEST_CASE("coincidence derivative tables") {
  const XiTable& t = xi_table(4);

  CHECK(poly_equal(t.mixed.at({0, 0}), Poly::constant(GQ(1))));
  CHECK(t.mixed.at({1, 0}).is_zero());
  CHECK(t.mixed.at({0, 1}).is_zero());

  Poly r20 = build({T(GQ(-1, 6), 0, {ricci(free_lo(XI_X), free_lo(XI_X + 1))})});
  Poly r11 = build({T(GQ(1, 6), 0, {ricci(free_lo(XI_X), free_lo(XI_Y))})});
  Poly r02 = build({T(GQ(-1, 6), 0, {ricci(free_lo(XI_Y), free_lo(XI_Y + 1))})});
  CHECK(poly_equal(t.mixed.at({2, 0}), r20));
  CHECK(poly_equal(t.mixed.at({1, 1}), r11));
  CHECK(poly_equal(t.mixed.at({0, 2}), r02));

  SUBCASE("balanced combination: odd orders vanish") {
    CHECK(t.weyl[1].is_zero());
    CHECK(t.weyl[3].is_zero());
  }

  SUBCASE("balanced combination: low orders") {
    CHECK(poly_equal(t.weyl[0], Poly::constant(GQ(1))));
    Poly w2 = build({T(GQ(2, 3), 0, {ricci(free_lo(XI_X), free_lo(XI_X + 1))})});
    CHECK(poly_equal(t.weyl[2], w2));
  }
}

TEST_CASE("quantization of the squared momentum") {
  // g^{mu nu} p_mu p_nu  ->  hbar^2 (-laplacian + R/6), for every tau
  Poly symbol = build({T(GQ(1), 0, {metric(mom_up(), mom_up())})});
  Poly golden = build({
      T(GQ(-1), 2, {op_with({dummy_lo(0), dummy_up(0)})}),
      T(GQ(1, 6), 2, {ricci(dummy_lo(0), dummy_up(0)), atom(OPERAND)}),
  });
  for (Rat tau : {Rat(0), Rat(1, 4), Rat(1, 2), Rat(1)}) {
    Poly q = quantize_polynomial(symbol, tau);
    Poly d = canonicalize(sub(q, golden));
    CHECK_MESSAGE(d.is_zero(), to_text(d));
  }
}

TEST_CASE("quantization of momentum-free and linear symbols") {
  SUBCASE("constant symbol is a multiplication operator") {
    Poly q = quantize_polynomial(Poly::constant(GQ(1)), Rat(1, 2));
    CHECK(poly_equal(q, build({T(GQ(1), 0, {atom(OPERAND)})})));
  }

  SUBCASE("curvature coefficient passes through") {
    Poly symbol = build({T(GQ(1), 0, {ricci(dummy_lo(0), dummy_up(0))})});
    Poly golden = build({T(GQ(1), 0, {ricci(dummy_lo(0), dummy_up(0)), atom(OPERAND)})});
    CHECK(poly_equal(quantize_polynomial(symbol, Rat(1, 4)), golden));
  }

  SUBCASE("linear symbol gives -i hbar times the derivative, every tau") {
    Poly symbol = build({T(GQ(1), 0, {metric(mom_up(), free_up(5))})});
    Poly golden = build({T(qi(-1, 1), 1, {op_with({free_lo(5)})})});
    for (Rat tau : {Rat(0), Rat(1, 2), Rat(1)})
      CHECK(poly_equal(quantize_polynomial(symbol, tau), golden));
  }
}

TEST_CASE("quantization of a quartic momentum symbol") {
  // (g^{mu nu} p_mu p_nu)^2 at tau = 1/2; check the leading bi-laplacian and
  // that every coefficient is real (formal symmetry of the midpoint ordering)
  Poly symbol = build({T(GQ(1), 0, {metric(mom_up(), mom_up()), metric(mom_up(), mom_up())})});
  Poly q = quantize_polynomial(symbol, Rat(1, 2));

  bool ok_real = true, ok_grade = true;
  Poly lead;
  for (const auto& t : q.ts) {
    if (!t.c.is_real()) ok_real = false;
    if (t.hbar != 4) ok_grade = false;
    bool curved = false;
    for (const auto& f : t.fs)
      if (f.head == Head::Riemann || f.head == Head::Ricci) curved = true;
    if (!curved) lead.ts.push_back(t);
  }
  CHECK(ok_real);
  CHECK(ok_grade);
  Poly golden = build({T(GQ(1), 4, {op_with({dummy_lo(0), dummy_up(0), dummy_lo(1), dummy_up(1)})})});
  Poly d = canonicalize(sub(lead, golden));
  CHECK_MESSAGE(d.is_zero(), to_text(d));
}
