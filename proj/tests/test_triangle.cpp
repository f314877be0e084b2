#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <geoweyl/triangle.hpp>

using namespace geoweyl;

namespace {

Slot u(int which) { return vec_lo(which); }

// R^mu_{s0 s1 s2; s3 s4...} with vector-contracted lower slots
Poly rt(GQ c, std::vector<int> s) {
  Factor f = riemann(free_up(IDX_OUT), u(s[0]), u(s[1]), u(s[2]));
  for (std::size_t k = 3; k < s.size(); ++k) f.tail.push_back(u(s[k]));
  return Poly(Term{std::move(c), 0, {f}});
}

// R^mu_{s0 b s1} R^b_{s2 s3 s4}
Poly rr(GQ c, std::vector<int> s) {
  return Poly(Term{std::move(c), 0,
                   {riemann(free_up(IDX_OUT), u(s[0]), dummy_lo(0), u(s[1])),
                    riemann(dummy_up(0), u(s[2]), u(s[3]), u(s[4]))}});
}

// Ric_{s0 s1; tail...}
Poly ric(GQ c, std::vector<int> s) {
  Factor f = ricci(u(s[0]), u(s[1]));
  for (std::size_t k = 2; k < s.size(); ++k) f.tail.push_back(u(s[k]));
  return Poly(Term{std::move(c), 0, {f}});
}

// R_{b s0} R^b_{s1 s2 s3}
Poly ricr(GQ c, std::vector<int> s) {
  return Poly(Term{std::move(c), 0,
                   {ricci(dummy_lo(0), u(s[0])), riemann(dummy_up(0), u(s[1]), u(s[2]), u(s[3]))}});
}

// R^mu_{s0 b s1} R^b_{s2 mu s3}  (both Riemann principal pairs contracted)
Poly rr2(GQ c, std::vector<int> s) {
  return Poly(Term{std::move(c), 0,
                   {riemann(dummy_up(0), u(s[0]), dummy_lo(1), u(s[1])),
                    riemann(dummy_up(1), u(s[2]), dummy_lo(0), u(s[3]))}});
}

Poly acc(std::vector<Poly> ps) {
  Poly out;
  for (auto& p : ps) out = add(std::move(out), p);
  return out;
}

// exchange u1 <-> u2
Poly swap12(const Poly& p) {
  Poly q = map_vec(p, VEC_U1, 99, GQ(1));
  q = map_vec(std::move(q), VEC_U2, VEC_U1, GQ(1));
  return map_vec(std::move(q), 99, VEC_U2, GQ(1));
}

}  // namespace

TEST_CASE("defect parity split") {
  const Poly& d = geodesic_defect(5);
  Poly dp = defect_even(5), dm = defect_odd(5);
  CHECK(poly_equal(add(dp, dm), d));
  // even/odd in the first argument
  CHECK(poly_equal(map_vec(dp, VEC_U, VEC_U, GQ(-1)), dp));
  CHECK(poly_equal(map_vec(dm, VEC_U, VEC_U, GQ(-1)), scale(dm, GQ(-1))));
  // leading terms
  CHECK(poly_equal(select_degree(dp, VEC_U, 2, VEC_V, 1),
                   rt(GQ(-1, 3), {VEC_U, VEC_V, VEC_U})));
  CHECK(poly_equal(select_degree(dm, VEC_U, 1, VEC_V, 2),
                   rt(GQ(1, 6), {VEC_V, VEC_U, VEC_V})));
}

TEST_CASE("triangle solution matches the fifth-order expansions") {
  const TriangleSolution& sol = solve_triangle(5);

  Poly v1_expect = acc({vec_identity(VEC_U1),
                        rt(GQ(1, 2), {2, 1, 2}),
                        rt(GQ(-1, 24), {1, 2, 1, 2}), rt(GQ(5, 24), {2, 1, 2, 1}),
                        rt(GQ(-1, 12), {1, 2, 1, 1}), rt(GQ(1, 12), {2, 1, 2, 2}),
                        rt(GQ(1, 24), {2, 1, 2, 2, 2}), rt(GQ(-1, 12), {1, 2, 1, 1, 2}),
                        rt(GQ(1, 12), {2, 1, 2, 1, 1}),
                        rr(GQ(5, 24), {2, 2, 2, 1, 2}), rr(GQ(-1, 6), {2, 1, 1, 2, 1}),
                        rr(GQ(1, 12), {1, 1, 2, 1, 2})});
  CHECK(poly_equal(sol.v1, v1_expect));
  CHECK(poly_equal(sol.v2, swap12(sol.v1)));

  Poly w_expect = acc({scale(vec_identity(VEC_U1), GQ(-1)), vec_identity(VEC_U2),
                       rt(GQ(1, 6), {1, 2, 1}), rt(GQ(-1, 6), {2, 1, 2}),
                       rt(GQ(-1, 6), {2, 1, 2, 2}), rt(GQ(1, 6), {1, 2, 1, 1}),
                       rt(GQ(-7, 120), {2, 1, 2, 2, 1}), rt(GQ(1, 120), {1, 2, 1, 2, 2}),
                       rt(GQ(1, 40), {1, 2, 1, 1, 1}), rt(GQ(7, 120), {1, 2, 1, 1, 2}),
                       rt(GQ(-1, 120), {2, 1, 2, 1, 1}), rt(GQ(-1, 40), {2, 1, 2, 2, 2}),
                       rr(GQ(7, 360), {2, 2, 1, 2, 1}), rr(GQ(-11, 360), {2, 1, 2, 1, 2}),
                       rr(GQ(-11, 90), {1, 2, 2, 1, 2}), rr(GQ(7, 360), {1, 1, 1, 2, 1}),
                       rr(GQ(-7, 360), {1, 1, 2, 1, 2}), rr(GQ(11, 360), {1, 2, 1, 2, 1}),
                       rr(GQ(11, 90), {2, 1, 1, 2, 1}), rr(GQ(-7, 360), {2, 2, 2, 1, 2})});
  CHECK(poly_equal(sol.w, w_expect));

  Poly wt_expect = acc({vec_identity(VEC_U1), vec_identity(VEC_U2),
                        rt(GQ(1, 6), {1, 2, 1}), rt(GQ(1, 6), {2, 1, 2}),
                        rt(GQ(-7, 120), {2, 1, 2, 2, 1}), rt(GQ(1, 120), {1, 2, 1, 2, 2}),
                        rt(GQ(1, 40), {1, 2, 1, 1, 1}), rt(GQ(-7, 120), {1, 2, 1, 1, 2}),
                        rt(GQ(1, 120), {2, 1, 2, 1, 1}), rt(GQ(1, 40), {2, 1, 2, 2, 2}),
                        rr(GQ(7, 360), {2, 2, 1, 2, 1}), rr(GQ(-11, 360), {2, 1, 2, 1, 2}),
                        rr(GQ(-11, 90), {1, 2, 2, 1, 2}), rr(GQ(7, 360), {1, 1, 1, 2, 1}),
                        rr(GQ(7, 360), {1, 1, 2, 1, 2}), rr(GQ(-11, 360), {1, 2, 1, 2, 1}),
                        rr(GQ(-11, 90), {2, 1, 1, 2, 1}), rr(GQ(7, 360), {2, 2, 2, 1, 2})});
  CHECK(poly_equal(sol.wt, wt_expect));

  // geometric exchange symmetries
  CHECK(poly_equal(swap12(sol.w), scale(sol.w, GQ(-1))));
  CHECK(poly_equal(swap12(sol.wt), sol.wt));
}

TEST_CASE("composed defect parts match the pinned series") {
  const TriangleSolution& sol = solve_triangle(5);
  Poly id1 = vec_identity(VEC_U1);
  Poly dp12 = canonicalize(apply_uv(defect_even(5), id1, sol.v2, 5));
  Poly dm12 = canonicalize(apply_uv(defect_odd(5), id1, sol.v2, 5));

  Poly dp_expect = acc({rt(GQ(-1, 3), {1, 2, 1}),
                        rt(GQ(1, 24), {2, 1, 2, 1}), rt(GQ(-5, 24), {1, 2, 1, 2}),
                        rt(GQ(-1, 60), {1, 2, 1, 1, 1}), rt(GQ(-3, 40), {1, 2, 1, 2, 2}),
                        rt(GQ(1, 40), {2, 1, 2, 1, 2}),
                        rr(GQ(1, 6), {1, 1, 1, 1, 2}), rr(GQ(-1, 45), {1, 1, 1, 2, 1}),
                        rr(GQ(2, 45), {1, 2, 2, 1, 2}), rr(GQ(-1, 180), {2, 1, 2, 1, 2}),
                        rr(GQ(-7, 180), {2, 2, 1, 2, 1})});
  CHECK(poly_equal(dp12, dp_expect));

  Poly dm_expect = acc({rt(GQ(1, 6), {2, 1, 2}),
                        rt(GQ(-1, 12), {1, 2, 1, 1}), rt(GQ(1, 12), {2, 1, 2, 2}),
                        rt(GQ(-7, 120), {1, 2, 1, 1, 2}), rt(GQ(1, 120), {2, 1, 2, 1, 1}),
                        rt(GQ(1, 40), {2, 1, 2, 2, 2}),
                        rr(GQ(7, 360), {1, 1, 2, 1, 2}), rr(GQ(-41, 360), {1, 2, 1, 2, 1}),
                        rr(GQ(-1, 12), {1, 2, 1, 1, 2}), rr(GQ(1, 6), {2, 1, 1, 1, 2}),
                        rr(GQ(2, 45), {2, 1, 1, 2, 1}), rr(GQ(7, 360), {2, 2, 2, 1, 2})});
  CHECK(poly_equal(dm12, dm_expect));
}

TEST_CASE("back-substitution residuals vanish") {
  const int order = 5;
  const TriangleSolution& sol = solve_triangle(order);
  const Poly& d = geodesic_defect(order);
  Poly id1 = vec_identity(VEC_U1), id2 = vec_identity(VEC_U2);
  Poly m_id1 = scale(id1, GQ(-1)), m_id2 = scale(id2, GQ(-1));

  Poly r1 = sub(sol.w, add(add(m_id1, sol.v2), apply_uv(d, m_id1, sol.v2, order)));
  Poly r2 = sub(scale(sol.w, GQ(-1)), add(add(m_id2, sol.v1), apply_uv(d, m_id2, sol.v1, order)));
  Poly r3 = sub(sol.wt, add(add(id2, sol.v1), apply_uv(d, id2, sol.v1, order)));
  Poly r4 = sub(sol.wt, add(add(id1, sol.v2), apply_uv(d, id1, sol.v2, order)));
  CHECK(canonicalize(r1).is_zero());
  CHECK(canonicalize(r2).is_zero());
  CHECK(canonicalize(r3).is_zero());
  CHECK(canonicalize(r4).is_zero());
}

TEST_CASE("jacobian log-determinant expansion") {
  Poly j = jacobian_log(4);
  Poly expect = acc({ric(GQ(1, 6), {1, 1}), ric(GQ(1, 6), {2, 2}),
                     ric(GQ(1, 12), {1, 1, 1}), ric(GQ(-1, 12), {1, 1, 2}),
                     ric(GQ(1, 6), {1, 2, 1}), ric(GQ(1, 6), {2, 1, 2}),
                     ric(GQ(-1, 12), {2, 2, 1}), ric(GQ(1, 12), {2, 2, 2}),
                     ric(GQ(1, 40), {1, 1, 1, 1}), ric(GQ(-1, 30), {1, 1, 2, 2}),
                     ric(GQ(1, 10), {1, 2, 1, 2}), ric(GQ(1, 10), {2, 1, 2, 1}),
                     ric(GQ(-1, 30), {2, 2, 1, 1}), ric(GQ(1, 40), {2, 2, 2, 2}),
                     ricr(GQ(1, 9), {1, 2, 1, 2}), ricr(GQ(1, 9), {2, 1, 2, 1}),
                     rr2(GQ(1, 180), {1, 1, 1, 1}), rr2(GQ(1, 45), {1, 1, 2, 2}),
                     rr2(GQ(1, 45), {1, 2, 1, 2}), rr2(GQ(49, 180), {1, 2, 2, 1}),
                     rr2(GQ(1, 180), {2, 2, 2, 2})});
  CHECK(poly_equal(j, expect));
  CHECK(poly_equal(swap12(j), j));
}

TEST_CASE("geometric factor expansion") {
  Poly l = lambda_log(4);
  // R^mu_{a1 b a2} R^b_{a4 mu a3} entries written via rr2 with swapped last
  // arguments
  Poly expect = acc({ric(GQ(1, 3), {1, 2}),
                     ric(GQ(1, 6), {1, 1, 2}), ric(GQ(1, 6), {2, 2, 1}),
                     ric(GQ(1, 120), {1, 1, 1, 2}), ric(GQ(1, 120), {1, 1, 2, 1}),
                     ric(GQ(1, 60), {1, 2, 1, 1}), ric(GQ(-1, 60), {1, 2, 2, 1}),
                     ric(GQ(-1, 60), {1, 2, 1, 2}), ric(GQ(3, 40), {1, 1, 2, 2}),
                     ric(GQ(3, 40), {2, 2, 1, 1}), ric(GQ(1, 120), {2, 2, 2, 1}),
                     ric(GQ(1, 120), {2, 2, 1, 2}), ric(GQ(1, 60), {1, 2, 2, 2}),
                     ricr(GQ(1, 18), {1, 1, 2, 1}), ricr(GQ(-1, 18), {1, 2, 1, 2}),
                     ricr(GQ(-1, 18), {2, 1, 2, 1}), ricr(GQ(1, 18), {2, 2, 1, 2}),
                     rr2(GQ(7, 45), {2, 1, 1, 1}), rr2(GQ(-7, 90), {1, 2, 1, 2}),
                     rr2(GQ(31, 180), {1, 2, 2, 1}), rr2(GQ(-7, 90), {1, 1, 2, 2}),
                     rr2(GQ(7, 45), {1, 2, 2, 2})});
  CHECK(poly_equal(l, expect));
  CHECK(poly_equal(swap12(l), l));
}
