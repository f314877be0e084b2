#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <geoweyl/numeric_ops.hpp>

#include <cmath>

using namespace geoweyl;
using namespace geoweyl::num;

TEST_CASE("exponential map") {
  SUBCASE("flat translates") {
    Chart c = make_chart("euclidean");
    V2 y = exp_map(c, {1.0, 2.0}, {0.3, -0.4});
    CHECK(y[0] == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(1.6).epsilon(1e-12));
  }
  SUBCASE("zero vector is the identity") {
    Chart c = make_chart("sphere-2");
    V2 y = exp_map(c, {0.2, -0.1}, {0.0, 0.0});
    CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("matches the great-circle oracle") {
    Chart c = make_chart("sphere-2");
    for (V2 x : {V2{0.0, 0.0}, V2{0.3, -0.2}})
      for (V2 u : {V2{0.4, 0.1}, V2{-0.2, 0.5}}) {
        V2 a = exp_map(c, x, u), b = sphere_exp_oracle(c, x, u);
        CHECK(std::abs(a[0] - b[0]) < 1e-9);
        CHECK(std::abs(a[1] - b[1]) < 1e-9);
      }
  }
}

TEST_CASE("logarithm map") {
  SUBCASE("flat difference") {
    Chart c = make_chart("flat-torus");
    V2 u = log_map(c, {0.2, 6.0}, {6.2, 0.4});  // nearest periodic image
    CHECK(u[0] == doctest::Approx(-0.28318530717958623).epsilon(1e-10));
    CHECK(u[1] == doctest::Approx(0.68318530717958658).epsilon(1e-10));
  }
  SUBCASE("round trip on curved charts") {
    for (const char* m : {"sphere-2", "hyperbolic-2"}) {
      Chart c = make_chart(m);
      V2 x{0.1, 0.15}, y{0.45, -0.2};
      V2 u = log_map(c, x, y);
      V2 y2 = exp_map(c, x, u);
      CHECK(std::abs(y2[0] - y[0]) < 1e-9);
      CHECK(std::abs(y2[1] - y[1]) < 1e-9);
    }
  }
  SUBCASE("coincidence Jacobian is the identity") {
    Chart c = make_chart("sphere-2");
    V2 x{0.2, -0.1};
    double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
      V2 yp = x, ym = x;
      yp[j] += h;
      ym[j] -= h;
      V2 d = sub2(log_map(c, x, yp), log_map(c, x, ym));
      CHECK(std::abs(d[j] / (2 * h) - 1.0) < 1e-6);
      CHECK(std::abs(d[1 - j] / (2 * h)) < 1e-6);
    }
  }
  SUBCASE("refuses beyond the injectivity bound") {
    Chart c = make_chart("sphere-2");
    // near-antipodal pair: geodesic length close to pi
    CHECK_THROWS(log_map(c, {0.0, 0.0}, {30.0, 0.0}));
  }
}

TEST_CASE("parallel transport") {
  SUBCASE("metric compatibility") {
    Chart c = make_chart("sphere-2");
    V2 x{0.1, 0.2}, u{0.5, -0.3}, v{0.2, 0.7}, w{-0.4, 0.1};
    V2 y = exp_map(c, x, u);
    V2 tv = parallel_transport(c, x, u, v), tw = parallel_transport(c, x, u, w);
    double before = dot2(v, matv(c.metric(x), w));
    double after = dot2(tv, matv(c.metric(y), tw));
    CHECK(std::abs(after - before) < 1e-9);
  }
  SUBCASE("round trip inverts") {
    Chart c = make_chart("hyperbolic-2");
    V2 x{0.05, 0.1}, u{0.3, 0.2}, v{0.6, -0.1};
    V2 y = exp_map(c, x, u);
    V2 back = scal2(-1.0, log_map(c, y, x));
    (void)back;
    V2 tv = parallel_transport(c, x, u, v);
    V2 ub = log_map(c, y, x);
    V2 vv = parallel_transport(c, y, ub, tv);
    CHECK(std::abs(vv[0] - v[0]) < 1e-8);
    CHECK(std::abs(vv[1] - v[1]) < 1e-8);
  }
  SUBCASE("holonomy of the right-angled octant triangle") {
    Chart c = make_chart("sphere-2");
    // vertices: south pole (chart origin) and two equator points 90deg apart
    V2 a{0.0, 0.0};
    V2 b = sphere_unembed(c, {1.0, 0.0, 0.0});
    V2 d = sphere_unembed(c, {0.0, 1.0, 0.0});
    V2 v{0.37, -0.12};
    V2 v1 = parallel_transport(c, a, log_map(c, a, b), v);
    V2 v2 = parallel_transport(c, b, log_map(c, b, d), v1);
    V2 v3 = parallel_transport(c, d, log_map(c, d, a), v2);
    // rotation angle = enclosed area = pi/2
    double ca = dot2(v, matv(c.metric(a), v3)) /
                std::sqrt(dot2(v, matv(c.metric(a), v)) * dot2(v3, matv(c.metric(a), v3)));
    CHECK(std::abs(ca) < 1e-6);  // cos(pi/2)
  }
}

TEST_CASE("world function and spreading determinant") {
  SUBCASE("flat closed forms") {
    Chart c = make_chart("euclidean");
    CHECK(synge_sigma(c, {1.0, 1.0}, {4.0, 5.0}) == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(vvm_det(c, {1.0, 1.0}, {4.0, 5.0}) == doctest::Approx(1.0));
  }
  SUBCASE("sphere distance and symmetry") {
    Chart c = make_chart("sphere-2");
    V2 x{0.1, 0.2}, y{0.5, -0.15};
    double th = sphere_angle(c, x, y);
    CHECK(std::abs(synge_sigma(c, x, y) - th * th / 2) < 1e-8);
    CHECK(std::abs(synge_sigma(c, x, y) - synge_sigma(c, y, x)) < 1e-9);
    CHECK(std::abs(vvm_det(c, x, y) - vvm_det(c, y, x)) < 1e-6);
    CHECK(std::abs(vvm_det(c, x, x) - 1.0) < 1e-6);
  }
  SUBCASE("sphere determinant oracle") {
    Report r = vvm_sphere_oracle_check();
    CHECK_MESSAGE(r.pass, r.rel_err);
  }
  SUBCASE("transport identities of the world function") {
    for (const char* m : {"sphere-2", "hyperbolic-2"}) {
      Report r = synge_identity_check(m);
      CHECK_MESSAGE(r.pass, m << " " << r.rel_err);
    }
  }
}

TEST_CASE("measure Jacobian identity") {
  for (double tau : {0.0, 0.25, 0.5, 1.0}) {
    Report r = jacobian_identity_check("sphere-2", tau);
    CHECK_MESSAGE(r.pass, "tau=" << tau << " rel=" << r.rel_err);
  }
  Report r = jacobian_identity_check("hyperbolic-2", 0.5);
  CHECK_MESSAGE(r.pass, r.rel_err);
}

TEST_CASE("kernels") {
  SUBCASE("flat Gaussian kernel closed form") {
    Chart c = make_chart("flat-torus");
    GaussianSymbol b{[](V2) { return Cx(1.0); }, 1.0};
    CutoffSpec cut{1.2, 2.0};
    V2 x{1.0, 1.0}, y{1.3, 0.8};
    Cx k = op_tau_kernel(c, b, cut, 0.5, 1.0, x, y);
    double u2 = 0.3 * 0.3 + 0.2 * 0.2;
    double expect = std::exp(-u2 / 2.0) / (2 * 3.14159265358979323846);
    CHECK(std::abs(k - Cx(expect)) < 1e-12);
  }
  SUBCASE("vanishes outside the cutoff") {
    Chart c = make_chart("flat-torus");
    GaussianSymbol b{[](V2) { return Cx(1.0); }, 1.0};
    CutoffSpec cut{0.3, 0.5};
    CHECK(op_tau_kernel(c, b, cut, 0.5, 1.0, {0.0, 0.0}, {1.0, 1.0}) == Cx(0.0));
  }
  SUBCASE("symbol-kernel round trip") {
    Report r = roundtrip_check_flat(1.0, 40);
    CHECK_MESSAGE(r.pass, r.rel_err);
  }
  SUBCASE("cutoff sensitivity decays fast in hbar") {
    Report r = cutoff_decay_check();
    CHECK_MESSAGE(r.pass, "slope=" << r.lhs);
  }
}

TEST_CASE("trace identity") {
  SUBCASE("flat torus") {
    Report r = trace_check_flat(1.0, 32);
    CHECK_MESSAGE(r.pass, r.rel_err);
  }
  SUBCASE("sphere cap") {
    Report r = trace_check_sphere(1.0, 12);
    CHECK_MESSAGE(r.pass, r.rel_err);
  }
}

TEST_CASE("quantized laplacian") {
  for (const char* m : {"euclidean", "sphere-2", "hyperbolic-2"}) {
    Report r = laplace_residual(m);
    CHECK_MESSAGE(r.pass, m << " rel=" << r.rel_err);
  }
  SUBCASE("sphere eigenfunction oracle") {
    // psi = X3/r is a degree-1 harmonic: -lap psi = (2/r^2) psi
    Chart c = make_chart("sphere-2");
    Report r = laplace_residual("sphere-2");
    (void)r;
    V2 x{0.3, -0.2};
    auto psi = [&](V2 q) { return sphere_embed(c, q)[2] / c.r; };
    const double h = 1e-3;
    auto flux = [&](V2 q, int k) {
      double d1[2] = {(psi(V2{q[0] + h, q[1]}) - psi(V2{q[0] - h, q[1]})) / (2 * h),
                      (psi(V2{q[0], q[1] + h}) - psi(V2{q[0], q[1] - h})) / (2 * h)};
      M2 gi = c.metric_inv(q);
      return std::sqrt(c.gdet(q)) * (gi[k][0] * d1[0] + gi[k][1] * d1[1]);
    };
    double div = (flux(V2{x[0] + h, x[1]}, 0) - flux(V2{x[0] - h, x[1]}, 0) +
                  flux(V2{x[0], x[1] + h}, 1) - flux(V2{x[0], x[1] - h}, 1)) /
                 (2 * h);
    double lap = div / std::sqrt(c.gdet(x));
    CHECK(std::abs(-lap - 2.0 * psi(x)) < 1e-5);
  }
}

TEST_CASE("series vs geodesic numerics") {
  SUBCASE("zeta truncation error scaling") {
    for (int order : {3, 5}) {
      Report r = zeta_scaling_check(order);
      CHECK_MESSAGE(r.pass, "order=" << order << " slope=" << r.lhs);
    }
  }
  SUBCASE("spreading determinant vs series") {
    Report r = vvm_series_check();
    CHECK_MESSAGE(r.pass, r.rel_err);
  }
}
