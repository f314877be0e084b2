#include <geoweyl/chart.hpp>

namespace geoweyl::num {

double Chart::conf(V2 x) const {
  switch (model) {
    case Model::FlatTorus:
    case Model::Euclidean:
      return 1.0;
    case Model::Sphere2:
      return 2.0 * r * r / (r * r + dot2(x, x));
    case Model::Hyperbolic2:
      return 2.0 * r * r / (r * r - dot2(x, x));
  }
  return 1.0;
}

V2 Chart::dphi(V2 x) const {
  switch (model) {
    case Model::FlatTorus:
    case Model::Euclidean:
      return {0.0, 0.0};
    case Model::Sphere2:
      return scal2(-2.0 / (r * r + dot2(x, x)), x);
    case Model::Hyperbolic2:
      return scal2(2.0 / (r * r - dot2(x, x)), x);
  }
  return {0.0, 0.0};
}

M2 Chart::metric(V2 x) const {
  double e = conf(x), e2 = e * e;
  return {{{e2, 0.0}, {0.0, e2}}};
}

M2 Chart::metric_inv(V2 x) const {
  double e = conf(x), e2 = 1.0 / (e * e);
  return {{{e2, 0.0}, {0.0, e2}}};
}

double Chart::gdet(V2 x) const {
  double e = conf(x);
  return e * e * e * e;
}

std::array<M2, 2> Chart::christoffel(V2 x) const {
  // conformal metric: Gamma^a_{bc} = d^a_b phi_c + d^a_c phi_b - d_{bc} phi^a
  V2 p = dphi(x);
  std::array<M2, 2> G{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double v = 0.0;
        if (a == b) v += p[c];
        if (a == c) v += p[b];
        if (b == c) v -= p[a];
        G[a][b][c] = v;
      }
  return G;
}

double Chart::scalar_curvature() const {
  switch (model) {
    case Model::FlatTorus:
    case Model::Euclidean:
      return 0.0;
    case Model::Sphere2:
      return 2.0 / (r * r);
    case Model::Hyperbolic2:
      return -2.0 / (r * r);
  }
  return 0.0;
}

bool Chart::in_domain(V2 x) const {
  if (model == Model::FlatTorus) return true;  // periodic
  if (model == Model::Hyperbolic2 || model == Model::Sphere2)
    return std::abs(x[0]) < box && std::abs(x[1]) < box;
  return std::abs(x[0]) < box && std::abs(x[1]) < box;
}

Chart make_chart(const std::string& model, double r) {
  Chart c;
  c.r = r;
  if (model == "flat-torus") {
    c.model = Model::FlatTorus;
    c.period = 2.0 * 3.14159265358979323846;
    c.box = 1e9;
    c.injectivity = 3.14159265358979323846;
  } else if (model == "euclidean") {
    c.model = Model::Euclidean;
    c.box = 1e6;
    c.injectivity = 1e6;
  } else if (model == "sphere-2") {
    c.model = Model::Sphere2;
    c.box = 4.0 * r;  // chart covers everything but the north pole
    c.injectivity = 3.14159265358979323846 * r;
  } else if (model == "hyperbolic-2") {
    c.model = Model::Hyperbolic2;
    c.box = 0.8 * r;
    c.injectivity = 10.0 * r;
  } else {
    throw std::invalid_argument("unknown chart model: " + model);
  }
  return c;
}

std::string model_name(Model m) {
  switch (m) {
    case Model::FlatTorus: return "flat-torus";
    case Model::Euclidean: return "euclidean";
    case Model::Sphere2: return "sphere-2";
    case Model::Hyperbolic2: return "hyperbolic-2";
  }
  return "?";
}

// ---- sphere oracles --------------------------------------------------------

V3 sphere_embed(const Chart& c, V2 x) {
  double r = c.r, s = dot2(x, x) + r * r;
  return {2.0 * r * r * x[0] / s, 2.0 * r * r * x[1] / s, r * (dot2(x, x) - r * r) / s};
}

V2 sphere_unembed(const Chart& c, V3 X) {
  double r = c.r;
  return {r * X[0] / (r - X[2]), r * X[1] / (r - X[2])};
}

V3 sphere_push(const Chart& c, V2 x, V2 u) {
  double r = c.r, s = dot2(x, x) + r * r;
  V3 U{};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      double J = 2.0 * r * r * ((i == j ? s : 0.0) - 2.0 * x[i] * x[j]) / (s * s);
      U[i] += J * u[j];
    }
    U[2] += 4.0 * r * r * r * x[j] * u[j] / (s * s);
  }
  return U;
}

double sphere_angle(const Chart& c, V2 x, V2 y) {
  V3 X = sphere_embed(c, x), Y = sphere_embed(c, y);
  double d = (X[0] * Y[0] + X[1] * Y[1] + X[2] * Y[2]) / (c.r * c.r);
  if (d > 1.0) d = 1.0;
  if (d < -1.0) d = -1.0;
  return std::acos(d);
}

V2 sphere_exp_oracle(const Chart& c, V2 x, V2 u) {
  V3 X = sphere_embed(c, x), U = sphere_push(c, x, u);
  double un = std::sqrt(U[0] * U[0] + U[1] * U[1] + U[2] * U[2]);
  if (un == 0.0) return x;
  double th = un / c.r, ct = std::cos(th), st = std::sin(th);
  V3 Y{};
  for (int i = 0; i < 3; ++i) Y[i] = ct * X[i] + st * c.r * U[i] / un;
  return sphere_unembed(c, Y);
}

}  // namespace geoweyl::num
