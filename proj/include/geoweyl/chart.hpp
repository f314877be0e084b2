#pragma once

// Concrete 2-d Riemannian charts used by the numeric backend.  All models
// are conformally flat, g_ij = e^{2 phi(x)} delta_ij, which keeps the metric
// and Christoffel symbols closed-form and smooth on the whole chart:
//   flat-torus    phi = 0, periodic box [0, 2 pi)^2
//   euclidean     phi = 0, plain box
//   sphere-2      stereographic chart, e^phi = 2 r^2 / (r^2 + |x|^2)
//   hyperbolic-2  Poincare disk,       e^phi = 2 r^2 / (r^2 - |x|^2)

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geoweyl::num {

using V2 = std::array<double, 2>;
using M2 = std::array<V2, 2>;
using V3 = std::array<double, 3>;

inline V2 add2(V2 a, V2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline V2 sub2(V2 a, V2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline V2 scal2(double s, V2 a) { return {s * a[0], s * a[1]}; }
inline double dot2(V2 a, V2 b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(V2 a) { return std::sqrt(dot2(a, a)); }
inline V2 matv(const M2& m, V2 v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}
inline double det2(const M2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
inline M2 inv2(const M2& m) {
  double d = det2(m);
  return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

enum class Model { FlatTorus, Euclidean, Sphere2, Hyperbolic2 };

struct Chart {
  Model model{Model::Euclidean};
  double r{1.0};           // curvature scale (sphere / hyperbolic radius)
  double period{0.0};      // flat-torus period (0 = not periodic)
  double box{1.0};         // domain half-width around the chart origin
  double injectivity{1.0};  // geodesic-length bound for log_map

  double conf(V2 x) const;              // e^{phi}
  V2 dphi(V2 x) const;                  // gradient of phi
  M2 metric(V2 x) const;
  M2 metric_inv(V2 x) const;
  double gdet(V2 x) const;
  // Gamma^a_{bc}; returns G[a] as the symmetric matrix in (b,c)
  std::array<M2, 2> christoffel(V2 x) const;
  double scalar_curvature() const;      // constant for every model
  bool in_domain(V2 x) const;
};

Chart make_chart(const std::string& model, double r = 1.0);
std::string model_name(Model m);

// ---- closed-form sphere oracles (independent of the ODE machinery) ---------

V3 sphere_embed(const Chart& c, V2 x);
V2 sphere_unembed(const Chart& c, V3 X);
V3 sphere_push(const Chart& c, V2 x, V2 u);  // tangent pushforward to R^3
double sphere_angle(const Chart& c, V2 x, V2 y);  // great-circle angle
V2 sphere_exp_oracle(const Chart& c, V2 x, V2 u);

}  // namespace geoweyl::num
