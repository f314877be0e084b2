#include <geoweyl/numeric_ops.hpp>
#include <geoweyl/quantize.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace geoweyl::num {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_flat(const Chart& c) {
  return c.model == Model::FlatTorus || c.model == Model::Euclidean;
}

double wrap(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

V2 chart_diff(const Chart& c, V2 x, V2 y) {
  V2 d = sub2(y, x);
  if (c.model == Model::FlatTorus) {
    d[0] = wrap(d[0], c.period);
    d[1] = wrap(d[1], c.period);
  }
  return d;
}

V2 geo_acc(const Chart& c, V2 x, V2 v) {
  auto G = c.christoffel(x);
  V2 a{};
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (int b = 0; b < 2; ++b)
      for (int d = 0; d < 2; ++d) s += G[i][b][d] * v[b] * v[d];
    a[i] = -s;
  }
  return a;
}

int steps_for(double len) {
  int n = (int)std::ceil(96.0 * len);
  return std::max(16, n);
}

V2 exp_map_n(const Chart& c, V2 x, V2 u, int N) {
  if (is_flat(c)) return add2(x, u);
  double h = 1.0 / N;
  V2 p = x, v = u;
  for (int s = 0; s < N; ++s) {
    V2 k1x = v, k1v = geo_acc(c, p, v);
    V2 x2 = add2(p, scal2(0.5 * h, k1x)), v2 = add2(v, scal2(0.5 * h, k1v));
    V2 k2x = v2, k2v = geo_acc(c, x2, v2);
    V2 x3 = add2(p, scal2(0.5 * h, k2x)), v3 = add2(v, scal2(0.5 * h, k2v));
    V2 k3x = v3, k3v = geo_acc(c, x3, v3);
    V2 x4 = add2(p, scal2(h, k3x)), v4 = add2(v, scal2(h, k3v));
    V2 k4x = v4, k4v = geo_acc(c, x4, v4);
    p = add2(p, scal2(h / 6.0,
                      add2(add2(k1x, scal2(2.0, add2(k2x, k3x))), k4x)));
    v = add2(v, scal2(h / 6.0,
                      add2(add2(k1v, scal2(2.0, add2(k2v, k3v))), k4v)));
  }
  return p;
}

double glen(const Chart& c, V2 x, V2 u) {
  return std::sqrt(std::max(0.0, dot2(u, matv(c.metric(x), u))));
}

// Newton shooting with a finite-difference Jacobian (recomputed sparsely);
// N is pinned by the caller so differencing the result in y stays smooth
V2 log_newton(const Chart& c, V2 x, V2 y, int N, double tol, double* det_dudy) {
  V2 u = chart_diff(c, x, y);
  if (is_flat(c)) {
    if (det_dudy) *det_dudy = 1.0;
    return u;
  }
  M2 Jinv{{{1.0, 0.0}, {0.0, 1.0}}};
  const double hj = 1e-6;
  bool have_j = false;
  for (int it = 0; it < 50; ++it) {
    V2 e = sub2(y, exp_map_n(c, x, u, N));
    double en = norm2(e);
    if (en < tol && (it > 0 || en == 0.0)) {
      if (det_dudy) {
        M2 J{};
        for (int j = 0; j < 2; ++j) {
          V2 up = u, um = u;
          up[j] += hj;
          um[j] -= hj;
          V2 d = sub2(exp_map_n(c, x, up, N), exp_map_n(c, x, um, N));
          J[0][j] = d[0] / (2.0 * hj);
          J[1][j] = d[1] / (2.0 * hj);
        }
        *det_dudy = 1.0 / det2(J);
      }
      return u;
    }
    if (!have_j || it % 3 == 0) {
      M2 J{};
      for (int j = 0; j < 2; ++j) {
        V2 up = u, um = u;
        up[j] += hj;
        um[j] -= hj;
        V2 d = sub2(exp_map_n(c, x, up, N), exp_map_n(c, x, um, N));
        J[0][j] = d[0] / (2.0 * hj);
        J[1][j] = d[1] / (2.0 * hj);
      }
      Jinv = inv2(J);
      have_j = true;
    }
    V2 du = matv(Jinv, e);
    // damping keeps the iterate inside the chart for larger separations
    double step = norm2(du) > 0.5 ? 0.5 / norm2(du) : 1.0;
    u = add2(u, scal2(step, du));
  }
  throw std::runtime_error("log_map: no convergence (outside convex neighbourhood?)");
}

int steps_guess(const Chart& c, V2 x, V2 y) {
  V2 d = chart_diff(c, x, y);
  V2 mid = add2(x, scal2(0.5, d));
  return steps_for(norm2(d) * c.conf(mid) + 0.05);
}

}  // namespace

V2 exp_map(const Chart& c, V2 x, V2 u) {
  return exp_map_n(c, x, u, steps_for(glen(c, x, u)));
}

V2 log_map(const Chart& c, V2 x, V2 y) {
  V2 u = log_newton(c, x, y, steps_guess(c, x, y), 1e-12, nullptr);
  if (glen(c, x, u) > 0.9 * c.injectivity)
    throw std::domain_error("log_map: beyond 0.9x injectivity bound");
  return u;
}

V2 log_map_jac(const Chart& c, V2 x, V2 y, double* det_dudy) {
  V2 u = log_newton(c, x, y, steps_guess(c, x, y), 1e-12, det_dudy);
  if (glen(c, x, u) > 0.9 * c.injectivity)
    throw std::domain_error("log_map: beyond 0.9x injectivity bound");
  return u;
}

V2 parallel_transport(const Chart& c, V2 x, V2 u, V2 v, double tau) {
  if (is_flat(c)) return v;
  int N = std::max(16, (int)std::ceil(96.0 * glen(c, x, u) * tau));
  double h = tau / N;
  V2 p = x, g = u, w = v;
  auto acc_w = [&](V2 xx, V2 gg, V2 ww) {
    auto G = c.christoffel(xx);
    V2 a{};
    for (int i = 0; i < 2; ++i) {
      double s = 0.0;
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) s += G[i][b][d] * gg[b] * ww[d];
      a[i] = -s;
    }
    return a;
  };
  for (int s = 0; s < N; ++s) {
    V2 k1x = g, k1g = geo_acc(c, p, g), k1w = acc_w(p, g, w);
    V2 x2 = add2(p, scal2(0.5 * h, k1x)), g2 = add2(g, scal2(0.5 * h, k1g)),
       w2 = add2(w, scal2(0.5 * h, k1w));
    V2 k2x = g2, k2g = geo_acc(c, x2, g2), k2w = acc_w(x2, g2, w2);
    V2 x3 = add2(p, scal2(0.5 * h, k2x)), g3 = add2(g, scal2(0.5 * h, k2g)),
       w3 = add2(w, scal2(0.5 * h, k2w));
    V2 k3x = g3, k3g = geo_acc(c, x3, g3), k3w = acc_w(x3, g3, w3);
    V2 x4 = add2(p, scal2(h, k3x)), g4 = add2(g, scal2(h, k3g)), w4 = add2(w, scal2(h, k3w));
    V2 k4x = g4, k4g = geo_acc(c, x4, g4), k4w = acc_w(x4, g4, w4);
    p = add2(p, scal2(h / 6.0, add2(add2(k1x, scal2(2.0, add2(k2x, k3x))), k4x)));
    g = add2(g, scal2(h / 6.0, add2(add2(k1g, scal2(2.0, add2(k2g, k3g))), k4g)));
    w = add2(w, scal2(h / 6.0, add2(add2(k1w, scal2(2.0, add2(k2w, k3w))), k4w)));
  }
  return w;
}

double synge_sigma(const Chart& c, V2 x, V2 y) {
  V2 u = log_map(c, x, y);
  return 0.5 * dot2(u, matv(c.metric(x), u));
}

double geo_dist(const Chart& c, V2 x, V2 y) { return std::sqrt(2.0 * synge_sigma(c, x, y)); }

double vvm_det(const Chart& c, V2 x, V2 y) {
  if (is_flat(c)) return 1.0;
  const double h = 1e-5;
  int N = steps_guess(c, x, y);
  M2 J{};
  for (int j = 0; j < 2; ++j) {
    V2 yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    V2 up = log_newton(c, x, yp, N, 1e-13, nullptr);
    V2 um = log_newton(c, x, ym, N, 1e-13, nullptr);
    J[0][j] = (up[0] - um[0]) / (2.0 * h);
    J[1][j] = (up[1] - um[1]) / (2.0 * h);
  }
  return det2(J) * std::sqrt(c.gdet(x) / c.gdet(y));
}

V2 z_tau(const Chart& c, V2 x, V2 y, double tau) {
  V2 u = log_map(c, x, y);
  return exp_map(c, x, scal2(tau, u));
}

V2 u_tau(const Chart& c, V2 x, V2 y, double tau) {
  V2 z = z_tau(c, x, y, tau);
  if (tau < 0.999) return scal2(1.0 / (1.0 - tau), log_map(c, z, y));
  return scal2(-1.0 / tau, log_map(c, z, x));
}

double upsilon(const Chart& c, double tau, V2 x, V2 y) {
  V2 z = z_tau(c, x, y, tau);
  double d = vvm_det(c, x, y);
  return std::sqrt(d) * std::pow(c.gdet(x) * c.gdet(y), 0.25) / std::sqrt(c.gdet(z));
}

// ---- cutoff ----------------------------------------------------------------

double CutoffSpec::chi(double s) const {
  if (s <= r1) return 1.0;
  if (s >= r2) return 0.0;
  double t = (s - r1) / (r2 - r1);
  auto f = [](double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; };
  return f(1.0 - t) / (f(1.0 - t) + f(t));
}

// ---- kernels ---------------------------------------------------------------

Cx op_tau_kernel(const Chart& c, const GaussianSymbol& b, const CutoffSpec& cut, double tau,
                 double hbar, V2 x, V2 y) {
  double detlog = 1.0;
  V2 l;
  try {
    l = log_newton(c, x, y, steps_guess(c, x, y), 1e-12, &detlog);
  } catch (const std::runtime_error&) {
    return 0.0;
  }
  double s = glen(c, x, l);
  double ch = cut.chi(s);
  if (ch == 0.0) return 0.0;
  V2 z = exp_map(c, x, scal2(tau, l));
  double vvm = detlog * std::sqrt(c.gdet(x) / c.gdet(y));
  double ups = std::sqrt(vvm) * std::pow(c.gdet(x) * c.gdet(y), 0.25) / std::sqrt(c.gdet(z));
  // |u_tau|_g equals the geodesic distance (parallel transport of the chord)
  double gauss = std::exp(-s * s / (2.0 * b.alpha * hbar * hbar));
  double pref = (2.0 * kPi / b.alpha) * std::sqrt(c.gdet(z)) /
                ((2.0 * kPi * hbar) * (2.0 * kPi * hbar));
  return ch * ups * pref * gauss * b.f(z);
}

Cx kernel_to_symbol(const Chart& c, const KernelFn& K, double tau, double hbar, V2 z, V2 p,
                    double uwin, int n) {
  auto gl = gauss_legendre(n);
  Cx acc = 0.0;
  for (const auto& [ti, wi] : gl)
    for (const auto& [tj, wj] : gl) {
      V2 u{uwin * ti, uwin * tj};
      V2 x = exp_map(c, z, scal2(-tau, u));
      V2 y = exp_map(c, z, scal2(1.0 - tau, u));
      Cx k = K(x, y);
      if (k == Cx(0.0)) continue;
      double ups = upsilon(c, tau, x, y);
      Cx ph = std::exp(Cx(0.0, dot2(u, p) / hbar));
      acc += wi * wj * uwin * uwin * k * ph / ups;
    }
  return acc;
}

// ---- small numerics --------------------------------------------------------

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  std::vector<std::pair<double, double>> r((std::size_t)n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r[(std::size_t)i] = {x, 2.0 / ((1.0 - x * x) * pp * pp)};
  }
  return r;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double eval_const_curvature(const Poly& p, double K, const std::map<std::int32_t, V2>& vecs) {
  double total = 0.0;
  for (const Term& t : p.ts) {
    if (t.c.im != 0) throw std::invalid_argument("eval_const_curvature: complex coefficient");
    // assign each principal slot a summation-index id: dummy pairs share one,
    // each Vec slot gets its own (weighted by the vector components)
    std::map<std::int32_t, int> dummy_pos;
    int nidx = 0;
    std::vector<const V2*> weight;                // per index: components or null
    std::vector<std::vector<int>> factor_idx;     // per factor: index id per prin slot
    bool zero = false;
    for (const auto& f : t.fs) {
      if (f.head == Head::Sigma || f.head == Head::Atom)
        throw std::invalid_argument("eval_const_curvature: unsupported factor head");
      if (!f.tail.empty()) zero = true;  // nabla R = 0 at constant curvature
      auto& idx = factor_idx.emplace_back();
      for (const Slot& s : f.prin) {
        if (s.bind == Bind::Dummy) {
          auto it = dummy_pos.find(s.id);
          if (it == dummy_pos.end()) {
            it = dummy_pos.emplace(s.id, nidx++).first;
            weight.push_back(nullptr);
          }
          idx.push_back(it->second);
        } else if (s.bind == Bind::Vec) {
          auto vit = vecs.find(s.id);
          if (vit == vecs.end()) throw std::invalid_argument("eval_const_curvature: unknown vector");
          weight.push_back(&vit->second);
          idx.push_back(nidx++);
        } else {
          throw std::invalid_argument("eval_const_curvature: unsupported slot binding");
        }
      }
    }
    if (zero) continue;
    double sum = 0.0;
    std::vector<int> a((std::size_t)nidx, 0);
    for (long code = 0; code < (1L << nidx); ++code) {
      double w = 1.0;
      for (int i = 0; i < nidx; ++i) {
        a[(std::size_t)i] = (int)((code >> i) & 1);
        if (weight[(std::size_t)i]) w *= (*weight[(std::size_t)i])[(std::size_t)a[(std::size_t)i]];
      }
      if (w == 0.0) continue;
      double prod = w;
      for (std::size_t fi = 0; fi < t.fs.size() && prod != 0.0; ++fi) {
        const auto& idx = factor_idx[fi];
        auto cv = [&](std::size_t k) { return a[(std::size_t)idx[k]]; };
        switch (t.fs[fi].head) {
          case Head::Metric:
            prod *= (cv(0) == cv(1)) ? 1.0 : 0.0;
            break;
          case Head::Ricci:  // (d-1) K delta with d = 2
            prod *= (cv(0) == cv(1)) ? K : 0.0;
            break;
          case Head::Riemann:
            prod *= K * ((cv(0) == cv(2) && cv(1) == cv(3) ? 1.0 : 0.0) -
                         (cv(0) == cv(3) && cv(1) == cv(2) ? 1.0 : 0.0));
            break;
          default:
            break;
        }
      }
      sum += prod;
    }
    total += t.c.re.convert_to<double>() * sum;
  }
  return total;
}

// ---- experiments -----------------------------------------------------------

namespace {

Report make_report(std::string name, double lhs, double rhs, double rel, double tol, int lo,
                   int hi) {
  Report r;
  r.experiment = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.rel_err = rel;
  r.tol = tol;
  r.res_lo = lo;
  r.res_hi = hi;
  r.pass = rel < tol;
  return r;
}

// kernels of two Gaussian symbols at one point pair, sharing the geometry
struct KernelPair {
  Cx a{0.0}, b{0.0};
};

KernelPair kernel_pair(const Chart& c, const GaussianSymbol& A, const GaussianSymbol& B,
                       const CutoffSpec& cut, double tau, double hbar, V2 x, V2 y) {
  KernelPair r;
  double detlog = 1.0;
  V2 l;
  try {
    l = log_newton(c, x, y, steps_guess(c, x, y), 1e-12, &detlog);
  } catch (const std::runtime_error&) {
    return r;
  }
  double s = glen(c, x, l);
  double ch = cut.chi(s);
  if (ch == 0.0) return r;
  V2 z = exp_map(c, x, scal2(tau, l));
  double vvm = detlog * std::sqrt(c.gdet(x) / c.gdet(y));
  double ups = std::sqrt(vvm) * std::pow(c.gdet(x) * c.gdet(y), 0.25) / std::sqrt(c.gdet(z));
  double base = ch * ups * std::sqrt(c.gdet(z)) / ((2.0 * kPi * hbar) * (2.0 * kPi * hbar));
  r.a = base * (2.0 * kPi / A.alpha) * std::exp(-s * s / (2.0 * A.alpha * hbar * hbar)) * A.f(z);
  r.b = base * (2.0 * kPi / B.alpha) * std::exp(-s * s / (2.0 * B.alpha * hbar * hbar)) * B.f(z);
  return r;
}

// Hilbert-Schmidt pairing of two Gaussian-symbol kernels: quadrature over the
// base point x (nodes xs with weights xw) and the chart chord u (GL, window w)
Cx hs_lhs(const Chart& c, const GaussianSymbol& A, const GaussianSymbol& B, const CutoffSpec& cut,
          double tau, double hbar, const std::vector<std::pair<V2, double>>& xs, double w, int nu) {
  auto gl = gauss_legendre(nu);
  std::vector<Cx> partial(xs.size(), Cx(0.0));
  parallel_for((int)xs.size(), [&](int i) {
    const auto& [x, xwt] = xs[(std::size_t)i];
    Cx acc = 0.0;
    for (const auto& [ti, wi] : gl)
      for (const auto& [tj, wj] : gl) {
        V2 y = add2(x, V2{w * ti, w * tj});
        KernelPair k = kernel_pair(c, A, B, cut, tau, hbar, x, y);
        acc += wi * wj * w * w * std::conj(k.a) * k.b;
      }
    partial[(std::size_t)i] = xwt * acc;
  });
  Cx total = 0.0;
  for (Cx v : partial) total += v;
  return total;
}

double eval_operator(const Chart& c, const Poly& op, const std::function<double(V2)>& psi, V2 x) {
  const double h = 1e-3;
  auto at = [&](double dx, double dy) { return psi(V2{x[0] + dx, x[1] + dy}); };
  double f0 = at(0, 0);
  double d1[2] = {(at(h, 0) - at(-h, 0)) / (2 * h), (at(0, h) - at(0, -h)) / (2 * h)};
  double d2[2][2];
  d2[0][0] = (at(h, 0) - 2 * f0 + at(-h, 0)) / (h * h);
  d2[1][1] = (at(0, h) - 2 * f0 + at(0, -h)) / (h * h);
  d2[0][1] = d2[1][0] = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  double e = c.conf(x);
  auto G = c.christoffel(x);
  // orthonormal-frame components of the covariant derivatives of psi
  double F1[2], F2[2][2];
  for (int a = 0; a < 2; ++a) F1[a] = d1[a] / e;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double v = d2[a][b];
      for (int cc = 0; cc < 2; ++cc) v -= G[cc][a][b] * d1[cc];
      F2[a][b] = v / (e * e);
    }
  double K = 0.5 * c.scalar_curvature();  // R_{abcd} = K (gg - gg), d = 2

  double total = 0.0;
  for (const Term& t : op.ts) {
    if (t.c.im != 0) throw std::invalid_argument("eval_operator: complex coefficient");
    std::map<std::int32_t, int> dummy_pos;
    int nidx = 0;
    std::vector<std::vector<int>> factor_idx;
    bool zero = false;
    for (const auto& f : t.fs) {
      auto& idx = factor_idx.emplace_back();
      const auto& slots = f.head == Head::Atom ? f.tail : f.prin;
      if (f.head != Head::Atom && !f.tail.empty()) zero = true;
      if (f.head == Head::Atom && !f.vert.empty())
        throw std::invalid_argument("eval_operator: vertical operand slot");
      for (const Slot& s : slots) {
        if (s.bind != Bind::Dummy) throw std::invalid_argument("eval_operator: open slot");
        auto it = dummy_pos.find(s.id);
        if (it == dummy_pos.end()) it = dummy_pos.emplace(s.id, nidx++).first;
        idx.push_back(it->second);
      }
    }
    if (zero) continue;
    double sum = 0.0;
    std::vector<int> a((std::size_t)std::max(nidx, 1), 0);
    for (long code = 0; code < (1L << nidx); ++code) {
      for (int i = 0; i < nidx; ++i) a[(std::size_t)i] = (int)((code >> i) & 1);
      double prod = 1.0;
      for (std::size_t fi = 0; fi < t.fs.size() && prod != 0.0; ++fi) {
        const auto& idx = factor_idx[fi];
        auto cv = [&](std::size_t k) { return a[(std::size_t)idx[k]]; };
        switch (t.fs[fi].head) {
          case Head::Metric:
            prod *= (cv(0) == cv(1)) ? 1.0 : 0.0;
            break;
          case Head::Ricci:
            prod *= (cv(0) == cv(1)) ? K : 0.0;
            break;
          case Head::Riemann:
            prod *= K * ((cv(0) == cv(2) && cv(1) == cv(3) ? 1.0 : 0.0) -
                         (cv(0) == cv(3) && cv(1) == cv(2) ? 1.0 : 0.0));
            break;
          case Head::Atom:
            if (idx.size() == 0)
              prod *= f0;
            else if (idx.size() == 1)
              prod *= F1[cv(0)];
            else if (idx.size() == 2)
              prod *= F2[cv(0)][cv(1)];
            else
              throw std::invalid_argument("eval_operator: operand derivative order > 2");
            break;
          default:
            throw std::invalid_argument("eval_operator: unsupported factor head");
        }
      }
      sum += prod;
    }
    total += t.c.re.convert_to<double>() * sum;  // hbar = 1
  }
  return total;
}

double det4(double m[4][4]) {
  double a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
  double det = 1.0;
  for (int k = 0; k < 4; ++k) {
    int piv = k;
    for (int i = k + 1; i < 4; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (piv != k) {
      for (int j = 0; j < 4; ++j) std::swap(a[k][j], a[piv][j]);
      det = -det;
    }
    if (a[k][k] == 0.0) return 0.0;
    det *= a[k][k];
    for (int i = k + 1; i < 4; ++i) {
      double f = a[i][k] / a[k][k];
      for (int j = k; j < 4; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return det;
}

std::vector<std::pair<V2, double>> torus_grid(const Chart& c, int m) {
  std::vector<std::pair<V2, double>> xs;
  double h = c.period / m, w = h * h;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) xs.push_back({V2{i * h, j * h}, w});
  return xs;
}

std::vector<std::pair<V2, double>> box_grid(double half, int m) {
  auto gl = gauss_legendre(m);
  std::vector<std::pair<V2, double>> xs;
  for (const auto& [ti, wi] : gl)
    for (const auto& [tj, wj] : gl) xs.push_back({V2{half * ti, half * tj}, wi * wj * half * half});
  return xs;
}

}  // namespace

Report trace_check_flat(double hbar, int n) {
  Chart c = make_chart("flat-torus");
  GaussianSymbol A{[](V2 z) { return std::exp(Cx(0, z[0])) + 0.5 * std::exp(Cx(0, 2 * z[1])); },
                   0.03};
  GaussianSymbol B{A.f, 0.05};
  CutoffSpec cut{1.2, 2.0};
  double tau = 0.5;
  double rhs = (2 * kPi) * (2 * kPi) * 1.25 * (2 * kPi / (A.alpha + B.alpha)) /
               ((2 * kPi * hbar) * (2 * kPi * hbar));
  auto xs = torus_grid(c, 16);
  double w = std::min(1.2, 7.0 * std::sqrt(B.alpha) * hbar);
  Cx lo = hs_lhs(c, A, B, cut, tau, hbar, xs, w, n);
  Cx hi = hs_lhs(c, A, B, cut, tau, hbar, xs, w, 2 * n);
  double rel = std::max(std::abs(hi - Cx(rhs)), std::abs(hi - lo)) / std::abs(rhs);
  return make_report("trace-flat-torus", hi.real(), rhs, rel, 1e-6, n, 2 * n);
}

Report trace_check_sphere(double hbar, int n) {
  Chart c = make_chart("sphere-2");
  GaussianSymbol A{[](V2 z) { return Cx(std::exp(-dot2(z, z) / (2 * 0.18 * 0.18))); }, 0.02};
  GaussianSymbol B{[](V2 z) {
                     double d = (z[0] - 0.04) * (z[0] - 0.04) + z[1] * z[1];
                     return Cx(std::exp(-d / (2 * 0.22 * 0.22)));
                   },
                   0.03};
  CutoffSpec cut{0.6, 0.9};
  double tau = 0.5, xb = 0.8, w = 0.4;
  // right-hand side: closed-form momentum integral, base-point quadrature
  double rhs = 0.0;
  for (const auto& [z, wt] : box_grid(xb, 80))
    rhs += wt * (A.f(z) * B.f(z)).real() * (2 * kPi / (A.alpha + B.alpha)) *
           std::sqrt(c.gdet(z)) / ((2 * kPi * hbar) * (2 * kPi * hbar));
  // the chord integrand is much narrower than the symbol profile: resolve u
  // with ~3x the node count of the base-point grid
  int hi_n = n + n / 2;
  Cx lo = hs_lhs(c, A, B, cut, tau, hbar, box_grid(xb, n + 4), w, (10 * n) / 3);
  Cx hi = hs_lhs(c, A, B, cut, tau, hbar, box_grid(xb, n + 6), w, (15 * n) / 4);
  double rel = std::max(std::abs(hi - Cx(rhs)), std::abs(hi - lo)) / std::abs(rhs);
  return make_report("trace-sphere-cap", hi.real(), rhs, rel, 1e-4, n, hi_n);
}

Report roundtrip_check_flat(double hbar, int n) {
  Chart c = make_chart("flat-torus");
  GaussianSymbol A{[](V2 z) { return std::exp(Cx(0, z[0])); }, 0.05};
  CutoffSpec cut{1.2, 2.0};
  double tau = 0.5;
  KernelFn K = [&](V2 x, V2 y) { return op_tau_kernel(c, A, cut, tau, hbar, x, y); };
  V2 z{1.0, 2.0};
  std::vector<V2> ps{{0.0, 0.0}, {0.7, -0.3}, {1.5, 0.5}};
  double w = std::min(1.2, 7.0 * std::sqrt(A.alpha) * hbar);
  double rel = 0.0, lhs = 0.0, rhs = 0.0;
  for (V2 p : ps) {
    Cx exact = A.f(z) * std::exp(-A.alpha * dot2(p, p) / 2.0);
    Cx got_lo = kernel_to_symbol(c, K, tau, hbar, z, p, w, n);
    Cx got = kernel_to_symbol(c, K, tau, hbar, z, p, w, 2 * n);
    double e = std::max(std::abs(got - exact), std::abs(got - got_lo)) / std::abs(exact);
    if (e > rel) {
      rel = e;
      lhs = got.real();
      rhs = exact.real();
    }
  }
  return make_report("symbol-kernel-roundtrip", lhs, rhs, rel, 1e-6, n, 2 * n);
}

Report laplace_residual(const std::string& model) {
  Chart c = make_chart(model);
  std::function<double(V2)> psi;
  double half;
  if (c.model == Model::Sphere2) {
    psi = [c](V2 x) { return sphere_embed(c, x)[2] / c.r; };
    half = 0.8;
  } else if (c.model == Model::Hyperbolic2) {
    psi = [](V2 x) { return std::sin(1.1 * x[0] + 0.3) * std::cos(0.7 * x[1]); };
    half = 0.35;
  } else {
    psi = [](V2 x) { return std::sin(1.3 * x[0] + 0.4) * std::cos(0.9 * x[1]); };
    half = 1.0;
  }
  static const Poly op = quantize_polynomial(
      Poly(Term{GQ(1), 0, {metric(mom_up(), mom_up())}}), Rat(1, 2));
  const double h = 1e-3;
  double max_abs = 0.0, max_rhs = 0.0, lhs0 = 0.0, rhs0 = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      V2 x{half * (i - 2) / 2.5, half * (j - 2) / 2.5};
      double lhs = eval_operator(c, op, psi, x);
      // oracle: divergence-form Laplace-Beltrami by nested central differences
      auto flux = [&](V2 q, int k) {
        double d1[2] = {(psi(V2{q[0] + h, q[1]}) - psi(V2{q[0] - h, q[1]})) / (2 * h),
                        (psi(V2{q[0], q[1] + h}) - psi(V2{q[0], q[1] - h})) / (2 * h)};
        M2 gi = c.metric_inv(q);
        return std::sqrt(c.gdet(q)) * (gi[k][0] * d1[0] + gi[k][1] * d1[1]);
      };
      double div = (flux(V2{x[0] + h, x[1]}, 0) - flux(V2{x[0] - h, x[1]}, 0) +
                    flux(V2{x[0], x[1] + h}, 1) - flux(V2{x[0], x[1] - h}, 1)) /
                   (2 * h);
      double rhs = -div / std::sqrt(c.gdet(x)) + c.scalar_curvature() / 6.0 * psi(x);
      if (std::abs(rhs) > max_rhs) {
        max_rhs = std::abs(rhs);
        lhs0 = lhs;
        rhs0 = rhs;
      }
      max_abs = std::max(max_abs, std::abs(lhs - rhs));
    }
  double tol = c.model == Model::Euclidean || c.model == Model::FlatTorus ? 1e-6 : 1e-4;
  return make_report("laplace-" + model, lhs0, rhs0, max_abs / max_rhs, tol, 5, 5);
}

Report jacobian_identity_check(const std::string& model, double tau) {
  Chart c = make_chart(model);
  V2 x, y;
  if (c.model == Model::Sphere2) {
    x = {0.12, -0.07};
    y = {0.33, 0.21};
  } else if (c.model == Model::Hyperbolic2) {
    x = {0.05, -0.03};
    y = {0.22, 0.17};
  } else {
    x = {1.0, 2.0};
    y = {1.5, 2.6};
  }
  auto F = [&](const double q[4], double out[4]) {
    V2 xx{q[0], q[1]}, yy{q[2], q[3]};
    V2 l = log_map(c, xx, yy);
    V2 z = exp_map(c, xx, scal2(tau, l));
    V2 u = tau < 0.999 ? scal2(1.0 / (1.0 - tau), log_map(c, z, yy))
                       : scal2(-1.0 / tau, log_map(c, z, xx));
    out[0] = z[0];
    out[1] = z[1];
    out[2] = u[0];
    out[3] = u[1];
  };
  const double h = 2e-4;
  double J[4][4], q0[4] = {x[0], x[1], y[0], y[1]};
  for (int j = 0; j < 4; ++j) {
    double qp[4], qm[4], fp[4], fm[4];
    for (int k = 0; k < 4; ++k) qp[k] = qm[k] = q0[k];
    qp[j] += h;
    qm[j] -= h;
    F(qp, fp);
    F(qm, fm);
    for (int i = 0; i < 4; ++i) J[i][j] = (fp[i] - fm[i]) / (2 * h);
  }
  double lhs = std::abs(det4(J));
  V2 z = z_tau(c, x, y, tau);
  double rhs = vvm_det(c, x, y) * std::sqrt(c.gdet(x) * c.gdet(y)) / c.gdet(z);
  return make_report("measure-jacobian-" + model + "-tau", lhs, rhs,
                     std::abs(lhs - rhs) / std::abs(rhs), 1e-5, 0, 0);
}

Report vvm_sphere_oracle_check() {
  Chart c = make_chart("sphere-2");
  V2 x{0.1, 0.2};
  double rel = 0.0, lhs0 = 0.0, rhs0 = 0.0;
  for (double th : {0.15, 0.3, 0.5, 0.8, 1.0})
    for (V2 dir : {V2{0.6, 0.8}, V2{-1.0, 0.0}}) {
      V2 u = scal2(th / (c.conf(x) * norm2(dir)), dir);
      V2 y = exp_map(c, x, u);
      double t = sphere_angle(c, x, y);
      double oracle = t / std::sin(t);
      double got = vvm_det(c, x, y);
      double e = std::abs(got - oracle) / oracle;
      if (e > rel) {
        rel = e;
        lhs0 = got;
        rhs0 = oracle;
      }
    }
  return make_report("vvm-sphere-oracle", lhs0, rhs0, rel, 1e-6, 0, 0);
}

Report synge_identity_check(const std::string& model) {
  Chart c = make_chart(model);
  std::vector<std::pair<V2, V2>> pairs;
  if (c.model == Model::Hyperbolic2)
    pairs = {{{0.05, -0.1}, {0.25, 0.15}}, {{-0.2, 0.0}, {0.1, 0.2}}};
  else if (c.model == Model::Sphere2)
    pairs = {{{0.1, 0.2}, {0.5, -0.1}}, {{-0.3, 0.1}, {0.2, 0.4}}};
  else
    pairs = {{{1.0, 2.0}, {1.6, 2.5}}, {{0.5, 0.5}, {1.2, 0.1}}};
  const double h = 1e-4;
  double worst = 0.0, lhs0 = 0.0, rhs0 = 0.0;
  for (auto& [x, y] : pairs) {
    // (D-2) sigma = 0: contract the finite-difference gradient with itself
    double sg[2];
    for (int k = 0; k < 2; ++k) {
      V2 xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      sg[k] = (synge_sigma(c, xp, y) - synge_sigma(c, xm, y)) / (2 * h);
    }
    M2 gi = c.metric_inv(x);
    double s2 = 2.0 * synge_sigma(c, x, y);
    double d2s = gi[0][0] * sg[0] * sg[0] + 2 * gi[0][1] * sg[0] * sg[1] + gi[1][1] * sg[1] * sg[1];
    worst = std::max(worst, std::abs(d2s - s2) / s2);
    if (worst == std::abs(d2s - s2) / s2) {
      lhs0 = d2s;
      rhs0 = s2;
    }
    // (D-1) sigma^mu = 0 with sigma^mu = -(y-x)^mu
    auto sup = [&](V2 q) { return scal2(-1.0, log_map(c, q, y)); };
    V2 s0 = sup(x);
    auto G = c.christoffel(x);
    double nrm = norm2(s0);
    for (int m = 0; m < 2; ++m) {
      double v = 0.0;
      for (int nu = 0; nu < 2; ++nu) {
        V2 xp = x, xm = x;
        xp[nu] += h;
        xm[nu] -= h;
        double dmn = (sup(xp)[m] - sup(xm)[m]) / (2 * h);
        double cov = dmn + G[m][nu][0] * s0[0] + G[m][nu][1] * s0[1];
        v += s0[nu] * cov;
      }
      worst = std::max(worst, std::abs(v - s0[m]) / nrm);
    }
  }
  return make_report("synge-identities-" + model, lhs0, rhs0, worst, 1e-7, 0, 0);
}

Report cutoff_decay_check() {
  Chart c = make_chart("sphere-2");
  GaussianSymbol A{[](V2) { return Cx(1.0); }, 2.0};
  CutoffSpec c1{0.45, 0.75}, c2{0.55, 0.85};
  V2 x{0.0, 0.0};
  std::vector<V2> ys;
  for (double s : {0.5, 0.6, 0.7}) ys.push_back(exp_map(c, x, V2{s / c.conf(x), 0.0}));
  V2 yin = exp_map(c, x, V2{0.3 / c.conf(x), 0.0});
  std::vector<double> hs, ds;
  for (double hb = 0.6; hb > 0.055; hb *= 0.72) {
    double d = 0.0;
    for (V2 y : ys)
      d = std::max(d, std::abs(op_tau_kernel(c, A, c1, 0.5, hb, x, y) -
                               op_tau_kernel(c, A, c2, 0.5, hb, x, y)));
    hs.push_back(hb);
    ds.push_back(d);
  }
  double inner = std::abs(op_tau_kernel(c, A, c1, 0.5, 0.3, x, yin) -
                          op_tau_kernel(c, A, c2, 0.5, 0.3, x, yin));
  double slope = fit_slope(hs, ds);
  Report r = make_report("cutoff-decay", slope, 3.0, 0.0, 1.0, (int)hs.size(), 0);
  r.pass = slope > 3.0 && inner == 0.0;
  r.rel_err = inner;
  return r;
}

Report zeta_scaling_check(int order) {
  Chart c = make_chart("sphere-2");
  V2 z{0.0, 0.0}, dir{0.6, 0.8};
  bool use_oracle = order > 3;  // small-separation errors need the exact reference
  double t0 = use_oracle ? 0.06 : 0.12;
  std::vector<double> ts, errs;
  const Poly& zs = zeta_series(order);
  for (int i = 0; i < 8; ++i) {
    double t = t0 * std::pow(10.0, i / 7.0);
    V2 uf = scal2(t, dir);  // orthonormal-frame components, |uf| = t
    V2 y = exp_map(c, z, scal2(1.0 / c.conf(z), uf));
    double zn;
    if (use_oracle) {
      double th = sphere_angle(c, z, y);
      zn = 0.5 * std::log(th / std::sin(th));
    } else {
      zn = 0.5 * std::log(vvm_det(c, z, y));
    }
    double zser = eval_const_curvature(zs, 1.0, {{VEC_U, uf}});
    ts.push_back(t);
    errs.push_back(std::abs(zser - zn));
  }
  double slope = fit_slope(ts, errs);
  double nominal = order + 1.0;
  Report r = make_report("zeta-scaling-order-" + std::to_string(order), slope, nominal,
                         std::abs(slope - nominal), 0.3, 8, 0);
  return r;
}

Report vvm_series_check() {
  Chart c = make_chart("sphere-2");
  V2 z{0.0, 0.0}, dir{0.28, -0.96};
  const Poly& zs = zeta_series(5);
  double max_err = 0.0;
  for (double t : {0.1, 0.2, 0.3, 0.35}) {
    V2 uf = scal2(t, dir);
    V2 y = exp_map(c, z, scal2(1.0 / c.conf(z), uf));
    double ser = std::exp(2.0 * eval_const_curvature(zs, 1.0, {{VEC_U, uf}}));
    max_err = std::max(max_err, std::abs(ser - vvm_det(c, z, y)));
  }
  return make_report("vvm-vs-series", max_err, 0.0, max_err, 1e-6, 0, 0);
}

std::vector<std::pair<std::string, std::function<Report()>>> report_catalog(double hbar, int n) {
  std::vector<std::pair<std::string, std::function<Report()>>> cat;
  cat.emplace_back("trace-flat-torus", [=] { return trace_check_flat(hbar, n); });
  cat.emplace_back("trace-sphere-cap",
                   [=] { return trace_check_sphere(hbar, std::max(10, n / 3)); });
  cat.emplace_back("roundtrip-flat", [=] { return roundtrip_check_flat(hbar, n); });
  cat.emplace_back("laplace-euclidean", [] { return laplace_residual("euclidean"); });
  cat.emplace_back("laplace-sphere-2", [] { return laplace_residual("sphere-2"); });
  for (double tau : {0.0, 0.25, 0.5, 1.0})
    cat.emplace_back("jacobian-sphere-2-tau" + std::to_string(tau), [tau] {
      Report r = jacobian_identity_check("sphere-2", tau);
      r.experiment += std::to_string(tau);
      return r;
    });
  cat.emplace_back("vvm-sphere-oracle", [] { return vvm_sphere_oracle_check(); });
  cat.emplace_back("synge-sphere-2", [] { return synge_identity_check("sphere-2"); });
  cat.emplace_back("synge-hyperbolic-2", [] { return synge_identity_check("hyperbolic-2"); });
  cat.emplace_back("cutoff-decay", [] { return cutoff_decay_check(); });
  cat.emplace_back("zeta-scaling-3", [] { return zeta_scaling_check(3); });
  cat.emplace_back("zeta-scaling-5", [] { return zeta_scaling_check(5); });
  cat.emplace_back("vvm-series", [] { return vvm_series_check(); });
  return cat;
}

std::vector<Report> all_reports(double hbar, int n) {
  std::vector<Report> rs;
  for (auto& [name, fn] : report_catalog(hbar, n)) rs.push_back(fn());
  return rs;
}

int thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* e = std::getenv("GEOWEYL_THREADS")) {
    int v = std::atoi(e);
    if (v > 0 && (unsigned)v < hw) hw = (unsigned)v;
  }
  return (int)hw;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int nt = std::min(thread_count(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> ts;
  for (int t = 0; t < nt; ++t)
    ts.emplace_back([&, t] {
      for (int i = t; i < n; i += nt) fn(i);
    });
  for (auto& th : ts) th.join();
}

}  // namespace geoweyl::num
