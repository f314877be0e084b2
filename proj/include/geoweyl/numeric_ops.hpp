#pragma once

// Numerical geodesic calculus on the concrete charts: exponential/logarithm
// maps, parallel transport, the world function and spreading determinant, the
// symbol <-> kernel maps for Gaussian-in-momentum symbols (all momentum
// integrals closed-form), and the quadrature experiments that verify the
// exact identities of the symbolic engine.

#include <geoweyl/chart.hpp>
#include <geoweyl/tensor.hpp>

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace geoweyl::num {

using Cx = std::complex<double>;

// ---- geodesics and transport ----------------------------------------------

// geodesic flow to parameter 1 by fixed-step RK4 (step count scales with the
// geodesic length; error well under 1e-10 per unit length on these charts)
V2 exp_map(const Chart& c, V2 x, V2 u);

// damped Newton shooting for exp_map(x, u) = y; throws std::domain_error
// beyond 0.9x the injectivity bound and std::runtime_error on no convergence
V2 log_map(const Chart& c, V2 x, V2 y);
// variant that also returns det(d log / d y) from the final Newton Jacobian
V2 log_map_jac(const Chart& c, V2 x, V2 y, double* det_dudy);

// transports v along t -> exp_x(t u) from t=0 to t=tau
V2 parallel_transport(const Chart& c, V2 x, V2 u, V2 v, double tau = 1.0);

double synge_sigma(const Chart& c, V2 x, V2 y);  // half squared distance
double geo_dist(const Chart& c, V2 x, V2 y);

// spreading determinant |d(y-x)/dy| |g(x)|^(1/2) / |g(y)|^(1/2) by central
// differences of log_map (accurate standalone version)
double vvm_det(const Chart& c, V2 x, V2 y);

V2 z_tau(const Chart& c, V2 x, V2 y, double tau);  // exp_x(tau log_x y)
V2 u_tau(const Chart& c, V2 x, V2 y, double tau);  // transported chord at z_tau
double upsilon(const Chart& c, double tau, V2 x, V2 y);  // geometric factor

// ---- symbols, kernels, cutoff ---------------------------------------------

struct CutoffSpec {
  double r1{0.5}, r2{0.9};     // geodesic radii: chi=1 inside r1, 0 outside r2
  double chi(double s) const;  // smooth bump profile
};

// b(z,p) = f(z) exp(-alpha g^{-1}_z(p,p) / 2); all p-integrals closed-form
struct GaussianSymbol {
  std::function<Cx(V2)> f;
  double alpha{1.0};
};

Cx op_tau_kernel(const Chart& c, const GaussianSymbol& b, const CutoffSpec& cut, double tau,
                 double hbar, V2 x, V2 y);

using KernelFn = std::function<Cx(V2, V2)>;

// inverse map: quadrature over the chord u in [-uwin, uwin]^2 with an n x n
// Gauss-Legendre rule
Cx kernel_to_symbol(const Chart& c, const KernelFn& K, double tau, double hbar, V2 z, V2 p,
                    double uwin, int n);

// ---- experiments -----------------------------------------------------------

struct Report {
  std::string experiment;
  double lhs{0}, rhs{0};
  double rel_err{0};
  double tol{0};
  int res_lo{0}, res_hi{0};  // resolution pair used for the doubling check
  bool pass{false};
};

Report trace_check_flat(double hbar, int n);
Report trace_check_sphere(double hbar, int n);
Report roundtrip_check_flat(double hbar, int n);
Report laplace_residual(const std::string& model);
Report jacobian_identity_check(const std::string& model, double tau);
Report vvm_sphere_oracle_check();
Report synge_identity_check(const std::string& model);
Report cutoff_decay_check();
Report zeta_scaling_check(int order);   // fit exponent vs nominal order+1
Report vvm_series_check();              // exp(2 zeta) vs spreading determinant

// experiments by name, lazily; all_reports runs every entry
std::vector<std::pair<std::string, std::function<Report()>>> report_catalog(double hbar, int n);
std::vector<Report> all_reports(double hbar, int n);

// ---- small numerics --------------------------------------------------------

// nodes/weights on [-1, 1]
std::vector<std::pair<double, double>> gauss_legendre(int n);

// least-squares slope of log y vs log x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// evaluates a symbolic series on a constant-curvature frame:
// R_{abcd} = K (d_ac d_bd - d_ad d_bc) in an orthonormal frame, d = 2;
// factors with derivative tails vanish; Vec slots take components from vecs
double eval_const_curvature(const Poly& p, double K, const std::map<std::int32_t, V2>& vecs);

int thread_count();  // hardware, capped by GEOWEYL_THREADS
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace geoweyl::num
