// Command-line front end: prints the symbolic tables and expansions, runs the
// self-check suites, and drives the numerical experiments.
//
// Exit codes: 0 on success, 1 when a requested check fails (a diff is printed
// on stdout), 2 on usage errors.  All stdout output is deterministic for a
// given command line; progress notes go to stderr.

#include <geoweyl/numeric_ops.hpp>
#include <geoweyl/quantize.hpp>
#include <geoweyl/sigma.hpp>
#include <geoweyl/star.hpp>
#include <geoweyl/triangle.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace geoweyl;
using nlohmann::ordered_json;

namespace {

NameTable limit_names() {
  NameTable nt;
  nt.free_names[MU] = "mu";
  for (int i = 1; i <= 8; ++i) {
    nt.free_names[GROUP_A_BASE + i] = "a" + std::to_string(i);
    nt.free_names[GROUP_B_BASE + i] = "b" + std::to_string(i);
  }
  return nt;
}

NameTable chord_names() {
  NameTable nt;
  nt.vec_names[VEC_U1] = "u1";
  nt.vec_names[VEC_U2] = "u2";
  return nt;
}

NameTable series_names() {
  NameTable nt;
  nt.vec_names[VEC_U] = "u";
  nt.vec_names[VEC_V] = "v";
  return nt;
}

std::string render(const Poly& p, const std::string& fmt, const NameTable& nt) {
  if (fmt == "latex") return to_latex(p, nt);
  if (fmt == "json") return to_json(p, nt);
  return to_text(p, nt);
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(std::stol(s));
  return Rat(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
}

Poly strip_curvature(const Poly& p) {
  Poly out;
  for (const auto& t : p.ts) {
    bool curved = false;
    for (const auto& f : t.fs)
      if (f.head == Head::Riemann || f.head == Head::Ricci) curved = true;
    if (!curved) out.ts.push_back(t);
  }
  return out;
}

Poly flatten(const std::vector<Poly>& v) {
  Poly s;
  for (const auto& p : v) s = add(std::move(s), p);
  return s;
}

// ---- check harness ---------------------------------------------------------

struct Checker {
  bool ok{true};
  void expect(bool pass, const std::string& what) {
    std::printf("%s: %s\n", pass ? "ok" : "FAIL", what.c_str());
    ok = ok && pass;
  }
  void expect_equal(const Poly& got, const Poly& want, const std::string& what,
                    const NameTable& nt = {}) {
    bool pass = poly_equal(got, want);
    expect(pass, what);
    if (!pass) {
      std::printf("  expected: %s\n", to_text(want, nt).c_str());
      std::printf("  got:      %s\n", to_text(got, nt).c_str());
      std::printf("  diff:     %s\n", to_text(canonicalize(sub(got, want)), nt).c_str());
    }
  }
  void expect_zero(const Poly& p, const std::string& what, const NameTable& nt = {}) {
    Poly c = canonicalize(p);
    expect(c.is_zero(), what);
    if (!c.is_zero()) std::printf("  residual: %s\n", to_text(c, nt).c_str());
  }
};

void check_golden(Checker& ck, int order) {
  // low-order world-function entries against hand-pinned values
  ck.expect(coincidence_entry(1, 1).is_zero(), "limit entry (1,1) vanishes");
  Poly e21(Term{GQ(2, 3), 0, {riemann(free_up(MU), free_lo(GROUP_A_BASE + 1),
                                      free_lo(GROUP_B_BASE + 1), free_lo(GROUP_A_BASE + 2))}});
  ck.expect_equal(coincidence_entry(2, 1), symmetrize(e21, {GROUP_A_BASE + 1, GROUP_A_BASE + 2}),
                  "limit entry (2,1)", limit_names());
  Poly e12(Term{GQ(-1, 3), 0, {riemann(free_up(MU), free_lo(GROUP_B_BASE + 1),
                                       free_lo(GROUP_A_BASE + 1), free_lo(GROUP_B_BASE + 2))}});
  ck.expect_equal(coincidence_entry(1, 2), symmetrize(e12, {GROUP_B_BASE + 1, GROUP_B_BASE + 2}),
                  "limit entry (1,2)", limit_names());

  // symmetric-point determinant series is even
  const Poly& zs = zeta_symmetric(order);
  for (int n = 1; n <= order; n += 2)
    ck.expect_zero(select_degree(zs, VEC_U, n),
                   "symmetric determinant series, odd degree " + std::to_string(n),
                   series_names());

  // triangle solution solves its defining system exactly
  const TriangleSolution& sol = solve_triangle(order);
  const Poly& d = geodesic_defect(order);
  Poly id1 = vec_identity(VEC_U1), id2 = vec_identity(VEC_U2);
  Poly m1 = scale(id1, GQ(-1)), m2 = scale(id2, GQ(-1));
  ck.expect_zero(sub(sol.w, add(add(m1, sol.v2), apply_uv(d, m1, sol.v2, order))),
                 "triangle residual w | (-u1, v2)", chord_names());
  ck.expect_zero(sub(scale(sol.w, GQ(-1)), add(add(m2, sol.v1), apply_uv(d, m2, sol.v1, order))),
                 "triangle residual -w | (-u2, v1)", chord_names());
  ck.expect_zero(sub(sol.wt, add(add(id2, sol.v1), apply_uv(d, id2, sol.v1, order))),
                 "triangle residual w~ | (u2, v1)", chord_names());
  ck.expect_zero(sub(sol.wt, add(add(id1, sol.v2), apply_uv(d, id1, sol.v2, order))),
                 "triangle residual w~ | (u1, v2)", chord_names());

  // quantized quadratic symbol: -hbar^2 (laplacian - Ric/6 trace part)
  Poly p2(Term{GQ(1), 0, {metric(mom_up(), mom_up())}});
  Factor lap = atom(OPERAND);
  lap.tail = {dummy_lo(0), dummy_up(0)};
  Poly want = add(Poly(Term{GQ(-1), 2, {lap}}),
                  Poly(Term{GQ(1, 6), 2, {ricci(dummy_lo(0), dummy_up(0)), atom(OPERAND)}}));
  ck.expect_equal(quantize_polynomial(p2, Rat(1, 2)), want, "quantized quadratic symbol");
}

void check_star(Checker& ck, const std::string& which, int order) {
  Poly a(Term{GQ(1), 0, {atom(ATOM_A)}});
  Poly b(Term{GQ(1), 0, {atom(ATOM_B)}});
  if (which == "structure") {
    std::vector<Poly> s = star_expansion(order);
    std::string diag;
    bool pass = true;
    for (const auto& g : s)
      for (const auto& t : g.ts)
        if (!verify_term_structure(t, &diag)) {
          pass = false;
          std::printf("  violating term: %s\n", diag.c_str());
        }
    ck.expect(pass, "grade/derivative structure identities through order " +
                        std::to_string(order));
  } else if (which == "moyal") {
    std::vector<Poly> s = star_expansion(order);
    std::vector<Poly> m = moyal_expansion(order);
    for (int n = 0; n <= order; ++n)
      ck.expect_equal(strip_curvature(s[(std::size_t)n]), m[(std::size_t)n],
                      "flat reduction at grade " + std::to_string(n));
  } else if (which == "adjoint") {
    std::vector<Poly> s = star_expansion(order);
    std::vector<Poly> sba = star_product(b, a, StarSides{{ATOM_B}, {ATOM_A}}, order);
    for (int n = 0; n <= order; ++n)
      ck.expect_equal(conj_coeffs(s[(std::size_t)n]), sba[(std::size_t)n],
                      "adjoint symmetry at grade " + std::to_string(n));
  } else if (which == "unit") {
    Poly one = Poly::constant(GQ(1));
    std::vector<Poly> l = star_product(one, b, StarSides{}, order);
    std::vector<Poly> r = star_product(b, one, StarSides{{ATOM_B}, {ATOM_A}}, order);
    ck.expect_equal(l[0], b, "left unit, grade 0");
    ck.expect_equal(r[0], b, "right unit, grade 0");
    for (int n = 1; n <= order; ++n) {
      ck.expect_zero(l[(std::size_t)n], "left unit, grade " + std::to_string(n));
      ck.expect_zero(r[(std::size_t)n], "right unit, grade " + std::to_string(n));
    }
  } else if (which == "assoc") {
    Poly c(Term{GQ(1), 0, {atom(ATOM_C)}});
    Poly ab = flatten(star_product(a, b, StarSides{{ATOM_A}, {ATOM_B}}, order));
    Poly bc = flatten(star_product(b, c, StarSides{{ATOM_B}, {ATOM_C}}, order));
    std::vector<Poly> l = star_product(ab, c, StarSides{{ATOM_A, ATOM_B}, {ATOM_C}}, order);
    std::vector<Poly> r = star_product(a, bc, StarSides{{ATOM_A}, {ATOM_B, ATOM_C}}, order);
    for (int n = 0; n <= order; ++n)
      ck.expect_equal(l[(std::size_t)n], r[(std::size_t)n],
                      "associativity at grade " + std::to_string(n));
  }
}

ordered_json report_json(const num::Report& r) {
  ordered_json j;
  j["experiment"] = r.experiment;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["rel_error"] = r.rel_err;
  j["tolerance"] = r.tol;
  j["resolution_pair"] = {r.res_lo, r.res_hi};
  j["pass"] = r.pass;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic and numerical engine for the balanced geodesic calculus"};
  app.require_subcommand(1);

  std::string fmt = "text";

  // limits
  auto* limits = app.add_subcommand("limits", "coincidence-limit table of the world function");
  int lim_max = 5;
  limits->add_option("--max", lim_max, "highest derivative order")->check(CLI::Range(2, 7));
  limits->add_option("--format", fmt, "text|latex|json");

  // expand
  auto* expand = app.add_subcommand("expand", "named covariant expansion");
  std::string series_name = "zeta";
  int order = 4;
  expand->add_option("--series", series_name,
                     "zeta|zeta-shifted|zeta-symmetric|defect|v1|v2|w|wt|jacobian|lambda");
  expand->add_option("--order", order, "truncation order")->check(CLI::Range(0, 8));
  expand->add_option("--format", fmt, "text|latex|json");

  // star
  auto* star = app.add_subcommand("star", "product expansion of two generic symbols");
  int star_order = 2;
  star->add_option("--order", star_order, "highest grade")->check(CLI::Range(0, 4));
  star->add_option("--format", fmt, "text|latex|json");

  // quantize
  auto* quant = app.add_subcommand("quantize", "ordered quantization of a momentum polynomial");
  std::string tau_s = "1/2";
  int power = 1;
  quant->add_option("--tau", tau_s, "ordering parameter, e.g. 1/2");
  quant->add_option("--power", power, "power of the quadratic symbol")->check(CLI::Range(1, 2));
  quant->add_option("--format", fmt, "text|latex|json");

  // verify
  auto* verify = app.add_subcommand("verify", "run a symbolic self-check suite");
  std::string check = "golden";
  int v_order = 4;
  verify->add_option("--check", check, "golden|structure|moyal|adjoint|unit|assoc");
  verify->add_option("--order", v_order, "check order")->check(CLI::Range(0, 5));

  // numeric
  auto* numeric = app.add_subcommand("numeric", "quadrature experiments on concrete charts");
  double hbar = 1.0;
  int res = 32;
  std::string experiment, model, config;
  numeric->add_option("--hbar", hbar, "semiclassical parameter");
  numeric->add_option("--res", res, "base quadrature resolution");
  numeric->add_option("--experiment", experiment, "substring filter on experiment names");
  numeric->add_option("--model", model, "substring filter on the chart model");
  numeric->add_option("--config", config, "JSON file overriding hbar/res/experiment/model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*limits) {
    NameTable nt = limit_names();
    for (int o = 3; o <= lim_max; ++o) {
      std::printf("# order %d\n", o);
      for (int m = o - 1; m >= 1; --m) {
        int n = o - m;
        std::fprintf(stderr, "entry (%d,%d)\n", m, n);
        std::printf("(%d,%d): %s\n", m, n, render(coincidence_entry(m, n), fmt, nt).c_str());
      }
    }
    return 0;
  }

  if (*expand) {
    Poly p;
    NameTable nt = series_names();
    if (series_name == "zeta") p = zeta_series(order);
    else if (series_name == "zeta-shifted") p = zeta_shifted(order);
    else if (series_name == "zeta-symmetric") p = zeta_symmetric(order);
    else if (series_name == "defect") p = geodesic_defect(order);
    else if (series_name == "jacobian") { p = jacobian_log(order); nt = chord_names(); }
    else if (series_name == "lambda") { p = lambda_log(order); nt = chord_names(); }
    else if (series_name == "v1" || series_name == "v2" || series_name == "w" ||
             series_name == "wt") {
      const TriangleSolution& sol = solve_triangle(order);
      p = series_name == "v1" ? sol.v1 : series_name == "v2" ? sol.v2
                              : series_name == "w" ? sol.w : sol.wt;
      nt = chord_names();
    } else {
      std::fprintf(stderr, "unknown series '%s'\n", series_name.c_str());
      return 2;
    }
    std::printf("%s\n", render(p, fmt, nt).c_str());
    return 0;
  }

  if (*star) {
    std::fprintf(stderr, "expanding product to grade %d\n", star_order);
    std::vector<Poly> s = star_expansion(star_order);
    for (int n = 0; n <= star_order; ++n) {
      std::fprintf(stderr, "grade %d: %zu terms\n", n, s[(std::size_t)n].ts.size());
      std::printf("# hbar^%d\n%s\n", n, render(s[(std::size_t)n], fmt, {}).c_str());
    }
    return 0;
  }

  if (*quant) {
    Rat tau = parse_rat(tau_s);
    Poly sym(Term{GQ(1), 0, {metric(mom_up(), mom_up())}});
    if (power == 2) sym = mul(sym, sym);
    NameTable nt;
    nt.atom_names[OPERAND] = "f";
    std::printf("%s\n", render(quantize_polynomial(sym, tau), fmt, nt).c_str());
    return 0;
  }

  if (*verify) {
    Checker ck;
    if (check == "golden") check_golden(ck, v_order);
    else if (check == "structure" || check == "moyal" || check == "adjoint" ||
             check == "unit" || check == "assoc")
      check_star(ck, check, std::min(v_order, check == "assoc" ? 3 : 4));
    else {
      std::fprintf(stderr, "unknown check '%s'\n", check.c_str());
      return 2;
    }
    return ck.ok ? 0 : 1;
  }

  if (*numeric) {
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) {
        std::fprintf(stderr, "cannot open config '%s'\n", config.c_str());
        return 2;
      }
      ordered_json j = ordered_json::parse(in);
      hbar = j.value("hbar", hbar);
      res = j.value("res", res);
      experiment = j.value("experiment", experiment);
      model = j.value("model", model);
    }
    std::fprintf(stderr, "running experiments (threads=%d)\n", num::thread_count());
    bool all_pass = true;
    for (auto& [name, fn] : num::report_catalog(hbar, res)) {
      if (!experiment.empty() && name.find(experiment) == std::string::npos) continue;
      if (!model.empty() && name.find(model) == std::string::npos) continue;
      std::fprintf(stderr, "%s...\n", name.c_str());
      num::Report r = fn();
      std::printf("%s\n", report_json(r).dump().c_str());
      all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
  }

  return 2;
}
