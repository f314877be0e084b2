// Acceptance gate: one pass/fail line per criterion.
//
// Each criterion maps to a pinned set of golden/property cases in the module
// suites; this driver runs exactly those cases (by doctest filter) so the
// golden data lives in one place, and enforces the wall-clock budgets.  The
// matched-case count is checked too: a filter that silently matches nothing
// must not pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

std::string bin_dir;

struct Criterion {
  int id;
  const char* what;
  const char* suite;
  const char* filter;
  int cases;        // expected number of matched test cases
  double budget_s;  // 0 = unbounded
};

// clang-format off
const Criterion kCriteria[] = {
    {1, "world-function coincidence limits, orders 3-5, exact",
     "test_sigma", "golden entries*", 3, 60},
    {2, "log-density expansions: base, shifted, symmetric parity",
     "test_series", "log-density expansion goldens,shifted log-density expansion,"
     "symmetric log-density expansion,shifted symmetric log-density expansion", 4, 0},
    {3, "triangle system: solution series and exact back-substitution",
     "test_triangle", "defect parity split,triangle solution matches the fifth-order expansions,"
     "composed defect parts match the pinned series,back-substitution residuals vanish", 4, 0},
    {4, "geometric factor and chord-jacobian expansions to order 4",
     "test_triangle", "jacobian log-determinant expansion,geometric factor expansion", 2, 0},
    {5, "product expansion grades 0-4 term-for-term",
     "test_star", "flat product oracle*,oscillatory phase expansion goldens,"
     "symbol pullback goldens,product expansion golden terms", 4, 600},
    {6, "product properties: flat reduction, unit, adjoint, structure, associativity",
     "test_star", "flat reduction matches the binomial oracle,unit law,adjoint symmetry,"
     "term structure identities,translation between quantization parameters,associativity", 6, 0},
    {7, "polynomial quantization: coefficient tables and operator goldens",
     "test_quantize", "two-point log-determinant series,coincidence derivative tables,"
     "quantization of*", 5, 0},
    {8, "numerical experiments: geodesics, kernels, trace, laplacian",
     "test_numeric", "exponential map,logarithm map,parallel transport,"
     "world function and spreading determinant,measure Jacobian identity,kernels,"
     "trace identity,quantized laplacian", 8, 1500},
    {9, "truncation-order scaling of the series against geodesic numerics",
     "test_numeric", "series vs geodesic numerics", 1, 0},
};
// clang-format on

// runs the suite under the filter; returns true when it succeeded and
// matched the expected number of cases
bool run_suite(const Criterion& c, std::string* err) {
  std::string log = bin_dir + "acceptance_" + std::to_string(c.id) + ".log";
  std::string cmd =
      bin_dir + c.suite + " -tc=\"" + c.filter + "\" >\"" + log + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  int matched = -1;
  if (std::FILE* f = std::fopen(log.c_str(), "r")) {
    char line[512];
    while (std::fgets(line, sizeof line, f))
      if (std::sscanf(line, "[doctest] test cases: %d |", &matched) == 1) break;
    std::fclose(f);
  }
  if (rc != 0) {
    *err = "suite failed; detail in " + log;
    return false;
  }
  if (matched != c.cases) {
    *err = "filter matched " + std::to_string(matched) + " cases, expected " +
           std::to_string(c.cases);
    return false;
  }
  std::remove(log.c_str());
  return true;
}

bool run(const Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  std::string err;
  bool ok = run_suite(c, &err);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = ok && (c.budget_s == 0 || secs <= c.budget_s);
  std::printf("criterion %d (%s) [%.1f s]: %s\n", c.id, c.what, secs, pass ? "PASS" : "FAIL");
  if (!ok) std::printf("  %s\n", err.c_str());
  if (c.budget_s > 0 && secs > c.budget_s)
    std::printf("  over budget: %.1f s > %.0f s\n", secs, c.budget_s);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int, char** argv) {
  bin_dir = argv[0];
  auto slash = bin_dir.find_last_of('/');
  bin_dir = slash == std::string::npos ? "./" : bin_dir.substr(0, slash + 1);

  int failures = 0;
  for (const Criterion& c : kCriteria)
    if (!run(c)) ++failures;
  return failures == 0 ? 0 : 1;
}
