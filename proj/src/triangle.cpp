#include <geoweyl/triangle.hpp>

#include <map>
#include <stdexcept>

namespace geoweyl {

namespace {

// scratch labels used while wiring series together
constexpr std::int32_t ARG_A = 701, ARG_B = 702;
constexpr std::int32_t IDX_IN = 11, IDX_MID = 12;

Poly neg(Poly p) { return scale(std::move(p), GQ(-1)); }

// rebinds the free-label pair (la, lb) of every term into a fresh contraction
Poly contract_labels(Poly p, std::int32_t la, std::int32_t lb) {
  for (auto& t : p.ts) {
    std::int32_t d = max_dummy(t) + 1;
    for (auto& f : t.fs) {
      auto fix = [&](Slot& s) {
        if (s.bind == Bind::Free && (s.id == la || s.id == lb)) {
          s.bind = Bind::Dummy;
          s.id = d;
        }
      };
      for (auto& s : f.prin) fix(s);
      for (auto& s : f.tail) fix(s);
      for (auto& s : f.vert) fix(s);
    }
  }
  return p;
}

// product of two (1,1)-tensor series: X^mu_rho Y^rho_nu
Poly mat_mul(const Poly& x, const Poly& y, int order) {
  Poly x2 = rename_free(x, IDX_IN, IDX_MID);
  Poly y2 = rename_free(y, IDX_OUT, IDX_MID);
  Poly p = contract_labels(mul(x2, y2), IDX_MID, IDX_MID);
  return truncate_degree(std::move(p), order);
}

Poly mat_trace(Poly x) { return contract_labels(std::move(x), IDX_OUT, IDX_IN); }

}  // namespace

Poly defect_even(int order) {
  const Poly& d = geodesic_defect(order);
  return canonicalize(scale(add(d, map_vec(d, VEC_U, VEC_U, GQ(-1))), GQ(1, 2)));
}

Poly defect_odd(int order) {
  const Poly& d = geodesic_defect(order);
  return canonicalize(scale(sub(d, map_vec(d, VEC_U, VEC_U, GQ(-1))), GQ(1, 2)));
}

Poly apply_uv(const Poly& f, const Poly& a, const Poly& b, int order) {
  Poly p = map_vec(f, VEC_U, ARG_A, GQ(1));
  p = map_vec(std::move(p), VEC_V, ARG_B, GQ(1));
  p = compose_vec(std::move(p), ARG_A, a, order);
  p = compose_vec(std::move(p), ARG_B, b, order);
  return truncate_degree(std::move(p), order);
}

const TriangleSolution& solve_triangle(int order) {
  static std::map<int, TriangleSolution> memo;
  auto it = memo.find(order);
  if (it != memo.end()) return it->second;

  Poly dp = defect_even(order);
  Poly dm = defect_odd(order);
  Poly id1 = vec_identity(VEC_U1), id2 = vec_identity(VEC_U2);
  auto sweep = [&](const Poly& v1, const Poly& v2) {
    Poly n1 = add(id1, sub(apply_uv(dm, id1, v2, order), apply_uv(dp, id2, v1, order)));
    Poly n2 = add(id2, sub(apply_uv(dm, id2, v1, order), apply_uv(dp, id1, v2, order)));
    return std::make_pair(canonicalize(truncate_degree(std::move(n1), order)),
                          canonicalize(truncate_degree(std::move(n2), order)));
  };

  Poly v1 = id1, v2 = id2;
  for (int k = 0; k < order; ++k) std::tie(v1, v2) = sweep(v1, v2);
  // the system is triangular in total degree, so the iteration must have
  // stabilized by now
  auto [s1, s2] = sweep(v1, v2);
  if (!poly_equal(s1, v1) || !poly_equal(s2, v2))
    throw std::logic_error("triangle fixed point did not stabilize");

  TriangleSolution sol;
  Poly dm1 = apply_uv(dm, id1, v2, order);
  Poly dm2 = apply_uv(dm, id2, v1, order);
  sol.w = canonicalize(add(add(neg(id1), id2), sub(dm2, dm1)));
  sol.wt = canonicalize(add(add(id1, id2), add(dm1, dm2)));
  sol.v1 = std::move(v1);
  sol.v2 = std::move(v2);
  sol.order = order;
  return memo.emplace(order, std::move(sol)).first->second;
}

Poly jacobian_log(int order) {
  // blocks of the Jacobian of (u1 + d-(u1,v2), u2 + d-(u2,v1)) minus the
  // identity, as (1,1)-tensor series
  const TriangleSolution& sol = solve_triangle(order + 1);
  Poly dm = defect_odd(order + 1);
  Poly b1 = apply_uv(dm, vec_identity(VEC_U1), sol.v2, order + 1);
  Poly b2 = apply_uv(dm, vec_identity(VEC_U2), sol.v1, order + 1);
  Poly a[2][2] = {{vec_partial(b1, VEC_U1, IDX_IN), vec_partial(b1, VEC_U2, IDX_IN)},
                  {vec_partial(b2, VEC_U1, IDX_IN), vec_partial(b2, VEC_U2, IDX_IN)}};
  for (auto& row : a)
    for (auto& m : row) m = canonicalize(truncate_degree(std::move(m), order));

  // log det(1 + A) = sum_k (-1)^{k+1}/k tr(A^k); block entries have degree
  // >= 2, so the sum terminates quickly
  Poly out;
  for (int k = 1; 2 * k <= order; ++k) {
    Poly tr_k;
    std::vector<int> path(k, 0);
    for (;;) {
      Poly m = a[path[0]][path[(1) % k]];
      for (int j = 1; j < k; ++j) m = mat_mul(m, a[path[j]][path[(j + 1) % k]], order);
      tr_k = add(std::move(tr_k), mat_trace(std::move(m)));
      int j = k - 1;
      while (j >= 0 && path[j] == 1) path[j--] = 0;
      if (j < 0) break;
      path[j] = 1;
    }
    out = add(std::move(out), scale(std::move(tr_k), GQ(k % 2 ? 1 : -1) / GQ(k)));
  }
  return canonicalize(out);
}

Poly lambda_log(int order) {
  const TriangleSolution& sol = solve_triangle(order);
  Poly id1 = vec_identity(VEC_U1), id2 = vec_identity(VEC_U2);

  Poly zss = zeta_shifted_symmetric(order);
  Poly t1 = apply_uv(zss, id1, sol.v2, order);
  Poly t2 = apply_uv(zss, id2, sol.v1, order);

  Poly zsym = map_vec(zeta_symmetric(order), VEC_U, ARG_A, GQ(1));
  Poly zsym_w = truncate_degree(compose_vec(std::move(zsym), ARG_A, sol.w, order), order);

  Poly zu = map_vec(zeta_series(order), VEC_U, ARG_A, GQ(1));
  Poly zu_wt = truncate_degree(compose_vec(std::move(zu), ARG_A, sol.wt, order), order);

  Poly out = add(jacobian_log(order), add(std::move(t1), std::move(t2)));
  out = sub(std::move(out), zsym_w);
  out = sub(std::move(out), scale(std::move(zu_wt), GQ(2)));
  return canonicalize(out);
}

}  // namespace geoweyl
