#include <geoweyl/series.hpp>
#include <geoweyl/sigma.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace geoweyl {

namespace {

template <typename F>
void for_each_slot(Term& t, F&& f) {
  for (auto& fac : t.fs) {
    for (auto& s : fac.prin) f(s);
    for (auto& s : fac.tail) f(s);
    for (auto& s : fac.vert) f(s);
  }
}

template <typename F>
void for_each_slot(const Term& t, F&& f) {
  for (const auto& fac : t.fs) {
    for (const auto& s : fac.prin) f(s);
    for (const auto& s : fac.tail) f(s);
    for (const auto& s : fac.vert) f(s);
  }
}

}  // namespace

int vec_degree(const Term& t) {
  int n = 0;
  for_each_slot(t, [&](const Slot& s) { n += s.bind == Bind::Vec; });
  return n;
}

int vec_degree(const Term& t, std::int32_t vid) {
  int n = 0;
  for_each_slot(t, [&](const Slot& s) { n += s.bind == Bind::Vec && s.id == vid; });
  return n;
}

Poly truncate_degree(Poly p, int order) {
  std::erase_if(p.ts, [&](const Term& t) { return vec_degree(t) > order; });
  return p;
}

Poly select_degree(const Poly& p, std::int32_t vid, int deg, std::int32_t vid2, int deg2) {
  Poly out;
  for (const auto& t : p.ts) {
    if (vec_degree(t, vid) != deg) continue;
    if (vid2 >= 0 && vec_degree(t, vid2) != deg2) continue;
    out.ts.push_back(t);
  }
  return out;
}

Poly map_vec(Poly p, std::int32_t vid, std::int32_t to_vid, const GQ& per_slot) {
  for (auto& t : p.ts) {
    int n = 0;
    for_each_slot(t, [&](Slot& s) {
      if (s.bind == Bind::Vec && s.id == vid) {
        s.id = to_vid;
        ++n;
      }
    });
    for (int k = 0; k < n; ++k) t.c *= per_slot;
  }
  std::erase_if(p.ts, [](const Term& t) { return t.c.is_zero(); });
  return p;
}

Poly cov_taylor(const Poly& s, std::int32_t vid, int order) {
  Poly out = s;
  Poly cur = s;
  for (int m = 1; m <= order; ++m) {
    cur = truncate_degree(cov_deriv(cur, vec_lo(vid)), order);
    if (cur.is_zero()) break;
    out = add(std::move(out), scale(cur, GQ(Rat(1) / factorial((unsigned)m))));
  }
  return truncate_degree(std::move(out), order);
}

Poly compose_vec(Poly host, std::int32_t vid, const Poly& repl, int order) {
  std::vector<Term> work(host.ts.begin(), host.ts.end());
  Poly out;
  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();
    if (vec_degree(t) > order) continue;
    // find a Vec(vid) slot
    Slot* hit = nullptr;
    for_each_slot(t, [&](Slot& s) {
      if (!hit && s.bind == Bind::Vec && s.id == vid) hit = &s;
    });
    if (!hit) {
      out.ts.push_back(std::move(t));
      continue;
    }
    for (const auto& r : repl.ts) {
      Term nt = t;
      // relocate the hit inside the copy
      Slot* slot = nullptr;
      for_each_slot(nt, [&](Slot& s) {
        if (!slot && s.bind == Bind::Vec && s.id == vid) slot = &s;
      });
      Term rr = r;
      shift_dummies(rr, max_dummy(nt) + 1);
      std::int32_t d = std::max(max_dummy(nt), max_dummy(rr)) + 1;
      slot->bind = Bind::Dummy;
      slot->id = d;
      bool replaced = false;
      for_each_slot(rr, [&](Slot& s) {
        if (s.bind == Bind::Free && s.id == IDX_OUT && !s.primed) {
          s.bind = Bind::Dummy;
          s.id = d;
          replaced = true;
        }
      });
      if (!replaced) throw std::logic_error("vector series term lacks its open index");
      nt.c *= rr.c;
      nt.hbar += rr.hbar;
      nt.fs.insert(nt.fs.end(), rr.fs.begin(), rr.fs.end());
      work.push_back(std::move(nt));
    }
  }
  return out;
}

Poly vec_partial(const Poly& s, std::int32_t vid, std::int32_t out_label) {
  Poly out;
  for (const auto& t : s.ts) {
    int total = vec_degree(t, vid);
    for (int k = 0; k < total; ++k) {
      Term nt = t;
      int seen = 0;
      for_each_slot(nt, [&](Slot& sl) {
        if (sl.bind == Bind::Vec && sl.id == vid) {
          if (seen == k) {
            sl.bind = Bind::Free;
            sl.id = out_label;
          }
          ++seen;
        }
      });
      out.ts.push_back(std::move(nt));
    }
  }
  return out;
}

Poly vec_identity(std::int32_t vid) {
  return Poly(Term{GQ(1), 0, {metric(free_up(IDX_OUT), vec_lo(vid))}});
}

namespace {

// trace of the first two derivative labels of sigma_table(n+2), remaining
// labels contracted with Vec(VEC_U): the degree-n expansion coefficient of
// (box sigma - d) at the base point
Poly traced_table(int n) {
  Poly p = sigma_table(n + 2);
  std::int32_t d = 0;
  for (const auto& t : p.ts) d = std::max(d, max_dummy(t) + 1);
  p = subst_free(std::move(p), 1, Slot{Bind::Dummy, d, true, false});
  p = subst_free(std::move(p), 2, Slot{Bind::Dummy, d, false, false});
  for (int i = 3; i <= n + 2; ++i) p = subst_free(std::move(p), i, vec_lo(VEC_U));
  return p;
}

}  // namespace

const Poly& zeta_series(int order) {
  static std::map<int, Poly> memo;
  auto it = memo.find(order);
  if (it != memo.end()) return it->second;
  // transport along the radial field: the degree-n part obeys
  //   n * zeta_n = -(1/2) (1/n!) [box-sigma coefficient]_n
  Poly z;
  for (int n = 2; n <= order; ++n) {
    Poly cn = traced_table(n);
    if (cn.is_zero()) continue;
    GQ coeff = GQ(Rat(-1, 2) / (Rat(n) * factorial((unsigned)n)));
    z = add(std::move(z), scale(std::move(cn), coeff));
  }
  return memo.emplace(order, canonicalize(z)).first->second;
}

Poly zeta_shifted(int order) { return cov_taylor(zeta_series(order), VEC_V, order); }

const Poly& zeta_symmetric(int order) {
  static std::map<int, Poly> memo;
  auto it = memo.find(order);
  if (it != memo.end()) return it->second;
  // zeta(z-u, z+u) = zeta(z+v, z+v+<w>_v) at v = -u, w = 2u
  const std::int32_t scratch = 9;
  Poly p = zeta_shifted(order);
  p = map_vec(std::move(p), VEC_U, scratch, GQ(2));
  p = map_vec(std::move(p), VEC_V, scratch, GQ(-1));
  p = map_vec(std::move(p), scratch, VEC_U, GQ(1));
  return memo.emplace(order, canonicalize(p)).first->second;
}

Poly zeta_shifted_symmetric(int order) { return cov_taylor(zeta_symmetric(order), VEC_V, order); }

const Poly& geodesic_defect(int order) {
  static std::map<int, Poly> memo;
  auto it = memo.find(order);
  if (it != memo.end()) return it->second;
  Poly out;
  for (int m = 1; m < order; ++m)
    for (int n = 1; m + n <= order; ++n) {
      Poly e = coincidence_entry(m, n);
      if (e.is_zero()) continue;
      for (int i = 1; i <= m; ++i) e = subst_free(std::move(e), GROUP_A_BASE + i, vec_lo(VEC_U));
      for (int j = 1; j <= n; ++j) e = subst_free(std::move(e), GROUP_B_BASE + j, vec_lo(VEC_V));
      GQ coeff = GQ(Rat(-1) / (factorial((unsigned)m) * factorial((unsigned)n)));
      out = add(std::move(out), scale(std::move(e), coeff));
    }
  return memo.emplace(order, canonicalize(out)).first->second;
}

}  // namespace geoweyl
