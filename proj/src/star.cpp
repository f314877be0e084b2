#include <geoweyl/star.hpp>

#include <functional>
#include <stdexcept>

namespace geoweyl {

namespace {

const CanonOptions kNoBianchi{/*sort_tails=*/true, /*bianchi=*/false};

constexpr std::int32_t SCRATCH_VEC = 6;

struct Ref {
  std::size_t fi;
  int arr;  // 0 prin, 1 tail, 2 vert
  std::size_t pos;
};

Slot& at(Term& t, const Ref& r) {
  Factor& f = t.fs[r.fi];
  auto& v = r.arr == 0 ? f.prin : (r.arr == 1 ? f.tail : f.vert);
  return v[r.pos];
}

template <typename F>
void for_each_ref(const Term& t, F&& fn) {
  for (std::size_t fi = 0; fi < t.fs.size(); ++fi) {
    const Factor& f = t.fs[fi];
    for (std::size_t j = 0; j < f.prin.size(); ++j) fn(Ref{fi, 0, j}, f.prin[j]);
    for (std::size_t j = 0; j < f.tail.size(); ++j) fn(Ref{fi, 1, j}, f.tail[j]);
    for (std::size_t j = 0; j < f.vert.size(); ++j) fn(Ref{fi, 2, j}, f.vert[j]);
  }
}

// exp of a series whose terms all have positive guaranteed grade
Poly exp_grade(const Poly& logp, int order) {
  Poly e = Poly::constant(GQ(1));
  Poly pw = Poly::constant(GQ(1));
  Rat kfact{1};
  for (int k = 1;; ++k) {
    pw = grade_truncate(mul(pw, logp), order);
    if (pw.is_zero()) break;
    kfact *= k;
    e = add(std::move(e), scale(pw, GQ(Rat(1) / kfact)));
  }
  return e;
}

}  // namespace

Poly grade_truncate(Poly p, int order) {
  std::erase_if(p.ts, [&](const Term& t) { return t.hbar + vec_degree(t) > order; });
  return p;
}

Poly phase_log(int order) {
  // nonlinear part of the chord appearing in the oscillatory phase; needs one
  // extra expansion order since each momentum factor lowers the grade by one
  const TriangleSolution& sol = solve_triangle(order + 1);
  Poly dm = defect_odd(order + 1);
  Poly nl = sub(apply_uv(dm, vec_identity(VEC_U2), sol.v1, order + 1),
                apply_uv(dm, vec_identity(VEC_U1), sol.v2, order + 1));
  nl = canonicalize(nl, kNoBianchi);
  Poly ph = subst_free(std::move(nl), IDX_OUT, Slot{Bind::Mom, 0, true, false});
  ph = scale(std::move(ph), GQ(Rat(0), Rat(2)));  // 2i p.(...)
  for (auto& t : ph.ts) t.hbar = -1;
  return grade_truncate(std::move(ph), order);
}

Poly pullback(const Poly& sym, const Poly& shift, int order) {
  Poly p = cov_taylor(sym, SCRATCH_VEC, order);
  p = compose_vec(std::move(p), SCRATCH_VEC, shift, order);
  return grade_truncate(std::move(p), order);
}

Poly mom_split(const Poly& p, std::int32_t aux_id) {
  Poly out;
  for (const auto& t : p.ts) {
    std::vector<Ref> moms;
    for_each_ref(t, [&](const Ref& r, const Slot& s) {
      if (s.bind == Bind::Mom) moms.push_back(r);
    });
    for (std::uint32_t mask = 0; mask < (1u << moms.size()); ++mask) {
      Term nt = t;
      for (std::size_t j = 0; j < moms.size(); ++j)
        if (mask & (1u << j)) {
          Slot& s = at(nt, moms[j]);
          s.bind = Bind::PAux;
          s.id = aux_id;
        }
      out.ts.push_back(std::move(nt));
    }
  }
  return out;
}

Poly wick_evaluate(const Poly& prod, const StarSides& sides, int order) {
  auto in = [](const std::vector<std::int32_t>& v, std::int32_t x) {
    for (auto y : v)
      if (y == x) return true;
    return false;
  };

  Poly out;
  for (const auto& t : prod.ts) {
    std::vector<Ref> u1, u2, p1, p2;
    std::vector<std::size_t> la, ra;
    for_each_ref(t, [&](const Ref& r, const Slot& s) {
      if (s.bind == Bind::Vec) {
        if (s.id == VEC_U1)
          u1.push_back(r);
        else if (s.id == VEC_U2)
          u2.push_back(r);
        else
          throw std::logic_error("wick: foreign vector id in integrand");
      } else if (s.bind == Bind::PAux) {
        (s.id == 1 ? p1 : p2).push_back(r);
      }
    });
    for (std::size_t fi = 0; fi < t.fs.size(); ++fi)
      if (t.fs[fi].head == Head::Atom) {
        if (in(sides.left, t.fs[fi].atom)) la.push_back(fi);
        if (in(sides.right, t.fs[fi].atom)) ra.push_back(fi);
      }
    if (p2.size() > u1.size() || p1.size() > u2.size()) continue;

    // target of a chord slot: an atom on the far side (vertical derivative)
    // or a yet-unused far-side auxiliary momentum slot
    std::vector<int> a1(u1.size()), a2(u2.size());
    const GQ w1 = GQ(Rat(0), Rat(1, 2)), w2 = GQ(Rat(0), Rat(-1, 2));

    auto emit = [&]() {
      Term nt = t;
      nt.hbar += (int)(u1.size() + u2.size());
      if (nt.hbar > order) return;
      for (std::size_t k = 0; k < u1.size(); ++k) nt.c *= w1;
      for (std::size_t k = 0; k < u2.size(); ++k) nt.c *= w2;
      std::int32_t d = max_dummy(t) + 1;
      auto connect = [&](const Ref& ur, int target, const std::vector<std::size_t>& atoms,
                         const std::vector<Ref>& paux) {
        Slot& us = at(nt, ur);
        us = Slot{Bind::Dummy, d, us.up, false};
        if (target < (int)atoms.size()) {
          nt.fs[atoms[(std::size_t)target]].vert.push_back(dummy_up(d));
        } else {
          Slot& ps = at(nt, paux[(std::size_t)target - atoms.size()]);
          ps = Slot{Bind::Dummy, d, ps.up, false};
        }
        ++d;
      };
      for (std::size_t k = 0; k < u1.size(); ++k) connect(u1[k], a1[k], ra, p2);
      for (std::size_t k = 0; k < u2.size(); ++k) connect(u2[k], a2[k], la, p1);
      out.ts.push_back(std::move(nt));
    };

    // enumerate complete assignments; all auxiliary slots must be consumed
    std::function<void(std::size_t, std::uint32_t)> rec2 = [&](std::size_t k, std::uint32_t used) {
      if (k == u2.size()) {
        if (used == (1u << p1.size()) - 1) emit();
        return;
      }
      for (std::size_t ai = 0; ai < la.size(); ++ai) {
        a2[k] = (int)ai;
        rec2(k + 1, used);
      }
      for (std::size_t j = 0; j < p1.size(); ++j)
        if (!(used & (1u << j))) {
          a2[k] = (int)(la.size() + j);
          rec2(k + 1, used | (1u << j));
        }
    };
    std::function<void(std::size_t, std::uint32_t)> rec1 = [&](std::size_t k, std::uint32_t used) {
      if (k == u1.size()) {
        if (used == (1u << p2.size()) - 1) rec2(0, 0);
        return;
      }
      for (std::size_t ai = 0; ai < ra.size(); ++ai) {
        a1[k] = (int)ai;
        rec1(k + 1, used);
      }
      for (std::size_t j = 0; j < p2.size(); ++j)
        if (!(used & (1u << j))) {
          a1[k] = (int)(ra.size() + j);
          rec1(k + 1, used | (1u << j));
        }
    };
    rec1(0, 0);
  }
  return out;
}

std::vector<Poly> star_product(const Poly& a, const Poly& b, const StarSides& sides, int order) {
  std::vector<Poly> grades((std::size_t)order + 1);
  if (order == 0) {
    Poly w = canonicalize(mul(a, b));
    for (auto& t : w.ts) grades[0].ts.push_back(t);
    return grades;
  }

  const TriangleSolution& sol = solve_triangle(order);
  Poly logE = grade_truncate(add(lambda_log(order), phase_log(order)), order);
  Poly E = exp_grade(logE, order);

  // canonicalize the pullbacks *before* tagging auxiliary momenta: the
  // derivative-reordering corrections created here involve the symbol's own
  // momentum argument and must take part in the tagging
  Poly pa = canonicalize(grade_truncate(pullback(a, sol.v1, order), order), kNoBianchi);
  Poly pb = canonicalize(grade_truncate(pullback(b, sol.v2, order), order), kNoBianchi);
  pa = mom_split(pa, 1);
  pb = mom_split(pb, 2);

  Poly prod = grade_truncate(mul(E, pa), order);
  prod = grade_truncate(mul(prod, pb), order);
  Poly w = canonicalize(wick_evaluate(prod, sides, order));

  for (auto& t : w.ts) {
    if (t.hbar < 0 || t.hbar > order) throw std::logic_error("star: term grade out of range");
    grades[(std::size_t)t.hbar].ts.push_back(t);
  }
  return grades;
}

std::vector<Poly> star_expansion(int order) {
  return star_product(Poly(Term{GQ(1), 0, {atom(ATOM_A)}}), Poly(Term{GQ(1), 0, {atom(ATOM_B)}}),
                      StarSides{}, order);
}

std::vector<Poly> moyal_expansion(int order) {
  std::vector<Poly> grades((std::size_t)order + 1);
  for (int n = 0; n <= order; ++n) {
    Poly g;
    for (int k = 0; k <= n; ++k) {
      Term t;
      t.hbar = n;
      Factor fa = atom(ATOM_A), fb = atom(ATOM_B);
      for (int j = 0; j < k; ++j) {
        fa.tail.push_back(dummy_lo(j));
        fb.vert.push_back(dummy_up(j));
      }
      for (int j = k; j < n; ++j) {
        fa.vert.push_back(dummy_up(j));
        fb.tail.push_back(dummy_lo(j));
      }
      t.fs = {fa, fb};
      Rat binom = factorial((unsigned)n) / (factorial((unsigned)k) * factorial((unsigned)(n - k)));
      GQ c = GQ(binom / factorial((unsigned)n));
      for (int j = 0; j < k; ++j) c *= GQ(Rat(0), Rat(1, 2));
      for (int j = k; j < n; ++j) c *= GQ(Rat(0), Rat(-1, 2));
      t.c = c;
      g.ts.push_back(std::move(t));
    }
    grades[(std::size_t)n] = canonicalize(g);
  }
  return grades;
}

bool verify_term_structure(const Term& t, std::string* diag) {
  auto fail = [&](const char* msg) {
    if (diag) *diag = msg;
    return false;
  };
  int s = 0, nu = 0, eta = 0;
  std::vector<std::pair<int, int>> atoms;  // (horizontal, vertical) per atom factor
  for (const auto& f : t.fs) {
    switch (f.head) {
      case Head::Riemann:
      case Head::Ricci:
        ++s;
        nu += (int)f.tail.size();
        break;
      case Head::Atom:
        atoms.emplace_back((int)f.tail.size(), (int)f.vert.size());
        break;
      default:
        break;
    }
  }
  for (const auto& f : t.fs) {
    for (const auto& sl : f.prin) eta += sl.bind == Bind::Mom;
    for (const auto& sl : f.tail) eta += sl.bind == Bind::Mom;
    for (const auto& sl : f.vert) eta += sl.bind == Bind::Mom;
  }
  int r = t.hbar;
  int alpha = 0, beta = 0;
  for (auto [a, b] : atoms) {
    alpha += a;
    beta += b;
  }
  if (r != beta - eta) return fail("grade != vertical excess");
  if (r != 2 * s + nu + alpha) return fail("grade != derivative count");
  if (s == 0) {
    if (eta != 0) return fail("flat term with momentum factor");
    if (atoms.size() == 2 && (atoms[0].second != atoms[1].first || atoms[1].second != atoms[0].first))
      return fail("flat term not cross-balanced");
  } else {
    if (s < eta || s < 1) return fail("too few curvature factors");
    if (atoms.size() == 2) {
      if (atoms[0].second < std::max(1, eta + atoms[1].first))
        return fail("left vertical count below bound");
      if (atoms[1].second < std::max(1, eta + atoms[0].first))
        return fail("right vertical count below bound");
    }
  }
  return true;
}

Poly tau_translate(const Poly& sym, const Rat& dtau, int order) {
  Poly out = sym;
  Poly cur = sym;
  for (int n = 1; n <= order; ++n) {
    Poly next;
    for (const auto& t : cur.ts) {
      std::int32_t d = max_dummy(t) + 1;
      Poly dt = vert_deriv(cov_deriv(Poly(t), dummy_lo(d)), dummy_up(d));
      next = add(std::move(next), dt);
    }
    for (auto& t : next.ts) {
      t.c *= GQ(Rat(0), Rat(-1));  // -i per application
      t.hbar += 1;
    }
    std::erase_if(next.ts, [&](const Term& t) { return t.hbar > order; });
    cur = std::move(next);
    if (cur.is_zero()) break;
    Rat coeff = 1;
    for (int k = 1; k <= n; ++k) coeff *= dtau;
    out = add(std::move(out), scale(cur, GQ(coeff / factorial((unsigned)n))));
  }
  return canonicalize(out);
}

Poly rename_atom(Poly p, std::int32_t from, std::int32_t to) {
  for (auto& t : p.ts)
    for (auto& f : t.fs)
      if (f.head == Head::Atom && f.atom == from) f.atom = to;
  return p;
}

Poly conj_coeffs(Poly p) {
  for (auto& t : p.ts) t.c = t.c.conj();
  return p;
}

}  // namespace geoweyl
