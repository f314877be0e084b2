#include <geoweyl/quantize.hpp>

#include <cstdint>
#include <stdexcept>

namespace geoweyl {

namespace {

// degree-truncated exponential of a series with no constant term
Poly exp_deg(const Poly& x, int order) {
  Poly r = Poly::constant(GQ(1));
  Poly pw = Poly::constant(GQ(1));
  Rat f(1);
  for (int k = 1; k <= order; ++k) {
    pw = truncate_degree(mul(pw, x), order);
    if (pw.is_zero()) break;
    f = f / Rat(k);
    r = add(std::move(r), scale(pw, GQ(f, Rat(0))));
  }
  return r;
}

}  // namespace

Poly zeta_two_point(int order) {
  // s(u1,u2) is the second endpoint seen from the first: the vector at
  // exp_z(u1), expressed through the base frame, whose exponential reaches
  // exp_z(u2).  Fixed point of s = u2 - u1 - delta(s, u1).
  Poly u1 = vec_identity(VEC_U1);
  Poly base = sub(vec_identity(VEC_U2), u1);
  const Poly& dm = geodesic_defect(order);
  Poly s = base;
  for (int it = 0; it < order; ++it) s = sub(base, apply_uv(dm, s, u1, order));
  return canonicalize(apply_uv(zeta_shifted(order), s, u1, order));
}

const XiTable& xi_table(int order) {
  static std::map<int, XiTable> cache;
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  XiTable t;
  t.order = order;
  Poly e2 = exp_deg(scale(zeta_two_point(order), GQ(-1)), order);
  for (int j = 0; j <= order; ++j)
    for (int m = 0; j + m <= order; ++m) {
      Poly sel = select_degree(e2, VEC_U1, j, VEC_U2, m);
      for (int k = 0; k < j; ++k) sel = vec_partial(sel, VEC_U1, XI_X + k);
      for (int k = 0; k < m; ++k) sel = vec_partial(sel, VEC_U2, XI_Y + k);
      t.mixed[{j, m}] = canonicalize(sel);
    }

  // balanced combination: both derivative groups on one label set, with the
  // first-point group weighted by (-1) per index
  const std::int32_t VT = 3;
  Poly et = map_vec(map_vec(e2, VEC_U1, VT, GQ(-1)), VEC_U2, VT, GQ(1));
  t.weyl.resize((std::size_t)order + 1);
  GQ mi = GQ(1);
  for (int n = 0; n <= order; ++n) {
    Poly sel = select_degree(et, VT, n);
    for (int k = 0; k < n; ++k) sel = vec_partial(sel, VT, XI_X + k);
    t.weyl[(std::size_t)n] = canonicalize(scale(std::move(sel), mi));
    mi *= GQ(Rat(0), Rat(-1));
  }
  return cache.emplace(order, std::move(t)).first->second;
}

namespace {

Rat rat_pow(const Rat& x, int n) {
  Rat r(1);
  for (int k = 0; k < n; ++k) r = r * x;
  return r;
}

struct MomRef {
  std::size_t fi;
  int arr;
  std::size_t pos;
};

Slot& slot_at(Term& t, const MomRef& r) {
  Factor& f = t.fs[r.fi];
  return (r.arr == 0 ? f.prin : (r.arr == 1 ? f.tail : f.vert))[r.pos];
}

}  // namespace

Poly quantize_polynomial(const Poly& symbol, const Rat& tau) {
  int nmax = 0;
  for (const Term& t : symbol.ts) {
    int n = 0;
    for (const auto& f : t.fs)
      for (const auto* arr : {&f.prin, &f.tail, &f.vert})
        for (const auto& s : *arr)
          if (s.bind == Bind::Mom) ++n;
    if (n > nmax) nmax = n;
  }
  const XiTable& tbl = xi_table(nmax);

  Poly acc;
  for (const Term& t : symbol.ts) {
    std::vector<MomRef> refs;
    for (std::size_t fi = 0; fi < t.fs.size(); ++fi)
      for (int arr = 0; arr < 3; ++arr) {
        const auto& v = arr == 0 ? t.fs[fi].prin : (arr == 1 ? t.fs[fi].tail : t.fs[fi].vert);
        for (std::size_t pos = 0; pos < v.size(); ++pos)
          if (v[pos].bind == Bind::Mom) refs.push_back({fi, arr, pos});
      }
    const int n = (int)refs.size();
    const std::int32_t d0 = max_dummy(t) + 1;

    std::vector<int> grp((std::size_t)n);
    std::int64_t total = 1;
    for (int k = 0; k < n; ++k) total *= 4;
    for (std::int64_t code = 0; code < total; ++code) {
      std::int64_t c = code;
      std::vector<int> A, B, G, Dg;
      for (int k = 0; k < n; ++k, c /= 4) {
        grp[(std::size_t)k] = (int)(c % 4);
        (grp[(std::size_t)k] == 0   ? A
         : grp[(std::size_t)k] == 1 ? B
         : grp[(std::size_t)k] == 2 ? G
                                    : Dg)
            .push_back(k);
      }

      Term base = t;
      base.hbar += n;
      for (int k = 0; k < n; ++k) {
        Slot& s = slot_at(base, refs[(std::size_t)k]);
        s = Slot{Bind::Dummy, d0 + k, s.up, s.primed};
      }

      // weight: tau per left-routed slot, (1-tau) per right-routed one; a
      // factor -i per slot and -1 per first-point coincidence index
      GQ w = GQ(rat_pow(tau, (int)(A.size() + G.size())) *
                    rat_pow(Rat(1) - tau, (int)(B.size() + Dg.size())),
                Rat(0));
      for (int k = 0; k < n; ++k) w *= GQ(Rat(0), Rat(-1));
      for (std::size_t k = 0; k < G.size(); ++k) w *= GQ(-1);

      const Poly& xi = tbl.mixed.at({(int)G.size(), (int)Dg.size()});

      Poly assembled;
      for (const Term& xt0 : xi.ts) {
        Term xt = xt0;
        shift_dummies(xt, d0 + n);
        // open coincidence labels onto the routed slots
        for (auto& f : xt.fs)
          for (auto* arr : {&f.prin, &f.tail, &f.vert})
            for (auto& s : *arr)
              if (s.bind == Bind::Free) {
                if (s.id >= XI_X && s.id < XI_X + (std::int32_t)G.size())
                  s = Slot{Bind::Dummy, d0 + G[(std::size_t)(s.id - XI_X)], s.up, false};
                else if (s.id >= XI_Y && s.id < XI_Y + (std::int32_t)Dg.size())
                  s = Slot{Bind::Dummy, d0 + Dg[(std::size_t)(s.id - XI_Y)], s.up, false};
              }
        Term full = base;
        full.c *= xt.c * w;
        for (auto& f : xt.fs) full.fs.push_back(f);
        Factor op = atom(OPERAND);
        for (int k : B) op.tail.push_back(dummy_lo(d0 + k));
        full.fs.push_back(std::move(op));
        assembled.ts.push_back(std::move(full));
      }
      for (int k : A) assembled = cov_deriv(assembled, dummy_lo(d0 + k));
      acc = add(std::move(acc), assembled);
    }
  }

  Poly canon = canonicalize(acc);
  // vertical slots on the operand come from derivative-reordering corrections
  // and vanish identically for a momentum-independent operand
  Poly out;
  for (auto& t : canon.ts) {
    bool drop = false;
    for (const auto& f : t.fs)
      if (f.head == Head::Atom && f.atom == OPERAND && !f.vert.empty()) drop = true;
    if (!drop) out.ts.push_back(std::move(t));
  }
  return out;
}

}  // namespace geoweyl
