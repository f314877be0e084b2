#include <geoweyl/tensor.hpp>

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace geoweyl {

// ---- constructors ----------------------------------------------------------

Factor riemann(Slot a, Slot b, Slot c, Slot d) {
  Factor f;
  f.head = Head::Riemann;
  f.prin = {a, b, c, d};
  return f;
}
Factor ricci(Slot a, Slot b) {
  Factor f;
  f.head = Head::Ricci;
  f.prin = {a, b};
  return f;
}
Factor ricci_scalar() {
  Factor f;
  f.head = Head::Ricci;
  f.prin = {dummy_up(-1), dummy_lo(-1)};
  return f;
}
Factor metric(Slot a, Slot b) {
  Factor f;
  f.head = Head::Metric;
  f.prin = {a, b};
  return f;
}
Factor sigma(std::vector<Slot> tail) {
  Factor f;
  f.head = Head::Sigma;
  f.tail = std::move(tail);
  return f;
}
Factor atom(std::int32_t name) {
  Factor f;
  f.head = Head::Atom;
  f.atom = name;
  return f;
}

// ---- slot traversal helpers ------------------------------------------------

namespace {

template <class F>
void for_each_slot(Term& t, F&& fn) {
  for (auto& f : t.fs) {
    for (auto& s : f.prin) fn(s);
    for (auto& s : f.tail) fn(s);
    for (auto& s : f.vert) fn(s);
  }
}
template <class F>
void for_each_slot(const Term& t, F&& fn) {
  for (auto& f : t.fs) {
    for (auto& s : f.prin) fn(s);
    for (auto& s : f.tail) fn(s);
    for (auto& s : f.vert) fn(s);
  }
}

}  // namespace

std::int32_t max_dummy(const Term& t) {
  std::int32_t m = -1;
  for_each_slot(t, [&](const Slot& s) {
    if (s.bind == Bind::Dummy) m = std::max(m, s.id);
  });
  return m;
}

std::int32_t shift_dummies(Term& t, std::int32_t base) {
  std::map<std::int32_t, std::int32_t> remap;
  std::int32_t next = base;
  for_each_slot(t, [&](Slot& s) {
    if (s.bind != Bind::Dummy) return;
    auto it = remap.find(s.id);
    if (it == remap.end()) it = remap.emplace(s.id, next++).first;
    s.id = it->second;
  });
  return next;
}

// ---- arithmetic ------------------------------------------------------------

Poly add(Poly a, const Poly& b) {
  a.ts.insert(a.ts.end(), b.ts.begin(), b.ts.end());
  return a;
}
Poly sub(Poly a, const Poly& b) {
  for (const auto& t : b.ts) {
    a.ts.push_back(t);
    a.ts.back().c = -a.ts.back().c;
  }
  return a;
}
Poly scale(Poly a, const GQ& q) {
  if (q.is_zero()) return Poly::zero();
  for (auto& t : a.ts) t.c *= q;
  return a;
}

Poly mul_term(const Term& a, const Term& b) {
  Term r = a;
  Term bb = b;
  shift_dummies(bb, max_dummy(a) + 1);
  r.c *= bb.c;
  r.hbar += bb.hbar;
  r.fs.insert(r.fs.end(), bb.fs.begin(), bb.fs.end());
  Poly p;
  if (!r.c.is_zero()) p.ts.push_back(std::move(r));
  return p;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& ta : a.ts)
    for (const auto& tb : b.ts) {
      Poly p = mul_term(ta, tb);
      r.ts.insert(r.ts.end(), p.ts.begin(), p.ts.end());
    }
  return r;
}

// ---- derivatives -----------------------------------------------------------

Poly cov_deriv(const Poly& p, const Slot& d) {
  Poly r;
  for (const auto& t : p.ts) {
    for (std::size_t i = 0; i < t.fs.size(); ++i) {
      if (t.fs[i].head == Head::Metric) continue;  // covariantly constant
      Term u = t;
      u.fs[i].tail.push_back(d);
      r.ts.push_back(std::move(u));
    }
  }
  return r;
}

Poly vert_deriv(const Poly& p, const Slot& r) {
  Poly out;
  for (const auto& t : p.ts) {
    for (std::size_t i = 0; i < t.fs.size(); ++i) {
      if (t.fs[i].head == Head::Atom) {
        Term u = t;
        u.fs[i].vert.push_back(r);
        out.ts.push_back(std::move(u));
      }
      const auto rebind = [&](std::vector<Slot> Factor::* arr) {
        for (std::size_t j = 0; j < (t.fs[i].*arr).size(); ++j) {
          if ((t.fs[i].*arr)[j].bind == Bind::Mom) {
            Term u = t;
            (u.fs[i].*arr)[j] = r;
            out.ts.push_back(std::move(u));
          }
        }
      };
      rebind(&Factor::prin);
      rebind(&Factor::tail);
      rebind(&Factor::vert);
    }
  }
  return out;
}

// ---- substitution ----------------------------------------------------------

Term subst_free(Term t, std::int32_t from, const Slot& to) {
  for_each_slot(t, [&](Slot& s) {
    if (s.bind == Bind::Free && s.id == from) {
      bool up = s.up;
      s = to;
      if (to.bind != Bind::Free) s.up = up;  // keep original variance display
    }
  });
  return t;
}
Poly subst_free(Poly p, std::int32_t from, const Slot& to) {
  for (auto& t : p.ts) t = subst_free(std::move(t), from, to);
  return p;
}
Poly rename_free(Poly p, std::int32_t from, std::int32_t to_id) {
  for (auto& t : p.ts)
    for_each_slot(t, [&](Slot& s) {
      if (s.bind == Bind::Free && s.id == from) s.id = to_id;
    });
  return p;
}

// ---- symmetrize ------------------------------------------------------------

Poly symmetrize(const Poly& p, const std::vector<std::int32_t>& frees) {
  if (frees.size() < 2) return p;
  std::vector<std::int32_t> perm(frees);
  std::sort(perm.begin(), perm.end());
  Poly r;
  std::size_t count = 0;
  // temporary ids well clear of user labels
  const std::int32_t tmp = 1 << 20;
  do {
    Poly q = p;
    for (std::size_t i = 0; i < frees.size(); ++i) q = rename_free(std::move(q), frees[i], tmp + (std::int32_t)i);
    for (std::size_t i = 0; i < frees.size(); ++i) q = rename_free(std::move(q), tmp + (std::int32_t)i, perm[i]);
    r = add(std::move(r), q);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return scale(std::move(r), GQ{Rat(1), Rat(0)} * GQ{Rat(1, (long)count)});
}

// ---- structural cleanup ----------------------------------------------------

namespace {

struct SlotRef {
  std::size_t fi;
  int arr;  // 0 prin, 1 tail, 2 vert
  std::size_t pos;
};

std::vector<Slot>& slot_array(Factor& f, int arr) {
  return arr == 0 ? f.prin : (arr == 1 ? f.tail : f.vert);
}
const std::vector<Slot>& slot_array(const Factor& f, int arr) {
  return arr == 0 ? f.prin : (arr == 1 ? f.tail : f.vert);
}

// locate both slots of every dummy pair
std::map<std::int32_t, std::vector<SlotRef>> dummy_refs(const Term& t) {
  std::map<std::int32_t, std::vector<SlotRef>> m;
  for (std::size_t fi = 0; fi < t.fs.size(); ++fi)
    for (int arr = 0; arr < 3; ++arr) {
      const auto& v = slot_array(t.fs[fi], arr);
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k].bind == Bind::Dummy) m[v[k].id].push_back({fi, arr, k});
    }
  return m;
}

// Riemann monoterm symmetry: apply orientation bits to the principal slots.
// bit0: swap (0,1) [sign -1]; bit1: swap (2,3) [sign -1]; bit2: pair exchange.
void orient_riemann(std::vector<Slot>& prin, int bits, int& sign) {
  if (bits & 1) {
    std::swap(prin[0], prin[1]);
    sign = -sign;
  }
  if (bits & 2) {
    std::swap(prin[2], prin[3]);
    sign = -sign;
  }
  if (bits & 4) {
    std::swap(prin[0], prin[2]);
    std::swap(prin[1], prin[3]);
  }
}

// Reduce traces inside single factors; returns false if the whole term is
// zero (antisymmetric trace).  Throws on dimension-valued traces.
bool structural_cleanup(Term& t) {
  bool changed = true;
  while (changed) {
    changed = false;
    // metric elimination
    for (std::size_t fi = 0; fi < t.fs.size(); ++fi) {
      Factor& f = t.fs[fi];
      if (f.head != Head::Metric) continue;
      if (!f.tail.empty()) throw std::logic_error("metric factor with derivative tail");
      int di = f.prin[0].bind == Bind::Dummy ? 0 : (f.prin[1].bind == Bind::Dummy ? 1 : -1);
      if (di < 0) continue;  // fully uncontracted metric stays
      const Slot d = f.prin[di];
      const Slot other = f.prin[1 - di];
      if (other.bind == Bind::Dummy && other.id == d.id)
        throw dimension_dependent_trace("self-contracted metric (dimension factor)");
      // find the partner slot of d elsewhere and rebind it to `other`
      bool found = false;
      for (std::size_t fj = 0; fj < t.fs.size() && !found; ++fj)
        for (int arr = 0; arr < 3 && !found; ++arr) {
          auto& v = slot_array(t.fs[fj], arr);
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (fj == fi && arr == 0) continue;
            if (v[k].bind == Bind::Dummy && v[k].id == d.id) {
              bool up = v[k].up;
              v[k] = other;
              if (other.bind != Bind::Free) v[k].up = up;
              found = true;
              break;
            }
          }
        }
      if (!found) throw std::logic_error("unpaired dummy on metric factor");
      t.fs.erase(t.fs.begin() + (long)fi);
      changed = true;
      break;
    }
    if (changed) continue;
    // Riemann self-traces on principal slots
    for (std::size_t fi = 0; fi < t.fs.size(); ++fi) {
      Factor& f = t.fs[fi];
      if (f.head != Head::Riemann) continue;
      int pi = -1, pj = -1;
      for (int i = 0; i < 4 && pi < 0; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (f.prin[i].bind == Bind::Dummy && f.prin[j].bind == Bind::Dummy &&
              f.prin[i].id == f.prin[j].id) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) continue;
      if ((pi == 0 && pj == 1) || (pi == 2 && pj == 3)) return false;  // antisymmetric trace
      int sign = 1;
      std::vector<Slot> prin = f.prin;
      if (pi == 1 && pj == 3) {
        orient_riemann(prin, 1 | 2, sign);  // -> pair at (0,2)
      } else if (pi == 0 && pj == 3) {
        orient_riemann(prin, 2, sign);
      } else if (pi == 1 && pj == 2) {
        orient_riemann(prin, 1, sign);
      }  // (0,2): nothing
      Factor nf;
      nf.head = Head::Ricci;
      nf.prin = {prin[1], prin[3]};
      nf.tail = f.tail;
      t.fs[fi] = std::move(nf);
      if (sign < 0) t.c = -t.c;
      changed = true;
      break;
    }
  }
  return !t.c.is_zero();
}

// ---- canonical encoding ----------------------------------------------------

struct MinResult {
  Term canon;                               // minimal representative
  std::string key;                          // canonical byte string (excl. coeff)
  std::map<std::int32_t, std::int32_t> labels;  // original pair id -> canonical label
};

void append_byte(std::string& s, int v) { s.push_back((char)(v & 0xff)); }
void append_i32(std::string& s, std::int32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back((char)((v >> (8 * k)) & 0xff));
}

int orientation_count(const Factor& f) {
  switch (f.head) {
    case Head::Riemann: return 8;
    case Head::Ricci:
    case Head::Metric: return 2;
    case Head::Sigma: return f.tail.size() >= 2 ? 2 : 1;
    default: return 1;
  }
}

// applies orientation `o` to factor; multiplies sign
Factor oriented(const Factor& f, int o, int& sign) {
  Factor g = f;
  switch (f.head) {
    case Head::Riemann: orient_riemann(g.prin, o, sign); break;
    case Head::Ricci:
    case Head::Metric:
      if (o) std::swap(g.prin[0], g.prin[1]);
      break;
    case Head::Sigma:
      if (o) std::swap(g.tail[0], g.tail[1]);  // first two derivatives commute
      break;
    default: break;
  }
  return g;
}

// coarse, orientation-invariant key used to group interchangeable factors
std::string coarse_key(const Factor& f) {
  std::string s;
  append_byte(s, (int)f.head);
  append_i32(s, f.atom);
  append_byte(s, (int)f.prin.size());
  append_byte(s, (int)f.tail.size());
  append_byte(s, (int)f.vert.size());
  std::vector<std::string> slots;
  for (int arr = 0; arr < 3; ++arr)
    for (const auto& sl : slot_array(f, arr)) {
      std::string e;
      append_byte(e, (int)sl.bind);
      append_i32(e, sl.bind == Bind::Dummy ? 0 : sl.id);
      append_byte(e, sl.primed ? 1 : 0);
      slots.push_back(std::move(e));
    }
  std::sort(slots.begin(), slots.end());
  for (auto& e : slots) s += e;
  return s;
}

// Sorts vertical slots of every factor into a deterministic order.  Dummy
// verts are keyed by their partner's fixed coordinates; vert-vert pairs do
// not occur in this pipeline (asserted).
void sort_verts(Term& t) {
  auto refs = dummy_refs(t);
  for (std::size_t fi = 0; fi < t.fs.size(); ++fi) {
    auto& v = t.fs[fi].vert;
    if (v.size() < 2) continue;
    auto key = [&](const Slot& s) {
      std::string e;
      append_byte(e, (int)s.bind);
      if (s.bind == Bind::Dummy) {
        const auto& pr = refs.at(s.id);
        const SlotRef* partner = nullptr;
        for (const auto& r : pr)
          if (!(r.fi == fi && r.arr == 2 && slot_array(t.fs[r.fi], r.arr)[r.pos].id == s.id &&
                &slot_array(t.fs[r.fi], r.arr)[r.pos] == &s))
            partner = &r;
        // fall back: identify partner as the ref that is not this exact slot
        int cnt = 0;
        for (const auto& r : pr)
          if (r.fi == fi && r.arr == 2) ++cnt;
        if (cnt > 1) throw std::logic_error("vert-vert contraction unsupported");
        (void)partner;
        for (const auto& r : pr)
          if (!(r.fi == fi && r.arr == 2)) {
            append_i32(e, (std::int32_t)r.fi);
            append_byte(e, r.arr);
            append_i32(e, (std::int32_t)r.pos);
          }
      } else {
        append_i32(e, s.id);
      }
      append_byte(e, s.primed ? 1 : 0);
      return e;
    };
    std::stable_sort(v.begin(), v.end(),
                     [&](const Slot& a, const Slot& b) { return key(a) < key(b); });
  }
}

std::string encode_presentation(const Term& t, std::map<std::int32_t, std::int32_t>* labels_out) {
  std::string s;
  std::map<std::int32_t, std::int32_t> lab;
  std::int32_t next = 0;
  append_i32(s, t.hbar);
  for (const auto& f : t.fs) {
    append_byte(s, (int)f.head);
    append_i32(s, f.atom);
    append_byte(s, (int)f.prin.size());
    append_byte(s, (int)f.tail.size());
    append_byte(s, (int)f.vert.size());
    for (int arr = 0; arr < 3; ++arr)
      for (const auto& sl : slot_array(f, arr)) {
        append_byte(s, (int)sl.bind);
        if (sl.bind == Bind::Dummy) {
          auto it = lab.find(sl.id);
          if (it == lab.end()) it = lab.emplace(sl.id, next++).first;
          append_i32(s, it->second);
        } else {
          append_i32(s, sl.id);
        }
        append_byte(s, sl.primed ? 1 : 0);
      }
  }
  if (labels_out) *labels_out = lab;
  return s;
}

MinResult minimize_term(const Term& t0) {
  Term t = t0;
  sort_verts(t);
  // initial deterministic factor sort by coarse key (stable)
  std::vector<std::size_t> idx(t.fs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::string> ck(t.fs.size());
  for (std::size_t i = 0; i < t.fs.size(); ++i) ck[i] = coarse_key(t.fs[i]);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return ck[a] < ck[b]; });
  // runs of equal coarse keys
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i + 1;
    while (j < idx.size() && ck[idx[j]] == ck[idx[i]]) ++j;
    if (j - i > 1) runs.push_back({i, j});
    i = j;
  }

  std::string best;
  Term best_term;
  int best_sign = 1;
  std::map<std::int32_t, std::int32_t> best_labels;

  std::vector<int> orient(t.fs.size(), 0);
  std::function<void()> eval = [&]() {
    int sign = 1;
    Term cand;
    cand.c = t.c;
    cand.hbar = t.hbar;
    cand.fs.reserve(t.fs.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      cand.fs.push_back(oriented(t.fs[idx[k]], orient[idx[k]], sign));
    sort_verts(cand);
    std::map<std::int32_t, std::int32_t> lab;
    std::string key = encode_presentation(cand, &lab);
    if (best.empty() || key < best) {
      best = key;
      best_term = std::move(cand);
      best_sign = sign;
      // labels must be reported in terms of original pair ids
      best_labels = std::move(lab);
    }
  };
  std::function<void(std::size_t)> enum_orient = [&](std::size_t fpos) {
    if (fpos == t.fs.size()) {
      eval();
      return;
    }
    int n = orientation_count(t.fs[fpos]);
    for (int o = 0; o < n; ++o) {
      orient[fpos] = o;
      enum_orient(fpos + 1);
    }
  };
  std::function<void(std::size_t)> enum_perm = [&](std::size_t run) {
    if (run == runs.size()) {
      enum_orient(0);
      return;
    }
    auto [lo, hi] = runs[run];
    std::vector<std::size_t> seg(idx.begin() + (long)lo, idx.begin() + (long)hi);
    std::sort(seg.begin(), seg.end());
    do {
      std::copy(seg.begin(), seg.end(), idx.begin() + (long)lo);
      enum_perm(run + 1);
    } while (std::next_permutation(seg.begin(), seg.end()));
    // restore deterministic base order
  };
  enum_perm(0);

  MinResult r;
  r.canon = std::move(best_term);
  if (best_sign < 0) r.canon.c = -r.canon.c;
  // relabel dummies in the canonical term to 0..k-1 in traversal order
  for (auto& f : r.canon.fs)
    for (int arr = 0; arr < 3; ++arr)
      for (auto& sl : slot_array(f, arr))
        if (sl.bind == Bind::Dummy) sl.id = best_labels.at(sl.id);
  r.key = best;
  r.labels = std::move(best_labels);
  return r;
}

}  // namespace

std::string canonical_key(const Term& t) {
  Term u = t;
  if (!structural_cleanup(u)) return {};
  return minimize_term(u).key;
}

// ---- derivative commutation ------------------------------------------------

Poly commute_adjacent(const Term& t, std::size_t fi, std::size_t pos) {
  const Factor& f = t.fs[fi];
  if (pos + 1 >= f.tail.size()) throw std::logic_error("commute_adjacent: bad position");
  const Slot c = f.tail[pos];
  const Slot d = f.tail[pos + 1];

  Poly out;
  {
    Term swapped = t;
    std::swap(swapped.fs[fi].tail[pos], swapped.fs[fi].tail[pos + 1]);
    out.ts.push_back(std::move(swapped));
  }
  if (c.primed != d.primed) return out;  // derivatives at different points commute

  // X_{;P c d} = X_{;P d c} + [nabla_d, nabla_c] X_{;P}, with the sign
  // convention [nabla_m, nabla_n] w_a = -R^r{}_{a m n} w_r (this is the single
  // place the Riemann sign convention enters the rewriting engine; it is
  // pinned by the reorder identity for third derivatives of the world
  // function and cross-checked by the exact component oracle in the tests).
  std::vector<Slot> rest(f.tail.begin() + (long)pos + 2, f.tail.end());
  std::int32_t fresh = max_dummy(t) + 1;

  auto emit = [&](Factor core, Factor rf, const GQ& cf) {
    // distribute the outer derivatives `rest` over the product core*rf
    const std::size_t n = rest.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      Term u = t;
      Factor core2 = core;
      Factor rf2 = rf;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (std::size_t(1) << k))
          core2.tail.push_back(rest[k]);
        else
          rf2.tail.push_back(rest[k]);
      }
      u.fs[fi] = std::move(core2);
      u.fs.insert(u.fs.begin() + (long)fi + 1, std::move(rf2));
      u.c *= cf;
      out.ts.push_back(std::move(u));
    }
  };

  Factor core = f;
  core.tail.assign(f.tail.begin(), f.tail.begin() + (long)pos);

  // lower (covariant) tensor slots: principal indices and the tail prefix
  auto lower_correction = [&](int arr, std::size_t k) {
    Factor core2 = core;
    Slot affected = slot_array(core2, arr)[k];
    slot_array(core2, arr)[k] = dummy_lo(fresh);
    Factor rf = riemann(dummy_up(fresh), affected, d, c);
    emit(core2, rf, GQ(-1));
  };
  for (std::size_t k = 0; k < core.prin.size(); ++k) lower_correction(0, k);
  for (std::size_t k = 0; k < core.tail.size(); ++k) lower_correction(1, k);
  // vertical slots transform contravariantly: [nabla_m,nabla_n] v^r = +R^r{}_{s m n} v^s
  for (std::size_t k = 0; k < core.vert.size(); ++k) {
    Factor core2 = core;
    Slot affected = core2.vert[k];
    core2.vert[k] = dummy_up(fresh);
    Factor rf = riemann(affected, dummy_lo(fresh), d, c);
    emit(core2, rf, GQ(1));
  }
  // horizontal commutator on symbol atoms: [nabla_m,nabla_n] a = R^b{}_{r m n} p_b d_p^r a
  // (the constant +1 and the index placement are fixed by the golden
  // second-order star product term; see the star product tests)
  if (f.head == Head::Atom) {
    Factor core2 = core;
    core2.vert.push_back(dummy_up(fresh));
    Factor rf = riemann(mom_up(), dummy_lo(fresh), d, c);
    emit(core2, rf, GQ(1));
  }
  return out;
}

// ---- tail ordering ---------------------------------------------------------

namespace {

// class rank inside derivative tails
int tail_rank(const Slot& s) {
  switch (s.bind) {
    case Bind::Free: return 0;
    case Bind::Vec: return 1;
    case Bind::Mom: return 2;
    case Bind::PAux: return 3;
    case Bind::Dummy: return 4;
  }
  return 5;
}

// Order key for tail slot k of factor fi of the canonical term.  Non-dummy
// slots sort by class and id.  A dummy slot sorts by the canonical position of
// its partner slot: the label itself is assigned in traversal order and would
// make any tail order look sorted, so two contraction patterns related by a
// derivative swap would otherwise both be fixed points of the sorting pass.
std::uint64_t tail_key(const Term& t, std::size_t fi, std::size_t k) {
  const Slot& s = t.fs[fi].tail[k];
  std::uint64_t primed = s.primed ? 1u : 0u;
  std::uint64_t rank = (std::uint64_t)tail_rank(s);
  if (s.bind != Bind::Dummy) return (primed << 62) | (rank << 56) | (std::uint64_t)(s.id + (1 << 20));
  for (std::size_t fj = 0; fj < t.fs.size(); ++fj)
    for (int arr = 0; arr < 3; ++arr) {
      const auto& v = slot_array(t.fs[fj], arr);
      for (std::size_t pos = 0; pos < v.size(); ++pos) {
        if (fj == fi && arr == 1 && pos == k) continue;
        if (v[pos].bind == Bind::Dummy && v[pos].id == s.id) {
          if (fj == fi && arr == 1)  // both ends inside the same tail
            return (primed << 62) | (rank << 56) | (1ull << 50) | (std::uint64_t)s.id;
          return (primed << 62) | (rank << 56) | ((std::uint64_t)fj << 32) |
                 ((std::uint64_t)arr << 28) | (std::uint64_t)pos;
        }
      }
    }
  // unpaired dummy (should not happen); fall back to the label
  return (primed << 62) | (rank << 56) | (1ull << 51) | (std::uint64_t)s.id;
}

bool tails_sortable(const Factor& f) {
  return f.head == Head::Riemann || f.head == Head::Ricci || f.head == Head::Atom;
}

}  // namespace

// ---- Bianchi reduction -----------------------------------------------------

namespace {

Poly canonicalize_impl(const Poly& p, const CanonOptions& opt);

// Builds the Bianchi/second-Bianchi relation instances that contain the given
// canonical monoterm and reduces its class by exact Gaussian elimination.
// Rewrites are cached per canonical key.
struct BianchiReducer {
  std::map<std::string, Poly> cache;

  // every relation instance containing term t (through one of its factors)
  std::vector<std::vector<std::pair<GQ, Term>>> instances(const Term& t) {
    std::vector<std::vector<std::pair<GQ, Term>>> rel;
    for (std::size_t fi = 0; fi < t.fs.size(); ++fi) {
      const Factor& f = t.fs[fi];
      if (f.head == Head::Riemann) {
        // first Bianchi: R_{a[bcd]} cyclic sum vanishes
        {
          std::vector<std::pair<GQ, Term>> r;
          for (int k = 0; k < 3; ++k) {
            Term u = t;
            auto& p = u.fs[fi].prin;
            Slot b = f.prin[1], c = f.prin[2], d = f.prin[3];
            for (int j = 0; j < k; ++j) {
              Slot tmp = b;
              b = c;
              c = d;
              d = tmp;
            }
            p[1] = b;
            p[2] = c;
            p[3] = d;
            r.push_back({GQ(1), std::move(u)});
          }
          rel.push_back(std::move(r));
        }
        // second Bianchi: cyclic over (c, d, tail[0])
        if (!f.tail.empty()) {
          std::vector<std::pair<GQ, Term>> r;
          for (int k = 0; k < 3; ++k) {
            Term u = t;
            Slot c = f.prin[2], d = f.prin[3], e = f.tail[0];
            for (int j = 0; j < k; ++j) {
              Slot tmp = c;
              c = d;
              d = e;
              e = tmp;
            }
            u.fs[fi].prin[2] = c;
            u.fs[fi].prin[3] = d;
            u.fs[fi].tail[0] = e;
            r.push_back({GQ(1), std::move(u)});
          }
          rel.push_back(std::move(r));
        }
        // contracted second Bianchi where this factor matches nabla^a R_{abde}
        // in some orientation: Ric_{bd;e} + nabla^a R_{abde} - Ric_{be;d} = 0
        if (!f.tail.empty()) {
          for (int o = 0; o < 8; ++o) {
            int sign = 1;
            std::vector<Slot> prin = f.prin;
            orient_riemann(prin, o, sign);
            if (prin[0].bind == Bind::Dummy && f.tail[0].bind == Bind::Dummy &&
                prin[0].id == f.tail[0].id) {
              Slot b = prin[1], dd = prin[2], e = prin[3];
              std::vector<Slot> rest(f.tail.begin() + 1, f.tail.end());
              std::vector<std::pair<GQ, Term>> r;
              {
                Term u = t;  // member: this factor itself (sign-adjusted)
                r.push_back({GQ(sign), std::move(u)});
              }
              {
                Term u = t;
                Factor nf = ricci(b, dd);
                nf.tail = {e};
                nf.tail.insert(nf.tail.end(), rest.begin(), rest.end());
                u.fs[fi] = std::move(nf);
                r.push_back({GQ(1), std::move(u)});
              }
              {
                Term u = t;
                Factor nf = ricci(b, e);
                nf.tail = {dd};
                nf.tail.insert(nf.tail.end(), rest.begin(), rest.end());
                u.fs[fi] = std::move(nf);
                r.push_back({GQ(-1), std::move(u)});
              }
              rel.push_back(std::move(r));
              break;
            }
          }
        }
      } else if (f.head == Head::Ricci && !f.tail.empty()) {
        // the same contracted identity entered through a Ricci member, in the
        // two possible roles; (x,y;z...) as Ric_{bd;e} and as Ric_{be;d}
        for (int role = 0; role < 2; ++role) {
          Slot b = f.prin[0], y = f.prin[1], z = f.tail[0];
          std::vector<Slot> rest(f.tail.begin() + 1, f.tail.end());
          Slot dd = role == 0 ? y : z;
          Slot e = role == 0 ? z : y;
          std::int32_t fresh = max_dummy(t) + 1;
          std::vector<std::pair<GQ, Term>> r;
          {
            Term u = t;
            Factor nf = ricci(b, dd);
            nf.tail = {e};
            nf.tail.insert(nf.tail.end(), rest.begin(), rest.end());
            u.fs[fi] = std::move(nf);
            r.push_back({GQ(1), std::move(u)});
          }
          {
            Term u = t;
            Factor nf = riemann(dummy_up(fresh), b, dd, e);
            nf.tail = {dummy_lo(fresh)};
            nf.tail.insert(nf.tail.end(), rest.begin(), rest.end());
            u.fs[fi] = std::move(nf);
            r.push_back({GQ(1), std::move(u)});
          }
          {
            Term u = t;
            Factor nf = ricci(b, e);
            nf.tail = {dd};
            nf.tail.insert(nf.tail.end(), rest.begin(), rest.end());
            u.fs[fi] = std::move(nf);
            r.push_back({GQ(-1), std::move(u)});
          }
          rel.push_back(std::move(r));
        }
      }
    }
    return rel;
  }

  // canonicalize a raw term without Bianchi reduction; result is a map
  // canonical-key -> (coeff, canonical term)
  static std::map<std::string, std::pair<GQ, Term>> mono(const Term& t) {
    CanonOptions o;
    o.bianchi = false;
    Poly p = canonicalize_impl(Poly(t), o);
    std::map<std::string, std::pair<GQ, Term>> m;
    for (const auto& u : p.ts) {
      Term v = u;
      GQ c = v.c;
      v.c = GQ(1);
      std::string k = encode_presentation(v, nullptr);
      auto it = m.find(k);
      if (it == m.end())
        m.emplace(k, std::make_pair(c, std::move(v)));
      else
        it->second.first += c;
    }
    return m;
  }

  const Poly& reduce_key(const Term& canon_unit) {
    std::string key = encode_presentation(canon_unit, nullptr);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // build closure
    std::map<std::string, Term> seen;
    std::vector<std::string> work{key};
    seen.emplace(key, canon_unit);
    std::vector<std::map<std::string, GQ>> rows;
    std::set<std::string> row_keys;
    std::size_t wi = 0;
    while (wi < work.size()) {
      if (seen.size() > 4000 || rows.size() > 8000)
        throw std::runtime_error("bianchi closure exploded");
      Term cur = seen.at(work[wi++]);
      cur.c = GQ(1);
      for (auto& inst : instances(cur)) {
        std::map<std::string, GQ> row;
        for (auto& [cf, raw] : inst) {
          for (auto& [k, ct] : mono(raw)) {
            GQ c = cf * ct.first;
            auto [rit, ins] = row.emplace(k, c);
            if (!ins) rit->second += c;
            if (seen.find(k) == seen.end()) {
              seen.emplace(k, ct.second);
              work.push_back(k);
            }
          }
        }
        for (auto rit = row.begin(); rit != row.end();)
          rit = rit->second.is_zero() ? row.erase(rit) : std::next(rit);
        if (row.empty()) continue;
        std::string sig;
        for (auto& [k, c] : row) sig += k + "|" + to_string(c) + ";";
        if (row_keys.insert(sig).second) rows.push_back(std::move(row));
      }
    }

    // Gaussian elimination, pivoting on the lexicographically largest key in
    // each row so that everything rewrites toward smaller canonical keys.
    std::map<std::string, std::map<std::string, GQ>> pivots;  // pivot key -> row (pivot coeff 1)
    for (auto row : rows) {
      // reduce row by existing pivots
      bool changed = true;
      while (changed) {
        changed = false;
        for (auto rit = row.rbegin(); rit != row.rend(); ++rit) {
          auto pit = pivots.find(rit->first);
          if (pit == pivots.end()) continue;
          GQ c = rit->second;
          row.erase(std::next(rit).base());
          for (const auto& [k, pc] : pit->second) {
            auto [mit, ins] = row.emplace(k, -(c * pc));
            if (!ins) mit->second -= c * pc;
          }
          for (auto r2 = row.begin(); r2 != row.end();)
            r2 = r2->second.is_zero() ? row.erase(r2) : std::next(r2);
          changed = true;
          break;
        }
      }
      if (row.empty()) continue;
      auto piv = std::prev(row.end());  // largest key
      GQ pc = piv->second;
      std::string pk = piv->first;
      row.erase(piv);
      for (auto& [k, c] : row) c /= pc;
      pivots.emplace(std::move(pk), std::move(row));
    }
    // back-substitute pivots into each other
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& [pk, row] : pivots) {
        for (auto rit = row.begin(); rit != row.end(); ++rit) {
          auto pit = pivots.find(rit->first);
          if (pit == pivots.end() || pit->first == pk) continue;
          GQ c = rit->second;
          row.erase(rit);
          for (const auto& [k, pc] : pit->second) {
            auto [mit, ins] = row.emplace(k, -(c * pc));
            if (!ins) mit->second -= c * pc;
          }
          for (auto r2 = row.begin(); r2 != row.end();)
            r2 = r2->second.is_zero() ? row.erase(r2) : std::next(r2);
          changed = true;
          break;
        }
        if (changed) break;
      }
    }

    // install rewrites for every seen key
    for (auto& [k, term] : seen) {
      Poly val;
      auto pit = pivots.find(k);
      if (pit == pivots.end()) {
        Term u = term;
        u.c = GQ(1);
        val.ts.push_back(std::move(u));
      } else {
        for (const auto& [k2, c] : pit->second) {
          Term u = seen.at(k2);
          u.c = -c;
          val.ts.push_back(std::move(u));
        }
      }
      cache[k] = std::move(val);
    }
    return cache.at(key);
  }
};

BianchiReducer& bianchi_reducer() {
  static BianchiReducer r;
  return r;
}

// ---- full canonicalization -------------------------------------------------

void merge_into(std::map<std::string, std::pair<GQ, Term>>& acc, const Term& t) {
  Term u = t;
  GQ c = u.c;
  u.c = GQ(1);
  std::string k = encode_presentation(u, nullptr);
  auto it = acc.find(k);
  if (it == acc.end())
    acc.emplace(std::move(k), std::make_pair(c, std::move(u)));
  else
    it->second.first += c;
}

void canonicalize_term(const Term& t0, const CanonOptions& opt,
                       std::map<std::string, std::pair<GQ, Term>>& acc, int depth) {
  if (depth > 64) throw std::runtime_error("canonicalize: commutation depth exceeded");
  Term t = t0;
  if (t.c.is_zero()) return;
  if (!structural_cleanup(t)) return;
  MinResult mr = minimize_term(t);

  if (opt.sort_tails) {
    // find the first adjacent tail inversion in the canonical arrangement
    for (std::size_t fi = 0; fi < mr.canon.fs.size(); ++fi) {
      const Factor& f = mr.canon.fs[fi];
      if (!tails_sortable(f)) continue;
      for (std::size_t k = 0; k + 1 < f.tail.size(); ++k) {
        if (tail_key(mr.canon, fi, k) > tail_key(mr.canon, fi, k + 1)) {
          Poly sw = commute_adjacent(mr.canon, fi, k);
          for (const auto& u : sw.ts) canonicalize_term(u, opt, acc, depth + 1);
          return;
        }
      }
    }
  }

  if (opt.bianchi) {
    bool has_curv = false;
    for (const auto& f : mr.canon.fs)
      if (f.head == Head::Riemann || f.head == Head::Ricci) has_curv = true;
    if (has_curv) {
      Term unit = mr.canon;
      GQ c = unit.c;
      unit.c = GQ(1);
      const Poly& rw = bianchi_reducer().reduce_key(unit);
      for (const auto& u : rw.ts) {
        Term v = u;
        v.c *= c;
        merge_into(acc, v);
      }
      return;
    }
  }
  merge_into(acc, mr.canon);
}

Poly canonicalize_impl(const Poly& p, const CanonOptions& opt) {
  std::map<std::string, std::pair<GQ, Term>> acc;
  for (const auto& t : p.ts) canonicalize_term(t, opt, acc, 0);
  Poly r;
  for (auto& [k, ct] : acc) {
    if (ct.second.fs.empty() && false) {}
    if (ct.first.is_zero()) continue;
    Term u = std::move(ct.second);
    u.c = ct.first;
    r.ts.push_back(std::move(u));
  }
  return r;
}

}  // namespace

Poly canonicalize(const Poly& p, const CanonOptions& opt) { return canonicalize_impl(p, opt); }

bool poly_equal(const Poly& a, const Poly& b) { return canonicalize(sub(a, b)).is_zero(); }

}  // namespace geoweyl
