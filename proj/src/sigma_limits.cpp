#include <geoweyl/sigma.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace geoweyl {

namespace {

const CanonOptions kNoBianchi{/*sort_tails=*/true, /*bianchi=*/false};

// tail order inside sigma factors during limit evaluation: free labels
// ascending, then formal vectors, dummies last
std::pair<int, std::int64_t> sigma_tail_key(const Slot& s) {
  switch (s.bind) {
    case Bind::Free: return {0, s.id};
    case Bind::Vec: return {1, s.id};
    case Bind::Dummy: return {2, s.id};
    default: throw std::logic_error("unexpected binding in sigma tail");
  }
}

bool is_sigma(const Factor& f) { return f.head == Head::Sigma; }

bool tail_sorted(const Factor& f) {
  for (std::size_t k = 0; k + 1 < f.tail.size(); ++k)
    if (sigma_tail_key(f.tail[k]) > sigma_tail_key(f.tail[k + 1])) return false;
  return true;
}

// Replaces factor fi of t by the instantiated table value, in-context: the
// table polynomial's internal contractions are shifted clear of t's before
// the tail slots (which may share contraction ids with the rest of t) are
// substituted in.
Poly instantiate_in_context(const Term& t, std::size_t fi) {
  const Factor& f = t.fs[fi];
  const int n = (int)f.tail.size();
  if (n > SIGMA_ORDER_CAP) throw std::out_of_range("sigma order cap exceeded");
  Poly inst = sigma_table(n);
  const std::int32_t scratch = 1 << 16;
  for (int i = 0; i < n; ++i) inst = rename_free(std::move(inst), i + 1, scratch + i);
  std::int32_t base = max_dummy(t) + 1;
  for (auto& u : inst.ts) shift_dummies(u, base);
  for (int i = 0; i < n; ++i) inst = subst_free(std::move(inst), scratch + i, f.tail[i]);
  Poly out;
  for (const auto& u : inst.ts) {
    Term v = t;
    v.fs.erase(v.fs.begin() + (long)fi);
    v.c *= u.c;
    v.hbar += u.hbar;
    v.fs.insert(v.fs.end(), u.fs.begin(), u.fs.end());
    out.ts.push_back(std::move(v));
  }
  return out;
}

// Takes the coincidence limit of every sigma factor.  Sorted factors with
// exactly n_unknown indices are left in place as opaque markers (pass -1 to
// resolve everything).
Poly limit_of_product(Poly cur, int n_unknown) {
  for (;;) {
    bool progressed = false;
    Poly next;
    for (const auto& t : cur.ts) {
      // candidate: sigma factor of minimal tail size that is not a marker
      std::size_t best = t.fs.size();
      int best_sz = 1 << 20;
      for (std::size_t i = 0; i < t.fs.size(); ++i) {
        if (!is_sigma(t.fs[i])) continue;
        int sz = (int)t.fs[i].tail.size();
        if (sz >= best_sz) continue;
        if (tail_sorted(t.fs[i]) && n_unknown >= 0 && sz == n_unknown) continue;
        best = i;
        best_sz = sz;
      }
      if (best == t.fs.size()) {
        next.ts.push_back(t);
        continue;
      }
      progressed = true;
      const Factor& f = t.fs[best];
      if ((int)f.tail.size() < 2) continue;  // [sigma] = [sigma_mu] = 0
      if (!tail_sorted(f)) {
        std::size_t k = 0;
        while (sigma_tail_key(f.tail[k]) <= sigma_tail_key(f.tail[k + 1])) ++k;
        Poly sw = commute_adjacent(t, best, k);
        next.ts.insert(next.ts.end(), sw.ts.begin(), sw.ts.end());
      } else {
        Poly inst = instantiate_in_context(t, best);
        next.ts.insert(next.ts.end(), inst.ts.begin(), inst.ts.end());
      }
    }
    if (!progressed) return cur;
    // eliminate metric factors right away so marker tails keep pure labels
    cur = canonicalize(std::move(next), kNoBianchi);
  }
}

}  // namespace

Poly sigma_limit(const std::vector<Slot>& tail) {
  Factor f;
  f.head = Head::Sigma;
  f.tail = tail;
  return canonicalize(limit_of_product(Poly(Term{GQ(1), 0, {f}}), -1));
}

const Poly& sigma_table(int n) {
  static std::map<int, Poly> memo;
  if (n > SIGMA_ORDER_CAP) throw std::out_of_range("sigma order cap exceeded");
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;

  Poly result;
  if (n <= 1) {
    result = Poly::zero();
  } else if (n == 2) {
    result = Poly(Term{GQ(1), 0, {metric(free_lo(1), free_lo(2))}});
  } else {
    // differentiate sigma_{F1} = sigma_{B F1} sigma^B  (B contracted) n-1
    // times and take the limit; the sorted n-index factor is the unknown
    Term seed{GQ(1), 0, {sigma({dummy_lo(1000), free_lo(1)}), sigma({dummy_up(1000)})}};
    Poly rhs(seed);
    for (int k = 2; k <= n; ++k) rhs = cov_deriv(rhs, free_lo(k));
    Poly lim = limit_of_product(std::move(rhs), n);
    // split marker terms (carrying the unknown) from the known remainder
    GQ c_unknown{Rat(0), Rat(0)};
    Poly known;
    for (const auto& t : lim.ts) {
      bool marker = false;
      for (const auto& f : t.fs)
        if (is_sigma(f)) marker = true;
      if (marker) {
        if (t.fs.size() != 1) throw std::logic_error("marker with extra factors");
        c_unknown += t.c;
      } else {
        known.ts.push_back(t);
      }
    }
    // U = known + c*U.  Bianchi reduction is deferred to the final
    // user-facing results; the monoterm form suffices for instantiation
    // and keeps high orders tractable.
    GQ denom = GQ(1) - c_unknown;
    if (denom.is_zero()) throw std::logic_error("degenerate recursion");
    result = canonicalize(scale(std::move(known), GQ(1) / denom), kNoBianchi);
  }
  return memo.emplace(n, std::move(result)).first->second;
}

const Poly& mixed_limit(int k, int m) {
  static std::map<std::pair<int, int>, Poly> memo;
  auto key = std::make_pair(k, m);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  Poly result;
  if (m == 0) {
    result = sigma_table(k);
  } else {
    // derivative across the coincidence bracket:
    //   [T]_{;e} = [T_{;e}] + [T_{;e'}]
    // with T carrying k unprimed and m-1 primed derivatives.  The unprimed
    // term commutes through the primed block, giving the (k+1, m-1) limit.
    const std::int32_t e = PRIMED_BASE + m;
    Poly total = cov_deriv(mixed_limit(k, m - 1), free_lo(e));
    Poly unprimed = rename_free(mixed_limit(k + 1, m - 1), k + 1, e);
    result = canonicalize(sub(std::move(total), unprimed), kNoBianchi);
  }
  return memo.emplace(key, std::move(result)).first->second;
}

const Poly& coincidence_entry(int m, int n) {
  static std::map<std::pair<int, int>, Poly> memo;
  auto key = std::make_pair(m, n);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  // the head index is the single unprimed derivative of mixed_limit(1, m+n),
  // presented raised; the two groups are relabeled and symmetrized separately
  Poly p = mixed_limit(1, m + n);
  p = subst_free(std::move(p), 1, free_up(MU));
  std::vector<std::int32_t> ga, gb;
  for (int i = 1; i <= m; ++i) {
    p = rename_free(std::move(p), PRIMED_BASE + i, GROUP_A_BASE + i);
    ga.push_back(GROUP_A_BASE + i);
  }
  for (int j = 1; j <= n; ++j) {
    p = rename_free(std::move(p), PRIMED_BASE + m + j, GROUP_B_BASE + j);
    gb.push_back(GROUP_B_BASE + j);
  }
  if (ga.size() > 1) p = symmetrize(p, ga);
  if (gb.size() > 1) p = symmetrize(p, gb);
  p = canonicalize(p);
  return memo.emplace(key, std::move(p)).first->second;
}

}  // namespace geoweyl
