#include "gradal/metatheory.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <thread>

#include "gradal/printer.hpp"

namespace gradal {

const char* gen_fragment_name(GenFragment f) {
  switch (f) {
    case GenFragment::Graded: return "graded";
    case GenFragment::Mixed: return "mixed";
    case GenFragment::Glad: return "glad";
  }
  return "?";
}

namespace {

constexpr int kAttempts = 500;
constexpr uint64_t kShapeFuel = 256;

TermPtr ann(TermPtr t, TermPtr ty) { return mk(Tag::Ann, {std::move(t), std::move(ty)}); }

bool ends_with(const std::string& s, std::string_view suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

bool is_former(Tag t) {
  switch (t) {
    case Tag::Var:
    case Tag::TypeU:
    case Tag::LinearU:
    case Tag::UnitJ:
    case Tag::Pi:
    case Tag::Sigma:
    case Tag::Sum:
    case Tag::GAdj:
    case Tag::UnitI:
    case Tag::Lollipop:
    case Tag::Tensor:
    case Tag::FType:
    case Tag::UnitM:
    case Tag::PiG:
    case Tag::TensorG:
    case Tag::Up: return true;
    default: return false;
  }
}

// Cut partners land in arbitrary positions (an application head, say), so
// anything that may only check against a type gets ascribed.
TermPtr ascribed(const TermPtr& t, const TermPtr& ty) {
  if (is_former(t->tag)) return t;
  switch (t->tag) {
    case Tag::Ann:
    case Tag::UnitJIntro:
    case Tag::UnitIIntro:
    case Tag::StarM: return t;
    default: return ann(t, ty);
  }
}

// Head form of a type, for reading its shape.
TermPtr whnf(const TermPtr& ty, uint64_t fuel = kShapeFuel) {
  const TermPtr& p = peel_ann(ty);
  if (is_former(p->tag)) return p;
  return normalize(strip_ann(ty), fuel).final;
}

bool same_type(const TermPtr& a, const TermPtr& b) { return alpha_eq(strip_ann(a), strip_ann(b)); }

bool is_zero(const Grade& g) { return g.v == g.sr->zero(); }

GradeVector synthesized(const Derivation& d) {
  if (ends_with(d.rule, "subusage") && !d.premises.empty()) return d.premises[0].conclusion.delta;
  return d.conclusion.delta;
}

bool is_ctx(Fragment f) {
  return f == Fragment::GradedCtx || f == Fragment::MixedCtx || f == Fragment::GladCtx;
}

bool is_glad(Fragment f) { return f == Fragment::Glad || f == Fragment::GladCtx; }

// Generation environment: the graded (or GlaD) context grown by binders,
// and linear entries with the graded depth their type was formed at.
struct Lin {
  std::string name;
  TermPtr type;
  std::size_t gdepth;
};
struct Gen {
  Ctx g;
  std::vector<Lin> l;
};
using Set = std::vector<std::size_t>;  // linear levels to consume exactly once
using TT = std::pair<TermPtr, TermPtr>;

TermPtr gtype(const Gen& e, std::size_t lvl) {
  return shift(e.g[lvl].type, int64_t(e.g.size() - lvl));
}
TermPtr gref(const Gen& e, std::size_t lvl) { return gvar(uint32_t(e.g.size() - 1 - lvl)); }
TermPtr ltype(const Gen& e, std::size_t lvl) {
  return shift(e.l[lvl].type, int64_t(e.g.size() - e.l[lvl].gdepth));
}
TermPtr lref(const Gen& e, std::size_t lvl) { return lvar(uint32_t(e.l.size() - 1 - lvl)); }

Gen push_g(const Gen& e, std::string name, TermPtr type, std::string mode = {}) {
  Gen r = e;
  r.g.push_back({std::move(name), std::move(type), std::move(mode)});
  return r;
}
Gen push_l(const Gen& e, std::string name, TermPtr type) {
  Gen r = e;
  r.l.push_back({std::move(name), std::move(type), e.g.size()});
  return r;
}
Gen graded_only(const Gen& e) { return Gen{e.g, {}}; }

Set without(const Set& s, std::size_t v) {
  Set r;
  for (auto x : s)
    if (x != v) r.push_back(x);
  return r;
}

TermPtr tJ() { return mk(Tag::UnitJ); }
TermPtr tI() { return mk(Tag::UnitI); }
TermPtr unitm(const std::string& m) { return mk(Tag::UnitM, {}, {}, m); }
TermPtr star(const std::string& m) { return mk(Tag::StarM, {}, {}, m); }
TermPtr binder(Tag tag, TermPtr a, TermPtr b, std::string grade, std::string name,
               std::string mode = {}) {
  return mk(tag, {std::move(a), std::move(b)}, std::move(grade), std::move(mode), {},
            {std::move(name)});
}
TermPtr lam(Tag tag, TermPtr body, std::string name) {
  return mk(tag, {std::move(body)}, {}, {}, {}, {std::move(name)});
}

}  // namespace

// ================================================================ generator

struct Generator::Impl {
  const Semiring* sr;
  const ModeTheory* mt;
  GeneratorConfig cfg;
  std::mt19937_64 rng;
  uint64_t rejected = 0;
  CheckOptions opts;
  std::optional<DmglChecker> dc;
  std::optional<GladChecker> gc;
  uint64_t fresh_n = 0;

  Impl(const Semiring* s, const ModeTheory* m, GeneratorConfig c)
      : sr(s), mt(m), cfg(c), rng(c.seed) {
    if (sr) dc.emplace(*sr, opts);
    if (mt) gc.emplace(*mt, opts);
  }

  // ------------------------------------------------------------ randomness

  uint64_t below(uint64_t n) { return n ? rng() % n : 0; }
  bool coin(uint64_t num = 1, uint64_t den = 2) { return below(den) < num; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  int weighted(const std::vector<std::pair<int, int>>& o) {
    int total = 0;
    for (const auto& [w, id] : o) total += std::max(w, 0);
    if (total == 0) return -1;
    int r = int(below(uint64_t(total)));
    for (const auto& [w, id] : o) {
      if (w <= 0) continue;
      if (r < w) return id;
      r -= w;
    }
    return -1;
  }
  std::string fresh(const char* base) { return base + std::to_string(fresh_n++); }

  // ---------------------------------------------------------------- grades

  std::string rand_grade(const Semiring& s) { return s.show(pick(s.enumerate(3))); }

  // u itself or a minimal element strictly above it.
  uint64_t loosen(const Semiring& s, uint64_t u) {
    std::vector<uint64_t> up;
    for (uint64_t v : s.enumerate(u + 2))
      if (v != u && s.leq(u, v)) up.push_back(v);
    std::vector<uint64_t> minimal;
    for (uint64_t v : up) {
      bool m = true;
      for (uint64_t w : up) m = m && !(w != v && s.leq(w, v) && !s.leq(v, w));
      if (m) minimal.push_back(v);
    }
    return minimal.empty() ? u : pick(minimal);
  }

  static std::optional<uint64_t> least_above(const Semiring& s, const std::vector<uint64_t>& lows) {
    uint64_t bound = 1;
    for (uint64_t l : lows) bound = std::max(bound, l);
    std::vector<uint64_t> ok;
    for (uint64_t v : s.enumerate(bound)) {
      bool all = true;
      for (uint64_t l : lows) all = all && s.leq(l, v);
      if (all) ok.push_back(v);
    }
    for (uint64_t c : ok) {
      bool least = true;
      for (uint64_t d : ok) least = least && s.leq(c, d);
      if (least) return c;
    }
    if (!ok.empty()) return ok.front();
    return std::nullopt;
  }

  static uint64_t ones(const Semiring& s, int k) {
    uint64_t v = s.zero();
    for (int i = 0; i < k; ++i) v = s.add(v, s.one());
    return v;
  }

  // ------------------------------------------------------------- selection

  template <class F>
  std::vector<std::size_t> select(const Gen& e, F pred) {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < e.g.size(); ++i)
      if (pred(i)) r.push_back(i);
    return r;
  }
  std::vector<std::size_t> of_tag(const Gen& e, Tag t, const std::string& mode = {}) {
    return select(e, [&](std::size_t i) {
      return e.g[i].mode == mode && whnf(gtype(e, i))->tag == t;
    });
  }
  std::vector<std::size_t> of_type(const Gen& e, const TermPtr& ty, const std::string& mode = {}) {
    return select(e, [&](std::size_t i) {
      return e.g[i].mode == mode && same_type(gtype(e, i), ty);
    });
  }

  // ----------------------------------------------------------- dmGL types

  TermPtr graded_type(const Gen& e, bool universe) {
    bool mixed = cfg.fragment == GenFragment::Mixed;
    auto tvars = select(e, [&](std::size_t i) { return peel_ann(e.g[i].type)->tag == Tag::TypeU; });
    int tv = tvars.empty() ? 0 : 2;
    switch (weighted({{4, 0}, {1, 1}, {2, 2}, {1, 3}, {universe ? 1 : 0, 4}, {tv, 5},
                      {tv / 2, 6}, {mixed ? 2 : 0, 7}})) {
      case 1: return mk(Tag::Sum, {tJ(), tJ()});
      case 2: return binder(Tag::Pi, tJ(), tJ(), rand_grade(*sr), fresh("v"));
      case 3: return binder(Tag::Sigma, tJ(), tJ(), rand_grade(*sr), fresh("v"));
      case 4: return mk(Tag::TypeU);
      case 5: return gref(e, pick(tvars));
      case 6: {
        TermPtr a = gref(e, pick(tvars));
        return binder(Tag::Pi, a, shift(a, 1), rand_grade(*sr), fresh("v"));
      }
      case 7: return mk(Tag::GAdj, {linear_type()});
      default: return tJ();
    }
  }

  TermPtr linear_type() {
    switch (below(5)) {
      case 1: return mk(Tag::Tensor, {tI(), tI()});
      case 2: return mk(Tag::Lollipop, {tI(), tI()});
      case 3: return binder(Tag::FType, tJ(), tI(), rand_grade(*sr), fresh("v"));
      default: return tI();
    }
  }

  std::optional<Grade> last_use(const Gen& e, const TermPtr& t, const TermPtr& ty) {
    try {
      return dc->infer_graded(e.g, ann(t, ty)).usage.back();
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // ------------------------------------------------------- graded terms

  enum { kLeaf, kLetJ, kLam, kApp, kPair, kLetPair, kInj, kCase, kShift, kRedex };

  std::optional<TT> leaf(const Gen& e) {
    const auto& w = cfg.weights;
    switch (weighted({{w.unit, 0}, {e.g.empty() ? 0 : w.var, 1}})) {
      case 0: return TT{mk(Tag::UnitJIntro), tJ()};
      case 1: {
        std::size_t i = below(e.g.size());
        return TT{gref(e, i), gtype(e, i)};
      }
      default: return std::nullopt;
    }
  }

  std::optional<TT> any(const Gen& e, int d) {
    if (d <= 0) return leaf(e);
    const auto& w = cfg.weights;
    std::vector<std::pair<int, int>> o = {
        {w.var + w.unit, kLeaf}, {w.let_unit, kLetJ}, {w.lambda, kLam},
        {w.app, kApp},           {w.pair, kPair},     {w.let_pair, kLetPair},
        {w.inj, kInj},           {w.case_, kCase},    {w.redex, kRedex}};
    for (int tries = 0; tries < 3; ++tries) {
      std::optional<TT> r;
      switch (weighted(o)) {
        case kLeaf: r = leaf(e); break;
        case kLetJ: r = let_j(e, d, false); break;
        case kLam: r = lam_g(e, d); break;
        case kApp: r = app(e, d, false); break;
        case kPair: r = pair(e, d); break;
        case kLetPair: r = let_pair(e, d, false); break;
        case kInj: r = inj(e, d); break;
        case kCase: r = case_of(e, d, false); break;
        case kRedex: r = redex(e, d); break;
        default: return std::nullopt;
      }
      if (r) return r;
    }
    return leaf(e);
  }

  std::optional<TT> let_j(const Gen& e, int d, bool redex) {
    TermPtr s = redex ? mk(Tag::UnitJIntro) : at(e, tJ(), d - 1);
    if (!s) return std::nullopt;
    auto b = any(e, d - 1);
    if (!b) return std::nullopt;
    return TT{mk(Tag::LetJ, {s, b->first}), b->second};
  }

  std::optional<TT> lam_g(const Gen& e, int d) {
    TermPtr a = graded_type(e, true);
    std::string x = fresh("v");
    Gen e2 = push_g(e, x, a);
    auto b = any(e2, d - 1);
    if (!b) return std::nullopt;
    auto u = last_use(e2, b->first, b->second);
    if (!u) return std::nullopt;
    uint64_t r = cfg.slack && coin(1, 4) ? loosen(*sr, u->v) : u->v;
    TermPtr ty = binder(Tag::Pi, a, b->second, sr->show(r), x);
    return TT{ann(lam(Tag::Lam, b->first, x), ty), ty};
  }

  std::optional<TT> app(const Gen& e, int d, bool redex) {
    TermPtr f, fty;
    auto fns = of_tag(e, Tag::Pi);
    if (redex || fns.empty() || coin()) {
      auto l = lam_g(e, d);
      if (!l) return std::nullopt;
      std::tie(f, fty) = *l;
    } else {
      std::size_t i = pick(fns);
      f = gref(e, i);
      fty = gtype(e, i);
    }
    TermPtr pi = whnf(fty);
    if (pi->tag != Tag::Pi) return std::nullopt;
    TermPtr arg = at(e, pi->kids[0], d - 1);
    if (!arg) return std::nullopt;
    return TT{mk(Tag::App, {f, arg}), subst_top(pi->kids[1], Zone::Graded, arg)};
  }

  std::optional<TT> pair(const Gen& e, int d) {
    auto a = any(e, d - 1);
    if (!a) return std::nullopt;
    TermPtr b, y;
    if (peel_ann(a->second)->tag == Tag::TypeU && coin()) {
      b = at(e, a->first, d - 1);
      y = gvar(0);
    } else {
      auto bb = any(e, d - 1);
      if (!bb) return std::nullopt;
      b = bb->first;
      y = shift(bb->second, 1);
    }
    if (!b) return std::nullopt;
    TermPtr ty = binder(Tag::Sigma, a->second, y, rand_grade(*sr), fresh("v"));
    return TT{ann(mk(Tag::Pair, {a->first, b}), ty), ty};
  }

  std::optional<TT> let_pair(const Gen& e, int d, bool redex) {
    TermPtr s, sty;
    auto ps = of_tag(e, Tag::Sigma);
    if (redex || ps.empty() || coin(1, 3)) {
      auto p = pair(e, d);
      if (!p) return std::nullopt;
      std::tie(s, sty) = *p;
    } else {
      std::size_t i = pick(ps);
      s = gref(e, i);
      sty = gtype(e, i);
    }
    TermPtr sig = whnf(sty);
    if (sig->tag != Tag::Sigma) return std::nullopt;
    std::string x = fresh("v"), y = fresh("v");
    Gen e2 = push_g(push_g(e, x, sig->kids[0]), y, sig->kids[1]);
    auto b = any(e2, d - 1);
    if (!b || occurs_free(b->second, Zone::Graded, 0) || occurs_free(b->second, Zone::Graded, 1))
      return std::nullopt;
    return TT{mk(Tag::LetPair, {s, b->first}, {}, {}, {}, {x, y}), shift(b->second, -2)};
  }

  std::optional<TT> inj(const Gen& e, int d) {
    auto a = any(e, d - 1);
    if (!a) return std::nullopt;
    TermPtr other = graded_type(e, false);
    bool left = coin();
    TermPtr ty = left ? mk(Tag::Sum, {a->second, other}) : mk(Tag::Sum, {other, a->second});
    return TT{ann(mk(left ? Tag::Inl : Tag::Inr, {a->first}), ty), ty};
  }

  std::optional<TT> case_of(const Gen& e, int d, bool redex) {
    TermPtr s, sty;
    auto ss = of_tag(e, Tag::Sum);
    if (redex || ss.empty() || coin(1, 3)) {
      auto p = inj(e, d);
      if (!p) return std::nullopt;
      std::tie(s, sty) = *p;
    } else {
      std::size_t i = pick(ss);
      s = gref(e, i);
      sty = gtype(e, i);
    }
    TermPtr sum = whnf(sty);
    if (sum->tag != Tag::Sum) return std::nullopt;
    std::string x = fresh("v"), y = fresh("v");
    Gen e1 = push_g(e, x, sum->kids[0]);
    auto b1 = any(e1, d - 1);
    if (!b1 || occurs_free(b1->second, Zone::Graded, 0)) return std::nullopt;
    TermPtr c1 = b1->second;  // the motive under one binder
    Gen e2 = push_g(e, y, sum->kids[1]);
    TermPtr b2 = at(e2, c1, d - 1);
    if (!b2) return std::nullopt;
    auto u1 = last_use(e1, b1->first, c1);
    auto u2 = last_use(e2, b2, c1);
    if (!u1 || !u2) return std::nullopt;
    auto q = least_above(*sr, {sr->one(), u1->v, u2->v});
    if (!q) return std::nullopt;
    std::string qs = sr->show(*q);
    TermPtr br1 = ann(lam(Tag::Lam, b1->first, x), binder(Tag::Pi, sum->kids[0], c1, qs, x));
    TermPtr br2 = ann(lam(Tag::Lam, b2, y), binder(Tag::Pi, sum->kids[1], c1, qs, y));
    return TT{mk(Tag::Case, {s, br1, br2}, qs), shift(c1, -1)};
  }

  std::optional<TT> redex(const Gen& e, int d) {
    switch (below(4)) {
      case 0: return let_j(e, d, true);
      case 1: return app(e, d, true);
      case 2: return let_pair(e, d, true);
      default: return case_of(e, d, true);
    }
  }

  // x (graded index 0, type J) used exactly k times.
  static TermPtr uses(int k) {
    if (k == 0) return mk(Tag::UnitJIntro);
    TermPtr t = gvar(0);
    for (int i = 1; i < k; ++i) t = mk(Tag::LetJ, {gvar(0), t});
    return t;
  }

  TermPtr app_to(const Gen& e, const TermPtr& want, int d) {
    auto fs = select(e, [&](std::size_t i) {
      TermPtr p = whnf(gtype(e, i));
      return p->tag == Tag::Pi && !occurs_free(p->kids[1], Zone::Graded, 0) &&
             same_type(shift(p->kids[1], -1), want);
    });
    if (fs.empty()) return nullptr;
    std::size_t i = pick(fs);
    TermPtr arg = at(e, whnf(gtype(e, i))->kids[0], d - 1);
    if (!arg) return nullptr;
    return mk(Tag::App, {gref(e, i), arg});
  }

  // A term checking against ty; bare introduction forms are allowed.
  TermPtr at(const Gen& e, const TermPtr& ty, int d) {
    TermPtr h = whnf(ty);
    auto vs = of_type(e, ty);
    if (!vs.empty() && (d <= 0 || coin(1, 3))) return gref(e, pick(vs));
    if (d > 0 && coin(1, 4)) {
      if (TermPtr f = app_to(e, ty, d)) return f;
      for (int t = 0; t < 2; ++t)
        if (auto r = any(e, d); r && same_type(r->second, ty)) return r->first;
    }
    switch (h->tag) {
      case Tag::UnitJ:
        if (d > 0 && coin()) {
          TermPtr s = at(e, tJ(), d - 1), b = at(e, tJ(), d - 1);
          if (s && b) return mk(Tag::LetJ, {s, b});
        }
        return mk(Tag::UnitJIntro);
      case Tag::TypeU: {
        auto tv = select(e, [&](std::size_t i) { return peel_ann(e.g[i].type)->tag == Tag::TypeU; });
        switch (below(4)) {
          case 0: return mk(Tag::Sum, {tJ(), tJ()});
          case 1:
            if (!tv.empty()) return gref(e, pick(tv));
            return tJ();
          case 2: return binder(Tag::Pi, tJ(), tJ(), rand_grade(*sr), fresh("v"));
          default: return tJ();
        }
      }
      case Tag::Pi: {
        std::string x = fresh("v");
        Gen e2 = push_g(e, x, h->kids[0]);
        Grade r = grade_of(*sr, h->grade);
        for (int t = 0; t < 2; ++t) {
          TermPtr b = at(e2, h->kids[1], d - 1);
          if (!b) continue;
          auto u = last_use(e2, b, h->kids[1]);
          if (u && leq(*u, r)) return lam(Tag::Lam, b, x);
        }
        if (whnf(h->kids[0])->tag == Tag::UnitJ && whnf(h->kids[1])->tag == Tag::UnitJ)
          for (int k = 0; k < 4; ++k)
            if (sr->leq(ones(*sr, k), r.v)) return lam(Tag::Lam, uses(k), x);
        break;
      }
      case Tag::Sigma: {
        TermPtr a = at(e, h->kids[0], d - 1);
        if (!a) break;
        TermPtr b = at(e, subst_top(h->kids[1], Zone::Graded, a), d - 1);
        if (!b) break;
        return mk(Tag::Pair, {a, b});
      }
      case Tag::Sum: {
        bool left = coin();
        TermPtr a = at(e, h->kids[left ? 0 : 1], d - 1);
        if (!a) {
          left = !left;
          a = at(e, h->kids[left ? 0 : 1], d - 1);
        }
        if (!a) break;
        return mk(left ? Tag::Inl : Tag::Inr, {a});
      }
      case Tag::GAdj: {
        TermPtr l = lin_at(graded_only(e), {}, h->kids[0], d - 1);
        if (!l) break;
        return mk(Tag::GIntro, {l});
      }
      default: break;
    }
    if (!vs.empty()) return gref(e, pick(vs));
    return nullptr;
  }

  // ------------------------------------------------------- linear terms

  std::pair<Set, Set> split(const Set& s) {
    Set a, b;
    for (auto x : s) (coin() ? a : b).push_back(x);
    return {a, b};
  }

  TT tensor_all(const Gen& e, const Set& s) {
    TermPtr t = lref(e, s[0]), ty = ltype(e, s[0]);
    for (std::size_t i = 1; i < s.size(); ++i) {
      TermPtr ty2 = mk(Tag::Tensor, {ty, ltype(e, s[i])});
      t = ann(mk(Tag::TensorPair, {t, lref(e, s[i])}), ty2);
      ty = ty2;
    }
    return {t, ty};
  }

  std::optional<TT> lin_leaf(const Gen& e) {
    auto gs = of_tag(e, Tag::GAdj);
    switch (weighted({{cfg.weights.unit, 0}, {gs.empty() ? 0 : cfg.weights.radj, 1}})) {
      case 0: return TT{mk(Tag::UnitIIntro), tI()};
      case 1: {
        std::size_t i = pick(gs);
        return TT{mk(Tag::GInv, {gref(e, i)}), whnf(gtype(e, i))->kids[0]};
      }
      default: return std::nullopt;
    }
  }

  std::optional<TT> lin_any(const Gen& e, const Set& s, int d) {
    auto fallback = [&]() -> std::optional<TT> {
      if (s.empty()) return lin_leaf(e);
      if (s.size() == 1) return TT{lref(e, s[0]), ltype(e, s[0])};
      return tensor_all(e, s);
    };
    if (d <= 0) return fallback();
    const auto& w = cfg.weights;
    std::vector<std::pair<int, int>> o = {
        {s.empty() ? w.unit : 0, 0},
        {s.size() == 1 ? w.var : 0, 1},
        {s.empty() ? 0 : w.let_unit + w.let_pair + w.ladj + w.app, 2},
        {w.tensor, 3},
        {w.lambda, 4},
        {w.ladj, 5},
        {s.empty() ? w.radj : 0, 6},
        {w.redex, 7}};
    for (int tries = 0; tries < 3; ++tries) {
      std::optional<TT> r;
      switch (weighted(o)) {
        case 0: r = lin_leaf(e); break;
        case 1: r = TT{lref(e, s[0]), ltype(e, s[0])}; break;
        case 2: r = lin_elim(e, s, d); break;
        case 3: r = lin_tensor(e, s, d); break;
        case 4: r = lin_lam(e, s, d); break;
        case 5: r = lin_fpair(e, s, d); break;
        case 6: r = lin_ginv(e, d); break;
        case 7: r = lin_redex(e, s, d); break;
        default: return std::nullopt;
      }
      if (r) return r;
    }
    return fallback();
  }

  std::optional<TT> elim_tensor(const Gen& e, const TermPtr& scrut, const TermPtr& ty,
                                const Set& rest, int d) {
    std::string a = fresh("w"), b = fresh("w");
    Gen e2 = push_l(push_l(e, a, ty->kids[0]), b, ty->kids[1]);
    Set r2 = rest;
    r2.push_back(e.l.size());
    r2.push_back(e.l.size() + 1);
    auto k = lin_any(e2, r2, d - 1);
    if (!k) return std::nullopt;
    return TT{mk(Tag::LetTensor, {scrut, k->first}, {}, {}, {}, {a, b}), k->second};
  }

  std::optional<TT> elim_f(const Gen& e, const TermPtr& scrut, const TermPtr& ty, const Set& rest,
                           int d) {
    std::string x = fresh("v"), y = fresh("w");
    Gen e2 = push_l(push_g(e, x, ty->kids[0]), y, ty->kids[1]);
    Set r2 = rest;
    r2.push_back(e.l.size());
    auto k = lin_any(e2, r2, d - 1);
    if (!k || occurs_free(k->second, Zone::Graded, 0)) return std::nullopt;
    return TT{mk(Tag::LetF, {scrut, k->first}, {}, {}, {}, {x, y}), shift(k->second, -1)};
  }

  std::optional<TT> lin_elim(const Gen& e, const Set& s, int d) {
    std::size_t v = pick(s);
    Set rest = without(s, v);
    TermPtr ty = whnf(ltype(e, v));
    switch (ty->tag) {
      case Tag::UnitI: {
        auto b = lin_any(e, rest, d - 1);
        if (!b) return std::nullopt;
        return TT{mk(Tag::LetI, {lref(e, v), b->first}), b->second};
      }
      case Tag::Tensor: return elim_tensor(e, lref(e, v), ty, rest, d);
      case Tag::FType: return elim_f(e, lref(e, v), ty, rest, d);
      case Tag::Lollipop: {
        auto [s2, s3] = split(rest);
        TermPtr arg = lin_at(e, s2, ty->kids[0], d - 1);
        if (!arg) return std::nullopt;
        TermPtr ap = mk(Tag::AppLin, {lref(e, v), arg});
        if (s3.empty()) return TT{ap, ty->kids[1]};
        auto k = lin_any(e, s3, d - 1);
        if (!k) return std::nullopt;
        TermPtr t2 = mk(Tag::Tensor, {ty->kids[1], k->second});
        return TT{ann(mk(Tag::TensorPair, {ap, k->first}), t2), t2};
      }
      default: return std::nullopt;
    }
  }

  std::optional<TT> lin_tensor(const Gen& e, const Set& s, int d) {
    auto [s1, s2] = split(s);
    auto a = lin_any(e, s1, d - 1);
    if (!a) return std::nullopt;
    auto b = lin_any(e, s2, d - 1);
    if (!b) return std::nullopt;
    TermPtr ty = mk(Tag::Tensor, {a->second, b->second});
    return TT{ann(mk(Tag::TensorPair, {a->first, b->first}), ty), ty};
  }

  std::optional<TT> lin_lam(const Gen& e, const Set& s, int d) {
    TermPtr a = linear_type();
    std::string y = fresh("w");
    Gen e2 = push_l(e, y, a);
    Set s2 = s;
    s2.push_back(e.l.size());
    auto b = lin_any(e2, s2, d - 1);
    if (!b) return std::nullopt;
    TermPtr ty = mk(Tag::Lollipop, {a, b->second});
    return TT{ann(lam(Tag::LamLin, b->first, y), ty), ty};
  }

  std::optional<TT> lin_fpair(const Gen& e, const Set& s, int d) {
    auto t = any(graded_only(e), d - 1);
    if (!t) return std::nullopt;
    auto l = lin_any(e, s, d - 1);
    if (!l) return std::nullopt;
    TermPtr ty = binder(Tag::FType, t->second, shift(l->second, 1), rand_grade(*sr), fresh("v"));
    return TT{ann(mk(Tag::FPair, {t->first, l->first}), ty), ty};
  }

  std::optional<TT> lin_ginv(const Gen& e, int d) {
    TermPtr a = linear_type();
    TermPtr l = lin_at(graded_only(e), {}, a, d - 1);
    if (!l) return std::nullopt;
    return TT{mk(Tag::GInv, {ann(mk(Tag::GIntro, {l}), mk(Tag::GAdj, {a}))}), a};
  }

  std::optional<TT> lin_redex(const Gen& e, const Set& s, int d) {
    auto [s1, s2] = split(s);
    switch (below(5)) {
      case 1: {
        auto f = lin_lam(e, s1, d);
        if (!f) return std::nullopt;
        TermPtr lo = whnf(f->second);
        TermPtr arg = lin_at(e, s2, lo->kids[0], d - 1);
        if (!arg) return std::nullopt;
        return TT{mk(Tag::AppLin, {f->first, arg}), lo->kids[1]};
      }
      case 2: {
        auto p = lin_tensor(e, s1, d);
        if (!p) return std::nullopt;
        return elim_tensor(e, p->first, whnf(p->second), s2, d);
      }
      case 3: {
        auto p = lin_fpair(e, s1, d);
        if (!p) return std::nullopt;
        return elim_f(e, p->first, whnf(p->second), s2, d);
      }
      case 4:
        if (s.empty()) return lin_ginv(e, d);
        [[fallthrough]];
      default: {
        auto b = lin_any(e, s, d - 1);
        if (!b) return std::nullopt;
        return TT{mk(Tag::LetI, {mk(Tag::UnitIIntro), b->first}), b->second};
      }
    }
  }

  TermPtr lin_at(const Gen& e, const Set& s, const TermPtr& want, int d) {
    TermPtr h = whnf(want);
    if (s.size() == 1 && same_type(ltype(e, s[0]), want) && (d <= 0 || coin(2, 3)))
      return lref(e, s[0]);
    if (!s.empty() && d > 0 && coin(1, 4))
      if (TermPtr r = lin_at_elim(e, s, want, d)) return r;
    switch (h->tag) {
      case Tag::UnitI:
        if (s.empty())
          return d > 0 && coin(1, 4) ? mk(Tag::LetI, {mk(Tag::UnitIIntro), mk(Tag::UnitIIntro)})
                                     : mk(Tag::UnitIIntro);
        break;
      case Tag::Tensor: {
        auto [a, b] = split(s);
        TermPtr l = lin_at(e, a, h->kids[0], d - 1);
        TermPtr r = l ? lin_at(e, b, h->kids[1], d - 1) : nullptr;
        if (l && r) return mk(Tag::TensorPair, {l, r});
        break;
      }
      case Tag::Lollipop: {
        std::string y = fresh("w");
        Gen e2 = push_l(e, y, h->kids[0]);
        Set s2 = s;
        s2.push_back(e.l.size());
        if (TermPtr b = lin_at(e2, s2, h->kids[1], d - 1)) return lam(Tag::LamLin, b, y);
        break;
      }
      case Tag::FType: {
        TermPtr t = at(graded_only(e), h->kids[0], d - 1);
        if (!t) break;
        if (TermPtr l = lin_at(e, s, subst_top(h->kids[1], Zone::Graded, t), d - 1))
          return mk(Tag::FPair, {t, l});
        break;
      }
      default: break;
    }
    if (s.empty()) {
      auto gs = select(e, [&](std::size_t i) {
        TermPtr p = whnf(gtype(e, i));
        return p->tag == Tag::GAdj && same_type(p->kids[0], want);
      });
      if (!gs.empty()) return mk(Tag::GInv, {gref(e, pick(gs))});
      return nullptr;
    }
    return lin_at_elim(e, s, want, d);
  }

  // Eliminates one variable of s, then continues towards want. Terminates:
  // each step trades a variable for strictly smaller types.
  TermPtr lin_at_elim(const Gen& e, const Set& s, const TermPtr& want, int d) {
    std::size_t v = pick(s);
    Set rest = without(s, v);
    TermPtr ty = whnf(ltype(e, v));
    switch (ty->tag) {
      case Tag::UnitI:
        if (TermPtr b = lin_at(e, rest, want, d - 1)) return mk(Tag::LetI, {lref(e, v), b});
        return nullptr;
      case Tag::Tensor: {
        std::string a = fresh("w"), b = fresh("w");
        Gen e2 = push_l(push_l(e, a, ty->kids[0]), b, ty->kids[1]);
        Set r2 = rest;
        r2.push_back(e.l.size());
        r2.push_back(e.l.size() + 1);
        if (TermPtr k = lin_at(e2, r2, want, d - 1))
          return mk(Tag::LetTensor, {lref(e, v), k}, {}, {}, {}, {a, b});
        return nullptr;
      }
      case Tag::FType: {
        std::string x = fresh("v"), y = fresh("w");
        Gen e2 = push_l(push_g(e, x, ty->kids[0]), y, ty->kids[1]);
        Set r2 = rest;
        r2.push_back(e.l.size());
        if (TermPtr k = lin_at(e2, r2, shift(want, 1), d - 1))
          return mk(Tag::LetF, {lref(e, v), k}, {}, {}, {}, {x, y});
        return nullptr;
      }
      case Tag::Lollipop: {
        auto [s2, s3] = split(rest);
        TermPtr arg = lin_at(e, s2, ty->kids[0], d - 1);
        if (!arg) return nullptr;
        TermPtr ap = mk(Tag::AppLin, {lref(e, v), arg});
        if (s3.empty() && same_type(ty->kids[1], want)) return ap;
        if (whnf(ty->kids[1])->tag == Tag::UnitI)
          if (TermPtr k = lin_at(e, s3, want, d - 1)) return mk(Tag::LetI, {ap, k});
        return nullptr;
      }
      default: return nullptr;
    }
  }

  // ------------------------------------------------------------ GlaD terms

  ModeId mid(const std::string& m) const { return mt->index_of(m); }
  const std::string& mname(ModeId m) const { return mt->mode(m).id; }
  const Semiring& msr(ModeId m) const { return *mt->mode(m).semiring; }
  bool weak(ModeId m) const { return mt->mode(m).weak; }

  bool in_floor(const Gen& e, ModeId m) const {
    for (const auto& h : e.g)
      if (!mt->leq(m, mid(h.mode))) return false;
    return true;
  }
  std::vector<ModeId> floor(const Gen& e) const {
    std::vector<ModeId> r;
    for (ModeId m = 0; m < mt->size(); ++m)
      if (in_floor(e, m)) r.push_back(m);
    return r;
  }
  // Floor modes at or above n (binder modes for a judgment at n).
  std::vector<ModeId> above(const Gen& e, ModeId n) const {
    std::vector<ModeId> r;
    for (ModeId m : floor(e))
      if (mt->leq(n, m)) r.push_back(m);
    return r;
  }
  std::vector<ModeId> below_mode(ModeId n) const {
    std::vector<ModeId> r;
    for (ModeId m = 0; m < mt->size(); ++m)
      if (mt->leq(m, n)) r.push_back(m);
    return r;
  }

  // A type at mode m; m must be in the floor of e.
  TermPtr glad_type(const Gen& e, ModeId m) {
    const std::string& ms = mname(m);
    switch (below(6)) {
      case 1:
      case 2: {
        ModeId b = pick(above(e, m));
        return binder(below(2) ? Tag::PiG : Tag::TensorG, unitm(mname(b)), unitm(ms),
                      rand_grade(msr(b)), fresh("v"), mname(b));
      }
      case 3: return mk(Tag::Sum, {unitm(ms), unitm(ms)});
      case 4: {
        ModeId b = pick(below_mode(m));
        return mk(Tag::Up, {unitm(mname(b))}, {}, mname(b), ms);
      }
      default: return unitm(ms);
    }
  }

  std::optional<GradeVector> glad_use(const Gen& e, ModeId n, const TermPtr& t,
                                      const TermPtr& ty) {
    try {
      return gc->infer_glad(e.g, mname(n), ann(t, ty), false).usage;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Entries of a non-weak mode must be used. An unused one of type I@m is
  // consumed with let *@m = x in t; anything else fails.
  std::optional<std::pair<TermPtr, GradeVector>> use_all(const Gen& e, ModeId n, TermPtr t,
                                                         const TermPtr& ty,
                                                         const std::vector<std::size_t>& lvls) {
    auto u = glad_use(e, n, t, ty);
    if (!u) return std::nullopt;
    bool changed = false;
    for (std::size_t i : lvls) {
      ModeId m = mid(e.g[i].mode);
      if (!is_zero((*u)[i]) || weak(m)) continue;
      if (peel_ann(e.g[i].type)->tag != Tag::UnitM || !in_floor(e, m)) return std::nullopt;
      t = mk(Tag::LetStarM, {gref(e, i), t}, {}, mname(m));
      changed = true;
    }
    if (changed && !(u = glad_use(e, n, t, ty))) return std::nullopt;
    return std::make_pair(t, *u);
  }

  std::optional<TT> g_leaf(const Gen& e, ModeId n) {
    auto vs = select(e, [&](std::size_t i) { return e.g[i].mode == mname(n); });
    const auto& w = cfg.weights;
    switch (weighted({{w.unit, 0}, {vs.empty() ? 0 : w.var, 1}})) {
      case 0: return TT{star(mname(n)), unitm(mname(n))};
      case 1: {
        std::size_t i = pick(vs);
        return TT{gref(e, i), gtype(e, i)};
      }
      default: return std::nullopt;
    }
  }

  std::optional<TT> g_any(const Gen& e, ModeId n, int d) {
    if (d <= 0) return g_leaf(e, n);
    const auto& w = cfg.weights;
    std::vector<std::pair<int, int>> o = {
        {w.var + w.unit, kLeaf}, {w.let_unit, kLetJ}, {w.lambda, kLam}, {w.app, kApp},
        {w.pair, kPair},         {w.let_pair, kLetPair}, {w.inj, kInj}, {w.case_, kCase},
        {w.shift, kShift},       {w.redex, kRedex}};
    for (int tries = 0; tries < 3; ++tries) {
      std::optional<TT> r;
      switch (weighted(o)) {
        case kLeaf: r = g_leaf(e, n); break;
        case kLetJ: r = g_letstar(e, n, d, false); break;
        case kLam: r = g_lam(e, n, d); break;
        case kApp: r = g_app(e, n, d, false); break;
        case kPair: r = g_pair(e, n, d); break;
        case kLetPair: r = g_letpair(e, n, d, false); break;
        case kInj: r = g_inj(e, n, d); break;
        case kCase: r = g_case(e, n, d, false); break;
        case kShift: r = coin() ? g_up(e, n, d) : g_down(e, n, d); break;
        case kRedex: r = g_redex(e, n, d); break;
        default: return std::nullopt;
      }
      if (r) return r;
    }
    return g_leaf(e, n);
  }

  std::optional<TT> g_letstar(const Gen& e, ModeId n, int d, bool redex) {
    ModeId m = pick(floor(e));
    TermPtr s = redex ? star(mname(m)) : g_at(e, m, unitm(mname(m)), d - 1);
    if (!s) return std::nullopt;
    auto b = g_any(e, n, d - 1);
    if (!b) return std::nullopt;
    return TT{mk(Tag::LetStarM, {s, b->first}, {}, mname(m)), b->second};
  }

  std::optional<TT> g_lam(const Gen& e, ModeId n, int d) {
    ModeId m = pick(above(e, n));
    TermPtr a = weak(m) ? glad_type(e, m) : unitm(mname(m));
    std::string x = fresh("v");
    Gen e2 = push_g(e, x, a, mname(m));
    auto b = g_any(e2, n, d - 1);
    if (!b) return std::nullopt;
    auto f = use_all(e2, n, b->first, b->second, {e.g.size()});
    if (!f) return std::nullopt;
    Grade u = f->second.back();
    uint64_t q = cfg.slack && coin(1, 4) ? loosen(msr(m), u.v) : u.v;
    TermPtr ty = binder(Tag::PiG, a, b->second, msr(m).show(q), x, mname(m));
    return TT{ann(lam(Tag::Lam, f->first, x), ty), ty};
  }

  std::optional<TT> g_app(const Gen& e, ModeId n, int d, bool redex) {
    TermPtr f, fty;
    auto fns = of_tag(e, Tag::PiG, mname(n));
    if (redex || fns.empty() || coin()) {
      auto l = g_lam(e, n, d);
      if (!l) return std::nullopt;
      std::tie(f, fty) = *l;
    } else {
      std::size_t i = pick(fns);
      f = gref(e, i);
      fty = gtype(e, i);
    }
    TermPtr pi = whnf(fty);
    if (pi->tag != Tag::PiG) return std::nullopt;
    ModeId m = mid(pi->mode);
    if (!in_floor(e, m)) return std::nullopt;
    TermPtr arg = g_at(e, m, pi->kids[0], d - 1);
    if (!arg) return std::nullopt;
    return TT{mk(Tag::App, {f, arg}), subst_top(pi->kids[1], Zone::Graded, arg)};
  }

  std::optional<TT> g_pair(const Gen& e, ModeId n, int d) {
    ModeId m = pick(above(e, n));
    auto a = g_any(e, m, d - 1);
    if (!a) return std::nullopt;
    auto c = g_any(e, n, d - 1);
    if (!c) return std::nullopt;
    TermPtr ty = binder(Tag::TensorG, a->second, shift(c->second, 1), rand_grade(msr(m)),
                        fresh("v"), mname(m));
    return TT{ann(mk(Tag::Pair, {a->first, c->first}), ty), ty};
  }

  std::optional<TT> g_letpair(const Gen& e, ModeId n, int d, bool redex) {
    TermPtr s, sty;
    auto ps = of_tag(e, Tag::TensorG, mname(n));
    if (redex || ps.empty() || coin(1, 3)) {
      auto p = g_pair(e, n, d);
      if (!p) return std::nullopt;
      std::tie(s, sty) = *p;
    } else {
      std::size_t i = pick(ps);
      s = gref(e, i);
      sty = gtype(e, i);
    }
    TermPtr ten = whnf(sty);
    if (ten->tag != Tag::TensorG) return std::nullopt;
    std::string x = fresh("v"), y = fresh("v");
    Gen e2 = push_g(push_g(e, x, ten->kids[0], ten->mode), y, ten->kids[1], mname(n));
    auto b = g_any(e2, n, d - 1);
    if (!b || occurs_free(b->second, Zone::Graded, 0) || occurs_free(b->second, Zone::Graded, 1))
      return std::nullopt;
    auto f = use_all(e2, n, b->first, b->second, {e.g.size(), e.g.size() + 1});
    if (!f) return std::nullopt;
    return TT{mk(Tag::LetPair, {s, f->first}, {}, {}, {}, {x, y}), shift(b->second, -2)};
  }

  std::optional<TT> g_inj(const Gen& e, ModeId n, int d) {
    auto a = g_any(e, n, d - 1);
    if (!a) return std::nullopt;
    TermPtr other = glad_type(e, n);
    bool left = coin();
    TermPtr ty = left ? mk(Tag::Sum, {a->second, other}) : mk(Tag::Sum, {other, a->second});
    return TT{ann(mk(left ? Tag::Inl : Tag::Inr, {a->first}), ty), ty};
  }

  std::optional<TT> g_case(const Gen& e, ModeId n, int d, bool redex) {
    ModeId m = pick(above(e, n));
    TermPtr s, sty;
    auto ss = of_tag(e, Tag::Sum, mname(m));
    if (redex || ss.empty() || coin(1, 3)) {
      auto p = g_inj(e, m, d);
      if (!p) return std::nullopt;
      std::tie(s, sty) = *p;
    } else {
      std::size_t i = pick(ss);
      s = gref(e, i);
      sty = gtype(e, i);
    }
    TermPtr sum = whnf(sty);
    if (sum->tag != Tag::Sum) return std::nullopt;
    std::string x = fresh("v"), y = fresh("v");
    Gen e1 = push_g(e, x, sum->kids[0], mname(m));
    auto b1 = g_any(e1, n, d - 1);
    if (!b1 || occurs_free(b1->second, Zone::Graded, 0)) return std::nullopt;
    TermPtr c1 = b1->second;
    Gen e2 = push_g(e, y, sum->kids[1], mname(m));
    TermPtr b2 = g_at(e2, n, c1, d - 1);
    if (!b2) return std::nullopt;
    auto f1 = use_all(e1, n, b1->first, c1, {e.g.size()});
    auto f2 = f1 ? use_all(e2, n, b2, c1, {e.g.size()}) : std::nullopt;
    if (!f2) return std::nullopt;
    const Semiring& rs = msr(m);
    auto q = least_above(rs, {rs.one(), f1->second.back().v, f2->second.back().v});
    if (!q) return std::nullopt;
    std::string qs = rs.show(*q);
    TermPtr br1 = ann(lam(Tag::Lam, f1->first, x),
                      binder(Tag::PiG, sum->kids[0], c1, qs, x, mname(m)));
    TermPtr br2 = ann(lam(Tag::Lam, f2->first, y),
                      binder(Tag::PiG, sum->kids[1], c1, qs, y, mname(m)));
    return TT{mk(Tag::Case, {s, br1, br2}, qs), shift(c1, -1)};
  }

  std::optional<TT> g_up(const Gen& e, ModeId n, int d) {
    ModeId m1 = pick(below_mode(n));
    auto a = g_any(e, m1, d - 1);
    if (!a) return std::nullopt;
    return TT{mk(Tag::Up, {a->first}, {}, mname(m1), mname(n)),
              mk(Tag::Up, {a->second}, {}, mname(m1), mname(n))};
  }

  std::optional<TT> g_down(const Gen& e, ModeId n, int d) {
    ModeId m2 = pick(above(e, n));
    auto vs = select(e, [&](std::size_t i) {
      TermPtr p = whnf(gtype(e, i));
      return e.g[i].mode == mname(m2) && p->tag == Tag::Up && p->mode == mname(n) &&
             p->mode2 == mname(m2);
    });
    TermPtr b, bty;
    if (!vs.empty() && coin()) {
      std::size_t i = pick(vs);
      b = gref(e, i);
      bty = whnf(gtype(e, i))->kids[0];
    } else {
      auto a = g_any(e, n, d - 1);
      if (!a) return std::nullopt;
      b = mk(Tag::Up, {a->first}, {}, mname(n), mname(m2));
      bty = a->second;
    }
    return TT{mk(Tag::Down, {b}, {}, mname(n), mname(m2)), bty};
  }

  std::optional<TT> g_redex(const Gen& e, ModeId n, int d) {
    switch (below(4)) {
      case 0: return g_letstar(e, n, d, true);
      case 1: return g_app(e, n, d, true);
      case 2: return g_letpair(e, n, d, true);
      default: return g_case(e, n, d, true);
    }
  }

  // x (index 0, type I@m) used exactly k times at mode n.
  TermPtr g_uses(int k, ModeId m, ModeId n) const {
    TermPtr t = star(mname(n));
    for (int i = 0; i < k; ++i) t = mk(Tag::LetStarM, {gvar(0), t}, {}, mname(m));
    return t;
  }

  TermPtr g_at(const Gen& e, ModeId n, const TermPtr& ty, int d) {
    TermPtr h = whnf(ty);
    auto vs = of_type(e, ty, mname(n));
    if (!vs.empty() && (d <= 0 || coin(1, 3))) return gref(e, pick(vs));
    if (d > 0 && coin(1, 4))
      for (int t = 0; t < 2; ++t)
        if (auto r = g_any(e, n, d); r && same_type(r->second, ty)) return r->first;
    switch (h->tag) {
      case Tag::UnitM:
        if (h->mode != mname(n)) break;
        if (d > 0 && coin(1, 3)) {
          ModeId m = pick(floor(e));
          TermPtr s = g_at(e, m, unitm(mname(m)), d - 1);
          TermPtr b = s ? g_at(e, n, ty, d - 1) : nullptr;
          if (b) return mk(Tag::LetStarM, {s, b}, {}, mname(m));
        }
        return star(mname(n));
      case Tag::PiG: {
        ModeId m = mid(h->mode);
        std::string x = fresh("v");
        Gen e2 = push_g(e, x, h->kids[0], h->mode);
        Grade q = grade_of(msr(m), h->grade);
        for (int t = 0; t < 2; ++t) {
          TermPtr b = g_at(e2, n, h->kids[1], d - 1);
          if (!b) continue;
          auto f = use_all(e2, n, b, h->kids[1], {e.g.size()});
          if (f && leq(f->second.back(), q)) return lam(Tag::Lam, f->first, x);
        }
        TermPtr dom = whnf(h->kids[0]), cod = whnf(h->kids[1]);
        if (dom->tag == Tag::UnitM && dom->mode == h->mode && cod->tag == Tag::UnitM &&
            cod->mode == mname(n) && in_floor(e2, m))
          for (int k = weak(m) ? 0 : 1; k < 4; ++k)
            if (msr(m).leq(ones(msr(m), k), q.v)) return lam(Tag::Lam, g_uses(k, m, n), x);
        break;
      }
      case Tag::TensorG: {
        ModeId m = mid(h->mode);
        if (!in_floor(e, m)) break;
        TermPtr a = g_at(e, m, h->kids[0], d - 1);
        if (!a) break;
        TermPtr c = g_at(e, n, subst_top(h->kids[1], Zone::Graded, a), d - 1);
        if (!c) break;
        return mk(Tag::Pair, {a, c});
      }
      case Tag::Sum: {
        bool left = coin();
        TermPtr a = g_at(e, n, h->kids[left ? 0 : 1], d - 1);
        if (!a) {
          left = !left;
          a = g_at(e, n, h->kids[left ? 0 : 1], d - 1);
        }
        if (!a) break;
        return mk(left ? Tag::Inl : Tag::Inr, {a});
      }
      case Tag::Up: {
        if (h->mode2 != mname(n)) break;
        TermPtr a = g_at(e, mid(h->mode), h->kids[0], d - 1);
        if (!a) break;
        return mk(Tag::Up, {a}, {}, h->mode, h->mode2);
      }
      default: break;
    }
    if (!vs.empty()) return gref(e, pick(vs));
    return nullptr;
  }

  // ------------------------------------------------------------- drawing

  Derivation check(const Judgment& j) const {
    if (is_glad(j.fragment)) return gc->check(j);
    return dc->check(j);
  }

  // Declares the synthesized vector (sometimes one step looser), maybe
  // strips the outer ascription, and runs the checker.
  std::optional<Generated> finish(Judgment j) {
    try {
      TermPtr a = ann(j.subject, j.type);
      GradeVector u;
      switch (j.fragment) {
        case Fragment::Graded: u = dc->infer_graded(j.gctx, a).usage; break;
        case Fragment::Mixed: u = dc->infer_mixed(j.gctx, j.lctx, a).usage; break;
        case Fragment::Glad: u = gc->infer_glad(j.gctx, j.mode, a).usage; break;
        default: return std::nullopt;
      }
      bool slack = false;
      if (cfg.slack && !u.empty() && coin(1, 4)) {
        std::size_t i = below(u.size());
        uint64_t v = loosen(*u[i].sr, u[i].v);
        slack = v != u[i].v;
        u[i].v = v;
      }
      j.delta = u;
      if (j.subject->tag == Tag::Ann && same_type(j.subject->kids[1], j.type) && coin())
        j.subject = j.subject->kids[0];
      Derivation d = check(j);
      return Generated{std::move(j), std::move(d), slack, std::nullopt};
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Context entries; with cfg.duplicate one entry is followed by a copy.
  Gen graded_ctx(std::optional<std::size_t>& dup) {
    std::size_t n = below(uint64_t(cfg.max_ctx) + 1);
    if (cfg.duplicate) {
      n = std::max<std::size_t>(n, 1);
      dup = below(n);
    }
    Gen e;
    for (std::size_t i = 0; i < n; ++i) {
      TermPtr t = graded_type(e, true);
      e = push_g(e, "x" + std::to_string(e.g.size()), t);
      if (dup && *dup == i) {
        dup = e.g.size() - 1;
        e = push_g(e, "x" + std::to_string(e.g.size()), shift(t, 1));
      }
    }
    return e;
  }

  std::optional<Generated> draw_graded() {
    std::optional<std::size_t> dup;
    Gen e = graded_ctx(dup);
    auto t = any(e, cfg.max_depth);
    if (!t) return std::nullopt;
    auto g = finish(Judgment{Fragment::Graded, {}, e.g, {}, {}, t->first, t->second});
    if (g) g->duplicate_at = dup;
    return g;
  }

  std::optional<Generated> draw_mixed() {
    std::optional<std::size_t> dup;
    Gen e = graded_ctx(dup);
    std::size_t nl = cfg.trailing_linear ? 1 + below(uint64_t(std::max(cfg.max_linear, 1)))
                                         : below(uint64_t(std::max(cfg.max_linear, 0)) + 1);
    Set s;
    for (std::size_t i = 0; i < nl; ++i) {
      s.push_back(e.l.size());
      e = push_l(e, "y" + std::to_string(i), linear_type());
    }
    auto t = lin_any(e, s, cfg.max_depth);
    if (!t) return std::nullopt;
    Ctx lctx;
    for (const auto& l : e.l) lctx.push_back({l.name, l.type, {}});
    auto g = finish(Judgment{Fragment::Mixed, {}, e.g, lctx, {}, t->first, t->second});
    if (g) g->duplicate_at = dup;
    return g;
  }

  std::optional<Generated> draw_glad() {
    std::size_t n = below(uint64_t(cfg.max_ctx) + 1);
    std::optional<std::size_t> dup;
    if (cfg.duplicate) {
      n = std::max<std::size_t>(n, 1);
      dup = below(n);
    }
    // Higher modes first, so each entry's type is formed at or below its
    // prefix.
    std::vector<ModeId> ms;
    for (std::size_t i = 0; i < n; ++i) ms.push_back(ModeId(below(mt->size())));
    auto rank = [&](ModeId m) { return below_mode(m).size(); };
    std::stable_sort(ms.begin(), ms.end(), [&](ModeId a, ModeId b) { return rank(a) > rank(b); });
    Gen e;
    for (std::size_t i = 0; i < n; ++i) {
      ModeId m = ms[i];
      if (!in_floor(e, m)) return std::nullopt;
      TermPtr t = weak(m) ? glad_type(e, m) : unitm(mname(m));
      e = push_g(e, "x" + std::to_string(e.g.size()), t, mname(m));
      if (dup && *dup == i) {
        dup = e.g.size() - 1;
        e = push_g(e, "x" + std::to_string(e.g.size()), shift(t, 1), mname(m));
      }
    }
    auto fl = floor(e);
    if (fl.empty()) return std::nullopt;
    ModeId mode = pick(fl);
    auto t = g_any(e, mode, cfg.max_depth);
    if (!t) return std::nullopt;
    std::vector<std::size_t> all(e.g.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto f = use_all(e, mode, t->first, t->second, all);
    if (!f) return std::nullopt;
    auto g = finish(Judgment{Fragment::Glad, {}, e.g, {}, mname(mode), f->first, t->second});
    if (g) g->duplicate_at = dup;
    return g;
  }

  Generated next() {
    if ((cfg.fragment == GenFragment::Glad && !mt) || (cfg.fragment != GenFragment::Glad && !sr))
      fail(ErrorCode::ConfigError, std::string("no ") +
                                       (cfg.fragment == GenFragment::Glad ? "mode theory"
                                                                          : "semiring") +
                                       " for " + gen_fragment_name(cfg.fragment) + " generation");
    for (int a = 0; a < kAttempts; ++a) {
      std::optional<Generated> g;
      switch (cfg.fragment) {
        case GenFragment::Graded: g = draw_graded(); break;
        case GenFragment::Mixed: g = draw_mixed(); break;
        case GenFragment::Glad: g = draw_glad(); break;
      }
      if (g) return std::move(*g);
      ++rejected;
    }
    fail(ErrorCode::GenerationExhausted,
         std::to_string(kAttempts) + " consecutive " + gen_fragment_name(cfg.fragment) +
             " candidates were rejected at depth " + std::to_string(cfg.max_depth));
  }

  std::optional<Generated> term_of_type(const Ctx& ctx, const TermPtr& ty,
                                        const std::string& mode) {
    Gen e{ctx, {}};
    for (int a = 0; a < 20; ++a) {
      std::optional<Generated> g;
      if (mode.empty()) {
        if (!sr) return std::nullopt;
        TermPtr t = at(e, ty, cfg.max_depth);
        if (t) g = finish(Judgment{Fragment::Graded, {}, ctx, {}, {}, t, ty});
      } else {
        if (!mt) return std::nullopt;
        ModeId n = mid(mode);
        if (!in_floor(e, n)) return std::nullopt;
        TermPtr t = g_at(e, n, ty, cfg.max_depth);
        std::vector<std::size_t> all(ctx.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        auto f = t ? use_all(e, n, t, ty, all) : std::nullopt;
        if (f) g = finish(Judgment{Fragment::Glad, {}, ctx, {}, mode, f->first, ty});
      }
      if (g) return g;
      ++rejected;
    }
    return std::nullopt;
  }

  std::optional<Generated> linear_of_type(const Ctx& gctx, const TermPtr& a) {
    if (!sr) return std::nullopt;
    for (int att = 0; att < 20; ++att) {
      Gen e{gctx, {}};
      std::size_t nl = below(3);
      Set s;
      for (std::size_t i = 0; i < nl; ++i) {
        s.push_back(i);
        e = push_l(e, "z" + std::to_string(i), linear_type());
      }
      TermPtr l = lin_at(e, s, a, cfg.max_depth);
      if (!l) continue;
      Ctx lctx;
      for (const auto& h : e.l) lctx.push_back({h.name, h.type, {}});
      if (auto g = finish(Judgment{Fragment::Mixed, {}, gctx, lctx, {}, l, a})) return g;
      ++rejected;
    }
    return std::nullopt;
  }

  GradeVector random_vector(const Ctx& ctx) {
    GradeVector v;
    for (const auto& h : ctx) {
      const Semiring& s = (!h.mode.empty() && mt) ? msr(mid(h.mode)) : *sr;
      v.push_back(Grade{&s, pick(s.enumerate(3))});
    }
    return v;
  }
};

Generator::Generator(const Semiring* sr, const ModeTheory* mt, GeneratorConfig cfg)
    : p_(std::make_unique<Impl>(sr, mt, cfg)) {}
Generator::~Generator() = default;
Generator::Generator(Generator&&) noexcept = default;
Generated Generator::next() { return p_->next(); }
std::optional<Generated> Generator::term_of_type(const Ctx& ctx, const TermPtr& type,
                                                 const std::string& mode) {
  return p_->term_of_type(ctx, type, mode);
}
std::optional<Generated> Generator::linear_of_type(const Ctx& gctx, const TermPtr& A) {
  return p_->linear_of_type(gctx, A);
}
GradeVector Generator::random_vector(const Ctx& ctx) { return p_->random_vector(ctx); }
std::mt19937_64& Generator::rng() { return p_->rng; }
uint64_t Generator::rejected() const { return p_->rejected; }

// =============================================================== transforms

namespace {

[[noreturn]] void shape_error(const std::string& msg) { fail(ErrorCode::ShapeMismatch, msg); }

bool same_prefix(const Ctx& a, const Ctx& b, std::size_t n) {
  if (a.size() < n || b.size() < n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (a[i].name != b[i].name || a[i].mode != b[i].mode || !same_type(a[i].type, b[i].type))
      return false;
  return true;
}

}  // namespace

Judgment substitution_transform(const Judgment& d0, const Judgment& d, std::size_t cut,
                                const ModeTheory* mt) {
  bool glad = is_glad(d.fragment);
  if (cut >= d.gctx.size() || d.delta.size() != d.gctx.size())
    shape_error("cut position " + std::to_string(cut) + " outside a context of length " +
                std::to_string(d.gctx.size()));
  if (!d0.subject || is_ctx(d0.fragment) ||
      d0.fragment != (glad ? Fragment::Glad : Fragment::Graded))
    shape_error("the cut partner must be a " + std::string(glad ? "GlaD" : "graded") +
                " term judgment");
  if (d0.gctx.size() != cut || d0.delta.size() != cut || !same_prefix(d0.gctx, d.gctx, cut))
    shape_error("the cut partner's context is not the prefix before the cut");
  if (!same_type(d0.type, d.gctx[cut].type))
    shape_error("the cut partner's type differs from the cut entry's");
  if (glad && (!mt || d0.mode != d.gctx[cut].mode))
    shape_error("the cut partner must sit at the cut entry's mode");

  std::size_t after = d.gctx.size() - cut - 1;
  Judgment out = d;
  Ctx suffix(d.gctx.begin() + long(cut) + 1, d.gctx.end());
  out.gctx.assign(d.gctx.begin(), d.gctx.begin() + long(cut));
  for (auto& h : subst_context(suffix, ascribed(d0.subject, d0.type))) out.gctx.push_back(h);

  const Grade& r = d.delta[cut];
  GradeVector scaled;
  if (glad) {
    std::vector<ModeId> ms;
    for (std::size_t i = 0; i < cut; ++i) ms.push_back(mt->index_of(d.gctx[i].mode));
    scaled = cross_scale(*mt, r, mt->index_of(d.gctx[cut].mode), d0.delta, ms);
  } else {
    scaled = vec_scale(r, d0.delta);
  }
  GradeVector pre(d.delta.begin(), d.delta.begin() + long(cut));
  out.delta = vec_add(pre, scaled);
  out.delta.insert(out.delta.end(), d.delta.begin() + long(cut) + 1, d.delta.end());

  TermPtr s = shift(ascribed(d0.subject, d0.type), int64_t(after));
  auto sub = [&](const TermPtr& t) {
    return t ? subst(t, Zone::Graded, uint32_t(after), s) : t;
  };
  out.subject = sub(d.subject);
  out.type = sub(d.type);
  for (auto& h : out.lctx) h.type = sub(h.type);
  return out;
}

Judgment linear_substitution_transform(const Judgment& d0, const Judgment& d,
                                       std::size_t linear_cut) {
  if (d.fragment != Fragment::Mixed || d0.fragment != Fragment::Mixed || !d.subject ||
      !d0.subject)
    shape_error("linear substitution needs two mixed term judgments");
  if (linear_cut >= d.lctx.size())
    shape_error("linear cut position " + std::to_string(linear_cut) +
                " outside a linear context of length " + std::to_string(d.lctx.size()));
  if (d0.gctx.size() != d.gctx.size() || !same_prefix(d0.gctx, d.gctx, d.gctx.size()) ||
      d0.delta.size() != d.delta.size())
    shape_error("the two judgments do not share the graded context");
  if (!same_type(d0.type, d.lctx[linear_cut].type))
    shape_error("the cut partner's type differs from the linear entry's");

  std::size_t after = d.lctx.size() - linear_cut - 1, n0 = d0.lctx.size();
  Judgment out = d;
  out.delta = vec_add(d.delta, d0.delta);
  out.lctx.assign(d.lctx.begin(), d.lctx.begin() + long(linear_cut));
  out.lctx.insert(out.lctx.end(), d0.lctx.begin(), d0.lctx.end());
  out.lctx.insert(out.lctx.end(), d.lctx.begin() + long(linear_cut) + 1, d.lctx.end());
  TermPtr l0 = shift(ascribed(d0.subject, d0.type), 0, int64_t(after));
  out.subject = map_free(d.subject, [&](Zone z, uint32_t j) -> TermPtr {
    if (z == Zone::Graded) return gvar(j);
    if (j < after) return lvar(j);
    if (j == after) return l0;
    return lvar(uint32_t(j + n0 - 1));
  });
  return out;
}

Judgment contraction_transform(const Judgment& d, std::size_t k) {
  if (k + 1 >= d.gctx.size() || d.delta.size() != d.gctx.size())
    shape_error("no adjacent pair at position " + std::to_string(k));
  if (d.gctx[k].mode != d.gctx[k + 1].mode ||
      !same_type(shift(d.gctx[k].type, 1), d.gctx[k + 1].type))
    shape_error("entries " + std::to_string(k) + " and " + std::to_string(k + 1) +
                " differ in type or mode");
  std::size_t after = d.gctx.size() - k - 2;
  Judgment out = d;
  Ctx suffix(d.gctx.begin() + long(k) + 2, d.gctx.end());
  out.gctx.assign(d.gctx.begin(), d.gctx.begin() + long(k) + 1);
  for (auto& h : subst_context(suffix, gvar(0))) out.gctx.push_back(h);
  out.delta.assign(d.delta.begin(), d.delta.begin() + long(k));
  out.delta.push_back(add(d.delta[k], d.delta[k + 1]));
  out.delta.insert(out.delta.end(), d.delta.begin() + long(k) + 2, d.delta.end());
  auto sub = [&](const TermPtr& t) {
    return t ? subst(t, Zone::Graded, uint32_t(after), gvar(uint32_t(after))) : t;
  };
  out.subject = sub(d.subject);
  out.type = sub(d.type);
  for (auto& h : out.lctx) h.type = sub(h.type);
  return out;
}

Judgment radj_left_transform(const Judgment& d, const Semiring* sr) {
  if (d.fragment != Fragment::Mixed || !d.subject || d.lctx.empty())
    shape_error("radj-left needs a mixed term judgment with a non-empty linear context");
  if (!sr && d.delta.empty())
    shape_error("radj-left on an empty graded context needs the semiring");
  const Semiring& s = sr ? *sr : *d.delta.front().sr;
  std::string name = "g";
  for (int i = 0;; ++i) {
    name = "g" + std::to_string(i);
    bool clash = false;
    for (const auto& h : d.gctx) clash = clash || h.name == name;
    for (const auto& h : d.lctx) clash = clash || h.name == name;
    if (!clash) break;
  }
  Judgment out = d;
  out.gctx.push_back({name, mk(Tag::GAdj, {d.lctx.back().type}), {}});
  out.delta.push_back(one_of(s));
  out.lctx.pop_back();
  for (auto& h : out.lctx) h.type = shift(h.type, 1);
  out.subject = map_free(d.subject, [](Zone z, uint32_t j) -> TermPtr {
    if (z == Zone::Graded) return gvar(j + 1);
    if (j == 0) return mk(Tag::GInv, {gvar(0)});
    return lvar(j - 1);
  });
  out.type = shift(d.type, 1);
  return out;
}

// =================================================================== probes

Derivation Checkers::check(const Judgment& j) const {
  if (is_glad(j.fragment)) {
    if (!mt) fail(ErrorCode::ConfigError, "no mode theory for a GlaD judgment");
    return GladChecker(*mt, opts).check(j);
  }
  if (!sr) fail(ErrorCode::ConfigError, "no semiring for a dmGL judgment");
  return DmglChecker(*sr, opts).check(j);
}

bool has_slack(const Derivation& d) {
  bool s = false;
  for_each_node(d, [&](const Derivation& n) {
    s = s || ends_with(n.rule, "subusage");
    for (const auto& [k, v] : n.side) s = s || k == "join";
  });
  return s;
}

std::string judgment_source(const Judgment& j, const std::string& config) {
  bool glad = is_glad(j.fragment);
  bool mixed = j.fragment == Fragment::Mixed || j.fragment == Fragment::MixedCtx;
  std::string s = "config " + config + ";\njudge ";
  if (is_ctx(j.fragment)) s += "ctx ";
  s += glad ? "glad" : mixed ? "mixed" : "graded";
  Ctx prefix;
  for (std::size_t i = 0; i < j.gctx.size(); ++i) {
    const Hyp& h = j.gctx[i];
    s += (i ? ", " : " ") + h.name + " :^" + (i < j.delta.size() ? j.delta[i].show() : "?");
    if (glad) s += "@" + h.mode;
    s += " " + print_term(h.type, names_of(prefix));
    prefix.push_back(h);
  }
  if (mixed) {
    s += " ;";
    for (std::size_t i = 0; i < j.lctx.size(); ++i)
      s += (i ? ", " : " ") + j.lctx[i].name + " : " + print_term(j.lctx[i].type, names_of(j.gctx));
  }
  if (!is_ctx(j.fragment)) {
    s += glad ? " |-@" + j.mode : std::string(" |-");
    s += " " + print_term(j.subject, names_of(j.gctx, j.lctx)) + " : " +
         print_term(j.type, names_of(j.gctx));
  }
  return s + ";\n";
}

namespace {

void add_failure(ProbeResult& r, const Checkers& c, const std::string& probe,
                 const std::string& msg, const Judgment& j) {
  r.failures.push_back({probe, msg, judgment_source(j, c.config)});
}

std::string err_text(const Error& e) {
  return std::string(code_name(e.code())) + ": " + e.message();
}

std::string fresh_name(const Ctx& ctx, const std::string& base) {
  for (int i = 0;; ++i) {
    std::string n = base + std::to_string(i);
    bool clash = false;
    for (const auto& h : ctx) clash = clash || h.name == n;
    if (!clash) return n;
  }
}

}  // namespace

ProbeResult recheck(const Checkers& c, const std::string& probe, const Judgment& j, bool exact) {
  ProbeResult r;
  r.checks = 1;
  try {
    Derivation d = c.check(j);
    if (exact && j.subject) {
      GradeVector syn = synthesized(d);
      if (!(syn == j.delta))
        add_failure(r, c, probe,
                    "synthesized usage " + show_vector(syn) + " differs from the expected " +
                        show_vector(j.delta),
                    j);
    }
  } catch (const Error& e) {
    add_failure(r, c, probe, err_text(e), j);
  }
  return r;
}

ProbeResult subject_reduction_probe(const Checkers& c, const Judgment& j) {
  ProbeResult r;
  if (!j.subject) return r;
  for (const Redex& rx : redexes(j.subject)) {
    auto st = step_at(j.subject, rx.path);
    if (!st) continue;
    Judgment j2 = j;
    j2.subject = st->after;
    ++r.checks;
    try {
      c.check(j2);
    } catch (const Error& e) {
      add_failure(r, c, "subject-reduction",
                  st->rule + " at " + path_str(rx.path) + ": " + err_text(e), j2);
    }
  }
  return r;
}

ProbeResult inversion_probe(const Checkers& c, const Judgment& j) {
  ProbeResult r;
  if (j.fragment != Fragment::Graded || !j.subject || !c.sr) return r;
  TermPtr v = j.subject, ty = j.type;
  if (v->tag == Tag::Ann) {
    ty = v->kids[1];
    v = v->kids[0];
  }
  DmglChecker dc(*c.sr, c.opts);
  auto shape = [&](Tag want) -> TermPtr {
    TermPtr h = whnf(ty, c.opts.fuel);
    return h->tag == want ? h : nullptr;
  };
  auto bad = [&](const char* lemma, const std::string& msg) {
    add_failure(r, c, "inversion", std::string(lemma) + ": " + msg, j);
  };
  try {
    switch (v->tag) {
      case Tag::UnitJIntro: {
        ++r.checks;
        if (!vec_leq(zeros(*c.sr, j.gctx.size()), j.delta))
          bad("unit inversion", "0 is not below " + show_vector(j.delta));
        if (conv_equiv(ty, tJ(), c.opts.fuel) != Conv::Equal)
          bad("unit inversion", "the type is not convertible to J");
        break;
      }
      case Tag::Lam: {
        ++r.checks;
        TermPtr pi = shape(Tag::Pi);
        if (!pi) {
          bad("lambda inversion", "the type does not normalize to a function type");
          break;
        }
        Judgment b;
        b.fragment = Fragment::Graded;
        b.gctx = j.gctx;
        b.gctx.push_back({fresh_name(j.gctx, "x"), pi->kids[0], {}});
        b.delta = j.delta;
        b.delta.push_back(grade_of(*c.sr, pi->grade));
        b.subject = v->kids[0];
        b.type = pi->kids[1];
        try {
          c.check(b);
        } catch (const Error& e) {
          add_failure(r, c, "inversion", "lambda inversion: body: " + err_text(e), b);
        }
        break;
      }
      case Tag::Pair: {
        ++r.checks;
        TermPtr sig = shape(Tag::Sigma);
        if (!sig) {
          bad("pair inversion", "the type does not normalize to a pair type");
          break;
        }
        GradeVector d1 = dc.infer_graded(j.gctx, ann(v->kids[0], sig->kids[0])).usage;
        TermPtr yt = subst_top(sig->kids[1], Zone::Graded, v->kids[0]);
        GradeVector d2 = dc.infer_graded(j.gctx, ann(v->kids[1], yt)).usage;
        GradeVector sum = vec_add(vec_scale(grade_of(*c.sr, sig->grade), d1), d2);
        if (!vec_leq(sum, j.delta))
          bad("pair inversion", "r.d1 + d2 = " + show_vector(sum) + " is not below " +
                                    show_vector(j.delta));
        break;
      }
      case Tag::Inl:
      case Tag::Inr: {
        ++r.checks;
        TermPtr sum = shape(Tag::Sum);
        if (!sum) {
          bad("coproduct inversion", "the type does not normalize to a coproduct");
          break;
        }
        dc.check_graded(j.delta, j.gctx, v->kids[0], sum->kids[v->tag == Tag::Inl ? 0 : 1]);
        break;
      }
      default: break;
    }
  } catch (const Error& e) {
    bad("inversion", err_text(e));
  }
  return r;
}

ProbeResult ctx_vector_probe(const Checkers& c, const Judgment& ctx_judgment, Generator& g,
                             int draws) {
  ProbeResult r;
  for (int i = 0; i < draws; ++i) {
    Judgment j = ctx_judgment;
    j.delta = g.random_vector(j.gctx);
    ProbeResult one = recheck(c, "ctx-vec", j, false);
    r.checks += one.checks;
    for (auto& f : one.failures) r.failures.push_back(std::move(f));
  }
  return r;
}

// ===================================================================== runs

const std::vector<std::string>& meta_suites() {
  static const std::vector<std::string> s = {"subst",     "subject-reduction", "contraction",
                                             "radj",      "inversion",         "ctx-vec"};
  return s;
}

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Judgment ctx_of(const Judgment& j) {
  Judgment c = j;
  c.subject = nullptr;
  c.type = nullptr;
  c.fragment = j.fragment == Fragment::Graded  ? Fragment::GradedCtx
               : j.fragment == Fragment::Mixed ? Fragment::MixedCtx
                                               : Fragment::GladCtx;
  return c;
}

struct ItemOut {
  uint64_t generated = 0, checks = 0, skipped = 0;
  std::map<std::string, uint64_t> rules;
  std::vector<ProbeFailure> failures;
};

using JudgmentProbe = ProbeResult (*)(const Checkers&, const Judgment&);

// Probes the premises of a failing derivation, descending to the smallest
// judgment that still fails.
std::optional<Judgment> localize(const Checkers& c, JudgmentProbe probe, const Derivation& d) {
  for (const auto& p : d.premises) {
    const Judgment& pj = p.conclusion;
    if (!pj.subject || is_ctx(pj.fragment)) continue;
    if (!probe(c, pj).failures.empty()) {
      auto deeper = localize(c, probe, p);
      return deeper ? deeper : pj;
    }
  }
  return std::nullopt;
}

struct Runner {
  const MetaOptions& o;
  Checkers c;
  GenFragment frag;
  std::size_t frag_index;

  GeneratorConfig config(uint64_t i) const {
    GeneratorConfig g;
    g.seed = splitmix(o.seed ^ splitmix((frag_index + 1) * 0x100000001b3ULL + i));
    g.max_depth = o.depth;
    g.fragment = frag;
    if (o.suite == "subject-reduction") g.weights.redex = 8;
    if (o.suite == "contraction") g.duplicate = true;
    if (o.suite == "radj") g.trailing_linear = true;
    return g;
  }

  void absorb(ItemOut& out, ProbeResult&& r, uint64_t i) const {
    out.checks += r.checks;
    for (auto& f : r.failures) {
      f.message = "[" + std::string(gen_fragment_name(frag)) + " #" + std::to_string(i) + "] " +
                  f.message;
      out.failures.push_back(std::move(f));
    }
  }

  // One subst item: a cut pair, or nothing if d offers no cut point.
  std::optional<ProbeResult> subst_item(Generator& g, const Generated& d) const {
    auto& rng = g.rng();
    const Judgment& j = d.judgment;
    bool slack = has_slack(d.derivation);
    bool linear = frag == GenFragment::Mixed && !j.lctx.empty() &&
                  (j.gctx.empty() || rng() % 3 == 0);
    if (linear) {
      std::size_t p = rng() % j.lctx.size();
      auto d0 = g.linear_of_type(j.gctx, j.lctx[p].type);
      if (!d0) return std::nullopt;
      Judgment t = linear_substitution_transform(d0->judgment, j, p);
      return recheck(c, "subst", t, !slack && !has_slack(d0->derivation));
    }
    if (j.gctx.empty()) return std::nullopt;
    std::size_t k = rng() % j.gctx.size();
    Ctx prefix(j.gctx.begin(), j.gctx.begin() + long(k));
    auto d0 = g.term_of_type(prefix, j.gctx[k].type, j.gctx[k].mode);
    if (!d0) return std::nullopt;
    bool ctxj = rng() % 4 == 0;
    Judgment t = substitution_transform(d0->judgment, ctxj ? ctx_of(j) : j, k, c.mt);
    return recheck(c, "subst", t, !ctxj && !slack && !has_slack(d0->derivation));
  }

  ProbeResult probe_item(const Generated& d, JudgmentProbe probe) const {
    ProbeResult r = probe(c, d.judgment);
    if (!r.failures.empty())
      if (auto small = localize(c, probe, d.derivation)) {
        r.failures.front().message += " (localized to a premise)";
        r.failures.front().reproducer = judgment_source(*small, c.config);
      }
    return r;
  }

  ItemOut run(uint64_t i) const {
    ItemOut out;
    Generator g(c.sr, c.mt, config(i));
    // Suites that need a particular shape redraw until a judgment offers
    // one. The count is bounded, so an item can still come back empty; that
    // shows up as a skip.
    const int attempts = o.suite == "subst" || o.suite == "subject-reduction" ? 50 : 1;
    std::optional<ProbeResult> r;
    Generated d;
    for (int a = 0; a < attempts && !r; ++a) {
      d = g.next();
      const Judgment& j = d.judgment;
      bool slack = has_slack(d.derivation);
      if (o.suite == "subst") {
        r = subst_item(g, d);
      } else if (o.suite == "subject-reduction") {
        ProbeResult pr = probe_item(d, subject_reduction_probe);
        if (pr.checks > 0 || a + 1 == attempts) r = std::move(pr);
      } else if (o.suite == "contraction") {
        if (d.duplicate_at)
          r = recheck(c, "contraction", contraction_transform(j, *d.duplicate_at), !slack);
      } else if (o.suite == "radj") {
        r = recheck(c, "radj", radj_left_transform(j, c.sr), !slack);
      } else if (o.suite == "inversion") {
        r = probe_item(d, inversion_probe);
      } else if (o.suite == "ctx-vec") {
        Judgment cj = ctx_of(j);
        r = recheck(c, "ctx-vec", cj, false);
        ProbeResult more = ctx_vector_probe(c, cj, g, 5);
        r->checks += more.checks;
        for (auto& f : more.failures) r->failures.push_back(std::move(f));
      }
    }
    ++out.generated;
    for_each_node(d.derivation, [&](const Derivation& n) { ++out.rules[n.rule]; });
    if (!r || r->checks == 0) {
      ++out.skipped;
      return out;
    }
    absorb(out, std::move(*r), i);
    return out;
  }
};

}  // namespace

MetaReport run_meta(const MetaOptions& o) {
  const auto& suites = meta_suites();
  if (std::find(suites.begin(), suites.end(), o.suite) == suites.end())
    fail(ErrorCode::ConfigError, "unknown suite '" + o.suite + "'");
  auto reg = load_config(o.config);
  Checkers c{reg->default_semiring(), reg->default_theory(), o.config, {}};

  std::vector<GenFragment> frags;
  if (o.suite == "radj") {
    frags = {GenFragment::Mixed};
  } else if (o.suite == "inversion") {
    frags = {GenFragment::Graded};
  } else if (c.mt) {
    frags = {GenFragment::Glad};
  } else {
    frags = {GenFragment::Graded, GenFragment::Mixed};
  }
  for (GenFragment f : frags)
    if (f != GenFragment::Glad && !c.sr)
      fail(ErrorCode::ConfigError, "config '" + o.config + "' declares no semiring");

  MetaReport rep;
  rep.options = o;
  unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  for (std::size_t fi = 0; fi < frags.size(); ++fi) {
    Runner run{o, c, frags[fi], fi};
    std::vector<ItemOut> outs(o.count);
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
      for (;;) {
        uint64_t i = next++;
        if (i >= o.count) break;
        try {
          outs[i] = run.run(i);
        } catch (const Error& e) {
          outs[i].failures.push_back({"generator",
                                      "[" + std::string(gen_fragment_name(frags[fi])) + " #" +
                                          std::to_string(i) + "] " + err_text(e),
                                      {}});
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    MetaSection sec;
    sec.fragment = gen_fragment_name(frags[fi]);
    std::map<std::string, uint64_t> rules;
    for (auto& out : outs) {
      sec.generated += out.generated;
      sec.checks += out.checks;
      sec.skipped += out.skipped;
      for (const auto& [k, v] : out.rules) rules[k] += v;
      for (auto& f : out.failures) rep.failures.push_back(std::move(f));
    }
    sec.rules.assign(rules.begin(), rules.end());
    rep.sections.push_back(std::move(sec));
  }
  return rep;
}

std::string render_meta_report(const MetaReport& r) {
  const MetaOptions& o = r.options;
  std::string s = "meta suite=" + o.suite + " config=" + o.config + " seed=" +
                  std::to_string(o.seed) + " count=" + std::to_string(o.count) +
                  " depth=" + std::to_string(o.depth) + "\n";
  for (const auto& sec : r.sections) {
    s += "section " + sec.fragment + ": generated " + std::to_string(sec.generated) + ", checks " +
         std::to_string(sec.checks) + ", skipped " + std::to_string(sec.skipped) + "\n";
    s += "  rules:";
    for (const auto& [k, v] : sec.rules) s += " " + k + "=" + std::to_string(v);
    s += "\n";
  }
  s += "failures: " + std::to_string(r.failures.size()) + "\n";
  for (std::size_t i = 0; i < r.failures.size(); ++i) {
    const auto& f = r.failures[i];
    s += "failure " + std::to_string(i) + " [" + f.probe + "] " + f.message + "\n";
    std::size_t start = 0;
    while (start < f.reproducer.size()) {
      std::size_t end = f.reproducer.find('\n', start);
      if (end == std::string::npos) end = f.reproducer.size();
      s += "  | " + f.reproducer.substr(start, end - start) + "\n";
      start = end + 1;
    }
  }
  return s;
}

}  // namespace gradal
