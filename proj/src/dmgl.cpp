#include "gradal/dmgl.hpp"

#include <algorithm>

#include "gradal/printer.hpp"

namespace gradal {

GradeVector zeros(const Semiring& sr, std::size_t n) { return GradeVector(n, zero_of(sr)); }

namespace {

struct LinEntry {
  std::string name;
  TermPtr type;
  std::size_t gdepth;  // graded entries in scope of `type`
};

struct Env {
  Ctx g;
  std::vector<LinEntry> l;
  std::size_t lin_floor = 0;  // linear entries below this are out of reach (inside Gi)
};

struct Out {
  GradeVector use;
  std::vector<bool> lin;
  TermPtr type;
  Derivation d;
};

std::string hint(const Term& t, std::size_t i, const char* dflt) {
  return i < t.names.size() && !t.names[i].empty() ? t.names[i] : dflt;
}

const char* graded_rule(Tag t) {
  switch (t) {
    case Tag::Var: return "G-var";
    case Tag::TypeU: return "G-type";
    case Tag::LinearU: return "G-linear";
    case Tag::UnitJ:
    case Tag::UnitI: return "G-unit";
    case Tag::Pi: return "G-function";
    case Tag::Sigma: return "G-gradedPair";
    case Tag::Sum: return "G-coproduct";
    case Tag::Lollipop: return "G-linearFunction";
    case Tag::Tensor: return "G-tensor";
    case Tag::FType: return "G-ladj";
    case Tag::GAdj: return "G-radj";
    case Tag::UnitJIntro: return "G-unitIntro";
    case Tag::LetJ: return "G-unitElim";
    case Tag::Pair: return "G-gradedPairIntro";
    case Tag::LetPair: return "G-gradedPairElim";
    case Tag::Inl: return "G-coproductInl";
    case Tag::Inr: return "G-coproductInr";
    case Tag::Case: return "G-coproductElim";
    case Tag::Lam: return "G-lambda";
    case Tag::App: return "G-app";
    case Tag::GIntro: return "G-radjIntro";
    case Tag::Ann: return "G-ann";
    default: return "G-?";
  }
}

const char* mixed_rule(Tag t) {
  switch (t) {
    case Tag::Var: return "M-id";
    case Tag::UnitIIntro: return "M-unitIntro";
    case Tag::LetI: return "M-unitElim";
    case Tag::LamLin: return "M-lambda";
    case Tag::AppLin: return "M-app";
    case Tag::TensorPair: return "M-tensorIntro";
    case Tag::LetTensor: return "M-tensorElim";
    case Tag::FPair: return "M-ladjIntro";
    case Tag::LetF: return "M-ladjElim";
    case Tag::GInv: return "M-radjElim";
    case Tag::Ann: return "M-ann";
    default: return "M-?";
  }
}

class Dm {
 public:
  Dm(const Semiring& sr, const CheckOptions& o) : sr_(sr), o_(o) {}

  Grade grade(const std::string& s) const { return grade_of(sr_, s); }

  Names names(const Env& e) const {
    Names n;
    for (const auto& h : e.g) n.graded.push_back(h.name);
    for (const auto& h : e.l) n.linear.push_back(h.name);
    return n;
  }
  std::string show(const Env& e, const TermPtr& t) const {
    Names n;
    for (const auto& h : e.g) n.graded.push_back(h.name);
    return print_term(t, n);
  }

  GradeVector zero_vec(const Env& e) const { return zeros(sr_, e.g.size()); }

  Judgment graded_j(const Env& e, const GradeVector& use, const TermPtr& subj,
                    const TermPtr& ty) const {
    Judgment j;
    j.fragment = Fragment::Graded;
    j.delta = use;
    j.gctx = e.g;
    j.subject = subj;
    j.type = ty;
    return j;
  }

  // The conclusion's linear context is exactly the entries the subject uses;
  // the subject is reindexed to that sub-context.
  Judgment mixed_j(const Env& e, const GradeVector& use, const std::vector<bool>& lin,
                   const TermPtr& subj, const TermPtr& ty) const {
    Judgment j;
    j.fragment = Fragment::Mixed;
    j.delta = use;
    j.gctx = e.g;
    std::vector<int64_t> pos(e.l.size(), -1);
    for (std::size_t i = 0; i < e.l.size(); ++i) {
      if (!lin[i]) continue;
      pos[i] = int64_t(j.lctx.size());
      j.lctx.push_back(
          {e.l[i].name, shift(e.l[i].type, int64_t(e.g.size() - e.l[i].gdepth)), {}});
    }
    std::size_t n = e.l.size(), m = j.lctx.size();
    j.subject = map_free(subj, [&](Zone z, uint32_t i) -> TermPtr {
      if (z == Zone::Graded || i >= n || pos[n - 1 - i] < 0) return var(z, i);
      return var(z, uint32_t(m - 1 - std::size_t(pos[n - 1 - i])));
    });
    j.type = ty;
    return j;
  }

  Conv conv(const TermPtr& a, const TermPtr& b) const { return conv_equiv(a, b, o_.fuel); }

  TermPtr shape(const Env& e, const TermPtr& T, Tag want, const char* what) const {
    const TermPtr& p = peel_ann(T);
    if (p->tag == want) return p;
    ReductionTrace tr = normalize(strip_ann(T), o_.fuel);
    if (tr.exhausted)
      fail(ErrorCode::ConversionInconclusive,
           "fuel ran out normalizing " + show(e, T) + " (expected " + what + ")");
    if (tr.final->tag == want) return tr.final;
    fail_with(ErrorCode::TypeMismatch, std::string("expected ") + what + ", got " + show(e, T),
              {{"expected", what}, {"got", show(e, T)}});
  }

  void same_type(const Env& e, const TermPtr& got, const TermPtr& want) const {
    switch (conv(got, want)) {
      case Conv::Equal: return;
      case Conv::Inconclusive:
        fail(ErrorCode::ConversionInconclusive,
             "cannot decide " + show(e, got) + " == " + show(e, want) + " within fuel");
      case Conv::Unequal:
        fail_with(ErrorCode::TypeMismatch, "expected " + show(e, want) + ", got " + show(e, got),
                  {{"expected", show(e, want)}, {"got", show(e, got)}});
    }
  }

  Out convert(const Env& e, Out o, const TermPtr& want, bool mixed) const {
    if (o.type == want) return o;
    same_type(e, o.type, want);
    if (!alpha_eq(strip_ann(o.type), strip_ann(want))) {
      Judgment j = o.d.conclusion;
      j.type = want;
      Derivation c{mixed ? "M-convert" : "G-convert", std::move(j), {}, {}};
      c.premises.push_back(std::move(o.d));
      o.d = std::move(c);
    }
    o.type = want;
    return o;
  }

  std::vector<bool> merge(const Env& e, const std::vector<bool>& a,
                          const std::vector<bool>& b) const {
    std::vector<bool> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] && b[i])
        fail(ErrorCode::LinearVarReused, "linear variable '" + e.l[i].name + "' used twice");
      out[i] = a[i] || b[i];
    }
    return out;
  }

  static GradeVector drop(GradeVector v, std::size_t n) {
    v.resize(v.size() - n);
    return v;
  }

  // X must inhabit the universe u (Type or Linear).
  Out universe(const Env& e, const TermPtr& X, Tag u) const {
    Out o = g(e, X, nullptr, true);
    TermPtr want = mk(u);
    Conv c = conv(o.type, want);
    if (c == Conv::Inconclusive)
      fail(ErrorCode::ConversionInconclusive, "cannot decide the universe of " + show(e, X));
    if (c == Conv::Unequal)
      fail(ErrorCode::NotAType, show(e, X) + " : " + show(e, o.type) + ", expected " +
                                    (u == Tag::TypeU ? "Type" : "Linear"));
    o.type = want;
    return o;
  }

  Env bind(const Env& e, const std::string& name, const TermPtr& type) const {
    Env e2 = e;
    e2.g.push_back({name, type, {}});
    return e2;
  }

  // ------------------------------------------------------------ graded

  Out g(const Env& e, const TermPtr& t, const TermPtr& want, bool ty) const {
    Out o;
    try {
      o = gi(e, t, want, ty);
    } catch (Error& err) {
      err.set_rule(graded_rule(t->tag));
      throw;
    }
    if (want) o = convert(e, std::move(o), want, false);
    return o;
  }

  Out leaf(const Env& e, const char* rule, const TermPtr& t, TermPtr type) const {
    Out o{zero_vec(e), std::vector<bool>(e.l.size()), type, {}};
    o.d = Derivation{rule, graded_j(e, o.use, t, type), {}, {}};
    return o;
  }

  Out node(const Env& e, const char* rule, const TermPtr& t, GradeVector use, TermPtr type,
           std::vector<Derivation> prem,
           std::vector<std::pair<std::string, std::string>> side = {}) const {
    Out o{std::move(use), std::vector<bool>(e.l.size()), type, {}};
    o.d = Derivation{rule, graded_j(e, o.use, t, type), std::move(prem), std::move(side)};
    return o;
  }

  [[noreturn]] void missing(const Env& e, const TermPtr& t, const char* what) const {
    fail(ErrorCode::AnnotationMissing,
         std::string("cannot infer the type of ") + what + " " + show(e, t) +
             "; ascribe it with (t : T)");
  }

  [[noreturn]] void wrong(const Env&, const TermPtr& t, const char* where) const {
    fail(ErrorCode::WrongFragment,
         std::string(tag_name(t->tag)) + " is not allowed in a " + where + " position");
  }

  // Binder form: a grade, a domain of universe `dom` and a body of universe
  // `cod` under the bound variable.
  Out binder_type(const Env& e, const TermPtr& t, Tag dom, Tag cod, Tag result) const {
    grade(t->grade);
    Out a = universe(e, t->kids[0], dom);
    Out b = universe(bind(e, hint(*t, 0, "x"), t->kids[0]), t->kids[1], cod);
    return node(e, graded_rule(t->tag), t, vec_add(a.use, drop(b.use, 1)), mk(result),
                {std::move(a.d), std::move(b.d)});
  }

  Out pair_type(const Env& e, const TermPtr& t, Tag u, Tag result) const {
    Out a = universe(e, t->kids[0], u);
    Out b = universe(e, t->kids[1], u);
    return node(e, graded_rule(t->tag), t, vec_add(a.use, b.use), mk(result),
                {std::move(a.d), std::move(b.d)});
  }

  Out gi(const Env& e, const TermPtr& t, const TermPtr& want, bool ty) const {
    const auto& k = t->kids;
    switch (t->tag) {
      case Tag::Var: {
        if (t->zone == Zone::Linear) {
          if (t->index >= e.l.size()) fail(ErrorCode::UnboundVar, "unbound linear variable");
          const std::string& n = e.l[e.l.size() - 1 - t->index].name;
          if (ty)
            fail(ErrorCode::LinearVarInType, "linear variable '" + n + "' occurs in a type");
          fail(ErrorCode::NonEmptyLinearZone,
               "linear variable '" + n + "' used inside a graded term");
        }
        if (t->index >= e.g.size())
          fail(ErrorCode::UnboundVar, "graded index " + std::to_string(t->index) + " unbound");
        std::size_t lvl = e.g.size() - 1 - t->index;
        Out o = leaf(e, "G-var", t, shift(e.g[lvl].type, int64_t(t->index) + 1));
        o.use[lvl] = one_of(sr_);
        o.d.conclusion.delta = o.use;
        return o;
      }
      case Tag::TypeU:
      case Tag::LinearU:
      case Tag::UnitJ: return leaf(e, graded_rule(t->tag), t, mk(Tag::TypeU));
      case Tag::UnitI: return leaf(e, "G-unit", t, mk(Tag::LinearU));
      case Tag::Pi: return binder_type(e, t, Tag::TypeU, Tag::TypeU, Tag::TypeU);
      case Tag::Sigma: return binder_type(e, t, Tag::TypeU, Tag::TypeU, Tag::TypeU);
      case Tag::FType: return binder_type(e, t, Tag::TypeU, Tag::LinearU, Tag::LinearU);
      case Tag::Sum: return pair_type(e, t, Tag::TypeU, Tag::TypeU);
      case Tag::Lollipop:
      case Tag::Tensor: return pair_type(e, t, Tag::LinearU, Tag::LinearU);
      case Tag::GAdj: {
        Out a = universe(e, k[0], Tag::LinearU);
        return node(e, "G-radj", t, a.use, mk(Tag::TypeU), {std::move(a.d)});
      }
      case Tag::UnitJIntro: return leaf(e, "G-unitIntro", t, mk(Tag::UnitJ));
      case Tag::LetJ: {
        Out s = g(e, k[0], mk(Tag::UnitJ), ty);
        Out b = g(e, k[1], want, ty);
        return node(e, "G-unitElim", t, vec_add(s.use, b.use), b.type,
                    {std::move(s.d), std::move(b.d)});
      }
      case Tag::Pair: {
        if (!want) missing(e, t, "the pair");
        TermPtr sig = shape(e, want, Tag::Sigma, "a graded pair type");
        Grade r = grade(sig->grade);
        Out a = g(e, k[0], sig->kids[0], ty);
        Out b = g(e, k[1], subst_top(sig->kids[1], Zone::Graded, k[0]), ty);
        return node(e, "G-gradedPairIntro", t, vec_add(vec_scale(r, a.use), b.use), want,
                    {std::move(a.d), std::move(b.d)}, {{"r", r.show()}});
      }
      case Tag::LetPair: {
        Out s = g(e, k[0], nullptr, ty);
        TermPtr sig = shape(e, s.type, Tag::Sigma, "a graded pair type");
        Grade r = grade(sig->grade);
        Env e2 = bind(bind(e, hint(*t, 0, "x"), sig->kids[0]), hint(*t, 1, "y"), sig->kids[1]);
        Out b = g(e2, k[1], want ? shift(want, 2) : nullptr, ty);
        TermPtr type = want;
        if (!type) {
          if (occurs_free(b.type, Zone::Graded, 0) || occurs_free(b.type, Zone::Graded, 1))
            fail(ErrorCode::TypeMismatch,
                 "the result type " + show(e2, b.type) + " depends on the pattern variables");
          type = shift(b.type, -2);
        }
        Grade ux = b.use[e.g.size()], uy = b.use[e.g.size() + 1];
        Grade q = pair_grade(r, ux, uy);
        return node(e, "G-gradedPairElim", t, vec_add(vec_scale(q, s.use), drop(b.use, 2)), type,
                    {std::move(s.d), std::move(b.d)}, {{"q", q.show()}});
      }
      case Tag::Inl:
      case Tag::Inr: {
        if (!want) missing(e, t, "the injection");
        TermPtr sum = shape(e, want, Tag::Sum, "a coproduct type");
        Out a = g(e, k[0], sum->kids[t->tag == Tag::Inl ? 0 : 1], ty);
        return node(e, graded_rule(t->tag), t, a.use, want, {std::move(a.d)});
      }
      case Tag::Case: return case_rule(e, t, want, ty);
      case Tag::Lam: {
        if (!want) missing(e, t, "the lambda");
        TermPtr pi = shape(e, want, Tag::Pi, "a function type");
        Grade r = grade(pi->grade);
        Out b = g(bind(e, hint(*t, 0, "x"), pi->kids[0]), k[0], pi->kids[1], ty);
        Grade u = b.use.back();
        if (!leq(u, r))
          fail(ErrorCode::GradeMismatch, "'" + hint(*t, 0, "x") + "' is used at " + u.show() +
                                             ", above the binder grade " + r.show());
        return node(e, "G-lambda", t, drop(b.use, 1), want, {std::move(b.d)},
                    {{"r", r.show()}});
      }
      case Tag::App: {
        const TermPtr& f = k[0];
        if (f->tag == Tag::Lam) {
          // Unannotated head: the argument fixes the domain and the body's
          // exact usage fixes the binder grade.
          Out a = g(e, k[1], nullptr, ty);
          Env e2 = bind(e, hint(*f, 0, "x"), a.type);
          Out b = g(e2, f->kids[0], nullptr, ty);
          Grade u = b.use.back();
          TermPtr pi = mk(Tag::Pi, {a.type, b.type}, u.show(), {}, {}, {hint(*f, 0, "x")});
          Out lam = node(e, "G-lambda", f, drop(b.use, 1), pi, {std::move(b.d)},
                         {{"r", u.show()}});
          return node(e, "G-app", t, vec_add(lam.use, vec_scale(u, a.use)),
                      subst_top(b.type, Zone::Graded, k[1]), {std::move(lam.d), std::move(a.d)},
                      {{"r", u.show()}});
        }
        Out fo = g(e, f, nullptr, ty);
        TermPtr pi = shape(e, fo.type, Tag::Pi, "a function type");
        Grade r = grade(pi->grade);
        Out a = g(e, k[1], pi->kids[0], ty);
        return node(e, "G-app", t, vec_add(fo.use, vec_scale(r, a.use)),
                    subst_top(pi->kids[1], Zone::Graded, k[1]), {std::move(fo.d), std::move(a.d)},
                    {{"r", r.show()}});
      }
      case Tag::GIntro: {
        Env e2 = e;
        e2.lin_floor = e.l.size();
        TermPtr inner;
        if (want) inner = shape(e, want, Tag::GAdj, "a G type")->kids[0];
        Out l = m(e2, k[0], inner);
        TermPtr type = want ? want : mk(Tag::GAdj, {l.type});
        return node(e, "G-radjIntro", t, l.use, type, {std::move(l.d)});
      }
      case Tag::Ann: {
        Out x = universe(e, k[1], Tag::TypeU);
        Out a = g(e, k[0], k[1], ty);
        return node(e, "G-ann", t, a.use, k[1], {std::move(x.d), std::move(a.d)});
      }
      default: wrong(e, t, "graded");
    }
  }

  // Least q with uy <= q and ux <= r.q.
  Grade pair_grade(const Grade& r, const Grade& ux, const Grade& uy) const {
    uint64_t bound = sr_.is_nat() ? std::max(ux.v, uy.v) : 0;
    std::vector<Grade> ok;
    for (uint64_t v : sr_.enumerate(bound)) {
      Grade q{&sr_, v};
      if (leq(uy, q) && leq(ux, mul(r, q))) ok.push_back(q);
    }
    for (const Grade& c : ok) {
      bool least = true;
      for (const Grade& d : ok) least = least && leq(c, d);
      if (least) return c;
    }
    if (!ok.empty()) return ok.front();
    fail(ErrorCode::GradeMismatch, "no grade q with " + uy.show() + " <= q and " + ux.show() +
                                       " <= " + r.show() + ".q");
  }

  Out case_rule(const Env& e, const TermPtr& t, const TermPtr& want, bool ty) const {
    const auto& k = t->kids;
    Grade q = grade(t->grade);
    if (!leq(one_of(sr_), q))
      fail(ErrorCode::GradeMismatch, "case grade " + q.show() + " is not at least 1");
    Out s = g(e, k[0], nullptr, ty);
    TermPtr sum = shape(e, s.type, Tag::Sum, "a coproduct type");
    auto branch_ty = [&](int i, const TermPtr& C) {
      return mk(Tag::Pi, {sum->kids[std::size_t(i)], shift(C, 1)}, t->grade, {}, {}, {"x"});
    };
    TermPtr C = want;
    Out b1;
    if (C) {
      b1 = g(e, k[1], branch_ty(0, C), ty);
    } else {
      b1 = g(e, k[1], nullptr, ty);
      TermPtr pi = shape(e, b1.type, Tag::Pi, "a function type");
      if (occurs_free(pi->kids[1], Zone::Graded, 0))
        fail(ErrorCode::TypeMismatch, "case branch result type depends on its argument");
      C = shift(pi->kids[1], -1);
      b1 = convert(e, std::move(b1), branch_ty(0, C), false);
    }
    Out b2 = g(e, k[2], branch_ty(1, C), ty);
    GradeVector d2 = b1.use;
    std::vector<std::pair<std::string, std::string>> side = {{"q", q.show()}};
    if (!(b1.use == b2.use)) {
      for (std::size_t i = 0; i < d2.size(); ++i) {
        auto j = sr_.join(b1.use[i].v, b2.use[i].v);
        if (!j)
          fail(ErrorCode::GradeMismatch, "case branches use " + show_vector(b1.use) + " and " +
                                             show_vector(b2.use) + ", which have no join");
        d2[i] = Grade{&sr_, *j};
      }
      side.push_back({"join", show_vector(d2)});
    }
    return node(e, "G-coproductElim", t, vec_add(vec_scale(q, s.use), d2), C,
                {std::move(s.d), std::move(b1.d), std::move(b2.d)}, std::move(side));
  }

  // ------------------------------------------------------------- mixed

  Out m(const Env& e, const TermPtr& t, const TermPtr& want) const {
    Out o;
    try {
      o = mi(e, t, want);
    } catch (Error& err) {
      err.set_rule(mixed_rule(t->tag));
      throw;
    }
    if (want) o = convert(e, std::move(o), want, true);
    return o;
  }

  Out mnode(const Env& e, const char* rule, const TermPtr& t, GradeVector use,
            std::vector<bool> lin, TermPtr type, std::vector<Derivation> prem,
            std::vector<std::pair<std::string, std::string>> side = {}) const {
    Out o{std::move(use), std::move(lin), type, {}};
    o.d = Derivation{rule, mixed_j(e, o.use, o.lin, t, type), std::move(prem), std::move(side)};
    return o;
  }

  Env bind_lin(const Env& e, const std::string& name, const TermPtr& type) const {
    Env e2 = e;
    e2.l.push_back({name, type, e.g.size()});
    return e2;
  }

  void must_use(const Env& e2, const Out& o, std::size_t lvl) const {
    if (!o.lin[lvl])
      fail(ErrorCode::LinearVarUnused, "linear variable '" + e2.l[lvl].name + "' is never used");
  }

  Out mi(const Env& e, const TermPtr& t, const TermPtr& want) const {
    const auto& k = t->kids;
    std::size_t L = e.l.size();
    switch (t->tag) {
      case Tag::Var: {
        if (t->zone == Zone::Graded) wrong(e, t, "linear (graded variable)");
        if (t->index >= L) fail(ErrorCode::UnboundVar, "unbound linear variable");
        std::size_t lvl = L - 1 - t->index;
        if (lvl < e.lin_floor)
          fail(ErrorCode::NonEmptyLinearZone,
               "linear variable '" + e.l[lvl].name + "' is out of reach inside G");
        std::vector<bool> lin(L);
        lin[lvl] = true;
        TermPtr type = shift(e.l[lvl].type, int64_t(e.g.size() - e.l[lvl].gdepth));
        return mnode(e, "M-id", t, zero_vec(e), std::move(lin), type, {});
      }
      case Tag::UnitIIntro:
        return mnode(e, "M-unitIntro", t, zero_vec(e), std::vector<bool>(L), mk(Tag::UnitI), {});
      case Tag::LetI: {
        Out s = m(e, k[0], mk(Tag::UnitI));
        Out b = m(e, k[1], want);
        return mnode(e, "M-unitElim", t, vec_add(s.use, b.use), merge(e, s.lin, b.lin), b.type,
                     {std::move(s.d), std::move(b.d)});
      }
      case Tag::LamLin: {
        if (!want) missing(e, t, "the linear lambda");
        TermPtr lo = shape(e, want, Tag::Lollipop, "a linear function type");
        Env e2 = bind_lin(e, hint(*t, 0, "y"), lo->kids[0]);
        Out b = m(e2, k[0], lo->kids[1]);
        must_use(e2, b, L);
        b.lin.pop_back();
        return mnode(e, "M-lambda", t, b.use, b.lin, want, {std::move(b.d)});
      }
      case Tag::AppLin: {
        const TermPtr& f = k[0];
        if (f->tag == Tag::LamLin) {
          Out a = m(e, k[1], nullptr);
          Env e2 = bind_lin(e, hint(*f, 0, "y"), a.type);
          Out b = m(e2, f->kids[0], nullptr);
          must_use(e2, b, L);
          b.lin.pop_back();
          Out lam = mnode(e, "M-lambda", f, b.use, b.lin, mk(Tag::Lollipop, {a.type, b.type}),
                          {std::move(b.d)});
          return mnode(e, "M-app", t, vec_add(lam.use, a.use), merge(e, lam.lin, a.lin), b.type,
                       {std::move(lam.d), std::move(a.d)});
        }
        Out fo = m(e, f, nullptr);
        TermPtr lo = shape(e, fo.type, Tag::Lollipop, "a linear function type");
        Out a = m(e, k[1], lo->kids[0]);
        return mnode(e, "M-app", t, vec_add(fo.use, a.use), merge(e, fo.lin, a.lin), lo->kids[1],
                     {std::move(fo.d), std::move(a.d)});
      }
      case Tag::TensorPair: {
        TermPtr ten = want ? shape(e, want, Tag::Tensor, "a tensor type") : nullptr;
        Out a = m(e, k[0], ten ? ten->kids[0] : nullptr);
        Out b = m(e, k[1], ten ? ten->kids[1] : nullptr);
        TermPtr type = want ? want : mk(Tag::Tensor, {a.type, b.type});
        return mnode(e, "M-tensorIntro", t, vec_add(a.use, b.use), merge(e, a.lin, b.lin), type,
                     {std::move(a.d), std::move(b.d)});
      }
      case Tag::LetTensor: {
        Out s = m(e, k[0], nullptr);
        TermPtr ten = shape(e, s.type, Tag::Tensor, "a tensor type");
        Env e2 = bind_lin(bind_lin(e, hint(*t, 0, "y"), ten->kids[0]), hint(*t, 1, "z"),
                          ten->kids[1]);
        Out b = m(e2, k[1], want);
        must_use(e2, b, L);
        must_use(e2, b, L + 1);
        b.lin.resize(L);
        return mnode(e, "M-tensorElim", t, vec_add(s.use, b.use), merge(e, s.lin, b.lin), b.type,
                     {std::move(s.d), std::move(b.d)});
      }
      case Tag::FPair: {
        if (!want) missing(e, t, "the F pair");
        TermPtr f = shape(e, want, Tag::FType, "an F type");
        Grade r = grade(f->grade);
        Out a = g(e, k[0], f->kids[0], false);
        Out l = m(e, k[1], subst_top(f->kids[1], Zone::Graded, k[0]));
        return mnode(e, "M-ladjIntro", t, vec_add(vec_scale(r, a.use), l.use), l.lin, want,
                     {std::move(a.d), std::move(l.d)}, {{"r", r.show()}});
      }
      case Tag::LetF: {
        Out s = m(e, k[0], nullptr);
        TermPtr f = shape(e, s.type, Tag::FType, "an F type");
        Grade q = grade(f->grade);
        Env e2 = bind(e, hint(*t, 0, "x"), f->kids[0]);
        e2.l.push_back({hint(*t, 1, "y"), f->kids[1], e2.g.size()});
        Out b = m(e2, k[1], want ? shift(want, 1) : nullptr);
        Grade u = b.use.back();
        if (!leq(u, q))
          fail(ErrorCode::GradeMismatch, "'" + hint(*t, 0, "x") + "' is used at " + u.show() +
                                             ", above the F grade " + q.show());
        must_use(e2, b, L);
        b.lin.pop_back();
        TermPtr type = want;
        if (!type) {
          if (occurs_free(b.type, Zone::Graded, 0))
            fail(ErrorCode::TypeMismatch,
                 "the result type " + show(e2, b.type) + " depends on the pattern variable");
          type = shift(b.type, -1);
        }
        return mnode(e, "M-ladjElim", t, vec_add(s.use, drop(b.use, 1)), merge(e, s.lin, b.lin),
                     type, {std::move(s.d), std::move(b.d)}, {{"q", q.show()}});
      }
      case Tag::GInv: {
        Out a = g(e, k[0], want ? mk(Tag::GAdj, {want}) : nullptr, false);
        TermPtr ga = shape(e, a.type, Tag::GAdj, "a G type");
        TermPtr type = want ? want : ga->kids[0];
        return mnode(e, "M-radjElim", t, a.use, std::vector<bool>(L), type, {std::move(a.d)});
      }
      case Tag::Ann: {
        Out x = universe(e, k[1], Tag::LinearU);
        Out a = m(e, k[0], k[1]);
        return mnode(e, "M-ann", t, a.use, a.lin, k[1], {std::move(x.d), std::move(a.d)});
      }
      default: wrong(e, t, "linear");
    }
  }

  // ------------------------------------------------------------ contexts

  Derivation graded_ctx(const GradeVector& delta, const Ctx& gctx) const {
    if (delta.size() != gctx.size())
      fail(ErrorCode::LengthMismatch, "grade vector " + show_vector(delta) + " has " +
                                          std::to_string(delta.size()) + " entries, context " +
                                          std::to_string(gctx.size()));
    for (const Grade& r : delta)
      if (r.sr != &sr_)
        fail(ErrorCode::SemiringMismatch,
             "grade " + r.show() + " is not in semiring '" + sr_.id() + "'");
    Judgment j;
    j.fragment = Fragment::GradedCtx;
    Derivation d{"gradedCtx-empty", j, {}, {}};
    Env e;
    for (std::size_t i = 0; i < gctx.size(); ++i) {
      for (const auto& h : e.g)
        if (h.name == gctx[i].name)
          fail(ErrorCode::DuplicateName, "'" + gctx[i].name + "' declared twice");
      Out wf;
      try {
        wf = universe(e, gctx[i].type, Tag::TypeU);
      } catch (const Error& err) {
        fail(ErrorCode::TypeNotWF, "entry " + std::to_string(i) + " '" + gctx[i].name +
                                       "': " + err.what());
      }
      e.g.push_back({gctx[i].name, gctx[i].type, {}});
      j.gctx = e.g;
      j.delta.push_back(delta[i]);
      Derivation nd{"gradedCtx-extend", j, {}, {}};
      nd.premises.push_back(std::move(d));
      nd.premises.push_back(std::move(wf.d));
      d = std::move(nd);
    }
    return d;
  }

  Derivation mixed_ctx(const GradeVector& delta, const Ctx& gctx, const Ctx& lctx) const {
    Derivation gd = graded_ctx(delta, gctx);
    Judgment j = gd.conclusion;
    j.fragment = Fragment::MixedCtx;
    Derivation d{"mixedCtx-empty", j, {std::move(gd)}, {}};
    Env e;
    e.g = gctx;
    for (std::size_t i = 0; i < lctx.size(); ++i) {
      for (const auto& h : gctx)
        if (h.name == lctx[i].name)
          fail(ErrorCode::DuplicateName, "'" + lctx[i].name + "' is both graded and linear");
      for (std::size_t k = 0; k < i; ++k)
        if (lctx[k].name == lctx[i].name)
          fail(ErrorCode::DuplicateName, "linear '" + lctx[i].name + "' declared twice");
      Out wf;
      try {
        wf = universe(e, lctx[i].type, Tag::LinearU);
      } catch (const Error& err) {
        fail(ErrorCode::LinearTypeNotWF, "linear entry " + std::to_string(i) + " '" +
                                             lctx[i].name + "': " + err.what());
      }
      j.lctx.push_back(lctx[i]);
      Derivation nd{"mixedCtx-extend", j, {}, {}};
      nd.premises.push_back(std::move(d));
      nd.premises.push_back(std::move(wf.d));
      d = std::move(nd);
    }
    return d;
  }

  Env env(const Ctx& gctx, const Ctx& lctx = {}) const {
    Env e;
    e.g = gctx;
    for (const auto& h : lctx) e.l.push_back({h.name, h.type, gctx.size()});
    return e;
  }

  Derivation subusage(Derivation d, const GradeVector& synth, const GradeVector& delta,
                      bool mixed) const {
    if (!vec_leq(synth, delta))
      fail_with(ErrorCode::SubusageFailed,
                "synthesized usage " + show_vector(synth) + " is not below the declared " +
                    show_vector(delta),
                {{"synthesized", show_vector(synth)}, {"declared", show_vector(delta)}},
                mixed ? "M-subusage" : "G-subusage");
    if (synth == delta) return d;
    Judgment j = d.conclusion;
    j.delta = delta;
    Derivation s{mixed ? "M-subusage" : "G-subusage", std::move(j), {}, {}};
    s.premises.push_back(std::move(d));
    return s;
  }

 private:
  const Semiring& sr_;
  const CheckOptions& o_;
};

}  // namespace

DmglChecker::DmglChecker(const Semiring& sr, CheckOptions opts) : sr_(&sr), opts_(opts) {}

Derivation DmglChecker::check_graded_ctx(const GradeVector& delta, const Ctx& gctx) const {
  return Dm(*sr_, opts_).graded_ctx(delta, gctx);
}

Derivation DmglChecker::check_mixed_ctx(const GradeVector& delta, const Ctx& gctx,
                                        const Ctx& lctx) const {
  return Dm(*sr_, opts_).mixed_ctx(delta, gctx, lctx);
}

TypeWF DmglChecker::type_wf_graded(const Ctx& gctx, const TermPtr& X) const {
  Dm dm(*sr_, opts_);
  Out o = dm.universe(dm.env(gctx), X, Tag::TypeU);
  return {o.use, std::move(o.d)};
}

TypeWF DmglChecker::type_wf_linear(const Ctx& gctx, const TermPtr& A) const {
  Dm dm(*sr_, opts_);
  Out o = dm.universe(dm.env(gctx), A, Tag::LinearU);
  return {o.use, std::move(o.d)};
}

GradeSynthesis DmglChecker::infer_graded(const Ctx& gctx, const TermPtr& t) const {
  Dm dm(*sr_, opts_);
  dm.graded_ctx(zeros(*sr_, gctx.size()), gctx);
  Out o = dm.g(dm.env(gctx), t, nullptr, false);
  return {o.use, o.type, std::move(o.d)};
}

Derivation DmglChecker::check_graded(const GradeVector& delta, const Ctx& gctx, const TermPtr& t,
                                     const TermPtr& X) const {
  Dm dm(*sr_, opts_);
  dm.graded_ctx(delta, gctx);
  Env e = dm.env(gctx);
  Out wf = dm.universe(e, X, Tag::TypeU);
  Out o = dm.g(e, t, X, false);
  Derivation d = dm.subusage(std::move(o.d), o.use, delta, false);
  d.side.push_back({"wf", show_vector(wf.use)});
  return d;
}

MixedSynthesis DmglChecker::infer_mixed(const Ctx& gctx, const Ctx& lctx,
                                        const TermPtr& l) const {
  Dm dm(*sr_, opts_);
  dm.mixed_ctx(zeros(*sr_, gctx.size()), gctx, lctx);
  Env e = dm.env(gctx, lctx);
  Out o = dm.m(e, l, nullptr);
  for (std::size_t i = 0; i < lctx.size(); ++i)
    if (!o.lin[i])
      fail(ErrorCode::LinearVarUnused, "linear variable '" + lctx[i].name + "' is never used");
  return {o.use, o.lin, o.type, std::move(o.d)};
}

Derivation DmglChecker::check_mixed(const GradeVector& delta, const Ctx& gctx, const Ctx& lctx,
                                    const TermPtr& l, const TermPtr& A) const {
  Dm dm(*sr_, opts_);
  dm.mixed_ctx(delta, gctx, lctx);
  Env e = dm.env(gctx, lctx);
  Out wf = dm.universe(e, A, Tag::LinearU);
  Out o = dm.m(e, l, A);
  for (std::size_t i = 0; i < lctx.size(); ++i)
    if (!o.lin[i])
      fail(ErrorCode::LinearVarUnused, "linear variable '" + lctx[i].name + "' is never used");
  Derivation d = dm.subusage(std::move(o.d), o.use, delta, true);
  d.side.push_back({"wf", show_vector(wf.use)});
  return d;
}

Derivation DmglChecker::check(const Judgment& j) const {
  switch (j.fragment) {
    case Fragment::Graded: return check_graded(j.delta, j.gctx, j.subject, j.type);
    case Fragment::Mixed: return check_mixed(j.delta, j.gctx, j.lctx, j.subject, j.type);
    case Fragment::GradedCtx: return check_graded_ctx(j.delta, j.gctx);
    case Fragment::MixedCtx: return check_mixed_ctx(j.delta, j.gctx, j.lctx);
    case Fragment::Glad:
    case Fragment::GladCtx: break;
  }
  fail(ErrorCode::WrongFragment, "GlaD judgment given to the dmGL checker");
}

}  // namespace gradal
