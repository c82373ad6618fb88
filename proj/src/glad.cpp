#include "gradal/glad.hpp"

#include <algorithm>

#include "gradal/printer.hpp"

namespace gradal {

namespace {

struct Env {
  Ctx g;
  std::vector<ModeId> modes;
};

struct Out {
  GradeVector use;
  TermPtr type;
  Derivation d;
};

std::string hint(const Term& t, std::size_t i, const char* dflt) {
  return i < t.names.size() && !t.names[i].empty() ? t.names[i] : dflt;
}

const char* glad_rule(Tag t) {
  switch (t) {
    case Tag::Var: return "glad-var";
    case Tag::TypeU: return "glad-type";
    case Tag::UnitM: return "glad-unit";
    case Tag::PiG: return "glad-function";
    case Tag::TensorG: return "glad-tensor";
    case Tag::Sum: return "glad-coproduct";
    case Tag::StarM: return "glad-unitIntro";
    case Tag::LetStarM: return "glad-unitElim";
    case Tag::Lam: return "glad-lambda";
    case Tag::App: return "glad-app";
    case Tag::Pair: return "glad-tensorIntro";
    case Tag::LetPair: return "glad-tensorElim";
    case Tag::Inl: return "glad-inl";
    case Tag::Inr: return "glad-inr";
    case Tag::Case: return "glad-coproductElim";
    case Tag::Up: return "glad-raise";
    case Tag::Down: return "glad-unraise";
    case Tag::Ann: return "glad-ann";
    default: return "glad-?";
  }
}

class Gl {
 public:
  Gl(const ModeTheory& mt, const CheckOptions& o) : mt_(mt), o_(o) {}

  const Semiring& sr(ModeId m) const { return *mt_.mode(m).semiring; }
  const std::string& mname(ModeId m) const { return mt_.mode(m).id; }
  ModeId mode(const std::string& s) const { return mt_.index_of(s); }

  Grade grade(const std::string& s, ModeId m) const {
    auto v = sr(m).lookup(s);
    if (!v)
      fail(ErrorCode::GradeModeMismatch, "'" + s + "' is not a grade of mode " + mname(m) +
                                             " (semiring " + sr(m).id() + ")");
    return Grade{&sr(m), *v};
  }

  std::string show(const Env& e, const TermPtr& t) const { return print_term(t, names_of(e.g)); }

  GradeVector zero_vec(const Env& e) const {
    GradeVector v;
    for (ModeId m : e.modes) v.push_back(zero_of(sr(m)));
    return v;
  }

  Env bind(const Env& e, const std::string& name, const TermPtr& type, ModeId m) const {
    Env e2 = e;
    e2.g.push_back({name, type, mname(m)});
    e2.modes.push_back(m);
    return e2;
  }

  // m <= M: the condition every GlaD judgment carries. Inside a derivation
  // only the entries a node uses count; an unused entry counts as weakened
  // in at its binder or at the root, which check it there.
  void below_ctx(const Env& e, ModeId m, const GradeVector* use = nullptr) const {
    for (std::size_t i = 0; i < e.modes.size(); ++i)
      if ((!use || (*use)[i].v != (*use)[i].sr->zero()) && !mt_.leq(m, e.modes[i]))
        fail(ErrorCode::ModeViolation, "judgment at mode " + mname(m) + " but '" + e.g[i].name +
                                           "' has mode " + mname(e.modes[i]));
  }

  void same_mode(ModeId have, ModeId want, const std::string& what) const {
    if (have != want)
      fail(ErrorCode::ModeViolation,
           what + " lives at mode " + mname(have) + ", expected " + mname(want));
  }

  Conv conv(const TermPtr& a, const TermPtr& b) const {
    if (o_.strict)
      return alpha_eq(strip_ann(a), strip_ann(b)) ? Conv::Equal : Conv::Unequal;
    return conv_equiv(a, b, o_.fuel);
  }

  TermPtr shape(const Env& e, const TermPtr& T, Tag want, const char* what) const {
    const TermPtr& p = peel_ann(T);
    if (p->tag == want) return p;
    if (!o_.strict) {
      ReductionTrace tr = normalize(strip_ann(T), o_.fuel);
      if (tr.exhausted)
        fail(ErrorCode::ConversionInconclusive,
             "fuel ran out normalizing " + show(e, T) + " (expected " + what + ")");
      if (tr.final->tag == want) return tr.final;
    }
    fail_with(ErrorCode::TypeMismatch, std::string("expected ") + what + ", got " + show(e, T),
              {{"expected", what}, {"got", show(e, T)}});
  }

  Out convert(const Env& e, Out o, const TermPtr& want) const {
    if (o.type == want) return o;
    switch (conv(o.type, want)) {
      case Conv::Equal: break;
      case Conv::Inconclusive:
        fail(ErrorCode::ConversionInconclusive,
             "cannot decide " + show(e, o.type) + " == " + show(e, want) + " within fuel");
      case Conv::Unequal:
        fail_with(ErrorCode::TypeMismatch, "expected " + show(e, want) + ", got " + show(e, o.type),
                  {{"expected", show(e, want)}, {"got", show(e, o.type)}});
    }
    if (!alpha_eq(strip_ann(o.type), strip_ann(want))) {
      Judgment j = o.d.conclusion;
      j.type = want;
      Derivation c{"glad-convert", std::move(j), {}, {}};
      c.premises.push_back(std::move(o.d));
      o.d = std::move(c);
    }
    o.type = want;
    return o;
  }

  static GradeVector drop(GradeVector v, std::size_t n) {
    v.resize(v.size() - n);
    return v;
  }

  GradeVector scale(const Grade& q, ModeId m, const Env& e, const GradeVector& d) const {
    return cross_scale(mt_, q, m, d, e.modes);
  }

  Judgment judgment(const Env& e, ModeId m, const GradeVector& use, const TermPtr& subj,
                    const TermPtr& ty) const {
    Judgment j;
    j.fragment = Fragment::Glad;
    j.delta = use;
    j.gctx = e.g;
    j.mode = mname(m);
    j.subject = subj;
    j.type = ty;
    return j;
  }

  Out node(const Env& e, ModeId m, const char* rule, const TermPtr& t, GradeVector use,
           TermPtr type, std::vector<Derivation> prem = {},
           std::vector<std::pair<std::string, std::string>> side = {}) const {
    below_ctx(e, m, &use);
    Out o{std::move(use), type, {}};
    o.d = Derivation{rule, judgment(e, m, o.use, t, type), std::move(prem), std::move(side)};
    return o;
  }

  // A bound variable the body never uses is weakened in at the body's mode n:
  // its own mode must admit weakening and sit at or above n.
  void gate(const std::string& name, ModeId m, const Grade& u, ModeId n) const {
    if (u.v != u.sr->zero()) return;
    if (!mt_.mode(m).weak)
      fail(ErrorCode::WeakeningForbidden,
           "'" + name + "' is unused but mode " + mname(m) + " does not admit weakening");
    if (!mt_.leq(n, m))
      fail(ErrorCode::ModeViolation, "judgment at mode " + mname(n) + " but '" + name +
                                         "' has mode " + mname(m));
  }

  std::string mode_of_type(const Env& e, const TermPtr& A, const std::string& amb) const {
    const TermPtr& p = peel_ann(A);
    switch (p->tag) {
      case Tag::UnitM: return p->mode;
      case Tag::Up: return p->mode2;
      case Tag::PiG:
      case Tag::TensorG:
        return mode_of_type(bind(e, "_", p->kids[0], mode(p->mode)), p->kids[1], amb);
      case Tag::Sum: return mode_of_type(e, p->kids[0], amb);
      case Tag::Var:
        if (p->zone == Zone::Graded && p->index < e.g.size())
          return e.g[e.g.size() - 1 - p->index].mode;
        return amb;
      default: return amb;
    }
  }

  // The mode a synthesizable term is judged at, read off its syntax.
  ModeId term_mode(const Env& e, const TermPtr& t, ModeId fallback) const {
    switch (t->tag) {
      case Tag::Var:
        if (t->zone == Zone::Graded && t->index < e.modes.size())
          return e.modes[e.modes.size() - 1 - t->index];
        return fallback;
      case Tag::StarM: return mode(t->mode);
      case Tag::Up: return mode(t->mode2);
      case Tag::Down: return mode(t->mode);
      case Tag::App: return term_mode(e, t->kids[0], fallback);
      case Tag::LetStarM: return term_mode(e, t->kids[1], fallback);
      case Tag::Ann: return mode(mode_of_type(e, t->kids[1], mname(fallback)));
      default: return fallback;
    }
  }

  // ------------------------------------------------------------- typing

  Out a(const Env& e, const TermPtr& t, ModeId n, const TermPtr& want) const {
    Out o;
    try {
      o = ai(e, t, n, want);
    } catch (Error& err) {
      err.set_rule(glad_rule(t->tag));
      throw;
    }
    if (want) o = convert(e, std::move(o), want);
    return o;
  }

  Out universe(const Env& e, const TermPtr& A, ModeId n) const {
    Out o = a(e, A, n, nullptr);
    TermPtr want = mk(Tag::TypeU);
    Conv c = conv(o.type, want);
    if (c == Conv::Inconclusive)
      fail(ErrorCode::ConversionInconclusive, "cannot decide the universe of " + show(e, A));
    if (c == Conv::Unequal)
      fail(ErrorCode::NotAType, show(e, A) + " : " + show(e, o.type) + ", expected Type");
    o.type = want;
    return o;
  }

  [[noreturn]] void missing(const Env& e, const TermPtr& t, const char* what) const {
    fail(ErrorCode::AnnotationMissing,
         std::string("cannot infer the type of ") + what + " " + show(e, t) +
             "; ascribe it with (t : T)");
  }

  Out ai(const Env& e, const TermPtr& t, ModeId n, const TermPtr& want) const {
    const auto& k = t->kids;
    switch (t->tag) {
      case Tag::Var: {
        if (t->zone == Zone::Linear || t->index >= e.g.size())
          fail(ErrorCode::UnboundVar, "unbound variable");
        std::size_t lvl = e.g.size() - 1 - t->index;
        same_mode(e.modes[lvl], n, "'" + e.g[lvl].name + "'");
        GradeVector use = zero_vec(e);
        use[lvl] = one_of(sr(n));
        return node(e, n, "glad-var", t, use, shift(e.g[lvl].type, int64_t(t->index) + 1));
      }
      case Tag::TypeU: return node(e, n, "glad-type", t, zero_vec(e), mk(Tag::TypeU));
      case Tag::UnitM:
        same_mode(mode(t->mode), n, "I@" + t->mode);
        return node(e, n, "glad-unit", t, zero_vec(e), mk(Tag::TypeU));
      case Tag::PiG:
      case Tag::TensorG: {
        ModeId m = mode(t->mode);
        if (!mt_.leq(n, m))
          fail(ErrorCode::ModeViolation, "a binder of mode " + mname(m) + " needs " + mname(n) +
                                             " <= " + mname(m));
        grade(t->grade, m);
        Out dom = universe(e, k[0], m);
        Out cod = universe(bind(e, hint(*t, 0, "x"), k[0], m), k[1], n);
        return node(e, n, glad_rule(t->tag), t, vec_add(dom.use, drop(cod.use, 1)),
                    mk(Tag::TypeU), {std::move(dom.d), std::move(cod.d)});
      }
      case Tag::Sum: {
        Out x = universe(e, k[0], n);
        Out y = universe(e, k[1], n);
        return node(e, n, "glad-coproduct", t, vec_add(x.use, y.use), mk(Tag::TypeU),
                    {std::move(x.d), std::move(y.d)});
      }
      case Tag::StarM:
        same_mode(mode(t->mode), n, "*@" + t->mode);
        return node(e, n, "glad-unitIntro", t, zero_vec(e), mk(Tag::UnitM, {}, {}, t->mode));
      case Tag::LetStarM: {
        ModeId m = mode(t->mode);
        Out s = a(e, k[0], m, mk(Tag::UnitM, {}, {}, t->mode));
        Out b = a(e, k[1], n, want);
        return node(e, n, "glad-unitElim", t, vec_add(s.use, b.use), b.type,
                    {std::move(s.d), std::move(b.d)});
      }
      case Tag::Lam: {
        if (!want) missing(e, t, "the lambda");
        TermPtr pi = shape(e, want, Tag::PiG, "a function type");
        ModeId m = mode(pi->mode);
        Grade q = grade(pi->grade, m);
        std::string x = hint(*t, 0, "x");
        Out b = a(bind(e, x, pi->kids[0], m), k[0], n, pi->kids[1]);
        Grade u = b.use.back();
        if (!leq(u, q))
          fail(ErrorCode::GradeMismatch,
               "'" + x + "' is used at " + u.show() + ", above the binder grade " + q.show());
        gate(x, m, u, n);
        return node(e, n, "glad-lambda", t, drop(b.use, 1), want, {std::move(b.d)},
                    {{"q", q.show()}});
      }
      case Tag::App: {
        Out c = a(e, k[0], n, nullptr);
        TermPtr pi = shape(e, c.type, Tag::PiG, "a function type");
        ModeId m = mode(pi->mode);
        Grade q = grade(pi->grade, m);
        Out b = a(e, k[1], m, pi->kids[0]);
        return node(e, n, "glad-app", t, vec_add(c.use, scale(q, m, e, b.use)),
                    subst_top(pi->kids[1], Zone::Graded, k[1]), {std::move(c.d), std::move(b.d)},
                    {{"q", q.show()}});
      }
      case Tag::Pair: {
        if (!want) missing(e, t, "the pair");
        TermPtr ten = shape(e, want, Tag::TensorG, "a tensor type");
        ModeId m = mode(ten->mode);
        Grade q = grade(ten->grade, m);
        Out b = a(e, k[0], m, ten->kids[0]);
        Out c = a(e, k[1], n, subst_top(ten->kids[1], Zone::Graded, k[0]));
        return node(e, n, "glad-tensorIntro", t, vec_add(scale(q, m, e, b.use), c.use), want,
                    {std::move(b.d), std::move(c.d)}, {{"q", q.show()}});
      }
      case Tag::LetPair: return tensor_elim(e, t, n, want);
      case Tag::Inl:
      case Tag::Inr: {
        if (!want) missing(e, t, "the injection");
        TermPtr sum = shape(e, want, Tag::Sum, "a coproduct type");
        Out b = a(e, k[0], n, sum->kids[t->tag == Tag::Inl ? 0 : 1]);
        return node(e, n, glad_rule(t->tag), t, b.use, want, {std::move(b.d)});
      }
      case Tag::Case: return case_rule(e, t, n, want);
      case Tag::Up: {
        ModeId m1 = mode(t->mode), m2 = mode(t->mode2);
        same_mode(m2, n, "up[" + t->mode + "->" + t->mode2 + "]");
        if (!mt_.leq(m1, m2))
          fail(ErrorCode::ModeViolation, "shift needs " + t->mode + " <= " + t->mode2);
        // As a type former, up[m1->m2] B is formed from B : Type at m1.
        bool former = want && peel_ann(want)->tag == Tag::TypeU;
        TermPtr inner = former ? want : nullptr;
        if (want && !former) inner = shape(e, want, Tag::Up, "an up-shifted type")->kids[0];
        Out b = a(e, k[0], m1, inner);
        bool is_type = former || (!want && conv(b.type, mk(Tag::TypeU)) == Conv::Equal);
        TermPtr type =
            want ? want : is_type ? mk(Tag::TypeU) : mk(Tag::Up, {b.type}, {}, t->mode, t->mode2);
        return node(e, n, is_type ? "glad-shiftUp" : "glad-raise", t, b.use, type,
                    {std::move(b.d)});
      }
      case Tag::Down: {
        ModeId m1 = mode(t->mode), m2 = mode(t->mode2);
        same_mode(m1, n, "down[" + t->mode + "->" + t->mode2 + "]");
        if (!mt_.leq(m1, m2))
          fail(ErrorCode::ModeViolation, "shift needs " + t->mode + " <= " + t->mode2);
        TermPtr up = want ? mk(Tag::Up, {want}, {}, t->mode, t->mode2) : nullptr;
        Out b = a(e, k[0], m2, up);
        TermPtr sh = shape(e, b.type, Tag::Up, "an up-shifted type");
        if (sh->mode != t->mode || sh->mode2 != t->mode2)
          fail(ErrorCode::ModeViolation, "down[" + t->mode + "->" + t->mode2 +
                                             "] applied to a term of type " + show(e, b.type));
        return node(e, n, "glad-unraise", t, b.use, want ? want : sh->kids[0], {std::move(b.d)});
      }
      case Tag::Ann: {
        Out x = universe(e, k[1], n);
        Out b = a(e, k[0], n, k[1]);
        return node(e, n, "glad-ann", t, b.use, k[1], {std::move(x.d), std::move(b.d)});
      }
      default:
        fail(ErrorCode::WrongFragment,
             std::string(tag_name(t->tag)) + " is not part of the GlaD syntax");
    }
  }

  Out tensor_elim(const Env& e, const TermPtr& t, ModeId l, const TermPtr& want) const {
    const auto& k = t->kids;
    ModeId m2 = term_mode(e, k[0], l);
    Out s = a(e, k[0], m2, nullptr);
    TermPtr ten = shape(e, s.type, Tag::TensorG, "a tensor type");
    ModeId m1 = mode(ten->mode);
    Grade q = grade(ten->grade, m1);
    if (!mt_.leq(m2, m1))
      fail(ErrorCode::ModeViolation, "tensor component at " + mname(m1) + " above a pair at " +
                                         mname(m2));
    std::string x = hint(*t, 0, "x"), y = hint(*t, 1, "y");
    Env e2 = bind(bind(e, x, ten->kids[0], m1), y, ten->kids[1], m2);
    Out b = a(e2, k[1], l, want ? shift(want, 2) : nullptr);
    TermPtr type = want;
    if (!type) {
      if (occurs_free(b.type, Zone::Graded, 0) || occurs_free(b.type, Zone::Graded, 1))
        fail(ErrorCode::TypeMismatch,
             "the result type " + show(e2, b.type) + " depends on the pattern variables");
      type = shift(b.type, -2);
    }
    std::size_t base = e.g.size();
    Grade u1 = b.use[base], u2 = b.use[base + 1];
    gate(x, m1, u1, l);
    gate(y, m2, u2, l);
    // Least s in R_m2 with u2 <= s and u1 <= s.q (s carried to m1).
    const Morphism& f = mt_.morphism(m2, m1);
    uint64_t bound = sr(m2).is_nat() ? std::max<uint64_t>({u1.v, u2.v, 1}) : 0;
    std::vector<Grade> ok;
    for (uint64_t v : sr(m2).enumerate(bound)) {
      Grade sg{&sr(m2), v};
      if (leq(u2, sg) && leq(u1, mul(apply_morphism(f, sg), q))) ok.push_back(sg);
    }
    const Grade* pick = nullptr;
    for (const Grade& c : ok) {
      bool least = true;
      for (const Grade& d : ok) least = least && leq(c, d);
      if (least) {
        pick = &c;
        break;
      }
    }
    if (!pick && !ok.empty()) pick = &ok.front();
    if (!pick)
      fail(ErrorCode::GradeMismatch, "no grade s with " + u2.show() + " <= s and " + u1.show() +
                                         " <= s." + q.show());
    Grade sg = *pick;
    return node(e, l, "glad-tensorElim", t, vec_add(scale(sg, m2, e, s.use), drop(b.use, 2)),
                type, {std::move(s.d), std::move(b.d)}, {{"s", sg.show()}});
  }

  Out case_rule(const Env& e, const TermPtr& t, ModeId n, const TermPtr& want) const {
    const auto& k = t->kids;
    ModeId m = term_mode(e, k[0], n);
    Out s = a(e, k[0], m, nullptr);
    TermPtr sum = shape(e, s.type, Tag::Sum, "a coproduct type");
    Grade q = grade(t->grade, m);
    if (!leq(one_of(sr(m)), q))
      fail(ErrorCode::GradeMismatch, "case grade " + q.show() + " is not at least 1");
    if (!mt_.leq(n, m))
      fail(ErrorCode::ModeViolation,
           "case at mode " + mname(n) + " on a scrutinee at " + mname(m));
    std::string qs = sr(m).show(q.v);
    auto branch_ty = [&](int i, const TermPtr& C) {
      return mk(Tag::PiG, {sum->kids[std::size_t(i)], shift(C, 1)}, qs, mname(m), {}, {"x"});
    };
    TermPtr C = want;
    Out b1;
    if (C) {
      b1 = a(e, k[1], n, branch_ty(0, C));
    } else {
      b1 = a(e, k[1], n, nullptr);
      TermPtr pi = shape(e, b1.type, Tag::PiG, "a function type");
      if (occurs_free(pi->kids[1], Zone::Graded, 0))
        fail(ErrorCode::TypeMismatch, "case branch result type depends on its argument");
      C = shift(pi->kids[1], -1);
      b1 = convert(e, std::move(b1), branch_ty(0, C));
    }
    Out b2 = a(e, k[2], n, branch_ty(1, C));
    GradeVector d2 = b1.use;
    std::vector<std::pair<std::string, std::string>> side = {{"q", q.show()}};
    if (!(b1.use == b2.use)) {
      for (std::size_t i = 0; i < d2.size(); ++i) {
        auto j = d2[i].sr->join(b1.use[i].v, b2.use[i].v);
        if (!j)
          fail(ErrorCode::GradeMismatch, "case branches use " + show_vector(b1.use) + " and " +
                                             show_vector(b2.use) + ", which have no join");
        d2[i].v = *j;
      }
      side.push_back({"join", show_vector(d2)});
    }
    return node(e, n, "glad-coproductElim", t, vec_add(scale(q, m, e, s.use), d2), C,
                {std::move(s.d), std::move(b1.d), std::move(b2.d)}, std::move(side));
  }

  // ------------------------------------------------------------ contexts

  Env env(const Ctx& ctx) const {
    Env e;
    for (const auto& h : ctx) {
      e.g.push_back(h);
      e.modes.push_back(mode(h.mode));
    }
    return e;
  }

  Derivation ctx(const GradeVector& delta, const Ctx& c) const {
    if (delta.size() != c.size())
      fail(ErrorCode::LengthMismatch, "grade vector " + show_vector(delta) + " has " +
                                          std::to_string(delta.size()) + " entries, context " +
                                          std::to_string(c.size()));
    Judgment j;
    j.fragment = Fragment::GladCtx;
    Derivation d{"ctx-empty", j, {}, {}};
    Env e;
    for (std::size_t i = 0; i < c.size(); ++i) {
      ModeId m = mode(c[i].mode);
      if (delta[i].sr != &sr(m))
        fail(ErrorCode::GradeModeMismatch, "grade " + delta[i].show() + " of '" + c[i].name +
                                               "' is not in the semiring of mode " + mname(m));
      for (const auto& h : e.g)
        if (h.name == c[i].name)
          fail(ErrorCode::DuplicateName, "'" + c[i].name + "' declared twice");
      Out wf;
      try {
        below_ctx(e, m);
        wf = universe(e, c[i].type, m);
      } catch (const Error& err) {
        fail(ErrorCode::TypeNotWF, "entry " + std::to_string(i) + " '" + c[i].name +
                                       "': " + err.what());
      }
      e = bind(e, c[i].name, c[i].type, m);
      j.gctx = e.g;
      j.delta.push_back(delta[i]);
      Derivation nd{"ctx-extend", j, {}, {}};
      nd.premises.push_back(std::move(d));
      nd.premises.push_back(std::move(wf.d));
      d = std::move(nd);
    }
    return d;
  }

  GradeVector zeros_for(const Ctx& c) const {
    GradeVector v;
    for (const auto& h : c) v.push_back(zero_of(sr(mode(h.mode))));
    return v;
  }

  void gate_ctx(const Env& e, const GradeVector& use, ModeId n) const {
    for (std::size_t i = 0; i < use.size(); ++i) gate(e.g[i].name, e.modes[i], use[i], n);
  }

 private:
  const ModeTheory& mt_;
  const CheckOptions& o_;
};

}  // namespace

GladChecker::GladChecker(const ModeTheory& mt, CheckOptions opts) : mt_(&mt), opts_(opts) {}

Derivation GladChecker::check_glad_ctx(const GradeVector& delta, const Ctx& ctx) const {
  return Gl(*mt_, opts_).ctx(delta, ctx);
}

TypeWF GladChecker::type_wf_glad(const Ctx& ctx, const std::string& mode,
                                 const TermPtr& A) const {
  Gl gl(*mt_, opts_);
  gl.ctx(gl.zeros_for(ctx), ctx);
  Env e = gl.env(ctx);
  gl.below_ctx(e, gl.mode(mode));
  Out o = gl.universe(e, A, gl.mode(mode));
  return {o.use, std::move(o.d)};
}

GladSynthesis GladChecker::infer_glad(const Ctx& ctx, const std::string& mode,
                                      const TermPtr& a, bool gate_unused) const {
  Gl gl(*mt_, opts_);
  gl.ctx(gl.zeros_for(ctx), ctx);
  Env e = gl.env(ctx);
  ModeId n = gl.mode(mode);
  if (gate_unused) gl.below_ctx(e, n);
  Out o = gl.a(e, a, n, nullptr);
  if (gate_unused) gl.gate_ctx(e, o.use, n);
  return {o.use, o.type, std::move(o.d)};
}

Derivation GladChecker::check_glad(const GradeVector& delta, const Ctx& ctx,
                                   const std::string& mode, const TermPtr& a,
                                   const TermPtr& A) const {
  Gl gl(*mt_, opts_);
  gl.ctx(delta, ctx);
  Env e = gl.env(ctx);
  ModeId n = gl.mode(mode);
  gl.below_ctx(e, n);
  Out wf = gl.universe(e, A, n);
  Out o = gl.a(e, a, n, A);
  try {
    gl.gate_ctx(e, o.use, n);
  } catch (Error& err) {
    err.set_rule("glad-weak");
    throw;
  }
  if (!vec_leq(o.use, delta))
    fail_with(ErrorCode::SubusageFailed,
              "synthesized usage " + show_vector(o.use) + " is not below the declared " +
                  show_vector(delta),
              {{"synthesized", show_vector(o.use)}, {"declared", show_vector(delta)}},
              "glad-subusage");
  Derivation d = std::move(o.d);
  if (!(o.use == delta)) {
    Judgment j = d.conclusion;
    j.delta = delta;
    Derivation s{"glad-subusage", std::move(j), {}, {}};
    s.premises.push_back(std::move(d));
    d = std::move(s);
  }
  d.side.push_back({"wf", show_vector(wf.use)});
  return d;
}

Derivation GladChecker::check(const Judgment& j) const {
  if (j.fragment == Fragment::Glad) return check_glad(j.delta, j.gctx, j.mode, j.subject, j.type);
  if (j.fragment == Fragment::GladCtx) return check_glad_ctx(j.delta, j.gctx);
  fail(ErrorCode::WrongFragment, "dmGL judgment given to the GlaD checker");
}

std::string GladChecker::mode_of_type(const Ctx& ctx, const TermPtr& A,
                                      const std::string& ambient) const {
  Gl gl(*mt_, opts_);
  return gl.mode_of_type(gl.env(ctx), A, ambient);
}

}  // namespace gradal
