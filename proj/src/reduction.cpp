#include "gradal/reduction.hpp"

#include <cstdlib>
#include <functional>

namespace gradal {

namespace {

TermPtr ann(const TermPtr& t, const TermPtr& ty) {
  if (!ty) return t;
  // An identical ascription already in place adds nothing.
  if (t->tag == Tag::Ann && alpha_eq(t->kids[1], ty)) return t;
  return mk(Tag::Ann, {t, ty});
}

// Outermost ascription type of t (peeled), or null.
TermPtr ann_type(const TermPtr& t) {
  if (t->tag != Tag::Ann) return nullptr;
  return peel_ann(t->kids[1]);
}

// The ascribed type with the expected head, looking through redexes in the
// annotation itself with a small budget.
TermPtr shaped(const TermPtr& ty, Tag want) {
  if (!ty) return nullptr;
  if (ty->tag == want) return ty;
  ReductionTrace tr = normalize(strip_ann(ty), 256);
  if (!tr.exhausted && tr.final->tag == want) return tr.final;
  return nullptr;
}

// body lives under two binders of zone z (first then second); returns
// [a/first][b/second]body. Both a and b are in the outer context.
TermPtr subst2(const TermPtr& body, Zone z, const TermPtr& a, const TermPtr& b) {
  TermPtr t = subst(body, z, 0, z == Zone::Graded ? shift(b, 1) : shift(b, 0, 1));
  return subst(t, z, 0, a);
}

}  // namespace

std::optional<std::pair<TermPtr, std::string>> contract(const TermPtr& t) {
  using R = std::pair<TermPtr, std::string>;
  const auto& k = t->kids;
  switch (t->tag) {
    case Tag::LetJ:
      if (peel_ann(k[0])->tag == Tag::UnitJIntro) return R{k[1], "gRED-unitBeta"};
      return std::nullopt;
    case Tag::LetStarM:
      if (peel_ann(k[0])->tag == Tag::StarM) return R{k[1], "gRED-unitBeta"};
      return std::nullopt;
    case Tag::LetI:
      if (peel_ann(k[0])->tag == Tag::UnitIIntro) return R{k[1], "mRED-unitBeta"};
      return std::nullopt;
    case Tag::LetPair: {
      const TermPtr& p = peel_ann(k[0]);
      if (p->tag != Tag::Pair) return std::nullopt;
      TermPtr a = p->kids[0], b = p->kids[1];
      TermPtr ty = ann_type(k[0]);
      TermPtr sig = shaped(ty, Tag::Sigma);
      if (!sig) sig = shaped(ty, Tag::TensorG);
      if (sig) {
        TermPtr bt = subst_top(sig->kids[1], Zone::Graded, a);
        a = ann(a, sig->kids[0]);
        b = ann(b, bt);
      }
      return R{subst2(k[1], Zone::Graded, a, b), "gRED-pairBeta"};
    }
    case Tag::LetTensor: {
      const TermPtr& p = peel_ann(k[0]);
      if (p->tag != Tag::TensorPair) return std::nullopt;
      TermPtr a = p->kids[0], b = p->kids[1];
      if (TermPtr ten = shaped(ann_type(k[0]), Tag::Tensor)) {
        a = ann(a, ten->kids[0]);
        b = ann(b, ten->kids[1]);
      }
      return R{subst2(k[1], Zone::Linear, a, b), "mRED-tensorBeta"};
    }
    case Tag::LetF: {
      const TermPtr& p = peel_ann(k[0]);
      if (p->tag != Tag::FPair) return std::nullopt;
      TermPtr a = p->kids[0], l = p->kids[1];
      if (TermPtr f = shaped(ann_type(k[0]), Tag::FType)) {
        TermPtr lt = subst_top(f->kids[1], Zone::Graded, a);
        a = ann(a, f->kids[0]);
        l = ann(l, lt);
      }
      // Body binds x (graded) and y (linear); the zones are independent.
      TermPtr body = subst(k[1], Zone::Linear, 0, shift(l, 1, 0));
      return R{subst(body, Zone::Graded, 0, a), "mRED-ladjBeta"};
    }
    case Tag::GInv: {
      const TermPtr& g = peel_ann(k[0]);
      if (g->tag != Tag::GIntro) return std::nullopt;
      TermPtr l = g->kids[0];
      if (TermPtr ga = shaped(ann_type(k[0]), Tag::GAdj)) l = ann(l, ga->kids[0]);
      return R{l, "mRED-radjBeta"};
    }
    case Tag::Case: {
      const TermPtr& s = peel_ann(k[0]);
      if (s->tag != Tag::Inl && s->tag != Tag::Inr) return std::nullopt;
      bool left = s->tag == Tag::Inl;
      TermPtr a = s->kids[0];
      if (TermPtr sum = shaped(ann_type(k[0]), Tag::Sum)) a = ann(a, sum->kids[left ? 0 : 1]);
      return R{mk(Tag::App, {k[left ? 1 : 2], a}),
               left ? "gRED-coproductBetaLeft" : "gRED-coproductBetaRight"};
    }
    case Tag::App:
    case Tag::AppLin: {
      bool lin = t->tag == Tag::AppLin;
      const TermPtr& f = peel_ann(k[0]);
      if (f->tag != (lin ? Tag::LamLin : Tag::Lam)) return std::nullopt;
      TermPtr arg = k[1];
      TermPtr ty = ann_type(k[0]);
      TermPtr res_ty;
      if (lin) {
        if (TermPtr lo = shaped(ty, Tag::Lollipop)) {
          arg = ann(arg, lo->kids[0]);
          res_ty = lo->kids[1];
        }
        return R{ann(subst_top(f->kids[0], Zone::Linear, arg), res_ty), "mRED-lambda"};
      }
      TermPtr pi = shaped(ty, Tag::Pi);
      if (!pi) pi = shaped(ty, Tag::PiG);
      if (pi) {
        res_ty = subst_top(pi->kids[1], Zone::Graded, arg);
        arg = ann(arg, pi->kids[0]);
      }
      return R{ann(subst_top(f->kids[0], Zone::Graded, arg), res_ty), "gRED-lambda"};
    }
    default: return std::nullopt;
  }
}

namespace {

void collect(const TermPtr& t, Path& p, std::vector<Redex>& out) {
  if (auto r = contract(t)) out.push_back({p, r->second});
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    p.push_back(int(i));
    collect(t->kids[i], p, out);
    p.pop_back();
  }
}

bool first(const TermPtr& t, Path& p) {
  if (contract(t)) return true;
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    p.push_back(int(i));
    if (first(t->kids[i], p)) return true;
    p.pop_back();
  }
  return false;
}

std::string label(const TermPtr& root, const Path& p, const std::string& base) {
  if (!p.empty() && p[0] == 0 && (root->tag == Tag::App || root->tag == Tag::AppLin))
    return root->tag == Tag::AppLin ? "mRED-appL" : "gRED-appL";
  return base;
}

}  // namespace

std::vector<Redex> redexes(const TermPtr& t) {
  std::vector<Redex> out;
  Path p;
  collect(t, p, out);
  return out;
}

const TermPtr& subterm_at(const TermPtr& t, const Path& p) {
  const TermPtr* cur = &t;
  for (int i : p) cur = &(*cur)->kids.at(std::size_t(i));
  return *cur;
}

TermPtr replace_at(const TermPtr& t, const Path& p, const TermPtr& with) {
  std::function<TermPtr(const TermPtr&, std::size_t)> go = [&](const TermPtr& cur,
                                                                std::size_t d) -> TermPtr {
    if (d == p.size()) return with;
    std::vector<TermPtr> kids = cur->kids;
    kids.at(std::size_t(p[d])) = go(cur->kids[std::size_t(p[d])], d + 1);
    return with_kids(*cur, std::move(kids));
  };
  return go(t, 0);
}

std::optional<Step> step_at(const TermPtr& t, const Path& p) {
  auto r = contract(subterm_at(t, p));
  if (!r) return std::nullopt;
  Step s;
  s.base = r->second;
  s.rule = label(t, p, s.base);
  s.path = p;
  s.before = t;
  s.after = replace_at(t, p, r->first);
  return s;
}

std::optional<Step> step(const TermPtr& t) {
  Path p;
  if (!first(t, p)) return std::nullopt;
  return step_at(t, p);
}

ReductionTrace normalize(const TermPtr& t, uint64_t fuel) {
  ReductionTrace tr;
  TermPtr cur = t;
  for (;;) {
    Path p;
    if (!first(cur, p)) break;
    if (tr.steps.size() >= fuel) {
      tr.exhausted = true;
      break;
    }
    Step s = *step_at(cur, p);
    cur = s.after;
    tr.steps.push_back(std::move(s));
  }
  tr.final = cur;
  return tr;
}

namespace {

// Normal form only, without recording the trace.
std::optional<TermPtr> nf(const TermPtr& t, uint64_t fuel) {
  TermPtr cur = t;
  for (uint64_t n = 0;; ++n) {
    Path p;
    if (!first(cur, p)) return cur;
    if (n >= fuel) return std::nullopt;
    cur = replace_at(cur, p, contract(subterm_at(cur, p))->first);
  }
}

}  // namespace

Conv conv_equiv(const TermPtr& a, const TermPtr& b, uint64_t fuel) {
  TermPtr sa = strip_ann(a), sb = strip_ann(b);
  if (alpha_eq(sa, sb)) return Conv::Equal;
  auto na = nf(sa, fuel);
  auto nb = nf(sb, fuel);
  if (!na || !nb) return Conv::Inconclusive;
  return alpha_eq(*na, *nb) ? Conv::Equal : Conv::Unequal;
}

uint64_t default_fuel() {
  if (const char* env = std::getenv("GRADAL_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return kDefaultFuel;
}

std::string path_str(const Path& p) {
  if (p.empty()) return ".";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(p[i]);
  }
  return s;
}

std::string render_trace(const ReductionTrace& tr, const Names& scope) {
  std::string out;
  for (const auto& s : tr.steps)
    out += s.rule + "\t" + path_str(s.path) + "\t" + print_term(s.before, scope) + "\t" +
           print_term(s.after, scope) + "\n";
  out += std::string(tr.exhausted ? "exhausted" : "normal") + "\t" + print_term(tr.final, scope) +
         "\n";
  return out;
}

}  // namespace gradal
