#include "gradal/syntax.hpp"

namespace gradal {

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Var: return "Var";
    case Tag::TypeU: return "Type";
    case Tag::LinearU: return "Linear";
    case Tag::UnitJ: return "J";
    case Tag::Pi: return "Pi";
    case Tag::Sigma: return "Sigma";
    case Tag::Sum: return "Sum";
    case Tag::GAdj: return "G";
    case Tag::UnitJIntro: return "j";
    case Tag::LetJ: return "LetJ";
    case Tag::Pair: return "Pair";
    case Tag::LetPair: return "LetPair";
    case Tag::Inl: return "Inl";
    case Tag::Inr: return "Inr";
    case Tag::Case: return "Case";
    case Tag::Lam: return "Lam";
    case Tag::App: return "App";
    case Tag::GIntro: return "Gi";
    case Tag::UnitI: return "I";
    case Tag::Lollipop: return "Lollipop";
    case Tag::Tensor: return "Tensor";
    case Tag::FType: return "F";
    case Tag::UnitIIntro: return "i";
    case Tag::LetI: return "LetI";
    case Tag::LamLin: return "LamLin";
    case Tag::AppLin: return "AppLin";
    case Tag::TensorPair: return "TensorPair";
    case Tag::LetTensor: return "LetTensor";
    case Tag::FPair: return "FPair";
    case Tag::LetF: return "LetF";
    case Tag::GInv: return "Ginv";
    case Tag::UnitM: return "I@";
    case Tag::StarM: return "*@";
    case Tag::LetStarM: return "LetStar";
    case Tag::PiG: return "PiG";
    case Tag::TensorG: return "TensorG";
    case Tag::Up: return "Up";
    case Tag::Down: return "Down";
    case Tag::Ann: return "Ann";
  }
  return "?";
}

const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::Graded: return "graded";
    case Fragment::Mixed: return "mixed";
    case Fragment::Glad: return "glad";
    case Fragment::GradedCtx: return "graded-ctx";
    case Fragment::MixedCtx: return "mixed-ctx";
    case Fragment::GladCtx: return "glad-ctx";
  }
  return "?";
}

Binds binds(Tag tag, std::size_t k) {
  switch (tag) {
    case Tag::Pi:
    case Tag::Sigma:
    case Tag::FType:
    case Tag::PiG:
    case Tag::TensorG:
      return k == 1 ? Binds{1, 0} : Binds{};
    case Tag::Lam: return Binds{1, 0};
    case Tag::LamLin: return Binds{0, 1};
    case Tag::LetPair: return k == 1 ? Binds{2, 0} : Binds{};
    case Tag::LetTensor: return k == 1 ? Binds{0, 2} : Binds{};
    case Tag::LetF: return k == 1 ? Binds{1, 1} : Binds{};
    default: return Binds{};
  }
}

TermPtr mk(Tag tag, std::vector<TermPtr> kids, std::string grade, std::string mode,
           std::string mode2, std::vector<std::string> names) {
  auto t = std::make_shared<Term>();
  t->tag = tag;
  t->kids = std::move(kids);
  t->grade = std::move(grade);
  t->mode = std::move(mode);
  t->mode2 = std::move(mode2);
  t->names = std::move(names);
  return t;
}

TermPtr var(Zone z, uint32_t index) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Var;
  t->zone = z;
  t->index = index;
  return t;
}

TermPtr gvar(uint32_t index) { return var(Zone::Graded, index); }
TermPtr lvar(uint32_t index) { return var(Zone::Linear, index); }

TermPtr with_kids(const Term& t, std::vector<TermPtr> kids) {
  auto n = std::make_shared<Term>(t);
  n->kids = std::move(kids);
  return n;
}

namespace {

template <class Leaf>
TermPtr rebuild(const TermPtr& t, uint32_t dg, uint32_t dl, const Leaf& leaf) {
  if (t->tag == Tag::Var) {
    TermPtr r = leaf(*t, dg, dl);  // null means unchanged
    return r ? r : t;
  }
  if (t->kids.empty()) return t;
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (std::size_t k = 0; k < t->kids.size(); ++k) {
    Binds b = binds(t->tag, k);
    kids.push_back(rebuild(t->kids[k], dg + b.graded, dl + b.linear, leaf));
    changed |= kids.back() != t->kids[k];
  }
  return changed ? with_kids(*t, std::move(kids)) : t;
}

}  // namespace

TermPtr shift(const TermPtr& t, int64_t dg, int64_t dl, uint32_t cut_g, uint32_t cut_l) {
  if (dg == 0 && dl == 0) return t;
  return rebuild(t, cut_g, cut_l, [&](const Term& v, uint32_t cg, uint32_t cl) -> TermPtr {
    int64_t d = v.zone == Zone::Graded ? dg : dl;
    uint32_t cut = v.zone == Zone::Graded ? cg : cl;
    if (v.index < cut || d == 0) return nullptr;
    int64_t ni = int64_t(v.index) + d;
    if (ni < 0) ni = 0;  // only reachable on ill-scoped input
    return var(v.zone, uint32_t(ni));
  });
}

TermPtr map_free(const TermPtr& t, const VarMap& f) {
  return rebuild(t, 0, 0, [&](const Term& v, uint32_t dg, uint32_t dl) -> TermPtr {
    uint32_t depth = v.zone == Zone::Graded ? dg : dl;
    if (v.index < depth) return nullptr;
    TermPtr r = f(v.zone, v.index - depth);
    if (!r) return nullptr;
    return shift(r, dg, dl);
  });
}

TermPtr subst(const TermPtr& t, Zone z, uint32_t j, const TermPtr& s) {
  return map_free(t, [&](Zone vz, uint32_t i) -> TermPtr {
    if (vz != z || i < j) return var(vz, i);
    if (i == j) return s;
    return var(vz, i - 1);
  });
}

TermPtr subst_top(const TermPtr& body, Zone z, const TermPtr& s) { return subst(body, z, 0, s); }

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->tag != b->tag) return false;
  if (a->tag == Tag::Var) return a->zone == b->zone && a->index == b->index;
  if (a->grade != b->grade || a->mode != b->mode || a->mode2 != b->mode2) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t k = 0; k < a->kids.size(); ++k)
    if (!alpha_eq(a->kids[k], b->kids[k])) return false;
  return true;
}

namespace {

template <class F>
void walk_free(const TermPtr& t, uint32_t dg, uint32_t dl, const F& f) {
  if (t->tag == Tag::Var) {
    uint32_t depth = t->zone == Zone::Graded ? dg : dl;
    if (t->index >= depth) f(t->zone, t->index - depth);
    return;
  }
  for (std::size_t k = 0; k < t->kids.size(); ++k) {
    Binds b = binds(t->tag, k);
    walk_free(t->kids[k], dg + b.graded, dl + b.linear, f);
  }
}

}  // namespace

bool well_scoped(const TermPtr& t, uint32_t depth_g, uint32_t depth_l) {
  bool ok = true;
  walk_free(t, 0, 0, [&](Zone z, uint32_t i) {
    if (i >= (z == Zone::Graded ? depth_g : depth_l)) ok = false;
  });
  return ok;
}

std::set<uint32_t> free_vars(const TermPtr& t, Zone z) {
  std::set<uint32_t> out;
  walk_free(t, 0, 0, [&](Zone vz, uint32_t i) {
    if (vz == z) out.insert(i);
  });
  return out;
}

bool occurs_free(const TermPtr& t, Zone z, uint32_t j) {
  bool found = false;
  walk_free(t, 0, 0, [&](Zone vz, uint32_t i) { found |= vz == z && i == j; });
  return found;
}

std::size_t term_size(const TermPtr& t) {
  std::size_t n = 1;
  for (const auto& k : t->kids) n += term_size(k);
  return n;
}

TermPtr strip_ann(const TermPtr& t) {
  if (t->tag == Tag::Ann) return strip_ann(t->kids[0]);
  if (t->kids.empty()) return t;
  std::vector<TermPtr> kids;
  bool changed = false;
  for (const auto& k : t->kids) {
    kids.push_back(strip_ann(k));
    changed |= kids.back() != k;
  }
  return changed ? with_kids(*t, std::move(kids)) : t;
}

const TermPtr& peel_ann(const TermPtr& t) {
  const TermPtr* p = &t;
  while ((*p)->tag == Tag::Ann) p = &(*p)->kids[0];
  return *p;
}

Ctx subst_context(const Ctx& suffix, const TermPtr& t0) {
  Ctx out;
  out.reserve(suffix.size());
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    Hyp h = suffix[i];
    h.type = subst(h.type, Zone::Graded, uint32_t(i), shift(t0, int64_t(i)));
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace gradal
