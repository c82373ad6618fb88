#include "doctest.h"

#include <random>
#include <set>

#include "gradal/parser.hpp"
#include "gradal/reduction.hpp"

using namespace gradal;

namespace {

TermPtr G(const char* s, const Names& n = {}) { return parse_term(s, ParseMode::Graded, n); }
TermPtr L(const char* s, const Names& n = {}) { return parse_term(s, ParseMode::Linear, n); }
TermPtr D(const char* s, const Names& n = {}) { return parse_term(s, ParseMode::Glad, n); }

std::string P(const TermPtr& t, const Names& n = {}) { return print_term(t, n); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}
  int pick(int n) { return int(rng() % uint64_t(n)); }

  // Random graded term over `depth` bound variables, biased towards redexes.
  TermPtr term(uint32_t depth, int fuel) {
    if (fuel <= 0 || pick(5) == 0) {
      if (depth > 0 && pick(3) != 0) return gvar(uint32_t(pick(int(depth))));
      return mk(Tag::UnitJIntro);
    }
    const std::string q = pick(2) ? "1" : "2";
    switch (pick(9)) {
      case 0: return mk(Tag::Lam, {term(depth + 1, fuel - 1)}, {}, {}, {}, {"x"});
      case 1: return mk(Tag::App, {term(depth, fuel - 1), term(depth, fuel - 1)});
      case 2:
        return mk(Tag::App,
                  {mk(Tag::Lam, {term(depth + 1, fuel - 2)}, {}, {}, {}, {"x"}), term(depth, fuel - 1)});
      case 3: return mk(Tag::Pair, {term(depth, fuel - 1), term(depth, fuel - 1)});
      case 4:
        return mk(Tag::LetPair,
                  {mk(Tag::Pair, {term(depth, fuel - 2), term(depth, fuel - 2)}),
                   term(depth + 2, fuel - 1)},
                  {}, {}, {}, {"x", "y"});
      case 5: return mk(Tag::LetJ, {pick(2) ? mk(Tag::UnitJIntro) : term(depth, fuel - 1),
                                    term(depth, fuel - 1)});
      case 6:
        return mk(Tag::Case, {mk(pick(2) ? Tag::Inl : Tag::Inr, {term(depth, fuel - 2)}),
                              term(depth, fuel - 1), term(depth, fuel - 1)}, q);
      case 7: return mk(Tag::Inl, {term(depth, fuel - 1)});
      default:
        return mk(Tag::Pi, {mk(Tag::UnitJ), term(depth + 1, fuel - 1)}, q, {}, {}, {"x"});
    }
  }
};

void grades(const TermPtr& t, std::multiset<std::string>& out) {
  if (!t->grade.empty()) out.insert(t->grade);
  for (auto& k : t->kids) grades(k, out);
}

}  // namespace

TEST_CASE("graded beta rules") {
  auto s = step(G("let j = j in j"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-unitBeta");
  CHECK(P(s->after) == "j");

  Names n{{"z"}, {}};
  s = step(G("(\\x. (x, x)) z", n));
  REQUIRE(s);
  CHECK(s->rule == "gRED-lambda");
  CHECK(alpha_eq(s->after, G("(z, z)", n)));

  s = step(G("let (x, y) = (j, J) in (y, x)"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-pairBeta");
  CHECK(alpha_eq(s->after, G("(J, j)")));

  s = step(G("case^1 inl j of \\a. (a, J); \\b. b"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-coproductBetaLeft");
  CHECK(alpha_eq(s->after, G("(\\a. (a, J)) j")));

  s = step(G("case^1 inr J of \\a. a; \\b. (j, b)"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-coproductBetaRight");
  CHECK(alpha_eq(s->after, G("(\\b. (j, b)) J")));

  s = step(G("(let j = j in \\x. x) J"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-appL");
  CHECK(s->base == "gRED-unitBeta");
  CHECK(alpha_eq(s->after, G("(\\x. x) J")));
}

TEST_CASE("mixed beta rules") {
  Names n{{"t"}, {"u", "v"}};
  auto s = step(L("let i = i in v", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-unitBeta");
  CHECK(alpha_eq(s->after, L("v", n)));

  s = step(L("let (a, b) = (u, v) in (b, a)", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-tensorBeta");
  CHECK(alpha_eq(s->after, L("(v, u)", n)));

  s = step(L("let F(x, y) = F(t, u) in F(x, y)", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-ladjBeta");
  CHECK(alpha_eq(s->after, L("F(t, u)", n)));

  s = step(L("Ginv (Gi v)", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-radjBeta");
  CHECK(alpha_eq(s->after, L("v", n)));

  s = step(L("(\\a. (a, v)) u", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-lambda");
  CHECK(alpha_eq(s->after, L("(u, v)", n)));

  s = step(L("(let i = i in \\a. a) u", n));
  REQUIRE(s);
  CHECK(s->rule == "mRED-appL");
  CHECK(alpha_eq(s->after, L("(\\a. a) u", n)));
}

TEST_CASE("glad reuses the graded rules") {
  auto s = step(D("let *@L = *@L in *@L"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-unitBeta");
  s = step(D("let (x, y) = (*@L, *@M) in (y, x)"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-pairBeta");
  CHECK(alpha_eq(s->after, D("(*@M, *@L)")));
}

TEST_CASE("ascriptions are looked through and carried") {
  auto s = step(G("((\\x. x) : (x :^1 J) -> J) j"));
  REQUIRE(s);
  CHECK(s->rule == "gRED-lambda");
  // Result and argument ascriptions coincide and collapse into one.
  CHECK(alpha_eq(s->after, G("(j : J)")));

  // The codomain is instantiated with the argument.
  Names n{{"A"}, {}};
  s = step(G("((\\x. x) : (x :^1 Type) -> Type) J", n));
  REQUIRE(s);
  CHECK(alpha_eq(s->after, G("(J : Type)", n)));

  s = step(G("let (a, b) = ((j, j) : (x :^1 J) >< J) in b"));
  REQUIRE(s);
  CHECK(alpha_eq(s->after, G("(j : J)")));

  s = step(G("case^1 (inl j : J (+) Type) of \\a. a; \\b. b"));
  REQUIRE(s);
  CHECK(alpha_eq(s->after, G("(\\a. a) (j : J)")));

  CHECK(conv_equiv(G("((\\x. x) : (x :^1 J) -> J) j"), G("j"), 100) == Conv::Equal);
}

TEST_CASE("normalize") {
  auto tr = normalize(G("j"), 5);
  CHECK(tr.steps.empty());
  CHECK_FALSE(tr.exhausted);

  tr = normalize(G("let (x, y) = (j, j) in (y, x)"), 10);
  CHECK(tr.steps.size() == 1);
  CHECK(tr.steps[0].rule == "gRED-pairBeta");
  CHECK(alpha_eq(tr.final, G("(j, j)")));

  tr = normalize(G("(\\x. x x) (\\x. x x)"), 50);
  CHECK(tr.exhausted);
  CHECK(tr.steps.size() == 50);
  for (auto& s : tr.steps) CHECK(s.rule == "gRED-lambda");

  // Leftmost-outermost reaches a normal form that innermost-first would miss.
  tr = normalize(G("(\\x. j) ((\\x. x x) (\\x. x x))"), 50);
  CHECK_FALSE(tr.exhausted);
  CHECK(P(tr.final) == "j");

  // Reduction under binders.
  tr = normalize(G("\\z. (\\x. x) z"), 10);
  CHECK(alpha_eq(tr.final, G("\\z. z")));
}

TEST_CASE("trace rendering") {
  auto tr = normalize(G("let j = j in j"), 10);
  CHECK(render_trace(tr) == "gRED-unitBeta\t.\tlet j = j in j\tj\nnormal\tj\n");
  tr = normalize(G("(\\x. x x) (\\x. x x)"), 1);
  CHECK(render_trace(tr) ==
        "gRED-lambda\t.\t(\\x. x x) (\\x. x x)\t(\\x. x x) (\\x. x x)\n"
        "exhausted\t(\\x. x x) (\\x. x x)\n");
}

TEST_CASE("conv_equiv") {
  CHECK(conv_equiv(G("\\x. (x, j)"), G("\\y. (y, j)"), 10) == Conv::Equal);
  CHECK(conv_equiv(G("(\\x. x) j"), G("j"), 10) == Conv::Equal);
  CHECK(conv_equiv(G("j"), G("(j, j)"), 10) == Conv::Unequal);
  CHECK(conv_equiv(G("(\\x. x x) (\\x. x x)"), G("j"), 100) == Conv::Inconclusive);
  // Grades are part of the comparison.
  CHECK(conv_equiv(G("(x :^1 J) -> J"), G("(x :^2 J) -> J"), 10) == Conv::Unequal);
  // Ascriptions do not matter.
  CHECK(conv_equiv(G("(j : J)"), G("j"), 10) == Conv::Equal);
}

TEST_CASE("redex enumeration and positions") {
  auto t = G("((\\x. x) j, let j = j in j)");
  auto rs = redexes(t);
  REQUIRE(rs.size() == 2);
  CHECK(path_str(rs[0].path) == "0");
  CHECK(rs[0].rule == "gRED-lambda");
  CHECK(path_str(rs[1].path) == "1");
  CHECK(rs[1].rule == "gRED-unitBeta");
  auto s = step_at(t, rs[1].path);
  REQUIRE(s);
  CHECK(alpha_eq(s->after, G("((\\x. x) j, j)")));
  CHECK_FALSE(step_at(t, {}));
}

TEST_CASE("property: no grade annotation is invented by a step") {
  Gen g(7);
  int fired = 0;
  for (int i = 0; i < 500; ++i) {
    TermPtr t = g.term(2, 6);
    REQUIRE(well_scoped(t, 2));
    for (auto& r : redexes(t)) {
      auto s = step_at(t, r.path);
      REQUIRE(s);
      REQUIRE(well_scoped(s->after, 2));
      std::multiset<std::string> before, after;
      grades(t, before);
      grades(s->after, after);
      for (auto& q : after) CHECK(before.count(q) > 0);
      ++fired;
    }
  }
  CHECK(fired > 100);
}

TEST_CASE("property: step is deterministic") {
  Gen g(11);
  for (int i = 0; i < 200; ++i) {
    TermPtr t = g.term(1, 6);
    auto a = normalize(t, 200), b = normalize(t, 200);
    CHECK(render_trace(a) == render_trace(b));
  }
}

TEST_CASE("property: conversion is a congruence") {
  Gen g(13);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    // t1 and t2 are convertible: t2 is a beta-expansion of t1.
    TermPtr t1 = g.term(1, 4);
    TermPtr t2 = mk(Tag::App, {mk(Tag::Lam, {gvar(0)}, {}, {}, {}, {"w"}), t1});
    if (g.pick(2)) t2 = mk(Tag::LetJ, {mk(Tag::UnitJIntro), t2});
    REQUIRE(conv_equiv(t1, t2, 1000) == Conv::Equal);

    // A one-hole context: a random term with one subterm replaced.
    TermPtr c = g.term(1, 5);
    Path p;
    uint32_t under = 0;
    const Term* cur = c.get();
    while (!cur->kids.empty() && g.pick(3) != 0) {
      int k = g.pick(int(cur->kids.size()));
      under += binds(cur->tag, std::size_t(k)).graded;
      p.push_back(k);
      cur = cur->kids[std::size_t(k)].get();
    }
    TermPtr c1 = replace_at(c, p, shift(t1, under));
    TermPtr c2 = replace_at(c, p, shift(t2, under));
    Conv r = conv_equiv(c1, c2, 2000);
    if (r == Conv::Inconclusive) continue;  // the context itself may loop
    CHECK(r == Conv::Equal);
    ++checked;
  }
  CHECK(checked > 200);
}
