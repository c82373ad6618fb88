#include <doctest.h>

#include <algorithm>
#include <iostream>

#include "gradal/config.hpp"
#include "gradal/frontend.hpp"
#include "gradal/parser.hpp"
#include "gradal/printer.hpp"

using namespace gradal;

namespace {

ModuleReport run(const std::string& text, CheckOptions opts = {}) {
  SourceModule m = parse_module(text, "t.gr");
  Instance inst = resolve_instance(m);
  ModuleReport r = check_module(m, inst, opts);
  if (!r.ok()) std::cerr << render_failures(r);
  return r;
}

// Every item meets its expectation.
void expect_all(const std::string& text) {
  ModuleReport r = run(text);
  CHECK(r.ok());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Overflow;
}

const Semiring& sr_named(const std::string& cfg) {
  static std::vector<std::shared_ptr<Registry>> keep;
  keep.push_back(load_config(cfg));
  return *keep.back()->default_semiring();
}

TermPtr G(const std::string& s, const Names& n = {}) { return parse_term(s, ParseMode::Graded, n); }
TermPtr L(const std::string& s, const Names& n = {}) { return parse_term(s, ParseMode::Linear, n); }

GradeVector vec(const Semiring& sr, std::initializer_list<const char*> gs) {
  GradeVector v;
  for (const char* g : gs) v.push_back(grade_of(sr, g));
  return v;
}

}  // namespace

TEST_CASE("graded contexts") {
  expect_all(R"(
config nat;
judge ctx graded ;
judge ctx graded x :^1 J;
expect reject DuplicateName;
judge ctx graded x :^0 J, x :^0 J;
expect reject TypeNotWF;
judge ctx graded x :^0 j;
judge ctx graded A :^0 Type, a :^1 A;
)");
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  Ctx d{{"x", G("J"), {}}};
  CHECK(code_of([&] { c.check_graded_ctx({}, d); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("mixed contexts") {
  expect_all(R"(
config nat;
judge ctx mixed x :^0 J ; ;
judge ctx mixed x :^3 J ; y : I;
judge ctx mixed ; y : I, z : I -o I;
expect reject DuplicateName;
judge ctx mixed x :^0 J ; x : I;
expect reject LinearTypeNotWF;
judge ctx mixed ; y : J;
)");
}

TEST_CASE("type formation") {
  expect_all(R"(
config nat;
judge type graded |- J;
judge type graded |- (x :^1 J) -> J;
expect reject NotAType;
judge type graded |- j;
judge type linear |- I;
judge type linear |- I -o I;
judge type linear x :^0 J |- F(y :^1 J). I;
judge type graded |- G (I (x) I);
judge type graded A :^0 Type |- (x :^2 A) >< A;
)");
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  TypeWF w = c.type_wf_graded({}, G("J"));
  CHECK(w.witness.empty());
  CHECK(w.derivation.rule == "G-unit");
}

TEST_CASE("graded typing: worked examples") {
  expect_all(R"(
config nat;
judge graded x :^1 J |- x : J;
judge graded x :^5 J |- x : J;
graded def id : (x :^1 J) -> J = \x. x;
expect reject AnnotationMissing;
graded def bad : J = (\x. x, j) j;
graded def beta : J = (\x. x) j;
judge graded x :^1 J |- let j = x in j : J;
)");
  expect_all(R"(
config nat-trivial-order;
expect reject SubusageFailed;
judge graded x :^5 J |- x : J;
judge graded x :^1 J |- x : J;
)");
}

TEST_CASE("graded synthesis values") {
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  Ctx d{{"x", G("J"), {}}};
  Names n = names_of(d);

  GradeSynthesis s = c.infer_graded(d, G("x", n));
  CHECK(show_vector(s.usage) == "(1)");
  CHECK(print_term(s.type) == "J");
  CHECK(s.derivation.rule == "G-var");

  s = c.infer_graded(d, G("let j = x in j", n));
  CHECK(show_vector(s.usage) == "(1)");

  CHECK(code_of([&] { c.infer_graded({}, G("\\x. x")); }) == ErrorCode::AnnotationMissing);
  s = c.infer_graded({}, G("(\\x. x : (x :^1 J) -> J)"));
  CHECK(s.usage.empty());

  // G-app: d1 + r.d2 with r = 3.
  Ctx fx{{"f", G("(y :^3 J) -> J"), {}}, {"x", G("J"), {}}};
  s = c.infer_graded(fx, G("f x", names_of(fx)));
  CHECK(show_vector(s.usage) == "(1, 3)");

  // G-gradedPairIntro: r.d1 + d2.
  s = c.infer_graded(d, G("((x, x) : (y :^2 J) >< J)", n));
  CHECK(show_vector(s.usage) == "(3)");

  // G-coproductElim: q.d1 + d2.
  Ctx sx{{"s", G("J (+) J"), {}}, {"x", G("J"), {}}};
  s = c.infer_graded(sx, G("(case^2 s of (\\a. x : (a :^2 J) -> J); (\\b. x : (b :^2 J) -> J))",
                           names_of(sx)));
  CHECK(show_vector(s.usage) == "(2, 1)");
}

TEST_CASE("graded rejections") {
  expect_all(R"(
config nat;
expect reject GradeMismatch;
graded def dup : (x :^1 J) -> J = \x. let j = x in x;
expect reject TypeMismatch;
graded def wrong : J = (j : J (+) J);
expect reject NotAType;
judge graded x :^1 J |- x : j;
expect reject SubusageFailed;
judge graded x :^0 J |- x : J;
expect reject WrongFragment;
graded def w : J = i;
)");
}

TEST_CASE("case grade must be at least one") {
  expect_all(R"(
config nat;
expect reject GradeMismatch;
judge graded s :^0 J (+) J |- case^0 s of (\a. j : (a :^0 J) -> J); (\b. j : (b :^0 J) -> J) : J;
judge graded s :^1 J (+) J |- case^1 s of (\a. a : (a :^1 J) -> J); (\b. j : (b :^1 J) -> J) : J;
)");
}

TEST_CASE("case branches join in finite semirings") {
  const Semiring& not_ = sr_named("none-one-tons");
  DmglChecker c(not_);
  Ctx sx{{"s", G("J (+) J"), {}}, {"x", G("J"), {}}};
  auto s = c.infer_graded(sx, G("(case^w s of (\\a. x : (a :^w J) -> J); (\\b. let j = b in j : "
                                "(b :^w J) -> J))",
                                names_of(sx)));
  // Branch vectors (0, 1) and (0, 0) on (s, x): 0 and 1 are incomparable,
  // so x joins at w; s is scaled by the case grade.
  CHECK(show_vector(s.usage) == "(w, w)");
}

TEST_CASE("mixed typing: worked examples") {
  expect_all(R"(
config nat;
judge mixed ; y : I |- y : I;
judge mixed x :^0 J ; y : I |- y : I;
linear def pair : I (x) I = (i, i);
linear def unit : I = i;
expect reject LinearVarUnused;
judge mixed ; y : I |- i : I;
expect reject LinearVarReused;
judge mixed ; y : I |- (y, y) : I (x) I;
judge mixed y :^1 G I ; |- Ginv y : I;
expect reject NonEmptyLinearZone;
judge mixed ; y : I |- Ginv (Gi y) : I;
)");
}

TEST_CASE("mixed connectives") {
  expect_all(R"(
config nat;
linear def lam : I -o I = \y. y;
judge mixed ; f : I -o I, y : I |- f y : I;
judge mixed ; p : I (x) I |- let (a, b) = p in let i = a in b : I;
judge mixed x :^1 J ; |- (F(x, i) : F(z :^1 J). I) : F(z :^1 J). I;
judge mixed ; p : F(z :^1 J). I |- let F(a, b) = p in b : I;
graded def g : G (I -o I) = Gi (\y. y);
expect reject LinearVarUnused;
judge mixed ; p : I (x) I |- let (a, b) = p in a : I;
expect reject NonEmptyLinearZone;
judge mixed x :^1 J ; y : I |- (F(x, Ginv (Gi y)) : F(z :^1 J). I) : F(z :^1 J). I;
)");
}

TEST_CASE("linear zone permutation invariance") {
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  std::vector<Hyp> gam{{"a", G("I"), {}}, {"b", G("I -o I"), {}}, {"c", G("I (x) I"), {}}};
  const char* body = "let (p, q) = c in let i = p in let i = b a in q";
  std::vector<int> perm{0, 1, 2};
  int accepted = 0, total = 0;
  do {
    Ctx lc;
    for (int i : perm) lc.push_back(gam[std::size_t(i)]);
    TermPtr l = L(body, names_of({}, lc));
    ++total;
    try {
      c.check_mixed({}, {}, lc, l, G("I"));
      ++accepted;
    } catch (const Error&) {
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(total == 6);
  CHECK(accepted == 6);
  // Same verdict on a rejected body.
  perm = {0, 1, 2};
  do {
    Ctx lc;
    for (int i : perm) lc.push_back(gam[std::size_t(i)]);
    TermPtr l = L("let (p, q) = c in let i = p in q", names_of({}, lc));
    CHECK(code_of([&] { c.check_mixed({}, {}, lc, l, G("I")); }) == ErrorCode::LinearVarUnused);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("radj left axiom and identity") {
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  Ctx d{{"y", G("G I"), {}}};
  Derivation dv = c.check_mixed(vec(nat, {"1"}), d, {}, L("Ginv y", names_of(d)), G("I"));
  CHECK(dv.rule == "M-radjElim");
  Ctx lc{{"x", G("I"), {}}};
  dv = c.check_mixed({}, {}, lc, L("x", names_of({}, lc)), G("I"));
  CHECK(dv.rule == "M-id");
  CHECK(render_judgment(dv.conclusion) == "() (.) . ; x : I |-M x : I");
}

TEST_CASE("dependent types and conversion") {
  expect_all(R"(
config nat;
graded def pid : (A :^0 Type) -> (a :^1 A) -> A = \A. \a. a;
judge graded A :^0 Type, a :^1 A |- a : A;
judge graded x :^1 J |- (x : (\T. T : (T :^1 Type) -> Type) J) : J;
judge graded |- ((\A. \a. a : (A :^0 Type) -> (a :^1 A) -> A) J) j : J;
)");
}

TEST_CASE("fuel exhaustion is its own error") {
  // A type whose normal form needs more steps than the fuel allows.
  CheckOptions o;
  o.fuel = 1;
  ModuleReport r = run(R"(
config nat;
expect reject ConversionInconclusive;
judge graded x :^1 J |- x : (\T. (\U. U : (U :^1 Type) -> Type) T : (T :^1 Type) -> Type) J;
)",
                       o);
  CHECK(r.ok());
}

TEST_CASE("invariants on accepted judgments") {
  const Semiring& nat = sr_named("nat");
  DmglChecker c(nat);
  Ctx d{{"A", G("Type"), {}}, {"a", G("A", names_of({{"A", nullptr, {}}})), {}},
        {"x", G("J"), {}}};
  Names n = names_of(d);
  std::vector<std::string> subjects{"a", "x", "let j = x in a", "(x, a) : (z :^2 J) >< A",
                                    "(\\y. y : (y :^1 A) -> A) a"};
  for (const auto& s : subjects) {
    CAPTURE(s);
    TermPtr t = G(s.find(" : ") != std::string::npos ? "(" + s + ")" : s, n);
    GradeSynthesis syn = c.infer_graded(d, t);
    // Synthesis soundness.
    Derivation dv = c.check_graded(syn.usage, d, t, syn.type);
    // Length invariant and ctx well-formedness on every node.
    for_each_node(dv, [&](const Derivation& node) {
      const Judgment& j = node.conclusion;
      if (j.fragment != Fragment::Graded) return;
      CHECK(j.delta.size() == j.gctx.size());
      CHECK_NOTHROW(c.check_graded_ctx(j.delta, j.gctx));
    });
    // Types well formed.
    CHECK_NOTHROW(c.type_wf_graded(d, syn.type));
  }
}

TEST_CASE("diagnostic payload carries compared vectors") {
  ModuleReport r = run(R"(
config nat-trivial-order;
expect reject SubusageFailed;
judge graded x :^5 J |- x : J;
)");
  REQUIRE(r.items.size() == 1);
  REQUIRE(r.items[0].diagnostic);
  const auto& p = r.items[0].diagnostic->payload;
  CHECK(std::find(p.begin(), p.end(), std::pair<std::string, std::string>{"synthesized", "(1)"}) !=
        p.end());
  CHECK(std::find(p.begin(), p.end(), std::pair<std::string, std::string>{"declared", "(5)"}) !=
        p.end());
  CHECK(r.items[0].diagnostic->rule == "G-subusage");
}

TEST_CASE("wrong expected code is reported") {
  SourceModule m = parse_module("config nat;\nexpect reject TypeMismatch;\njudge graded x :^0 J |- x : J;\n");
  ModuleReport r = check_module(m, resolve_instance(m));
  CHECK_FALSE(r.ok());
  std::string f = render_failures(r);
  CHECK(f.find("expected rejection with TypeMismatch, rejected with SubusageFailed") !=
        std::string::npos);
}
