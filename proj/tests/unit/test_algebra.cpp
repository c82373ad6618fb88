#include "doctest.h"

#include <fstream>
#include <sstream>

#include "gradal/config.hpp"

using namespace gradal;

namespace {

std::shared_ptr<Registry> cfg(const std::string& name) { return load_config(name); }

Grade g(const Registry& r, const char* sr, const char* v) { return grade_of(r.semiring(sr), v); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("semiring operations on shipped carriers") {
  auto nat = cfg("nat");
  auto nont = cfg("none-one-tons");
  auto var = cfg("variance");
  CHECK(add(g(*nat, "nat", "2"), g(*nat, "nat", "3")) == g(*nat, "nat", "5"));
  CHECK(add(g(*nont, "none-one-tons", "1"), g(*nont, "none-one-tons", "1")) ==
        g(*nont, "none-one-tons", "w"));
  CHECK(add(g(*nont, "none-one-tons", "1"), g(*nont, "none-one-tons", "ω")) ==
        g(*nont, "none-one-tons", "w"));
  CHECK(add(g(*var, "variance", "↑↑"), g(*var, "variance", "↓↓")) == g(*var, "variance", "~~"));
  CHECK(mul(g(*var, "variance", "↓↓"), g(*var, "variance", "↓↓")) == g(*var, "variance", "^^"));
  CHECK(mul(g(*var, "variance", "~~"), g(*var, "variance", "vv")) == g(*var, "variance", "~~"));
  CHECK(mul(g(*nont, "none-one-tons", "w"), g(*nont, "none-one-tons", "1")) ==
        g(*nont, "none-one-tons", "w"));
  for (auto* r : {nat.get(), nont.get(), var.get()}) {
    const Semiring& s = *r->default_semiring();
    for (uint64_t v : s.enumerate(4)) CHECK(mul(Grade{&s, v}, zero_of(s)) == zero_of(s));
  }
  CHECK(leq(g(*nat, "nat", "2"), g(*nat, "nat", "5")));
  CHECK(leq(g(*nont, "none-one-tons", "1"), g(*nont, "none-one-tons", "w")));
  CHECK_FALSE(leq(g(*nont, "none-one-tons", "1"), g(*nont, "none-one-tons", "0")));
  auto boolean = cfg("boolean");
  CHECK_FALSE(leq(g(*boolean, "boolean", "0"), g(*boolean, "boolean", "1")));
}

TEST_CASE("mixing semirings is an error") {
  auto a = cfg("nat");
  auto b = cfg("none-one-tons");
  CHECK(code_of([&] { add(g(*a, "nat", "1"), g(*b, "none-one-tons", "1")); }) ==
        ErrorCode::SemiringMismatch);
  CHECK(code_of([&] { leq(g(*a, "nat", "1"), g(*b, "none-one-tons", "1")); }) ==
        ErrorCode::SemiringMismatch);
  CHECK(code_of([&] { grade_of(b->semiring("none-one-tons"), "2"); }) == ErrorCode::UnknownElement);
  const Semiring& s = b->semiring("none-one-tons");
  CHECK(code_of([&] { add(Grade{&s, 7}, one_of(s)); }) == ErrorCode::UnknownElement);
}

TEST_CASE("natural-number overflow is reported") {
  auto a = cfg("nat");
  const Semiring& s = a->semiring("nat");
  CHECK(code_of([&] { add(Grade{&s, UINT64_MAX}, one_of(s)); }) == ErrorCode::Overflow);
  CHECK(code_of([&] { mul(Grade{&s, UINT64_MAX}, Grade{&s, 2}); }) == ErrorCode::Overflow);
}

TEST_CASE("vector operations") {
  auto nat = cfg("nat");
  auto nont = cfg("none-one-tons");
  const Semiring& n = nat->semiring("nat");
  const Semiring& w = nont->semiring("none-one-tons");
  auto nv = [&](std::initializer_list<uint64_t> xs) {
    GradeVector d;
    for (auto x : xs) d.push_back(Grade{&n, x});
    return d;
  };
  CHECK(vec_add({}, {}).empty());
  CHECK(vec_add(nv({1, 0}), nv({0, 2})) == nv({1, 2}));
  CHECK(vec_add({one_of(w)}, {one_of(w)}) == GradeVector{grade_of(w, "w")});
  CHECK(vec_scale(Grade{&n, 7}, {}).empty());
  CHECK(vec_scale(Grade{&n, 2}, nv({1, 3})) == nv({2, 6}));
  CHECK(vec_scale(zero_of(w), {grade_of(w, "w"), one_of(w)}) == GradeVector{zero_of(w), zero_of(w)});
  CHECK(vec_leq({}, {}));
  CHECK(vec_leq(nv({0, 1}), nv({2, 1})));
  CHECK_FALSE(vec_leq({one_of(w)}, {zero_of(w)}));
  CHECK(code_of([&] { vec_add(nv({1}), nv({1, 2})); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { vec_leq(nv({1}), {one_of(w)}); }) == ErrorCode::SemiringMismatch);
  CHECK(code_of([&] { vec_scale(one_of(w), nv({1})); }) == ErrorCode::NoMorphism);
}

TEST_CASE("vector laws lift pointwise") {
  auto nont = cfg("none-one-tons");
  const Semiring& w = nont->semiring("none-one-tons");
  std::vector<GradeVector> vs;
  for (uint64_t a = 0; a < 3; ++a)
    for (uint64_t b = 0; b < 3; ++b) vs.push_back({Grade{&w, a}, Grade{&w, b}});
  for (uint64_t r = 0; r < 3; ++r)
    for (uint64_t q = 0; q < 3; ++q)
      for (auto& d : vs)
        for (auto& e : vs) {
          Grade R{&w, r}, Q{&w, q};
          CHECK(vec_scale(R, vec_add(d, e)) == vec_add(vec_scale(R, d), vec_scale(R, e)));
          CHECK(vec_scale(add(R, Q), d) == vec_add(vec_scale(R, d), vec_scale(Q, d)));
          for (auto& f : vs)
            if (vec_leq(d, e) && vec_leq(e, f)) CHECK(vec_leq(d, f));
        }
}

TEST_CASE("morphisms") {
  auto nat = cfg("nat");
  auto nont = cfg("none-one-tons");
  auto triv = cfg("trivial");
  const Semiring &n = nat->semiring("nat"), &w = nont->semiring("none-one-tons"),
                 &t = triv->semiring("trivial");
  Morphism f = Morphism::unique(n, w);
  CHECK(apply_morphism(f, one_of(n)) == one_of(w));
  CHECK(apply_morphism(f, Grade{&n, 2}) == grade_of(w, "w"));
  CHECK(apply_morphism(Morphism::unique(n, t), Grade{&n, 5}) == zero_of(t));
  CHECK(apply_morphism(Morphism::unique(w, t), grade_of(w, "w")) == zero_of(t));
  CHECK(code_of([&] { apply_morphism(f, one_of(w)); }) == ErrorCode::SemiringMismatch);
  // None-one-tons into itself: only the identity preserves 1 + 1 = w, so
  // synthesis succeeds; into the naturals it cannot.
  CHECK(code_of([&] { Morphism::unique(w, n); }) == ErrorCode::ConfigError);
  // From the usual order the map breaks monotonicity (0 <= 1 but not in the
  // target); from the trivial order it is a morphism.
  ValidationReport bad = validate_morphism(f);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.violations.front().law == "monotone");
  auto exact = cfg("nat-trivial-order");
  CHECK(validate_morphism(Morphism::unique(exact->semiring("nat-trivial-order"), w)).ok());
}

TEST_CASE("semiring law validation") {
  for (const char* name : {"nat", "nat-trivial-order", "boolean", "none-one-tons", "variance",
                           "trivial", "none-one-tons-reflexive"}) {
    CAPTURE(name);
    auto r = cfg(name);
    CHECK(validate_semiring(*r->default_semiring()).ok());
  }
  ConfigOptions lax;
  lax.validate = false;
  auto bad_bool = parse_semiring_config(R"(
semiring bad-boolean
  elements 0 1
  zero 0
  one 1
  add
    0 0 -> 0
    0 1 -> 1
    1 0 -> 1
    1 1 -> 0
  end
  mul
    0 0 -> 0
    0 1 -> 0
    1 0 -> 0
    1 1 -> 1
  end
  order
    0 <= 1
  end
end
)", lax);
  ValidationReport rep = validate_semiring(*bad_bool.semiring);
  REQUIRE_FALSE(rep.ok());
  bool monotone = false;
  for (auto& v : rep.violations) monotone |= v.law == "add-monotone";
  CHECK(monotone);

  std::string variance_text;
  {
    std::ifstream in(std::string(GRADAL_SOURCE_DIR) + "/configs/variance.cfg");
    std::stringstream ss;
    ss << in.rdbuf();
    variance_text = ss.str();
  }
  auto pos = variance_text.find("vv vv -> ^^");
  REQUIRE(pos != std::string::npos);
  variance_text.replace(pos, 11, "vv vv -> vv");
  auto bad_var = parse_semiring_config(variance_text, lax);
  ValidationReport vr = validate_semiring(*bad_var.semiring);
  REQUIRE_FALSE(vr.ok());
  CHECK(vr.render().find("witness") == std::string::npos);
  CHECK(!vr.violations.front().witness.empty());
  // Loading with validation on surfaces the report as a config error.
  CHECK(code_of([&] { parse_semiring_config(variance_text); }) == ErrorCode::ConfigError);
}

TEST_CASE("nat law sample is deterministic") {
  auto r = cfg("nat");
  const Semiring& s = *r->default_semiring();
  CHECK(law_sample(s, kNatLawSeed, 50) == law_sample(s, kNatLawSeed, 50));
  CHECK(validate_semiring(s).checks == validate_semiring(s).checks);
}
