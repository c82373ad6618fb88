#include <doctest.h>

#include "gradal/frontend.hpp"
#include "gradal/metatheory.hpp"
#include "gradal/parser.hpp"
#include "gradal/printer.hpp"

using namespace gradal;

namespace {

struct Env {
  SourceModule m;
  Instance inst;
  Checkers c;
  explicit Env(const std::string& cfg)
      : m(parse_module("config " + cfg + ";\n", "t.gr")), inst(resolve_instance(m)) {
    c = Checkers{inst.semiring, inst.theory, cfg, {}};
  }
  // The judgment of a single `judge` line.
  Judgment j(const std::string& line) const {
    SourceModule mm = parse_module("config " + c.config + ";\n" + line, "t.gr");
    REQUIRE(mm.items.size() == 1);
    return item_judgment(mm.items[0], inst);
  }
  // Re-checks exactly: synthesized usage must equal the declared vector.
  bool exact(const Judgment& jj) const { return recheck(c, "t", jj, true).failures.empty(); }
};

std::string subject(const Judgment& j) { return print_term(j.subject, names_of(j.gctx, j.lctx)); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

GeneratorConfig gen_cfg(GenFragment f, uint64_t seed, int depth = 3) {
  GeneratorConfig g;
  g.fragment = f;
  g.seed = seed;
  g.max_depth = depth;
  return g;
}

}  // namespace

TEST_CASE("generator streams are deterministic and accepted") {
  Env nat("nat"), lnld("lnld");
  for (GenFragment f : {GenFragment::Graded, GenFragment::Mixed, GenFragment::Glad}) {
    CAPTURE(gen_fragment_name(f));
    const Env& e = f == GenFragment::Glad ? lnld : nat;
    Generator a(e.inst.semiring, e.inst.theory, gen_cfg(f, 7));
    Generator b(e.inst.semiring, e.inst.theory, gen_cfg(f, 7));
    for (int i = 0; i < 40; ++i) {
      Generated x = a.next(), y = b.next();
      CHECK(judgment_source(x.judgment, "c") == judgment_source(y.judgment, "c"));
      CHECK(recheck(e.c, "t", x.judgment, false).failures.empty());
    }
  }
}

TEST_CASE("depth-1 graded stream contains the closed unit judgment") {
  Env e("nat");
  GeneratorConfig cfg = gen_cfg(GenFragment::Graded, 3, 1);
  cfg.slack = false;
  Generator g(e.inst.semiring, nullptr, cfg);
  bool found = false;
  for (int i = 0; i < 200 && !found; ++i) {
    Generated d = g.next();
    found = d.judgment.gctx.empty() && d.derivation.rule == "G-unitIntro" &&
            subject(d.judgment) == "j";
  }
  CHECK(found);
}

TEST_CASE("weighting the tensor constructor yields M-tensorIntro nodes") {
  Env e("nat");
  GeneratorConfig cfg = gen_cfg(GenFragment::Mixed, 5);
  cfg.weights.tensor = 50;
  Generator g(e.inst.semiring, nullptr, cfg);
  int hits = 0;
  for (int i = 0; i < 30; ++i)
    for_each_node(g.next().derivation,
                  [&](const Derivation& n) { hits += n.rule == "M-tensorIntro"; });
  CHECK(hits > 0);
}

TEST_CASE("all-zero weights exhaust generation") {
  Env e("nat");
  GeneratorConfig cfg = gen_cfg(GenFragment::Graded, 1);
  cfg.weights = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  Generator g(e.inst.semiring, nullptr, cfg);
  CHECK(code_of([&] { g.next(); }) == ErrorCode::GenerationExhausted);
}

TEST_CASE("substitution: a variable cut into a variable") {
  Env e("nat");
  Judgment d = e.j("judge graded x :^0 J, y :^1 J |- y : J;");
  Judgment d0 = e.j("judge graded x :^1 J |- x : J;");
  Judgment t = substitution_transform(d0, d, 1);
  CHECK(judgment_source(t, "nat") == judgment_source(d0, "nat"));
  CHECK(e.exact(t));
}

TEST_CASE("substitution: grade arithmetic delta + r.delta0") {
  Env e("nat");
  Judgment d = e.j("judge graded x :^1 J, y :^3 J |- let j = x in let j = y in let j = y in y : J;");
  Judgment d0 = e.j("judge graded x :^2 J |- let j = x in x : J;");
  Judgment t = substitution_transform(d0, d, 1);
  CHECK(show_vector(t.delta) == "(7)");
  CHECK(e.exact(t));
  // A dependent suffix: the later type mentions the cut variable.
  Judgment dep = e.j("judge graded A :^1 Type, a :^1 A |- a : A;");
  Judgment ty = e.j("judge graded |- J : Type;");
  Judgment t2 = substitution_transform(ty, dep, 0);
  CHECK(print_term(t2.gctx[0].type) == "J");
  CHECK(print_term(t2.type, names_of(t2.gctx)) == "J");
  CHECK(e.exact(t2));
}

TEST_CASE("substitution clause v: a linear cut") {
  Env e("nat");
  Judgment d = e.j("judge mixed x :^0 J ; y : I |- y : I;");
  Judgment d0 = e.j("judge mixed x :^0 J ; |- i : I;");
  Judgment t = linear_substitution_transform(d0, d, 0);
  CHECK(t.lctx.empty());
  CHECK(show_vector(t.delta) == "(0)");
  CHECK(subject(t) == "i");
  CHECK(e.exact(t));
  // Spliced linear context between the neighbours of the cut.
  Judgment d2 = e.j("judge mixed ; a : I, y : I, b : I |- let i = a in let i = b in y : I;");
  Judgment d02 = e.j("judge mixed ; z : I |- z : I;");
  Judgment t2 = linear_substitution_transform(d02, d2, 1);
  REQUIRE(t2.lctx.size() == 3);
  CHECK(t2.lctx[1].name == "z");
  CHECK(subject(t2) == "let i = a in let i = b in z");
  CHECK(e.exact(t2));
}

TEST_CASE("substitution on a context judgment") {
  Env e("nat");
  Judgment d = e.j("judge ctx graded A :^2 Type, a :^1 A;");
  Judgment d0 = e.j("judge graded |- J : Type;");
  Judgment t = substitution_transform(d0, d, 0);
  CHECK(t.gctx.size() == 1);
  CHECK(print_term(t.gctx[0].type) == "J");
  CHECK(recheck(e.c, "t", t, false).failures.empty());
}

TEST_CASE("GlaD substitution of the var axiom recovers contraction") {
  Env e("lnld");
  Judgment d = e.j("judge glad x :^1@L I@L, y :^1@L I@L |-@L let *@L = x in y : I@L;");
  Judgment d0 = e.j("judge glad x :^1@L I@L |-@L x : I@L;");
  Judgment t = substitution_transform(d0, d, 1, e.inst.theory);
  CHECK(show_vector(t.delta) == "(w)");  // 1 + 1 in L
  CHECK(subject(t) == "let *@L = x in x");
  CHECK(e.exact(t));
  Judgment c = contraction_transform(d, 0);
  CHECK(judgment_source(c, "lnld") == judgment_source(t, "lnld"));
}

TEST_CASE("GlaD substitution scales across modes") {
  Env e("dmgl-recovery");
  Judgment d = e.j(
      "judge glad g :^1@G I@G, h :^w@G I@G |-@L "
      "(\\x. let *@G = x in *@L : (x :^w@G I@G) -o I@L) h : I@L;");
  Judgment d0 = e.j("judge glad g :^1@G I@G |-@G g : I@G;");
  Judgment t = substitution_transform(d0, d, 1, e.inst.theory);
  CHECK(show_vector(t.delta) == "(w)");
  CHECK(e.exact(t));
}

TEST_CASE("substitution shape errors") {
  Env e("nat");
  Judgment d = e.j("judge graded x :^0 J, y :^1 J |- y : J;");
  Judgment wrong_type = e.j("judge graded x :^0 J |- J : Type;");
  Judgment wrong_prefix = e.j("judge graded |- j : J;");
  CHECK(code_of([&] { substitution_transform(wrong_type, d, 1); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { substitution_transform(wrong_prefix, d, 1); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { substitution_transform(wrong_prefix, d, 5); }) == ErrorCode::ShapeMismatch);
  Judgment lin = e.j("judge mixed x :^0 J, y :^1 J ; |- i : I;");
  CHECK(code_of([&] { linear_substitution_transform(lin, lin, 0); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("contraction corollary arithmetic") {
  Env nat("nat"), tons("none-one-tons");
  const char* both = "judge graded x :^1 J, y :^1 J |- let j = x in y : J;";
  Judgment t = contraction_transform(nat.j(both), 0);
  CHECK(show_vector(t.delta) == "(2)");
  CHECK(subject(t) == "let j = x in x");
  CHECK(nat.exact(t));
  Judgment w = contraction_transform(tons.j(both), 0);
  CHECK(show_vector(w.delta) == "(w)");  // printed name of ω
  CHECK(tons.exact(w));
  Judgment z = contraction_transform(nat.j("judge graded x :^0 J, y :^0 J |- j : J;"), 0);
  CHECK(show_vector(z.delta) == "(0)");
  CHECK(nat.exact(z));
  // A dependent suffix follows the merged entry.
  Judgment dep = contraction_transform(
      nat.j("judge graded A :^0 Type, B :^0 Type, b :^1 B |- b : B;"), 0);
  CHECK(print_term(dep.gctx[1].type, names_of({dep.gctx[0]})) == "A");
  CHECK(nat.exact(dep));
  CHECK(code_of([&] {
          contraction_transform(nat.j("judge graded x :^1 J, y :^1 Type |- j : J;"), 0);
        }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { contraction_transform(nat.j(both), 1); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("GlaD contraction needs equal modes") {
  Env e("lnld");
  Judgment d = e.j("judge glad u :^0@U I@U, x :^1@L I@L |-@L x : I@L;");
  CHECK(code_of([&] { contraction_transform(d, 0); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("radj-left: identity and a nested pair") {
  Env e("nat");
  Judgment id = e.j("judge mixed ; x : I |- x : I;");
  Judgment t = radj_left_transform(id, e.inst.semiring);
  REQUIRE(t.gctx.size() == 1);
  CHECK(show_vector(t.delta) == "(1)");
  CHECK(print_term(t.gctx[0].type) == "G I");
  CHECK(t.lctx.empty());
  CHECK(subject(t) == "Ginv " + t.gctx[0].name);
  CHECK(e.exact(t));

  Judgment pair = e.j("judge mixed a :^0 J ; x : I (x) I |- ((x, i) : (I (x) I) (x) I) : (I (x) I) (x) I;");
  Judgment t2 = radj_left_transform(pair, e.inst.semiring);
  CHECK(show_vector(t2.delta) == "(0, 1)");
  CHECK(subject(t2) == "((Ginv g0, i) : (I (x) I) (x) I)");
  CHECK(e.exact(t2));
  CHECK(code_of([&] { radj_left_transform(e.j("judge mixed ; |- i : I;"), e.inst.semiring); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("subject reduction probe") {
  Env e("nat");
  CHECK(subject_reduction_probe(e.c, e.j("judge graded |- j : J;")).checks == 0);
  ProbeResult r = subject_reduction_probe(e.c, e.j("judge graded x :^1 J |- let j = j in x : J;"));
  CHECK(r.checks == 1);
  CHECK(r.failures.empty());
  r = subject_reduction_probe(
      e.c, e.j("judge graded x :^2 J |- (\\y. let j = y in y : (y :^2 J) -> J) x : J;"));
  CHECK(r.checks >= 1);
  CHECK(r.failures.empty());
}

TEST_CASE("inversion probe") {
  Env e("nat");
  CHECK(inversion_probe(e.c, e.j("judge graded x :^3 J |- j : J;")).failures.empty());
  ProbeResult r =
      inversion_probe(e.c, e.j("judge graded |- (\\y. y : (y :^1 J) -> J) : (y :^1 J) -> J;"));
  CHECK(r.checks == 1);
  CHECK(r.failures.empty());
  r = inversion_probe(e.c,
                      e.j("judge graded x :^2 J |- ((x, x) : (v :^1 J) >< J) : (v :^1 J) >< J;"));
  CHECK(r.checks == 1);
  CHECK(r.failures.empty());
  r = inversion_probe(e.c, e.j("judge graded x :^1 J |- (inl x : J (+) J) : J (+) J;"));
  CHECK(r.checks == 1);
  CHECK(r.failures.empty());
}

TEST_CASE("recheck flags inexact usage and writes a reproducer") {
  Env e("nat");
  Judgment j = e.j("judge graded x :^2 J |- x : J;");
  ProbeResult r = recheck(e.c, "t", j, true);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].reproducer == "config nat;\njudge graded x :^2 J |- x : J;\n");
  CHECK(recheck(e.c, "t", j, false).failures.empty());
}

TEST_CASE("context vector independence") {
  Env e("nat");
  Judgment c = e.j("judge ctx mixed x :^1 J ; y : I;");
  Generator g(e.inst.semiring, nullptr, gen_cfg(GenFragment::Mixed, 1));
  ProbeResult r = ctx_vector_probe(e.c, c, g, 5);
  CHECK(r.checks == 5);
  CHECK(r.failures.empty());
  c.delta.clear();
  CHECK(!recheck(e.c, "t", c, false).failures.empty());
}

TEST_CASE("judgment sources round-trip through the parser") {
  Env e("lnld");
  Generator g(nullptr, e.inst.theory, gen_cfg(GenFragment::Glad, 11));
  for (int i = 0; i < 20; ++i) {
    Generated d = g.next();
    std::string src = judgment_source(d.judgment, "lnld");
    SourceModule m = parse_module(src, "r.gr");
    ModuleReport rep = check_module(m, resolve_instance(m));
    CAPTURE(src);
    CHECK(rep.ok());
  }
}

TEST_CASE("meta reports are deterministic and clean") {
  MetaOptions o;
  o.suite = "subst";
  o.count = 40;
  o.seed = 9;
  std::string a = render_meta_report(run_meta(o));
  std::string b = render_meta_report(run_meta(o));
  CHECK(a == b);
  CHECK(a.find("failures: 0\n") != std::string::npos);
  o.suite = "nope";
  CHECK(code_of([&] { run_meta(o); }) == ErrorCode::ConfigError);
}
