#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gradal/semiring.hpp"

namespace gradal {

// One AST for graded terms and types, linear terms and types, and GlaD.
// Variables live in two de Bruijn zones: graded (Delta) and linear
// (Gamma). GlaD terms only use the graded zone.
enum class Tag : uint8_t {
  Var,
  // universes and graded type formers
  TypeU,
  LinearU,
  UnitJ,   // J
  Pi,      // (x :^r X) -> Y         kids: X, Y[+1g]
  Sigma,   // (x :^r X) >< Y         kids: X, Y[+1g]
  Sum,     // X (+) Y
  GAdj,    // G A
  // graded terms
  UnitJIntro,  // j
  LetJ,        // let j = t in s
  Pair,        // (t, s)
  LetPair,     // let (x, y) = t in s  kids: t, s[+2g]
  Inl,
  Inr,
  Case,  // case^q t of s1; s2
  Lam,   // \x. t                  kids: t[+1g]
  App,
  GIntro,  // Gi l
  // linear type formers
  UnitI,     // I
  Lollipop,  // A -o B
  Tensor,    // A (x) B
  FType,     // F(x :^r X). A        kids: X, A[+1g]
  // linear terms
  UnitIIntro,  // i
  LetI,        // let i = l1 in l2
  LamLin,      // \y. l                kids: l[+1l]
  AppLin,
  TensorPair,  // (l1, l2)
  LetTensor,   // let (y, z) = l1 in l2  kids: l1, l2[+2l]
  FPair,       // F(t, l)
  LetF,        // let F(x, y) = l1 in l2  kids: l1, l2[+1g +1l]
  GInv,        // Ginv t
  // GlaD
  UnitM,     // I@m
  StarM,     // *@m
  LetStarM,  // let *@m = a in b
  PiG,       // (x :^q@m A) -o B       kids: A, B[+1g]
  TensorG,   // (x :^q@m A) (x) B      kids: A, B[+1g]
  Up,        // up[m1->m2] a
  Down,      // down[m1->m2] a
  // ascription (t : X)
  Ann,
};

inline constexpr int kTagCount = static_cast<int>(Tag::Ann) + 1;
const char* tag_name(Tag t);

enum class Zone : uint8_t { Graded, Linear };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  Tag tag = Tag::Var;
  Zone zone = Zone::Graded;  // Var only
  uint32_t index = 0;        // Var only
  std::string grade;         // Pi, Sigma, FType, Case, PiG, TensorG
  std::string mode, mode2;   // UnitM, StarM, LetStarM, PiG, TensorG, Up, Down
  std::vector<std::string> names;  // binder name hints (not compared)
  std::vector<TermPtr> kids;
};

// Number of graded / linear variables bound around kid `k` of `tag`.
struct Binds {
  uint32_t graded = 0, linear = 0;
};
Binds binds(Tag tag, std::size_t k);

TermPtr mk(Tag tag, std::vector<TermPtr> kids = {}, std::string grade = {},
           std::string mode = {}, std::string mode2 = {},
           std::vector<std::string> names = {});
TermPtr var(Zone z, uint32_t index);
TermPtr gvar(uint32_t index);
TermPtr lvar(uint32_t index);
TermPtr with_kids(const Term& t, std::vector<TermPtr> kids);

// Adds dg / dl to every free graded / linear index at or above the cutoffs.
TermPtr shift(const TermPtr& t, int64_t dg, int64_t dl = 0, uint32_t cut_g = 0,
              uint32_t cut_l = 0);

// Rebuilds t, replacing each free variable (zone, free index) with f's
// result. f's result is a term in the outer context; map_free shifts it
// under the binders crossed on the way down.
using VarMap = std::function<TermPtr(Zone, uint32_t)>;
TermPtr map_free(const TermPtr& t, const VarMap& f);

// [s/x]t where x is the variable of zone z at free index j. s must be
// well-scoped in t's context with x removed; variables above x move down.
TermPtr subst(const TermPtr& t, Zone z, uint32_t j, const TermPtr& s);
// Instantiates the innermost bound variable(s): body lives under one
// binder of zone z, s in the outer context.
TermPtr subst_top(const TermPtr& body, Zone z, const TermPtr& s);

bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool well_scoped(const TermPtr& t, uint32_t depth_g, uint32_t depth_l = 0);
std::set<uint32_t> free_vars(const TermPtr& t, Zone z = Zone::Graded);
bool occurs_free(const TermPtr& t, Zone z, uint32_t j);
std::size_t term_size(const TermPtr& t);

// Removes every Ann node, keeping the annotated term.
TermPtr strip_ann(const TermPtr& t);
// Peels outer Ann nodes.
const TermPtr& peel_ann(const TermPtr& t);

// ------------------------------------------------------------------ contexts

struct Hyp {
  std::string name;
  TermPtr type;
  std::string mode;  // GlaD entries only
};
using Ctx = std::vector<Hyp>;

// [t0/x] applied to a context suffix that follows x. t0 lives in the
// context before x. Entry i's type sees x at graded index i.
Ctx subst_context(const Ctx& suffix, const TermPtr& t0);

enum class Fragment : uint8_t { Graded, Mixed, Glad, GradedCtx, MixedCtx, GladCtx };
const char* fragment_name(Fragment f);

struct Judgment {
  Fragment fragment = Fragment::Graded;
  GradeVector delta;
  Ctx gctx;          // Delta, or the GlaD context
  Ctx lctx;          // Gamma (mixed only)
  std::string mode;  // GlaD only
  TermPtr subject;   // null for context judgments
  TermPtr type;
};

}  // namespace gradal
