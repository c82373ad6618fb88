#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradal/printer.hpp"
#include "gradal/syntax.hpp"

namespace gradal {

// Which fragment the top of the parsed text sits in. Lambdas, applications,
// pairs and pair eliminators are linear in linear positions and graded
// elsewhere; GlaD uses the graded forms throughout.
enum class ParseMode { Graded, Linear, Glad };

TermPtr parse_term(std::string_view text, ParseMode mode, const Names& scope = {});

struct Span {
  std::string file;
  int line = 0, col = 0;
  std::string str() const { return file + ":" + std::to_string(line) + ":" + std::to_string(col); }
};

// A context entry before its grade is resolved against a semiring.
struct RawHyp {
  std::string name;
  std::string grade;  // empty for linear entries
  std::string mode;   // GlaD entries
  TermPtr type;
};

struct Item {
  enum class Kind {
    GradedDef,
    LinearDef,
    GladDef,
    JudgeGraded,
    JudgeMixed,
    JudgeGlad,
    CtxGraded,
    CtxMixed,
    CtxGlad,
    TypeGraded,
    TypeLinear,
    TypeGlad,
  };
  Kind kind;
  Span span;
  std::string name;  // definitions
  std::vector<RawHyp> gctx, lctx;
  std::string mode;
  TermPtr subject;  // the type itself for Type* items
  TermPtr type;
  std::optional<std::string> expect_reject;  // error code name
};

struct SourceModule {
  std::string file;
  std::string config;
  std::string semiring;  // optional override of the config's default
  std::string theory;
  std::vector<Item> items;
};

SourceModule parse_module(std::string_view text, const std::string& file = "<input>");

// Rewrites every grade annotation through f (alias resolution).
TermPtr map_grades(const TermPtr& t, const std::function<std::string(const std::string&)>& f);

}  // namespace gradal
