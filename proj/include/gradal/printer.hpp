#pragma once

#include <string>
#include <vector>

#include "gradal/syntax.hpp"

namespace gradal {

// Names of the variables in scope, outermost first; the last graded name is
// graded index 0.
struct Names {
  std::vector<std::string> graded;
  std::vector<std::string> linear;
};

Names names_of(const Ctx& gctx, const Ctx& lctx = {});

// Canonical surface syntax. Binder names are freshened against everything
// in scope and against keywords, so parse(print(t)) is alpha-equal to t.
std::string print_term(const TermPtr& t, const Names& scope = {});

bool is_keyword(const std::string& s);

}  // namespace gradal
