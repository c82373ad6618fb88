#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gradal/syntax.hpp"

namespace gradal {

struct Derivation {
  std::string rule;  // e.g. G-var, M-tensorElim, glad-raise
  Judgment conclusion;
  std::vector<Derivation> premises;
  // Witnesses chosen by the checker (a searched grade, a type-WF vector).
  std::vector<std::pair<std::string, std::string>> side;
};

// ASCII notation, one line:
//   (1) (.) x : J |-G x : J
//   () (.) . ; y : I |-M y : I
//   (1) | (L) (.) x : I@L |-_L x : I@L
// Context judgments end in `ctx`. Linear-context types are read in the
// full graded context.
std::string render_judgment(const Judgment& j);

// Indented tree, conclusion first, two spaces per level:
//   G-app {r=1}  <judgment>
std::string render_derivation(const Derivation& d);

// Pre-order visit of every node.
template <typename F>
void for_each_node(const Derivation& d, F&& f) {
  f(d);
  for (const auto& p : d.premises) for_each_node(p, f);
}

std::size_t derivation_size(const Derivation& d);

}  // namespace gradal
