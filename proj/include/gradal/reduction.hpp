#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradal/printer.hpp"
#include "gradal/syntax.hpp"

namespace gradal {

// Child indices from the root down to a subterm.
using Path = std::vector<int>;

struct Step {
  std::string rule;  // label, e.g. gRED-pairBeta or gRED-appL
  std::string base;  // the beta rule that fired at the redex
  Path path;
  TermPtr before, after;
};

struct ReductionTrace {
  std::vector<Step> steps;
  TermPtr final;
  bool exhausted = false;
};

struct Redex {
  Path path;
  std::string rule;  // base rule name
};

// Contracts t at its root if it is a redex: returns the reduct and the base
// rule name. Beta rules look through ascriptions and carry them onto the
// pieces they substitute.
std::optional<std::pair<TermPtr, std::string>> contract(const TermPtr& t);

// All redex positions, in preorder (leftmost-outermost first).
std::vector<Redex> redexes(const TermPtr& t);
const TermPtr& subterm_at(const TermPtr& t, const Path& p);
TermPtr replace_at(const TermPtr& t, const Path& p, const TermPtr& with);
// One step at the given position; nullopt when that position is no redex.
std::optional<Step> step_at(const TermPtr& t, const Path& p);

// Leftmost-outermost single step.
std::optional<Step> step(const TermPtr& t);

ReductionTrace normalize(const TermPtr& t, uint64_t fuel);

enum class Conv { Equal, Unequal, Inconclusive };
Conv conv_equiv(const TermPtr& a, const TermPtr& b, uint64_t fuel);

inline constexpr uint64_t kDefaultFuel = 10000;
// kDefaultFuel unless GRADAL_FUEL is set to a positive number.
uint64_t default_fuel();

std::string path_str(const Path& p);
// One step per line, tab-separated: rule, path, term before, term after;
// then a final line with the normal form and whether fuel ran out.
std::string render_trace(const ReductionTrace& tr, const Names& scope = {});

}  // namespace gradal
