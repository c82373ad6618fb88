#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradal/config.hpp"
#include "gradal/derivation.hpp"
#include "gradal/dmgl.hpp"
#include "gradal/glad.hpp"
#include "gradal/parser.hpp"

namespace gradal {

struct Diagnostic {
  std::string severity = "error";
  std::string code;  // code_name of the error
  std::string span;  // file:line:col
  std::string message;
  std::string rule;
  std::vector<std::pair<std::string, std::string>> payload;
};

Diagnostic diagnostic_of(const Error& e, const std::string& span = {});
// `span: error[Code] (rule): message`, then one indented line per payload entry.
std::string render_error(const Diagnostic& d);

// The semiring and mode theory a module is checked against.
struct Instance {
  std::shared_ptr<Registry> registry;
  const Semiring* semiring = nullptr;
  const ModeTheory* theory = nullptr;
};

// `config_override` wins over the module's `config` line; relative config
// paths resolve from `base_dir`. A module naming neither uses `nat`.
Instance resolve_instance(const SourceModule& m, const std::string& config_override = {},
                          const std::string& base_dir = {});

// Builds the judgment an item asserts, with grades resolved against the
// instance. Definitions become judgments in the empty context; type items
// become `X : Type` (graded, GlaD) or `A : Linear` (linear) judgments.
Judgment item_judgment(const Item& it, const Instance& inst);

// Checks one item. Type items are checked through the type-formation entry
// points, everything else through the fragment's checker.
Derivation check_item(const Item& it, const Instance& inst, const CheckOptions& opts = {});

struct ItemOutcome {
  std::size_t index = 0;
  std::string label;  // definition name, or `judge` plus the item kind
  std::string span;
  std::optional<std::string> expected;  // expected error code
  std::optional<Derivation> derivation;
  std::optional<Diagnostic> diagnostic;
  bool met = false;
};

struct ModuleReport {
  std::string file;
  std::vector<ItemOutcome> items;
  // Derivations point into the registry's semirings; keep it alive.
  std::shared_ptr<Registry> registry;
  bool ok() const;
};

ModuleReport check_module(const SourceModule& m, const Instance& inst,
                          const CheckOptions& opts = {});
// Derivation dump for a whole module: each item's derivation tree or its
// diagnostic, in source order. Byte-stable.
std::string render_report(const ModuleReport& r);
// One line per unmet expectation.
std::string render_failures(const ModuleReport& r);

std::string item_kind_name(Item::Kind k);

}  // namespace gradal
