#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gradal/config.hpp"
#include "gradal/derivation.hpp"
#include "gradal/dmgl.hpp"
#include "gradal/glad.hpp"

namespace gradal {

// ------------------------------------------------------------- generation

enum class GenFragment { Graded, Mixed, Glad };
const char* gen_fragment_name(GenFragment f);

struct GeneratorConfig {
  uint64_t seed = 1;
  int max_depth = 3;
  GenFragment fragment = GenFragment::Graded;
  // Relative weights for the constructor families the generator can pick.
  struct Weights {
    int var = 4, unit = 2, let_unit = 2, lambda = 3, app = 3, pair = 2, let_pair = 2, inj = 2,
        case_ = 2, tensor = 2, ladj = 2, radj = 2, shift = 2, redex = 3;
  } weights;
  int max_ctx = 4;      // graded (or GlaD) context length bound
  int max_linear = 3;   // linear context length bound
  bool duplicate = false;  // place two adjacent entries of equal type
  bool trailing_linear = false;  // mixed: force a non-empty linear context
  bool slack = true;    // raise some declared vectors one step above synthesis
};

struct Generated {
  Judgment judgment;
  Derivation derivation;
  bool slack = false;  // the declared vector is strictly above synthesis
  std::optional<std::size_t> duplicate_at;  // with GeneratorConfig::duplicate
};

// Deterministic stream of accepted judgments. Generation is type directed:
// the generator picks a rule, builds its premises, and reads grade
// arithmetic off the checker's synthesis; binder grades are chosen from the
// body's usage. Candidates the checker rejects are redrawn.
class Generator {
 public:
  Generator(const Semiring* sr, const ModeTheory* mt, GeneratorConfig cfg);
  ~Generator();
  Generator(Generator&&) noexcept;
  // GenerationExhausted after too many consecutive rejected candidates.
  Generated next();
  // A closed-over-prefix term of the given type (a cut partner): graded
  // term for graded/mixed fragments, GlaD term at `mode` otherwise.
  std::optional<Generated> term_of_type(const Ctx& ctx, const TermPtr& type,
                                        const std::string& mode = {});
  // A linear term of type A over fresh linear entries.
  std::optional<Generated> linear_of_type(const Ctx& gctx, const TermPtr& A);
  // A random grade vector matching the context (per-entry semiring).
  GradeVector random_vector(const Ctx& ctx);
  std::mt19937_64& rng();
  uint64_t rejected() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> p_;
};

// ------------------------------------------------------------ transforms

// Substitution theorem. `cut` is the context position of x in d's graded
// (or GlaD) context; d0 types the cut partner over the prefix before it.
// Mixed-linear cut (clause v): `linear_cut` names the linear position and
// d0 is a mixed judgment whose linear context is spliced in.
Judgment substitution_transform(const Judgment& d0, const Judgment& d, std::size_t cut,
                                const ModeTheory* mt = nullptr);
Judgment linear_substitution_transform(const Judgment& d0, const Judgment& d,
                                       std::size_t linear_cut);
// Merges graded entries k and k+1 (same type, same mode) at grade p+q.
Judgment contraction_transform(const Judgment& d, std::size_t k);
// δ ⊙ Δ; Γ, x:A ⊢ l : B  ~>  δ,1 ⊙ Δ, y:G A; Γ ⊢ [Ginv y/x]l : B.
// The appended grade 1 comes from `sr`, or from d's vector when sr is null.
Judgment radj_left_transform(const Judgment& d, const Semiring* sr = nullptr);

// -------------------------------------------------------------- probes

struct ProbeFailure {
  std::string probe;
  std::string message;
  std::string reproducer;  // a module file re-running the failing judgment
};

struct ProbeResult {
  uint64_t checks = 0;
  std::vector<ProbeFailure> failures;
};

// Which checker a judgment goes to.
struct Checkers {
  const Semiring* sr = nullptr;
  const ModeTheory* mt = nullptr;
  std::string config;  // written into reproducers
  CheckOptions opts;
  Derivation check(const Judgment& j) const;
};

ProbeResult subject_reduction_probe(const Checkers& c, const Judgment& j);
ProbeResult inversion_probe(const Checkers& c, const Judgment& j);
ProbeResult ctx_vector_probe(const Checkers& c, const Judgment& ctx_judgment, Generator& g,
                             int draws = 5);
// Re-checks a transformed judgment; with `exact`, also requires synthesized
// usage equal to the transformed vector.
ProbeResult recheck(const Checkers& c, const std::string& probe, const Judgment& j, bool exact);

// Module text with one `judge` item reproducing j.
std::string judgment_source(const Judgment& j, const std::string& config);
bool has_slack(const Derivation& d);

// ------------------------------------------------------------------ runs

struct MetaOptions {
  std::string suite;
  uint64_t count = 100;
  uint64_t seed = 1;
  std::string config = "nat";
  int depth = 3;
};

struct MetaSection {
  std::string fragment;
  uint64_t generated = 0, checks = 0, skipped = 0;
  // Rule name -> number of generated derivation nodes using it.
  std::vector<std::pair<std::string, uint64_t>> rules;
};

struct MetaReport {
  MetaOptions options;
  std::vector<MetaSection> sections;
  std::vector<ProbeFailure> failures;
};

const std::vector<std::string>& meta_suites();
MetaReport run_meta(const MetaOptions& o);
std::string render_meta_report(const MetaReport& r);

}  // namespace gradal
