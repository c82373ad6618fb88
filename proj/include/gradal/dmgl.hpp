#pragma once

#include <cstdint>
#include <vector>

#include "gradal/derivation.hpp"
#include "gradal/reduction.hpp"
#include "gradal/semiring.hpp"
#include "gradal/syntax.hpp"

namespace gradal {

struct CheckOptions {
  uint64_t fuel = default_fuel();
  // GlaD only: compare types by alpha_eq, without beta.
  bool strict = false;
};

struct GradeSynthesis {
  GradeVector usage;  // exact, before any subusage
  TermPtr type;
  Derivation derivation;
};

struct MixedSynthesis {
  GradeVector usage;
  std::vector<bool> linear_used;  // per entry of the linear context
  TermPtr type;
  Derivation derivation;
};

struct TypeWF {
  GradeVector witness;  // the delta' of delta' (.) D |-G X : Type
  Derivation derivation;
};

// Graded contexts hold types relative to their prefix. Linear-context types
// live in the whole graded context and may not mention linear variables.
class DmglChecker {
 public:
  explicit DmglChecker(const Semiring& sr, CheckOptions opts = {});

  const Semiring& semiring() const { return *sr_; }
  const CheckOptions& options() const { return opts_; }

  Derivation check_graded_ctx(const GradeVector& delta, const Ctx& gctx) const;
  Derivation check_mixed_ctx(const GradeVector& delta, const Ctx& gctx, const Ctx& lctx) const;

  TypeWF type_wf_graded(const Ctx& gctx, const TermPtr& X) const;
  TypeWF type_wf_linear(const Ctx& gctx, const TermPtr& A) const;

  GradeSynthesis infer_graded(const Ctx& gctx, const TermPtr& t) const;
  Derivation check_graded(const GradeVector& delta, const Ctx& gctx, const TermPtr& t,
                          const TermPtr& X) const;

  MixedSynthesis infer_mixed(const Ctx& gctx, const Ctx& lctx, const TermPtr& l) const;
  Derivation check_mixed(const GradeVector& delta, const Ctx& gctx, const Ctx& lctx,
                         const TermPtr& l, const TermPtr& A) const;

  // Runs the checker that matches j.fragment.
  Derivation check(const Judgment& j) const;

 private:
  const Semiring* sr_;
  CheckOptions opts_;
};

GradeVector zeros(const Semiring& sr, std::size_t n);

}  // namespace gradal
