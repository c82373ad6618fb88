#pragma once

#include <string>

#include "gradal/dmgl.hpp"
#include "gradal/modes.hpp"

namespace gradal {

struct GladSynthesis {
  GradeVector usage;  // entry i lives in the semiring of context mode i
  TermPtr type;
  Derivation derivation;
};

// GlaD contexts carry each entry's mode in Hyp::mode; an entry's type is
// well formed at that mode over the prefix.
class GladChecker {
 public:
  explicit GladChecker(const ModeTheory& mt, CheckOptions opts = {});

  const ModeTheory& theory() const { return *mt_; }

  Derivation check_glad_ctx(const GradeVector& delta, const Ctx& ctx) const;
  TypeWF type_wf_glad(const Ctx& ctx, const std::string& mode, const TermPtr& A) const;
  // With gate_unused off, unused entries of non-weak modes are not an
  // error (usage of an open subterm).
  GladSynthesis infer_glad(const Ctx& ctx, const std::string& mode, const TermPtr& a,
                           bool gate_unused = true) const;
  Derivation check_glad(const GradeVector& delta, const Ctx& ctx, const std::string& mode,
                        const TermPtr& a, const TermPtr& A) const;
  Derivation check(const Judgment& j) const;

  // The unique mode of a type: I@m is at m, binder types take their
  // codomain's mode, up[m1->m2] B is at m2, a type variable at its entry's
  // mode; anything else at the ambient mode.
  std::string mode_of_type(const Ctx& ctx, const TermPtr& A, const std::string& ambient) const;

 private:
  const ModeTheory* mt_;
  CheckOptions opts_;
};

}  // namespace gradal
