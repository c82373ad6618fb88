#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradal/semiring.hpp"

namespace gradal {

struct Mode {
  std::string id;
  const Semiring* semiring = nullptr;
  bool weak = false;
};

using ModeId = std::size_t;

class ModeTheory {
 public:
  struct MorphismDecl {
    ModeId from, to;
    Morphism map;
  };

  // `order` lists generator pairs; the closure is computed here. Missing
  // morphisms for comparable pairs are filled in by composition along the
  // order; a comparable pair with no route throws ConfigError.
  ModeTheory(std::string id, std::vector<Mode> modes,
             const std::vector<std::pair<ModeId, ModeId>>& order,
             std::vector<MorphismDecl> morphisms);

  const std::string& id() const { return id_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(ModeId m) const { return modes_.at(m); }
  const std::vector<Mode>& modes() const { return modes_; }

  ModeId index_of(std::string_view name) const;  // UnknownMode
  std::optional<ModeId> find(std::string_view name) const;

  bool leq(ModeId a, ModeId b) const;
  bool leq_vec(ModeId m, const std::vector<ModeId>& ms) const;
  // f_ab for a <= b; NoMorphism otherwise.
  const Morphism& morphism(ModeId a, ModeId b) const;
  const std::vector<MorphismDecl>& declared() const { return declared_; }

 private:
  std::string id_;
  std::vector<Mode> modes_;
  std::vector<char> leq_;
  std::map<std::pair<ModeId, ModeId>, Morphism> maps_;
  std::vector<MorphismDecl> declared_;
};

bool mode_leq(const ModeTheory& mt, std::string_view m, std::string_view n);
bool mode_leq_vec(const ModeTheory& mt, std::string_view m,
                  const std::vector<std::string>& ms);

// Entry i of the result is f_{m, ms[i]}(r) * d[i], computed in the semiring
// of ms[i]. Zero entries stay zero even without a morphism.
GradeVector cross_scale(const ModeTheory& mt, const Grade& r, ModeId m,
                        const GradeVector& d, const std::vector<ModeId>& ms);

ValidationReport validate_mode_theory(const ModeTheory& mt,
                                      uint64_t seed = kNatLawSeed);

}  // namespace gradal
