#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gradal/error.hpp"

namespace gradal {

// A preordered semiring. Elements are encoded as uint64_t: the number itself
// for the builtin naturals, an index into the element list otherwise.
class Semiring {
 public:
  static std::shared_ptr<Semiring> nat(std::string id, bool usual_order);
  // Tables are row-major |names| x |names|; the order is given as generator
  // pairs and closed reflexively-transitively here.
  static std::shared_ptr<Semiring> finite(
      std::string id, std::vector<std::string> names,
      std::vector<uint64_t> add_table, std::vector<uint64_t> mul_table,
      uint64_t zero, uint64_t one,
      const std::vector<std::pair<uint64_t, uint64_t>>& order_generators);

  const std::string& id() const { return id_; }
  bool is_nat() const { return nat_; }
  bool nat_usual_order() const { return nat_usual_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  uint64_t zero() const { return zero_; }
  uint64_t one() const { return one_; }
  uint64_t add(uint64_t a, uint64_t b) const;
  uint64_t mul(uint64_t a, uint64_t b) const;
  bool leq(uint64_t a, uint64_t b) const;

  std::optional<uint64_t> lookup(std::string_view name) const;
  std::string show(uint64_t v) const;
  void add_alias(const std::string& alias, uint64_t v) { aliases_[alias] = v; }
  const std::map<std::string, uint64_t>& aliases() const { return aliases_; }

  // Least upper bound of a and b in the preorder, when one exists and is
  // computable (finite carriers: exhaustive; naturals: max / equality).
  std::optional<uint64_t> join(uint64_t a, uint64_t b) const;
  // Elements in a fixed enumeration order, up to `nat_bound` for the
  // naturals (inclusive).
  std::vector<uint64_t> enumerate(uint64_t nat_bound) const;

 private:
  Semiring() = default;
  std::string id_;
  bool nat_ = false;
  bool nat_usual_ = true;
  std::vector<std::string> names_;
  std::map<std::string, uint64_t> aliases_;
  std::vector<uint64_t> add_, mul_;
  std::vector<char> leq_;
  uint64_t zero_ = 0, one_ = 1;
};

using SemiringPtr = std::shared_ptr<const Semiring>;

struct Grade {
  const Semiring* sr = nullptr;
  uint64_t v = 0;

  std::string show() const { return sr ? sr->show(v) : "?"; }
  friend bool operator==(const Grade& a, const Grade& b) {
    return a.sr == b.sr && a.v == b.v;
  }
};

using GradeVector = std::vector<Grade>;

Grade grade_of(const Semiring& s, std::string_view name);
Grade zero_of(const Semiring& s);
Grade one_of(const Semiring& s);

Grade add(const Grade& a, const Grade& b);
Grade mul(const Grade& a, const Grade& b);
bool leq(const Grade& a, const Grade& b);

GradeVector vec_add(const GradeVector& a, const GradeVector& b);
GradeVector vec_scale(const Grade& r, const GradeVector& d);
bool vec_leq(const GradeVector& a, const GradeVector& b);
std::string show_vector(const GradeVector& d);

class Morphism {
 public:
  enum class Kind { Identity, Table, FromNat };

  static Morphism identity(const Semiring& s);
  static Morphism table(const Semiring& src, const Semiring& dst,
                        std::vector<uint64_t> images);
  // n |-> 1 + ... + 1 (n times) in the target.
  static Morphism from_nat(const Semiring& src, const Semiring& dst);
  // The canonical morphism: from the naturals it is n |-> n.1; from a finite
  // carrier it is the single table satisfying every morphism law. Failure
  // (none, or more than one) throws ConfigError.
  static Morphism unique(const Semiring& src, const Semiring& dst);

  const Semiring& source() const { return *src_; }
  const Semiring& target() const { return *dst_; }
  Kind kind() const { return kind_; }
  uint64_t apply_raw(uint64_t a) const;
  Morphism compose(const Morphism& after) const;

 private:
  const Semiring* src_ = nullptr;
  const Semiring* dst_ = nullptr;
  Kind kind_ = Kind::Identity;
  std::vector<uint64_t> table_;
};

Grade apply_morphism(const Morphism& f, const Grade& a);

struct LawViolation {
  std::string law;
  std::string witness;
};

struct ValidationReport {
  std::string subject;
  std::vector<LawViolation> violations;
  uint64_t checks = 0;
  bool ok() const { return violations.empty(); }
  std::string render() const;
};

// Seed for the randomized law sample on the naturals ("gradal" in ASCII).
inline constexpr uint64_t kNatLawSeed = 0x67726164616cULL;
inline constexpr std::size_t kNatLawSamples = 1000;

ValidationReport validate_semiring(const Semiring& s,
                                   uint64_t seed = kNatLawSeed,
                                   std::size_t samples = kNatLawSamples);
ValidationReport validate_morphism(const Morphism& f,
                                   uint64_t seed = kNatLawSeed,
                                   std::size_t samples = kNatLawSamples);

// Sample of carrier elements used by the law checks: the full carrier for
// finite semirings, a seeded pseudo-random list biased to small numbers
// for the naturals.
std::vector<uint64_t> law_sample(const Semiring& s, uint64_t seed,
                                 std::size_t samples);

}  // namespace gradal
