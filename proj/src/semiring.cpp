#include "gradal/semiring.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <random>
#include <sstream>

namespace gradal {

bool code_from_name(std::string_view name, ErrorCode& out) {
  for (ErrorCode c : kAllErrorCodes) {
    if (code_name(c) == name) {
      out = c;
      return true;
    }
  }
  return false;
}

std::shared_ptr<Semiring> Semiring::nat(std::string id, bool usual_order) {
  auto s = std::shared_ptr<Semiring>(new Semiring());
  s->id_ = std::move(id);
  s->nat_ = true;
  s->nat_usual_ = usual_order;
  s->zero_ = 0;
  s->one_ = 1;
  return s;
}

std::shared_ptr<Semiring> Semiring::finite(
    std::string id, std::vector<std::string> names,
    std::vector<uint64_t> add_table, std::vector<uint64_t> mul_table,
    uint64_t zero, uint64_t one,
    const std::vector<std::pair<uint64_t, uint64_t>>& order_generators) {
  const std::size_t n = names.size();
  if (n == 0) fail(ErrorCode::ConfigError, "semiring '" + id + "' has no elements");
  if (add_table.size() != n * n || mul_table.size() != n * n)
    fail(ErrorCode::ConfigError, "semiring '" + id + "': operation table is not total");
  for (uint64_t x : add_table)
    if (x >= n) fail(ErrorCode::UnknownElement, "semiring '" + id + "': table entry out of carrier");
  for (uint64_t x : mul_table)
    if (x >= n) fail(ErrorCode::UnknownElement, "semiring '" + id + "': table entry out of carrier");
  if (zero >= n || one >= n)
    fail(ErrorCode::UnknownElement, "semiring '" + id + "': unit out of carrier");

  auto s = std::shared_ptr<Semiring>(new Semiring());
  s->id_ = std::move(id);
  s->names_ = std::move(names);
  s->add_ = std::move(add_table);
  s->mul_ = std::move(mul_table);
  s->zero_ = zero;
  s->one_ = one;
  s->leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) s->leq_[i * n + i] = 1;
  for (auto [a, b] : order_generators) {
    if (a >= n || b >= n)
      fail(ErrorCode::UnknownElement, "semiring '" + s->id_ + "': order pair out of carrier");
    s->leq_[a * n + b] = 1;
  }
  // Warshall closure.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (s->leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (s->leq_[k * n + j]) s->leq_[i * n + j] = 1;
  return s;
}

uint64_t Semiring::add(uint64_t a, uint64_t b) const {
  if (nat_) {
    uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
      fail(ErrorCode::Overflow, "natural-number grade overflow in +");
    return r;
  }
  return add_[a * names_.size() + b];
}

uint64_t Semiring::mul(uint64_t a, uint64_t b) const {
  if (nat_) {
    uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
      fail(ErrorCode::Overflow, "natural-number grade overflow in *");
    return r;
  }
  return mul_[a * names_.size() + b];
}

bool Semiring::leq(uint64_t a, uint64_t b) const {
  if (nat_) return nat_usual_ ? a <= b : a == b;
  return leq_[a * names_.size() + b] != 0;
}

std::optional<uint64_t> Semiring::lookup(std::string_view name) const {
  if (auto it = aliases_.find(std::string(name)); it != aliases_.end())
    return it->second;
  if (nat_) {
    if (name.empty()) return std::nullopt;
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
    if (ec != std::errc() || p != name.data() + name.size()) return std::nullopt;
    return v;
  }
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::string Semiring::show(uint64_t v) const {
  if (nat_) return std::to_string(v);
  return v < names_.size() ? names_[v] : "?";
}

std::optional<uint64_t> Semiring::join(uint64_t a, uint64_t b) const {
  if (nat_) {
    if (nat_usual_) return std::max(a, b);
    if (a == b) return a;
    return std::nullopt;
  }
  const std::size_t n = names_.size();
  std::vector<uint64_t> ubs;
  for (uint64_t c = 0; c < n; ++c)
    if (leq(a, c) && leq(b, c)) ubs.push_back(c);
  for (uint64_t c : ubs) {
    bool least = true;
    for (uint64_t d : ubs)
      if (!leq(c, d)) {
        least = false;
        break;
      }
    if (least) return c;
  }
  return std::nullopt;
}

std::vector<uint64_t> Semiring::enumerate(uint64_t nat_bound) const {
  std::vector<uint64_t> out;
  if (nat_) {
    for (uint64_t i = 0; i <= nat_bound; ++i) out.push_back(i);
  } else {
    for (uint64_t i = 0; i < names_.size(); ++i) out.push_back(i);
  }
  return out;
}

Grade grade_of(const Semiring& s, std::string_view name) {
  auto v = s.lookup(name);
  if (!v)
    fail(ErrorCode::UnknownElement,
         "'" + std::string(name) + "' is not an element of semiring '" + s.id() + "'");
  return Grade{&s, *v};
}

Grade zero_of(const Semiring& s) { return Grade{&s, s.zero()}; }
Grade one_of(const Semiring& s) { return Grade{&s, s.one()}; }

namespace {

void same_semiring(const Grade& a, const Grade& b, const char* op) {
  if (!a.sr || !b.sr)
    fail(ErrorCode::UnknownElement, std::string("uninitialised grade in ") + op);
  if (a.sr != b.sr && a.sr->id() != b.sr->id())
    fail(ErrorCode::SemiringMismatch, std::string(op) + " of " + a.show() + " in '" +
                                          a.sr->id() + "' and " + b.show() + " in '" +
                                          b.sr->id() + "'");
}

void check_member(const Grade& a) {
  if (!a.sr->is_nat() && a.v >= a.sr->size())
    fail(ErrorCode::UnknownElement, "element index outside the carrier of '" + a.sr->id() + "'");
}

}  // namespace

Grade add(const Grade& a, const Grade& b) {
  same_semiring(a, b, "+");
  check_member(a);
  check_member(b);
  return Grade{a.sr, a.sr->add(a.v, b.v)};
}

Grade mul(const Grade& a, const Grade& b) {
  same_semiring(a, b, "*");
  check_member(a);
  check_member(b);
  return Grade{a.sr, a.sr->mul(a.v, b.v)};
}

bool leq(const Grade& a, const Grade& b) {
  same_semiring(a, b, "<=");
  check_member(a);
  check_member(b);
  return a.sr->leq(a.v, b.v);
}

GradeVector vec_add(const GradeVector& a, const GradeVector& b) {
  if (a.size() != b.size())
    fail(ErrorCode::LengthMismatch, "vector lengths " + std::to_string(a.size()) + " and " +
                                        std::to_string(b.size()));
  GradeVector out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(add(a[i], b[i]));
  return out;
}

GradeVector vec_scale(const Grade& r, const GradeVector& d) {
  GradeVector out;
  out.reserve(d.size());
  for (const Grade& g : d) {
    if (g.sr != r.sr && g.sr->id() != r.sr->id())
      fail(ErrorCode::NoMorphism, "no morphism from '" + r.sr->id() + "' to '" + g.sr->id() +
                                      "' for scalar multiplication");
    out.push_back(mul(r, g));
  }
  return out;
}

bool vec_leq(const GradeVector& a, const GradeVector& b) {
  if (a.size() != b.size())
    fail(ErrorCode::LengthMismatch, "vector lengths " + std::to_string(a.size()) + " and " +
                                        std::to_string(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!leq(a[i], b[i])) return false;
  return true;
}

std::string show_vector(const GradeVector& d) {
  std::string out = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ", ";
    out += d[i].show();
  }
  return out + ")";
}

// ---------------------------------------------------------------- morphisms

Morphism Morphism::identity(const Semiring& s) {
  Morphism m;
  m.src_ = m.dst_ = &s;
  m.kind_ = Kind::Identity;
  return m;
}

Morphism Morphism::table(const Semiring& src, const Semiring& dst,
                         std::vector<uint64_t> images) {
  if (src.is_nat())
    fail(ErrorCode::ConfigError, "a morphism table needs a finite source");
  if (images.size() != src.size())
    fail(ErrorCode::ConfigError, "morphism table from '" + src.id() + "' is not total");
  for (uint64_t x : images)
    if (!dst.is_nat() && x >= dst.size())
      fail(ErrorCode::UnknownElement, "morphism image outside '" + dst.id() + "'");
  Morphism m;
  m.src_ = &src;
  m.dst_ = &dst;
  m.kind_ = Kind::Table;
  m.table_ = std::move(images);
  return m;
}

Morphism Morphism::from_nat(const Semiring& src, const Semiring& dst) {
  if (!src.is_nat()) fail(ErrorCode::ConfigError, "from_nat needs the naturals as source");
  Morphism m;
  m.src_ = &src;
  m.dst_ = &dst;
  m.kind_ = Kind::FromNat;
  return m;
}

namespace {

// n . 1 in s by repeated doubling.
uint64_t nat_image(const Semiring& s, uint64_t n) {
  if (s.is_nat()) return n;
  uint64_t acc = s.zero(), base = s.one();
  while (n) {
    if (n & 1) acc = s.add(acc, base);
    base = s.add(base, base);
    n >>= 1;
  }
  return acc;
}

bool table_is_morphism(const Semiring& src, const Semiring& dst,
                       const std::vector<uint64_t>& f) {
  if (f[src.zero()] != dst.zero() || f[src.one()] != dst.one()) return false;
  const std::size_t n = src.size();
  for (uint64_t a = 0; a < n; ++a)
    for (uint64_t b = 0; b < n; ++b) {
      if (f[src.add(a, b)] != dst.add(f[a], f[b])) return false;
      if (f[src.mul(a, b)] != dst.mul(f[a], f[b])) return false;
      if (src.leq(a, b) && !dst.leq(f[a], f[b])) return false;
    }
  return true;
}

}  // namespace

Morphism Morphism::unique(const Semiring& src, const Semiring& dst) {
  if (&src == &dst) return identity(src);
  if (src.is_nat()) return from_nat(src, dst);
  if (dst.is_nat())
    fail(ErrorCode::ConfigError, "cannot synthesise a unique morphism from '" + src.id() +
                                     "' into the naturals; give a table");
  const std::size_t n = src.size(), m = dst.size();
  std::vector<uint64_t> f(n, 0);
  std::vector<uint64_t> found;
  int count = 0;
  // Exhaustive search over all maps; carriers are tiny.
  double space = 1;
  for (std::size_t i = 0; i < n; ++i) space *= double(m);
  if (space > 2e6)
    fail(ErrorCode::ConfigError, "carrier too large to synthesise a unique morphism");
  while (true) {
    if (table_is_morphism(src, dst, f)) {
      ++count;
      found = f;
    }
    std::size_t i = 0;
    while (i < n && ++f[i] == m) f[i++] = 0;
    if (i == n) break;
  }
  if (count != 1)
    fail(ErrorCode::ConfigError, "no unique morphism '" + src.id() + "' -> '" + dst.id() +
                                     "' (" + std::to_string(count) + " candidates)");
  return table(src, dst, found);
}

uint64_t Morphism::apply_raw(uint64_t a) const {
  switch (kind_) {
    case Kind::Identity: return a;
    case Kind::Table: return table_.at(a);
    case Kind::FromNat: return nat_image(*dst_, a);
  }
  return a;
}

Morphism Morphism::compose(const Morphism& after) const {
  if (dst_ != &after.source() && dst_->id() != after.source().id())
    fail(ErrorCode::SemiringMismatch, "cannot compose morphisms through different semirings");
  if (kind_ == Kind::Identity) return after;
  if (after.kind_ == Kind::Identity) return *this;
  if (src_->is_nat()) return from_nat(*src_, after.target());
  std::vector<uint64_t> imgs;
  for (uint64_t a = 0; a < src_->size(); ++a) imgs.push_back(after.apply_raw(apply_raw(a)));
  return table(*src_, after.target(), std::move(imgs));
}

Grade apply_morphism(const Morphism& f, const Grade& a) {
  if (!a.sr || (a.sr != &f.source() && a.sr->id() != f.source().id()))
    fail(ErrorCode::SemiringMismatch, "morphism source is '" + f.source().id() + "', grade is in '" +
                                          (a.sr ? a.sr->id() : std::string("?")) + "'");
  return Grade{&f.target(), f.apply_raw(a.v)};
}

// --------------------------------------------------------------- validation

std::string ValidationReport::render() const {
  std::ostringstream os;
  os << subject << ": " << (ok() ? "pass" : "FAIL") << " (" << checks << " checks)";
  for (const auto& v : violations) os << "\n  " << v.law << ": " << v.witness;
  return os.str();
}

std::vector<uint64_t> law_sample(const Semiring& s, uint64_t seed, std::size_t samples) {
  if (!s.is_nat()) return s.enumerate(0);
  std::mt19937_64 rng(seed);
  std::vector<uint64_t> out = {0, 1, 2};
  while (out.size() < samples) {
    uint64_t pick = rng();
    // Half small values, half up to 2^20 so products stay far from overflow.
    out.push_back((pick & 1) ? (pick >> 1) % 8 : (pick >> 1) % (1u << 20));
  }
  return out;
}

namespace {

class LawChecker {
 public:
  LawChecker(const Semiring& s, ValidationReport& rep) : s_(s), rep_(rep) {}

  void eq(const char* law, uint64_t lhs, uint64_t rhs, std::initializer_list<uint64_t> wit) {
    ++rep_.checks;
    if (lhs != rhs) record(law, wit, "lhs=" + s_.show(lhs) + " rhs=" + s_.show(rhs));
  }
  void holds(const char* law, bool ok, std::initializer_list<uint64_t> wit) {
    ++rep_.checks;
    if (!ok) record(law, wit, "");
  }

 private:
  void record(const char* law, std::initializer_list<uint64_t> wit, const std::string& extra) {
    // One witness per law keeps reports short.
    for (const auto& v : rep_.violations)
      if (v.law == law) return;
    std::string w;
    char name = 'a';
    for (uint64_t x : wit) {
      if (!w.empty()) w += ", ";
      w += std::string(1, name++) + "=" + s_.show(x);
    }
    if (!extra.empty()) w += "; " + extra;
    rep_.violations.push_back({law, w});
  }
  const Semiring& s_;
  ValidationReport& rep_;
};

}  // namespace

ValidationReport validate_semiring(const Semiring& s, uint64_t seed, std::size_t samples) {
  ValidationReport rep;
  rep.subject = "semiring " + s.id();
  LawChecker c(s, rep);
  const uint64_t z = s.zero(), o = s.one();

  std::vector<std::array<uint64_t, 3>> triples;
  if (s.is_nat()) {
    auto xs = law_sample(s, seed, samples * 3);
    for (std::size_t i = 0; i + 2 < xs.size() && triples.size() < samples; i += 3)
      triples.push_back({xs[i], xs[i + 1], xs[i + 2]});
  } else {
    const uint64_t n = s.size();
    for (uint64_t a = 0; a < n; ++a)
      for (uint64_t b = 0; b < n; ++b)
        for (uint64_t d = 0; d < n; ++d) triples.push_back({a, b, d});
  }

  for (auto [a, b, d] : triples) {
    c.eq("add-associative", s.add(s.add(a, b), d), s.add(a, s.add(b, d)), {a, b, d});
    c.eq("add-commutative", s.add(a, b), s.add(b, a), {a, b});
    c.eq("add-unit", s.add(a, z), a, {a});
    c.eq("mul-associative", s.mul(s.mul(a, b), d), s.mul(a, s.mul(b, d)), {a, b, d});
    c.eq("mul-unit-left", s.mul(o, a), a, {a});
    c.eq("mul-unit-right", s.mul(a, o), a, {a});
    c.eq("distributive-left", s.mul(a, s.add(b, d)), s.add(s.mul(a, b), s.mul(a, d)), {a, b, d});
    c.eq("distributive-right", s.mul(s.add(a, b), d), s.add(s.mul(a, d), s.mul(b, d)), {a, b, d});
    c.eq("zero-annihilates-left", s.mul(z, a), z, {a});
    c.eq("zero-annihilates-right", s.mul(a, z), z, {a});
    c.holds("leq-reflexive", s.leq(a, a), {a});
    if (s.leq(a, b) && s.leq(b, d)) c.holds("leq-transitive", s.leq(a, d), {a, b, d});
    if (s.leq(a, b)) {
      c.holds("add-monotone", s.leq(s.add(a, d), s.add(b, d)), {a, b, d});
      c.holds("mul-monotone-left", s.leq(s.mul(a, d), s.mul(b, d)), {a, b, d});
      c.holds("mul-monotone-right", s.leq(s.mul(d, a), s.mul(d, b)), {a, b, d});
    }
  }
  return rep;
}

ValidationReport validate_morphism(const Morphism& f, uint64_t seed, std::size_t samples) {
  ValidationReport rep;
  const Semiring& s = f.source();
  const Semiring& t = f.target();
  rep.subject = "morphism " + s.id() + " -> " + t.id();
  auto wit = [&](std::initializer_list<uint64_t> xs) {
    std::string w;
    char name = 'a';
    for (uint64_t x : xs) {
      if (!w.empty()) w += ", ";
      w += std::string(1, name++) + "=" + s.show(x);
    }
    return w;
  };
  auto check = [&](const char* law, bool ok, std::initializer_list<uint64_t> xs) {
    ++rep.checks;
    if (ok) return;
    for (const auto& v : rep.violations)
      if (v.law == law) return;
    rep.violations.push_back({law, wit(xs)});
  };
  check("preserves-zero", f.apply_raw(s.zero()) == t.zero(), {s.zero()});
  check("preserves-one", f.apply_raw(s.one()) == t.one(), {s.one()});
  auto xs = law_sample(s, seed, s.is_nat() ? std::min<std::size_t>(samples, 200) : 0);
  if (s.is_nat()) {
    // Keep sampled naturals small enough for the pairwise loop.
    for (auto& x : xs) x %= 64;
  }
  for (uint64_t a : xs)
    for (uint64_t b : xs) {
      check("preserves-add", f.apply_raw(s.add(a, b)) == t.add(f.apply_raw(a), f.apply_raw(b)), {a, b});
      check("preserves-mul", f.apply_raw(s.mul(a, b)) == t.mul(f.apply_raw(a), f.apply_raw(b)), {a, b});
      if (s.leq(a, b)) check("monotone", t.leq(f.apply_raw(a), f.apply_raw(b)), {a, b});
    }
  return rep;
}

}  // namespace gradal
