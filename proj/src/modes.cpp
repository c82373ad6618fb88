#include "gradal/modes.hpp"

namespace gradal {

ModeTheory::ModeTheory(std::string id, std::vector<Mode> modes,
                       const std::vector<std::pair<ModeId, ModeId>>& order,
                       std::vector<MorphismDecl> morphisms)
    : id_(std::move(id)), modes_(std::move(modes)), declared_(std::move(morphisms)) {
  const std::size_t n = modes_.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (modes_[i].id == modes_[j].id)
        fail(ErrorCode::DuplicateName, "mode '" + modes_[i].id + "' declared twice");
  leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) leq_[i * n + i] = 1;
  for (auto [a, b] : order) {
    if (a >= n || b >= n) fail(ErrorCode::UnknownMode, "order pair outside theory '" + id_ + "'");
    leq_[a * n + b] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[k * n + j]) leq_[i * n + j] = 1;

  for (const auto& d : declared_) {
    if (!leq(d.from, d.to))
      fail(ErrorCode::ConfigError, "morphism " + modes_[d.from].id + " -> " + modes_[d.to].id +
                                       " declared but the modes are not ordered");
    maps_.insert_or_assign({d.from, d.to}, d.map);
  }
  for (ModeId i = 0; i < n; ++i)
    if (!maps_.count({i, i})) maps_.insert_or_assign({i, i}, Morphism::identity(*modes_[i].semiring));

  bool progress = true;
  while (progress) {
    progress = false;
    for (ModeId i = 0; i < n; ++i)
      for (ModeId j = 0; j < n; ++j) {
        if (!leq(i, j) || maps_.count({i, j})) continue;
        for (ModeId k = 0; k < n; ++k) {
          auto a = maps_.find({i, k}), b = maps_.find({k, j});
          if (k == i || k == j || a == maps_.end() || b == maps_.end()) continue;
          maps_.insert_or_assign({i, j}, a->second.compose(b->second));
          progress = true;
          break;
        }
      }
  }
  for (ModeId i = 0; i < n; ++i)
    for (ModeId j = 0; j < n; ++j)
      if (leq(i, j) && !maps_.count({i, j}))
        fail(ErrorCode::ConfigError, "no morphism for " + modes_[i].id + " <= " + modes_[j].id);
}

std::optional<ModeId> ModeTheory::find(std::string_view name) const {
  for (ModeId i = 0; i < modes_.size(); ++i)
    if (modes_[i].id == name) return i;
  return std::nullopt;
}

ModeId ModeTheory::index_of(std::string_view name) const {
  if (auto m = find(name)) return *m;
  fail(ErrorCode::UnknownMode, "mode '" + std::string(name) + "' is not in theory '" + id_ + "'");
}

bool ModeTheory::leq(ModeId a, ModeId b) const {
  const std::size_t n = modes_.size();
  if (a >= n || b >= n) fail(ErrorCode::UnknownMode, "mode index out of range");
  return leq_[a * n + b] != 0;
}

bool ModeTheory::leq_vec(ModeId m, const std::vector<ModeId>& ms) const {
  for (ModeId x : ms)
    if (!leq(m, x)) return false;
  return true;
}

const Morphism& ModeTheory::morphism(ModeId a, ModeId b) const {
  auto it = maps_.find({a, b});
  if (it == maps_.end())
    fail(ErrorCode::NoMorphism, "no morphism from mode " + modes_.at(a).id + " to " + modes_.at(b).id);
  return it->second;
}

bool mode_leq(const ModeTheory& mt, std::string_view m, std::string_view n) {
  return mt.leq(mt.index_of(m), mt.index_of(n));
}

bool mode_leq_vec(const ModeTheory& mt, std::string_view m, const std::vector<std::string>& ms) {
  ModeId a = mt.index_of(m);
  bool ok = true;
  // Resolve every name so unknown modes are reported even after a failure.
  for (const auto& x : ms) ok = mt.leq(a, mt.index_of(x)) && ok;
  return ok;
}

GradeVector cross_scale(const ModeTheory& mt, const Grade& r, ModeId m, const GradeVector& d,
                        const std::vector<ModeId>& ms) {
  if (d.size() != ms.size())
    fail(ErrorCode::LengthMismatch, "grade vector and mode vector differ in length");
  GradeVector out;
  out.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    // A zero entry is an unused hypothesis; it scales to zero in any mode.
    if (d[i].v == d[i].sr->zero()) {
      out.push_back(d[i]);
      continue;
    }
    if (!mt.leq(m, ms[i]))
      fail(ErrorCode::NoMorphism, "cannot scale by a grade of mode " + mt.mode(m).id +
                                      " into mode " + mt.mode(ms[i]).id);
    out.push_back(mul(apply_morphism(mt.morphism(m, ms[i]), r), d[i]));
  }
  return out;
}

ValidationReport validate_mode_theory(const ModeTheory& mt, uint64_t seed) {
  ValidationReport rep;
  rep.subject = "modes " + mt.id();
  auto violate = [&](std::string law, std::string witness) {
    rep.violations.push_back({std::move(law), std::move(witness)});
  };
  const std::size_t n = mt.size();
  for (ModeId i = 0; i < n; ++i) {
    ValidationReport s = validate_semiring(*mt.mode(i).semiring, seed);
    rep.checks += s.checks;
    for (auto& v : s.violations) violate(mt.mode(i).id + ":" + v.law, v.witness);
  }
  for (ModeId i = 0; i < n; ++i)
    for (ModeId j = 0; j < n; ++j) {
      if (!mt.leq(i, j)) continue;
      const std::string pair = mt.mode(i).id + " <= " + mt.mode(j).id;
      ++rep.checks;
      if (mt.mode(i).weak && !mt.mode(j).weak)
        violate("weak-monotone", pair + " but Weak(" + mt.mode(i).id + ") and not Weak(" +
                                     mt.mode(j).id + ")");
      const Morphism& f = mt.morphism(i, j);
      ValidationReport m = validate_morphism(f, seed);
      rep.checks += m.checks;
      for (auto& v : m.violations) violate(pair + ":" + v.law, v.witness);
      if (i == j) {
        for (uint64_t a : law_sample(*mt.mode(i).semiring, seed, 64)) {
          ++rep.checks;
          if (f.apply_raw(a) != a) {
            violate("identity-on-diagonal", mt.mode(i).id + " moves " + mt.mode(i).semiring->show(a));
            break;
          }
        }
      }
    }
  for (ModeId i = 0; i < n; ++i)
    for (ModeId j = 0; j < n; ++j)
      for (ModeId k = 0; k < n; ++k) {
        if (!mt.leq(i, j) || !mt.leq(j, k)) continue;
        const Morphism &fij = mt.morphism(i, j), &fjk = mt.morphism(j, k), &fik = mt.morphism(i, k);
        const Semiring& src = *mt.mode(i).semiring;
        auto xs = law_sample(src, seed, 64);
        if (src.is_nat())
          for (auto& x : xs) x %= 64;
        for (uint64_t a : xs) {
          ++rep.checks;
          if (fjk.apply_raw(fij.apply_raw(a)) != fik.apply_raw(a)) {
            violate("functoriality", mt.mode(i).id + " <= " + mt.mode(j).id + " <= " +
                                         mt.mode(k).id + " at a=" + src.show(a));
            break;
          }
        }
      }
  return rep;
}

}  // namespace gradal
