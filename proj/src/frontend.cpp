#include "gradal/frontend.hpp"

#include <filesystem>

namespace gradal {

Diagnostic diagnostic_of(const Error& e, const std::string& span) {
  Diagnostic d;
  d.code = std::string(code_name(e.code()));
  d.span = span;
  d.message = e.message();
  d.rule = e.rule();
  d.payload = e.payload();
  return d;
}

std::string render_error(const Diagnostic& d) {
  std::string s;
  if (!d.span.empty()) s += d.span + ": ";
  s += d.severity + "[" + d.code + "]";
  if (!d.rule.empty()) s += " (" + d.rule + ")";
  s += ": " + d.message + "\n";
  for (const auto& [k, v] : d.payload) s += "  " + k + ": " + v + "\n";
  return s;
}

Instance resolve_instance(const SourceModule& m, const std::string& config_override,
                          const std::string& base_dir) {
  std::string name = !config_override.empty() ? config_override
                     : !m.config.empty()       ? m.config
                                               : "nat";
  Instance inst;
  inst.registry = load_config(name, {}, base_dir);
  inst.semiring = m.semiring.empty() ? inst.registry->default_semiring()
                                     : &inst.registry->semiring(m.semiring);
  inst.theory = m.theory.empty() ? inst.registry->default_theory()
                                 : &inst.registry->theory(m.theory);
  return inst;
}

std::string item_kind_name(Item::Kind k) {
  switch (k) {
    case Item::Kind::GradedDef: return "graded def";
    case Item::Kind::LinearDef: return "linear def";
    case Item::Kind::GladDef: return "glad def";
    case Item::Kind::JudgeGraded: return "judge graded";
    case Item::Kind::JudgeMixed: return "judge mixed";
    case Item::Kind::JudgeGlad: return "judge glad";
    case Item::Kind::CtxGraded: return "judge ctx graded";
    case Item::Kind::CtxMixed: return "judge ctx mixed";
    case Item::Kind::CtxGlad: return "judge ctx glad";
    case Item::Kind::TypeGraded: return "judge type graded";
    case Item::Kind::TypeLinear: return "judge type linear";
    case Item::Kind::TypeGlad: return "judge type glad";
  }
  return "?";
}

namespace {

bool is_glad(Item::Kind k) {
  return k == Item::Kind::GladDef || k == Item::Kind::JudgeGlad || k == Item::Kind::CtxGlad ||
         k == Item::Kind::TypeGlad;
}

const Semiring& need_semiring(const Instance& inst) {
  if (!inst.semiring) fail(ErrorCode::ConfigError, "the config declares no semiring");
  return *inst.semiring;
}

const ModeTheory& need_theory(const Instance& inst) {
  if (!inst.theory) fail(ErrorCode::ConfigError, "the config declares no mode theory");
  return *inst.theory;
}

// Grade names in dmGL terms are written back in canonical form, so aliases
// never reach derivation dumps.
TermPtr canon(const TermPtr& t, const Semiring& sr) {
  if (!t) return t;
  return map_grades(t, [&](const std::string& g) { return sr.show(grade_of(sr, g).v); });
}

}  // namespace

Judgment item_judgment(const Item& it, const Instance& inst) {
  Judgment j;
  if (is_glad(it.kind)) {
    const ModeTheory& mt = need_theory(inst);
    for (const auto& h : it.gctx) {
      const Semiring& sr = *mt.mode(mt.index_of(h.mode)).semiring;
      auto v = sr.lookup(h.grade);
      if (!v)
        fail(ErrorCode::GradeModeMismatch, "'" + h.grade + "' is not a grade of mode " + h.mode +
                                               " (semiring " + sr.id() + ")");
      j.delta.push_back(Grade{&sr, *v});
      j.gctx.push_back({h.name, h.type, h.mode});
    }
    j.mode = it.mode;
    j.subject = it.subject;
    j.type = it.type;
    switch (it.kind) {
      case Item::Kind::CtxGlad: j.fragment = Fragment::GladCtx; break;
      case Item::Kind::TypeGlad:
        j.fragment = Fragment::Glad;
        j.type = mk(Tag::TypeU);
        break;
      default: j.fragment = Fragment::Glad;
    }
    if (!j.mode.empty()) mt.index_of(j.mode);
    return j;
  }
  const Semiring& sr = need_semiring(inst);
  for (const auto& h : it.gctx) {
    j.delta.push_back(grade_of(sr, h.grade));
    j.gctx.push_back({h.name, canon(h.type, sr), {}});
  }
  for (const auto& h : it.lctx) j.lctx.push_back({h.name, canon(h.type, sr), {}});
  j.subject = canon(it.subject, sr);
  j.type = canon(it.type, sr);
  switch (it.kind) {
    case Item::Kind::GradedDef:
    case Item::Kind::JudgeGraded: j.fragment = Fragment::Graded; break;
    case Item::Kind::LinearDef:
    case Item::Kind::JudgeMixed: j.fragment = Fragment::Mixed; break;
    case Item::Kind::CtxGraded: j.fragment = Fragment::GradedCtx; break;
    case Item::Kind::CtxMixed: j.fragment = Fragment::MixedCtx; break;
    case Item::Kind::TypeGraded:
      j.fragment = Fragment::Graded;
      j.type = mk(Tag::TypeU);
      break;
    case Item::Kind::TypeLinear:
      j.fragment = Fragment::Graded;
      j.type = mk(Tag::LinearU);
      break;
    default: break;
  }
  return j;
}

Derivation check_item(const Item& it, const Instance& inst, const CheckOptions& opts) {
  Judgment j = item_judgment(it, inst);
  if (is_glad(it.kind)) {
    GladChecker gc(need_theory(inst), opts);
    if (it.kind == Item::Kind::TypeGlad) return gc.type_wf_glad(j.gctx, j.mode, j.subject).derivation;
    return gc.check(j);
  }
  DmglChecker dc(need_semiring(inst), opts);
  if (it.kind == Item::Kind::TypeGraded) return dc.type_wf_graded(j.gctx, j.subject).derivation;
  if (it.kind == Item::Kind::TypeLinear) return dc.type_wf_linear(j.gctx, j.subject).derivation;
  return dc.check(j);
}

bool ModuleReport::ok() const {
  for (const auto& o : items)
    if (!o.met) return false;
  return true;
}

ModuleReport check_module(const SourceModule& m, const Instance& inst, const CheckOptions& opts) {
  ModuleReport r;
  r.file = m.file;
  r.registry = inst.registry;
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    const Item& it = m.items[i];
    ItemOutcome o;
    o.index = i;
    o.label = it.name.empty() ? item_kind_name(it.kind) : item_kind_name(it.kind) + " " + it.name;
    o.span = it.span.str();
    o.expected = it.expect_reject;
    try {
      o.derivation = check_item(it, inst, opts);
    } catch (const Error& e) {
      o.diagnostic = diagnostic_of(e, o.span);
      try {
        o.diagnostic->payload.push_back({"judgment", render_judgment(item_judgment(it, inst))});
      } catch (const Error&) {
      }
    }
    if (o.expected)
      o.met = o.diagnostic && o.diagnostic->code == *o.expected;
    else
      o.met = o.derivation.has_value();
    r.items.push_back(std::move(o));
  }
  return r;
}

std::string render_report(const ModuleReport& r) {
  std::string s;
  for (const auto& o : r.items) {
    s += "== " + std::to_string(o.index) + " " + o.label + " [" +
         (o.expected ? "expect reject " + *o.expected : std::string("expect accept")) + "]\n";
    if (o.derivation) s += render_derivation(*o.derivation);
    if (o.diagnostic) s += render_error(*o.diagnostic);
  }
  return s;
}

std::string render_failures(const ModuleReport& r) {
  std::string s;
  for (const auto& o : r.items) {
    if (o.met) continue;
    std::string actual = o.diagnostic ? "rejected with " + o.diagnostic->code : "accepted";
    std::string want = o.expected ? "rejection with " + *o.expected : "acceptance";
    s += o.span + ": " + o.label + ": expected " + want + ", " + actual + "\n";
    if (o.diagnostic) s += render_error(*o.diagnostic);
  }
  return s;
}

}  // namespace gradal
