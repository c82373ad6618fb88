#include "gradal/derivation.hpp"

#include "gradal/printer.hpp"

namespace gradal {

namespace {

std::string render_ctx(const Ctx& ctx, const Names& outer) {
  if (ctx.empty()) return ".";
  std::string out;
  Names scope = outer;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out += ", ";
    out += ctx[i].name + " : " + print_term(ctx[i].type, scope);
    scope.graded.push_back(ctx[i].name);
  }
  return out;
}

std::string render_linear(const Ctx& lctx, const Names& graded) {
  if (lctx.empty()) return ".";
  std::string out;
  for (std::size_t i = 0; i < lctx.size(); ++i) {
    if (i) out += ", ";
    out += lctx[i].name + " : " + print_term(lctx[i].type, graded);
  }
  return out;
}

std::string render_modes(const Ctx& ctx) {
  std::string out = "(";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out += ", ";
    out += ctx[i].mode;
  }
  return out + ")";
}

}  // namespace

std::string render_judgment(const Judgment& j) {
  Names names = names_of(j.gctx, j.lctx);
  Names graded_only;
  graded_only.graded = names.graded;
  std::string head = show_vector(j.delta);
  bool glad = j.fragment == Fragment::Glad || j.fragment == Fragment::GladCtx;
  if (glad) head += " | " + render_modes(j.gctx);
  head += " (.) " + render_ctx(j.gctx, {});
  bool mixed = j.fragment == Fragment::Mixed || j.fragment == Fragment::MixedCtx;
  if (mixed) head += " ; " + render_linear(j.lctx, graded_only);
  switch (j.fragment) {
    case Fragment::GradedCtx: return head + " |-G ctx";
    case Fragment::MixedCtx: return head + " |-M ctx";
    case Fragment::GladCtx: return head + " |- ctx";
    case Fragment::Graded: head += " |-G "; break;
    case Fragment::Mixed: head += " |-M "; break;
    case Fragment::Glad: head += " |-_" + j.mode + " "; break;
  }
  return head + print_term(j.subject, names) + " : " + print_term(j.type, graded_only);
}

namespace {

void render(const Derivation& d, int depth, std::string& out) {
  out.append(std::size_t(depth) * 2, ' ');
  out += d.rule;
  if (!d.side.empty()) {
    out += " {";
    for (std::size_t i = 0; i < d.side.size(); ++i) {
      if (i) out += ", ";
      out += d.side[i].first + "=" + d.side[i].second;
    }
    out += "}";
  }
  out += "  " + render_judgment(d.conclusion) + "\n";
  for (const auto& p : d.premises) render(p, depth + 1, out);
}

}  // namespace

std::string render_derivation(const Derivation& d) {
  std::string out;
  render(d, 0, out);
  return out;
}

std::size_t derivation_size(const Derivation& d) {
  std::size_t n = 0;
  for_each_node(d, [&](const Derivation&) { ++n; });
  return n;
}

}  // namespace gradal
