#include "gradal/config.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#ifndef GRADAL_CONFIG_DIR
#define GRADAL_CONFIG_DIR "configs"
#endif

namespace gradal {

namespace fs = std::filesystem;

const Semiring* Registry::find_semiring(std::string_view id) const {
  for (const auto& s : semirings_)
    if (s->id() == id) return s.get();
  return nullptr;
}

const ModeTheory* Registry::find_theory(std::string_view id) const {
  for (const auto& t : theories_)
    if (t->id() == id) return t.get();
  return nullptr;
}

const Semiring& Registry::semiring(std::string_view id) const {
  if (auto* s = find_semiring(id)) return *s;
  fail(ErrorCode::ConfigError, "no semiring '" + std::string(id) + "' in config '" + name_ + "'");
}

const ModeTheory& Registry::theory(std::string_view id) const {
  if (auto* t = find_theory(id)) return *t;
  fail(ErrorCode::ConfigError, "no mode theory '" + std::string(id) + "' in config '" + name_ + "'");
}

const Semiring* Registry::default_semiring() const {
  if (own_semiring_) return own_semiring_;
  return semirings_.empty() ? nullptr : semirings_.front().get();
}

const ModeTheory* Registry::default_theory() const {
  if (own_theory_) return own_theory_;
  return theories_.empty() ? nullptr : theories_.front().get();
}

std::vector<std::string> default_config_dirs() {
  std::vector<std::string> out;
  if (const char* env = std::getenv("GRADAL_CONFIG_PATH")) {
    std::stringstream ss(env);
    std::string part;
    while (std::getline(ss, part, ':'))
      if (!part.empty()) out.push_back(part);
  }
  out.push_back(GRADAL_CONFIG_DIR);
  return out;
}

namespace {

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

class ConfigLoader {
 public:
  ConfigLoader(Registry& reg, const ConfigOptions& opts, std::string name)
      : reg_(reg), opts_(opts) {
    reg_.name_ = std::move(name);
  }

  void load_text(std::string_view text, const std::string& base_dir, const std::string& where,
                 bool top) {
    std::vector<std::string> lines;
    {
      std::string cur;
      for (char c : text) {
        if (c == '\n') {
          lines.push_back(cur);
          cur.clear();
        } else if (c != '\r') {
          cur += c;
        }
      }
      if (!cur.empty()) lines.push_back(cur);
    }
    where_ = where;
    std::size_t i = 0;
    auto next = [&](std::vector<std::string>& w) -> bool {
      while (i < lines.size()) {
        std::string l = lines[i++];
        if (auto h = l.find('#'); h != std::string::npos) l.erase(h);
        w = words(l);
        if (!w.empty()) {
          line_ = i;
          return true;
        }
      }
      return false;
    };
    std::vector<std::string> w;
    while (next(w)) {
      if (w[0] == "use") {
        if (w.size() != 2) perr("expected 'use <name>'");
        std::string saved = where_;
        std::size_t saved_line = line_;
        use(w[1], base_dir);
        where_ = saved;
        line_ = saved_line;
      } else if (w[0] == "semiring") {
        if (w.size() != 2) perr("expected 'semiring <id>'");
        auto s = semiring_block(w[1], next);
        if (top && !reg_.own_semiring_) reg_.own_semiring_ = s;
      } else if (w[0] == "modes") {
        if (w.size() != 2) perr("expected 'modes <id>'");
        auto t = modes_block(w[1], next);
        if (top && !reg_.own_theory_) reg_.own_theory_ = t;
      } else {
        perr("unexpected '" + w[0] + "' at top level");
      }
    }
  }

  void use(const std::string& name, const std::string& base_dir) {
    fs::path found;
    std::vector<std::string> dirs;
    if (!base_dir.empty()) dirs.push_back(base_dir);
    for (const auto& d : opts_.search_dirs) dirs.push_back(d);
    for (const auto& d : default_config_dirs()) dirs.push_back(d);
    for (const auto& d : dirs) {
      fs::path p = fs::path(d) / (name + ".cfg");
      if (fs::exists(p)) {
        found = p;
        break;
      }
    }
    if (found.empty()) perr("config '" + name + "' not found");
    std::string key = fs::weakly_canonical(found).string();
    for (const auto& f : reg_.loaded_files_)
      if (f == key) return;
    if (std::find(stack_.begin(), stack_.end(), key) != stack_.end())
      perr("cyclic 'use' of '" + name + "'");
    stack_.push_back(key);
    reg_.loaded_files_.push_back(key);
    load_text(read_file(found), found.parent_path().string(), found.string(), false);
    stack_.pop_back();
  }

  void load_file(const fs::path& p) {
    std::string key = fs::weakly_canonical(p).string();
    reg_.loaded_files_.push_back(key);
    stack_.push_back(key);
    load_text(read_file(p), p.parent_path().string(), p.string(), true);
    stack_.pop_back();
  }

 private:
  template <class Next>
  const Semiring* semiring_block(const std::string& id, Next& next) {
    if (reg_.find_semiring(id)) perr("semiring '" + id + "' defined twice", ErrorCode::DuplicateName);
    std::optional<bool> nat_order;
    bool nat = false;
    std::vector<std::string> elems;
    std::vector<std::pair<std::string, std::string>> aliases;
    std::optional<std::string> zero, one;
    std::vector<std::array<std::string, 3>> add_rows, mul_rows;
    std::vector<std::pair<std::string, std::string>> order;
    bool have_add = false, have_mul = false;
    std::vector<std::string> w;
    bool closed = false;
    while (next(w)) {
      const std::string& k = w[0];
      if (k == "end") {
        closed = true;
        break;
      }
      if (k == "carrier") {
        if (w.size() != 2 || w[1] != "nat") perr("only 'carrier nat' is builtin");
        nat = true;
      } else if (k == "elements") {
        elems.assign(w.begin() + 1, w.end());
      } else if (k == "alias") {
        if (w.size() != 3) perr("expected 'alias <name> <element>'");
        aliases.push_back({w[1], w[2]});
      } else if (k == "zero" || k == "one") {
        if (w.size() != 2) perr("expected '" + k + " <element>'");
        (k == "zero" ? zero : one) = w[1];
      } else if (k == "add" || k == "mul") {
        if (w.size() != 1) perr("'" + k + "' opens a table block");
        auto& rows = k == "add" ? add_rows : mul_rows;
        (k == "add" ? have_add : have_mul) = true;
        table_rows(next, [&](const std::vector<std::string>& r) {
          if (r.size() != 4 || r[2] != "->") perr("expected 'a b -> c'");
          rows.push_back({r[0], r[1], r[3]});
        });
      } else if (k == "order") {
        if (w.size() == 2) {
          if (w[1] == "usual") nat_order = true;
          else if (w[1] == "trivial") nat_order = false;
          else perr("order must be 'usual' or 'trivial'");
        } else if (w.size() == 1) {
          table_rows(next, [&](const std::vector<std::string>& r) {
            if (r.size() != 3 || r[1] != "<=") perr("expected 'a <= b'");
            order.push_back({r[0], r[2]});
          });
        } else {
          perr("malformed order line");
        }
      } else {
        perr("unknown semiring field '" + k + "'");
      }
    }
    if (!closed) perr("semiring '" + id + "' is missing 'end'");

    std::shared_ptr<Semiring> s;
    if (nat) {
      if (!elems.empty() || have_add || have_mul || !order.empty())
        perr("builtin carrier 'nat' takes no tables");
      if (!nat_order) perr("semiring '" + id + "' needs 'order usual' or 'order trivial'");
      s = Semiring::nat(id, *nat_order);
    } else {
      if (elems.empty()) perr("semiring '" + id + "' needs 'elements' or 'carrier nat'");
      if (!zero) perr("semiring '" + id + "' has no zero element");
      if (!one) perr("semiring '" + id + "' has no one element");
      if (!have_add) perr("semiring '" + id + "' has no add table");
      if (!have_mul) perr("semiring '" + id + "' has no mul table");
      if (nat_order) perr("'order usual/trivial' applies to carrier nat only");
      std::map<std::string, uint64_t> idx;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (idx.count(elems[i])) perr("element '" + elems[i] + "' listed twice", ErrorCode::DuplicateName);
        idx[elems[i]] = i;
      }
      for (auto& [a, e] : aliases) {
        if (!idx.count(e)) perr("alias of unknown element '" + e + "'", ErrorCode::UnknownElement);
        if (idx.count(a)) perr("alias '" + a + "' shadows an element", ErrorCode::DuplicateName);
      }
      auto el = [&](const std::string& name) -> uint64_t {
        if (auto it = idx.find(name); it != idx.end()) return it->second;
        for (auto& [a, e] : aliases)
          if (a == name) return idx[e];
        perr("unknown element '" + name + "' in semiring '" + id + "'", ErrorCode::UnknownElement);
      };
      const std::size_t n = elems.size();
      auto build = [&](const std::vector<std::array<std::string, 3>>& rows, const char* what) {
        std::vector<uint64_t> t(n * n, UINT64_MAX);
        for (const auto& r : rows) {
          uint64_t a = el(r[0]), b = el(r[1]), c = el(r[2]);
          uint64_t& cell = t[a * n + b];
          if (cell != UINT64_MAX && cell != c)
            perr(std::string(what) + " table gives two results for " + r[0] + " " + r[1]);
          cell = c;
        }
        for (uint64_t a = 0; a < n; ++a)
          for (uint64_t b = 0; b < n; ++b)
            if (t[a * n + b] == UINT64_MAX)
              perr(std::string(what) + " table has no entry for " + elems[a] + " " + elems[b]);
        return t;
      };
      auto at = build(add_rows, "add");
      auto mt = build(mul_rows, "mul");
      std::vector<std::pair<uint64_t, uint64_t>> gens;
      for (auto& [a, b] : order) gens.push_back({el(a), el(b)});
      s = Semiring::finite(id, elems, at, mt, el(*zero), el(*one), gens);
      for (auto& [a, e] : aliases) s->add_alias(a, el(e));
    }
    if (opts_.validate) {
      ValidationReport r = validate_semiring(*s);
      reg_.reports_.push_back(r);
      if (!r.ok()) perr("law violation\n" + r.render(), ErrorCode::ConfigError);
    }
    reg_.semirings_.push_back(s);
    return s.get();
  }

  template <class Next>
  const ModeTheory* modes_block(const std::string& id, Next& next) {
    if (reg_.find_theory(id)) perr("mode theory '" + id + "' defined twice", ErrorCode::DuplicateName);
    std::vector<Mode> modes;
    std::vector<std::pair<std::string, std::string>> order;
    struct MDecl {
      std::string from, to, kind;
      std::vector<std::pair<std::string, std::string>> rows;
      std::size_t line;
    };
    std::vector<MDecl> decls;
    std::vector<std::string> w;
    bool closed = false;
    while (next(w)) {
      const std::string& k = w[0];
      if (k == "end") {
        closed = true;
        break;
      }
      if (k == "mode") {
        if (w.size() != 4 || (w[3] != "weak=true" && w[3] != "weak=false"))
          perr("expected 'mode <name> <semiring> weak=true|false'");
        const Semiring* s = reg_.find_semiring(w[2]);
        if (!s) perr("mode '" + w[1] + "' uses unknown semiring '" + w[2] + "'");
        modes.push_back(Mode{w[1], s, w[3] == "weak=true"});
      } else if (k == "order") {
        table_rows(next, [&](const std::vector<std::string>& r) {
          if (r.size() != 3 || r[1] != "<=") perr("expected 'm <= n'");
          order.push_back({r[0], r[2]});
        });
      } else if (k == "morphism") {
        if (w.size() != 4) perr("expected 'morphism <from> <to> unique|identity|table'");
        MDecl d{w[1], w[2], w[3], {}, line_};
        if (w[3] == "table") {
          table_rows(next, [&](const std::vector<std::string>& r) {
            if (r.size() != 3 || r[1] != "->") perr("expected 'a -> b'");
            d.rows.push_back({r[0], r[2]});
          });
        } else if (w[3] != "unique" && w[3] != "identity") {
          perr("morphism kind must be unique, identity or table");
        }
        decls.push_back(std::move(d));
      } else {
        perr("unknown modes field '" + k + "'");
      }
    }
    if (!closed) perr("modes '" + id + "' is missing 'end'");
    if (modes.empty()) perr("mode theory '" + id + "' declares no modes");
    auto mid = [&](const std::string& n) -> ModeId {
      for (ModeId i = 0; i < modes.size(); ++i)
        if (modes[i].id == n) return i;
      perr("unknown mode '" + n + "'", ErrorCode::UnknownMode);
    };
    std::vector<std::pair<ModeId, ModeId>> ord;
    for (auto& [a, b] : order) ord.push_back({mid(a), mid(b)});
    std::vector<ModeTheory::MorphismDecl> ms;
    for (auto& d : decls) {
      line_ = d.line;
      ModeId a = mid(d.from), b = mid(d.to);
      const Semiring &sa = *modes[a].semiring, &sb = *modes[b].semiring;
      if (d.kind == "unique") {
        ms.push_back({a, b, wrap([&] { return Morphism::unique(sa, sb); })});
      } else if (d.kind == "identity") {
        if (&sa == &sb) {
          ms.push_back({a, b, Morphism::identity(sa)});
        } else {
          if (sa.is_nat() || sb.is_nat() || sa.names() != sb.names())
            perr("identity morphism needs carriers with the same elements");
          std::vector<uint64_t> img;
          for (uint64_t x = 0; x < sa.size(); ++x) img.push_back(x);
          ms.push_back({a, b, Morphism::table(sa, sb, img)});
        }
      } else {
        if (sa.is_nat()) perr("a morphism table needs a finite source");
        std::vector<uint64_t> img(sa.size(), UINT64_MAX);
        for (auto& [x, y] : d.rows) {
          auto xv = sa.lookup(x);
          auto yv = sb.lookup(y);
          if (!xv || !yv) perr("unknown element in morphism table", ErrorCode::UnknownElement);
          img[*xv] = *yv;
        }
        for (uint64_t x = 0; x < img.size(); ++x)
          if (img[x] == UINT64_MAX) perr("morphism table has no image for " + sa.show(x));
        ms.push_back({a, b, Morphism::table(sa, sb, img)});
      }
    }
    auto t = wrap([&] { return std::make_shared<ModeTheory>(id, modes, ord, ms); });
    if (opts_.validate) {
      ValidationReport r = validate_mode_theory(*t);
      reg_.reports_.push_back(r);
      if (!r.ok()) perr("law violation\n" + r.render(), ErrorCode::ConfigError);
    }
    reg_.theories_.push_back(t);
    return t.get();
  }

  template <class Next, class Row>
  void table_rows(Next& next, Row row) {
    std::vector<std::string> w;
    while (next(w)) {
      if (w.size() == 1 && w[0] == "end") return;
      row(w);
    }
    perr("table block is missing 'end'");
  }

  // Re-throws library errors with the current file position attached.
  template <class F>
  auto wrap(F f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      perr(e.message(), e.code());
    }
  }

  [[noreturn]] void perr(const std::string& msg, ErrorCode c = ErrorCode::ParseError) {
    fail(c, where_ + ":" + std::to_string(line_) + ": " + msg);
  }

  Registry& reg_;
  const ConfigOptions& opts_;
  std::string where_;
  std::size_t line_ = 0;
  std::vector<std::string> stack_;
};

std::shared_ptr<Registry> parse_config(std::string_view text, const std::string& base_dir,
                                       const ConfigOptions& opts, const std::string& name) {
  auto reg = std::make_shared<Registry>();
  ConfigLoader(*reg, opts, name).load_text(text, base_dir, name, true);
  return reg;
}

std::shared_ptr<Registry> load_config(const std::string& name_or_path, const ConfigOptions& opts,
                                      const std::string& from_dir) {
  fs::path p(name_or_path);
  if (!(p.has_extension() && fs::exists(p))) {
    std::vector<std::string> dirs;
    if (!from_dir.empty()) dirs.push_back(from_dir);
    for (const auto& d : opts.search_dirs) dirs.push_back(d);
    for (const auto& d : default_config_dirs()) dirs.push_back(d);
    p.clear();
    for (const auto& d : dirs) {
      fs::path c = fs::path(d) / (name_or_path + ".cfg");
      if (fs::exists(c)) {
        p = c;
        break;
      }
    }
    if (p.empty()) fail(ErrorCode::ConfigError, "config '" + name_or_path + "' not found");
  }
  auto reg = std::make_shared<Registry>();
  ConfigLoader(*reg, opts, p.stem().string()).load_file(p);
  return reg;
}

LoadedSemiring parse_semiring_config(std::string_view text, const ConfigOptions& opts) {
  auto reg = parse_config(text, {}, opts);
  const Semiring* s = reg->default_semiring();
  if (!s) fail(ErrorCode::ParseError, "config declares no semiring");
  return {reg, s};
}

LoadedTheory parse_mode_config(std::string_view text, const std::string& base_dir,
                               const ConfigOptions& opts) {
  auto reg = parse_config(text, base_dir, opts);
  const ModeTheory* t = reg->default_theory();
  if (!t) fail(ErrorCode::ParseError, "config declares no mode theory");
  return {reg, t};
}

}  // namespace gradal
