#include "gradal/parser.hpp"

#include <cctype>
#include <cstring>

namespace gradal {

namespace {

enum class Pos { G, L };

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Parser {
 public:
  Parser(std::string_view src, std::string file, bool glad)
      : s_(src), file_(std::move(file)), glad_(glad) {}

  void set_scope(const Names& n) {
    for (const auto& x : n.graded) scope_.push_back({x, Zone::Graded});
    for (const auto& x : n.linear) scope_.push_back({x, Zone::Linear});
  }
  void set_glad(bool g) { glad_ = g; }
  void clear_scope() { scope_.clear(); }
  void push(const std::string& x, Zone z) { scope_.push_back({x, z}); }

  TermPtr expr(Pos pos) {
    ws();
    if (eat("\\")) {
      std::string x = binder_name();
      expect(".");
      Zone z = (pos == Pos::L && !glad_) ? Zone::Linear : Zone::Graded;
      push(x, z);
      TermPtr b = expr(pos);
      pop();
      return mk(z == Zone::Linear ? Tag::LamLin : Tag::Lam, {b}, {}, {}, {}, {x});
    }
    if (peek_kw("let")) return let_form(pos);
    if (peek_kw("case")) return case_form();
    if (binder_ahead()) return binder_form();
    if (ftype_ahead()) return ftype_form();
    return arrow(pos);
  }

  // ---------------------------------------------------------------- module

  SourceModule module() {
    SourceModule m;
    m.file = file_;
    std::optional<std::string> pending;
    for (;;) {
      ws();
      if (p_ >= s_.size()) break;
      Span sp = span();
      std::string w = word();
      if (w == "config" || w == "semiring" || w == "theory") {
        std::string v = name_token();
        expect(";");
        (w == "config" ? m.config : w == "semiring" ? m.semiring : m.theory) = v;
        continue;
      }
      if (w == "expect") {
        std::string what = word();
        if (what == "reject") {
          pending = word();
          if (pending->empty()) err("expected an error code after 'expect reject'");
        } else if (what == "accept") {
          pending.reset();
        } else {
          err("expected 'accept' or 'reject'");
        }
        expect(";");
        continue;
      }
      Item it;
      it.span = sp;
      clear_scope();
      if (w == "graded" || w == "linear" || w == "glad") {
        if (word() != "def") err("expected 'def'");
        it.kind = w == "graded" ? Item::Kind::GradedDef
                  : w == "linear" ? Item::Kind::LinearDef
                                  : Item::Kind::GladDef;
        it.name = ident();
        glad_ = w == "glad";
        if (glad_) {
          expect("@");
          it.mode = mode_name();
        }
        expect(":");
        it.type = expr(Pos::G);
        expect("=");
        it.subject = expr(w == "linear" ? Pos::L : Pos::G);
        expect(";");
      } else if (w == "judge") {
        judgment(it);
      } else if (w.empty()) {
        err("unexpected character");
      } else {
        err("unknown item '" + w + "'");
      }
      it.expect_reject = pending;
      pending.reset();
      m.items.push_back(std::move(it));
    }
    if (pending) err("'expect' is not followed by an item");
    return m;
  }

  void finish() {
    ws();
    if (p_ != s_.size()) err("unexpected trailing input");
  }

  [[noreturn]] void err(const std::string& msg, ErrorCode c = ErrorCode::ParseError) {
    fail(c, span().str() + ": " + msg);
  }

 private:
  // ---------------------------------------------------------------- lexing

  void ws() {
    for (;;) {
      while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
      if (p_ + 1 < s_.size() && s_[p_] == '-' && s_[p_ + 1] == '-') {
        while (p_ < s_.size() && s_[p_] != '\n') ++p_;
        continue;
      }
      return;
    }
  }

  bool peek(const char* lit) {
    ws();
    return s_.substr(p_, std::strlen(lit)) == lit;
  }
  bool eat(const char* lit) {
    if (!peek(lit)) return false;
    p_ += std::strlen(lit);
    return true;
  }
  void expect(const char* lit) {
    if (!eat(lit)) err(std::string("expected '") + lit + "'");
  }

  // A bare word without consuming it.
  std::string peek_word() {
    ws();
    std::size_t q = p_;
    if (q >= s_.size() || !ident_start(s_[q])) return {};
    while (q < s_.size() && ident_char(s_[q])) ++q;
    return std::string(s_.substr(p_, q - p_));
  }
  bool peek_kw(const char* kw) { return peek_word() == kw; }
  std::string word() {
    std::string w = peek_word();
    p_ += w.size();
    return w;
  }
  bool eat_kw(const char* kw) {
    if (!peek_kw(kw)) return false;
    p_ += std::strlen(kw);
    return true;
  }

  std::string ident() {
    std::string w = peek_word();
    if (w.empty()) err("expected an identifier");
    if (is_keyword(w)) err("'" + w + "' is a keyword");
    p_ += w.size();
    return w;
  }
  // Mode names may coincide with keywords (G is a mode in shipped configs).
  std::string mode_name() {
    std::string w = word();
    if (w.empty()) err("expected a mode name");
    return w;
  }

  // `_` may bind a variable that is never referenced.
  std::string binder_name() {
    if (peek_word() == "_") {
      p_ += 1;
      return "_";
    }
    return ident();
  }

  // Config and semiring names may contain '-'.
  std::string name_token() {
    ws();
    std::size_t q = p_;
    while (q < s_.size() && (ident_char(s_[q]) || s_[q] == '-' || s_[q] == '.' || s_[q] == '/'))
      ++q;
    if (q == p_) err("expected a name");
    std::string w(s_.substr(p_, q - p_));
    p_ = q;
    return w;
  }

  std::string grade_token() {
    std::size_t q = p_;
    while (q < s_.size() && !std::isspace(static_cast<unsigned char>(s_[q])) &&
           !std::strchr("@(),;", s_[q]))
      ++q;
    if (q == p_) err("expected a grade");
    std::string g(s_.substr(p_, q - p_));
    p_ = q;
    return g;
  }

  Span span() {
    Span sp;
    sp.file = file_;
    sp.line = 1;
    sp.col = 1;
    for (std::size_t i = 0; i < p_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++sp.line;
        sp.col = 1;
      } else {
        ++sp.col;
      }
    }
    return sp;
  }

  void pop(std::size_t n = 1) { scope_.resize(scope_.size() - n); }

  TermPtr lookup(const std::string& x) {
    uint32_t g = 0, l = 0;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == x) return it->second == Zone::Graded ? gvar(g) : lvar(l);
      (it->second == Zone::Graded ? g : l)++;
    }
    err("unbound name '" + x + "'", ErrorCode::UnboundName);
  }

  // ---------------------------------------------------------------- forms

  // `(` ident `:^`
  bool binder_ahead() {
    ws();
    std::size_t save = p_;
    bool ok = false;
    if (eat("(")) {
      std::string w = peek_word();
      if (!w.empty()) {
        p_ += w.size();
        ok = peek(":^");
      }
    }
    p_ = save;
    return ok;
  }

  bool ftype_ahead() {
    ws();
    std::size_t save = p_;
    bool ok = false;
    if (peek_word() == "F") {
      p_ += 1;
      if (eat("(")) {
        std::string w = peek_word();
        if (!w.empty()) {
          p_ += w.size();
          ok = peek(":^");
        }
      }
    }
    p_ = save;
    return ok;
  }

  TermPtr binder_form() {
    expect("(");
    std::string x = binder_name();
    expect(":^");
    std::string q = grade_token();
    std::string m;
    if (eat("@")) m = mode_name();
    TermPtr dom = expr(Pos::G);
    expect(")");
    Tag tag;
    if (eat("->")) tag = Tag::Pi;
    else if (eat("><")) tag = Tag::Sigma;
    else if (eat("-o")) tag = Tag::PiG;
    else if (eat("(x)")) tag = Tag::TensorG;
    else err("expected '->', '><', '-o' or '(x)' after a binder");
    bool moded = tag == Tag::PiG || tag == Tag::TensorG;
    if (moded && m.empty()) err("this binder needs a mode: (x :^r@m A)");
    if (!moded && !m.empty()) err("graded binders take no mode");
    push(x, Zone::Graded);
    TermPtr cod = expr(Pos::G);
    pop();
    return mk(tag, {dom, cod}, q, m, {}, {x});
  }

  TermPtr ftype_form() {
    word();  // F
    expect("(");
    std::string x = binder_name();
    expect(":^");
    std::string q = grade_token();
    TermPtr dom = expr(Pos::G);
    expect(")");
    expect(".");
    push(x, Zone::Graded);
    TermPtr a = expr(Pos::G);
    pop();
    return mk(Tag::FType, {dom, a}, q, {}, {}, {x});
  }

  TermPtr let_form(Pos pos) {
    word();  // let
    ws();
    bool lin = pos == Pos::L && !glad_;
    if (eat_kw("j")) {
      expect("=");
      TermPtr t = expr(Pos::G);
      if (!eat_kw("in")) err("expected 'in'");
      return mk(Tag::LetJ, {t, expr(Pos::G)});
    }
    if (eat_kw("i")) {
      expect("=");
      TermPtr t = expr(Pos::L);
      if (!eat_kw("in")) err("expected 'in'");
      return mk(Tag::LetI, {t, expr(Pos::L)});
    }
    if (eat("*@")) {
      std::string m = mode_name();
      expect("=");
      TermPtr t = expr(Pos::G);
      if (!eat_kw("in")) err("expected 'in'");
      return mk(Tag::LetStarM, {t, expr(Pos::G)}, {}, m);
    }
    if (peek_kw("F")) {
      word();
      expect("(");
      std::string x = binder_name();
      expect(",");
      std::string y = binder_name();
      expect(")");
      expect("=");
      TermPtr t = expr(Pos::L);
      if (!eat_kw("in")) err("expected 'in'");
      push(x, Zone::Graded);
      push(y, Zone::Linear);
      TermPtr b = expr(Pos::L);
      pop(2);
      return mk(Tag::LetF, {t, b}, {}, {}, {}, {x, y});
    }
    if (eat("(")) {
      std::string x = binder_name();
      expect(",");
      std::string y = binder_name();
      expect(")");
      expect("=");
      Pos inner = lin ? Pos::L : Pos::G;
      TermPtr t = expr(inner);
      if (!eat_kw("in")) err("expected 'in'");
      Zone z = lin ? Zone::Linear : Zone::Graded;
      push(x, z);
      push(y, z);
      TermPtr b = expr(inner);
      pop(2);
      return mk(lin ? Tag::LetTensor : Tag::LetPair, {t, b}, {}, {}, {}, {x, y});
    }
    err("expected 'j', 'i', '*@m', '(x, y)' or 'F(x, y)' after 'let'");
  }

  TermPtr case_form() {
    word();  // case
    if (!eat("^")) err("case needs a grade: case^q");
    std::string q = grade_token();
    TermPtr t = expr(Pos::G);
    if (!eat_kw("of")) err("expected 'of'");
    TermPtr s1 = expr(Pos::G);
    expect(";");
    TermPtr s2 = expr(Pos::G);
    return mk(Tag::Case, {t, s1, s2}, q);
  }

  bool open_ahead() {
    return peek("\\") || peek_kw("let") || peek_kw("case") || binder_ahead() || ftype_ahead();
  }

  TermPtr arrow(Pos pos) {
    TermPtr a = sum(pos);
    if (eat("-o")) return mk(Tag::Lollipop, {a, expr(Pos::G)});
    if (peek("->")) err("'->' needs a binder: (x :^r X) -> Y");
    return a;
  }

  TermPtr sum(Pos pos) {
    TermPtr a = tensor(pos);
    if (eat("(+)")) return mk(Tag::Sum, {a, open_ahead() ? expr(pos) : sum(pos)});
    return a;
  }

  TermPtr tensor(Pos pos) {
    TermPtr a = app(pos);
    if (eat("(x)")) return mk(Tag::Tensor, {a, open_ahead() ? expr(pos) : tensor(pos)});
    return a;
  }

  bool atom_ahead() {
    ws();
    if (p_ >= s_.size()) return false;
    char c = s_[p_];
    if (c == '(') return !peek("(x)") && !peek("(+)");
    if (c == '*') return true;
    std::string w = peek_word();
    if (w.empty()) return false;
    if (w == "J" || w == "I" || w == "j" || w == "i" || w == "Type" || w == "Linear" || w == "F" ||
        w == "_")
      return w != "_";
    return !is_keyword(w);
  }

  TermPtr app(Pos pos) {
    bool lin = pos == Pos::L && !glad_;
    std::string w = peek_word();
    if (w == "G" || w == "Gi" || w == "Ginv" || w == "inl" || w == "inr" || w == "up" ||
        w == "down") {
      word();
      if (w == "up" || w == "down") {
        expect("[");
        std::string m1 = mode_name();
        expect("->");
        std::string m2 = mode_name();
        expect("]");
        return mk(w == "up" ? Tag::Up : Tag::Down, {app_or_open(Pos::G)}, {}, m1, m2);
      }
      if (w == "G") return mk(Tag::GAdj, {app_or_open(Pos::G)});
      if (w == "Gi") return mk(Tag::GIntro, {app_or_open(Pos::L)});
      if (w == "Ginv") return mk(Tag::GInv, {app_or_open(Pos::G)});
      return mk(w == "inl" ? Tag::Inl : Tag::Inr, {app_or_open(Pos::G)});
    }
    TermPtr f = atom(pos);
    for (;;) {
      if (open_ahead()) {
        f = mk(lin ? Tag::AppLin : Tag::App, {f, expr(pos)});
        break;
      }
      if (!atom_ahead()) break;
      f = mk(lin ? Tag::AppLin : Tag::App, {f, atom(pos)});
    }
    return f;
  }

  TermPtr app_or_open(Pos pos) { return open_ahead() ? expr(pos) : app(pos); }

  TermPtr atom(Pos pos) {
    ws();
    bool lin = pos == Pos::L && !glad_;
    if (eat("*@")) return mk(Tag::StarM, {}, {}, mode_name());
    if (peek("(")) {
      if (binder_ahead()) return binder_form();
      expect("(");
      TermPtr a = expr(pos);
      if (eat(",")) {
        TermPtr b = expr(pos);
        expect(")");
        return mk(lin ? Tag::TensorPair : Tag::Pair, {a, b});
      }
      if (eat(":")) {
        TermPtr ty = expr(Pos::G);
        expect(")");
        return mk(Tag::Ann, {a, ty});
      }
      expect(")");
      return a;
    }
    std::string w = peek_word();
    if (w.empty()) err("expected a term");
    if (w == "F") {
      if (ftype_ahead()) return ftype_form();
      word();
      expect("(");
      TermPtr t = expr(Pos::G);
      expect(",");
      TermPtr l = expr(Pos::L);
      expect(")");
      return mk(Tag::FPair, {t, l});
    }
    word();
    if (w == "J") return mk(Tag::UnitJ);
    if (w == "I") {
      if (s_.substr(p_, 1) == "@") {
        ++p_;
        return mk(Tag::UnitM, {}, {}, mode_name());
      }
      return mk(Tag::UnitI);
    }
    if (w == "j") return mk(Tag::UnitJIntro);
    if (w == "i") return mk(Tag::UnitIIntro);
    if (w == "Type") return mk(Tag::TypeU);
    if (w == "Linear") return mk(Tag::LinearU);
    if (is_keyword(w)) {
      p_ -= w.size();
      err("unexpected keyword '" + w + "'");
    }
    return lookup(w);
  }

  // ---------------------------------------------------------------- judgments

  RawHyp hyp(bool graded, bool moded) {
    RawHyp h;
    h.name = ident();
    if (graded) {
      expect(":^");
      h.grade = grade_token();
      if (moded) {
        expect("@");
        h.mode = mode_name();
      }
    } else {
      expect(":");
    }
    h.type = expr(Pos::G);
    return h;
  }

  std::vector<RawHyp> hyps(bool graded, bool moded, Zone z) {
    std::vector<RawHyp> out;
    ws();
    if (peek("|-") || peek(";")) return out;
    for (;;) {
      out.push_back(hyp(graded, moded));
      push(out.back().name, z);
      if (!eat(",")) break;
    }
    return out;
  }

  void judgment(Item& it) {
    std::string w = word();
    std::string sub;
    if (w == "ctx" || w == "type") {
      sub = word();
    }
    std::string frag = sub.empty() ? w : sub;
    glad_ = frag == "glad";
    if (w == "ctx") {
      if (frag == "graded") {
        it.kind = Item::Kind::CtxGraded;
        it.gctx = hyps(true, false, Zone::Graded);
      } else if (frag == "mixed") {
        it.kind = Item::Kind::CtxMixed;
        it.gctx = hyps(true, false, Zone::Graded);
        expect(";");
        it.lctx = hyps(false, false, Zone::Linear);
      } else if (frag == "glad") {
        it.kind = Item::Kind::CtxGlad;
        it.gctx = hyps(true, true, Zone::Graded);
      } else {
        err("expected graded, mixed or glad");
      }
      expect(";");
      return;
    }
    if (w == "type") {
      if (frag == "graded" || frag == "linear") {
        it.kind = frag == "graded" ? Item::Kind::TypeGraded : Item::Kind::TypeLinear;
        it.gctx = hyps(true, false, Zone::Graded);
        expect("|-");
      } else if (frag == "glad") {
        it.kind = Item::Kind::TypeGlad;
        it.gctx = hyps(true, true, Zone::Graded);
        expect("|-@");
        it.mode = mode_name();
      } else {
        err("expected graded, linear or glad");
      }
      it.subject = expr(Pos::G);
      expect(";");
      return;
    }
    if (w == "graded") {
      it.kind = Item::Kind::JudgeGraded;
      it.gctx = hyps(true, false, Zone::Graded);
      expect("|-");
      it.subject = expr(Pos::G);
    } else if (w == "mixed") {
      it.kind = Item::Kind::JudgeMixed;
      it.gctx = hyps(true, false, Zone::Graded);
      expect(";");
      it.lctx = hyps(false, false, Zone::Linear);
      expect("|-");
      it.subject = expr(Pos::L);
    } else if (w == "glad") {
      it.kind = Item::Kind::JudgeGlad;
      it.gctx = hyps(true, true, Zone::Graded);
      expect("|-@");
      it.mode = mode_name();
      it.subject = expr(Pos::G);
    } else {
      err("expected graded, mixed, glad, ctx or type after 'judge'");
    }
    expect(":");
    it.type = expr(Pos::G);
    expect(";");
  }

  std::string_view s_;
  std::size_t p_ = 0;
  std::string file_;
  bool glad_;
  std::vector<std::pair<std::string, Zone>> scope_;
};

}  // namespace

TermPtr parse_term(std::string_view text, ParseMode mode, const Names& scope) {
  Parser p(text, "<term>", mode == ParseMode::Glad);
  p.set_scope(scope);
  TermPtr t = p.expr(mode == ParseMode::Linear ? Pos::L : Pos::G);
  p.finish();
  return t;
}

SourceModule parse_module(std::string_view text, const std::string& file) {
  Parser p(text, file, false);
  return p.module();
}

TermPtr map_grades(const TermPtr& t, const std::function<std::string(const std::string&)>& f) {
  if (t->tag == Tag::Var) return t;
  std::vector<TermPtr> kids;
  bool changed = false;
  for (const auto& k : t->kids) {
    kids.push_back(map_grades(k, f));
    changed |= kids.back() != k;
  }
  std::string g = t->grade.empty() ? t->grade : f(t->grade);
  if (!changed && g == t->grade) return t;
  auto n = std::make_shared<Term>(*t);
  n->kids = std::move(kids);
  n->grade = std::move(g);
  return n;
}

}  // namespace gradal
