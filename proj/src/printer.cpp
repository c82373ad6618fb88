#include "gradal/printer.hpp"

#include <algorithm>
#include <array>

namespace gradal {

namespace {

constexpr std::array<const char*, 19> kKeywords = {
    "J",   "I",   "j",  "i",  "Type", "Linear", "G",   "Gi", "Ginv", "F",
    "inl", "inr", "up", "down", "let", "in",    "case", "of", "_"};

enum Level { kOpen = 0, kSum = 1, kTensor = 2, kApp = 3, kAtom = 4 };

int level(const Term& t) {
  switch (t.tag) {
    case Tag::Lam:
    case Tag::LamLin:
    case Tag::LetJ:
    case Tag::LetI:
    case Tag::LetPair:
    case Tag::LetTensor:
    case Tag::LetF:
    case Tag::LetStarM:
    case Tag::Case:
    case Tag::Pi:
    case Tag::Sigma:
    case Tag::FType:
    case Tag::PiG:
    case Tag::TensorG:
    case Tag::Lollipop:
      return kOpen;
    case Tag::Sum: return kSum;
    case Tag::Tensor: return kTensor;
    case Tag::App:
    case Tag::AppLin:
    case Tag::GAdj:
    case Tag::GIntro:
    case Tag::GInv:
    case Tag::Inl:
    case Tag::Inr:
    case Tag::Up:
    case Tag::Down:
      return kApp;
    default: return kAtom;
  }
}

bool is_prefix(const Term& t) {
  switch (t.tag) {
    case Tag::GAdj:
    case Tag::GIntro:
    case Tag::GInv:
    case Tag::Inl:
    case Tag::Inr:
    case Tag::Up:
    case Tag::Down:
      return true;
    default: return false;
  }
}

class Printer {
 public:
  explicit Printer(const Names& n) {
    for (const auto& s : n.graded) stack_.push_back({s, Zone::Graded});
    for (const auto& s : n.linear) stack_.push_back({s, Zone::Linear});
  }

  std::string go(const TermPtr& t, int ctx) {
    std::string s = body(*t);
    return level(*t) < ctx ? "(" + s + ")" : s;
  }

 private:
  std::string name_of(Zone z, uint32_t idx) const {
    uint32_t seen = 0;
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (it->second != z) continue;
      if (seen++ == idx) return it->first;
    }
    return std::string(z == Zone::Graded ? "#g" : "#l") + std::to_string(idx);
  }

  bool taken(const std::string& s) const {
    if (is_keyword(s)) return true;
    for (const auto& e : stack_)
      if (e.first == s) return true;
    return false;
  }

  std::string fresh(const Term& t, std::size_t which, const char* dflt) {
    std::string base = which < t.names.size() && !t.names[which].empty() ? t.names[which] : dflt;
    std::string s = base;
    while (taken(s)) s += "'";
    return s;
  }

  void push(const std::string& s, Zone z) { stack_.push_back({s, z}); }
  void pop(std::size_t n = 1) { stack_.resize(stack_.size() - n); }

  std::string binder(const Term& t, const char* op) {
    std::string x = fresh(t, 0, "x");
    std::string dom = go(t.kids[0], kOpen);
    std::string ann = t.grade;
    if (t.tag == Tag::PiG || t.tag == Tag::TensorG) ann += "@" + t.mode;
    push(x, Zone::Graded);
    std::string cod = go(t.kids[1], kOpen);
    pop();
    return "(" + x + " :^" + ann + " " + dom + ") " + op + " " + cod;
  }

  std::string app_head(const TermPtr& f) {
    return is_prefix(*f) ? "(" + body(*f) + ")" : go(f, kApp);
  }

  std::string body(const Term& t) {
    const auto& k = t.kids;
    switch (t.tag) {
      case Tag::Var: return name_of(t.zone, t.index);
      case Tag::TypeU: return "Type";
      case Tag::LinearU: return "Linear";
      case Tag::UnitJ: return "J";
      case Tag::UnitI: return "I";
      case Tag::UnitJIntro: return "j";
      case Tag::UnitIIntro: return "i";
      case Tag::UnitM: return "I@" + t.mode;
      case Tag::StarM: return "*@" + t.mode;
      case Tag::Pi: return binder(t, "->");
      case Tag::Sigma: return binder(t, "><");
      case Tag::PiG: return binder(t, "-o");
      case Tag::TensorG: return binder(t, "(x)");
      case Tag::FType: {
        std::string x = fresh(t, 0, "x");
        std::string dom = go(k[0], kOpen);
        push(x, Zone::Graded);
        std::string a = go(k[1], kOpen);
        pop();
        return "F(" + x + " :^" + t.grade + " " + dom + "). " + a;
      }
      case Tag::Sum: return go(k[0], kTensor) + " (+) " + go(k[1], kSum);
      case Tag::Tensor: return go(k[0], kApp) + " (x) " + go(k[1], kTensor);
      case Tag::Lollipop: return go(k[0], kSum) + " -o " + go(k[1], kOpen);
      case Tag::GAdj: return "G " + go(k[0], kApp);
      case Tag::GIntro: return "Gi " + go(k[0], kApp);
      case Tag::GInv: return "Ginv " + go(k[0], kApp);
      case Tag::Inl: return "inl " + go(k[0], kApp);
      case Tag::Inr: return "inr " + go(k[0], kApp);
      case Tag::Up: return "up[" + t.mode + "->" + t.mode2 + "] " + go(k[0], kApp);
      case Tag::Down: return "down[" + t.mode + "->" + t.mode2 + "] " + go(k[0], kApp);
      case Tag::App:
      case Tag::AppLin: return app_head(k[0]) + " " + go(k[1], kAtom);
      case Tag::Pair:
      case Tag::TensorPair: return "(" + go(k[0], kOpen) + ", " + go(k[1], kOpen) + ")";
      case Tag::FPair: return "F(" + go(k[0], kOpen) + ", " + go(k[1], kOpen) + ")";
      case Tag::Ann: return "(" + go(k[0], kOpen) + " : " + go(k[1], kOpen) + ")";
      case Tag::Lam:
      case Tag::LamLin: {
        Zone z = t.tag == Tag::Lam ? Zone::Graded : Zone::Linear;
        std::string x = fresh(t, 0, "x");
        push(x, z);
        std::string b = go(k[0], kOpen);
        pop();
        return "\\" + x + ". " + b;
      }
      case Tag::LetJ:
        return "let j = " + go(k[0], kOpen) + " in " + go(k[1], kOpen);
      case Tag::LetI:
        return "let i = " + go(k[0], kOpen) + " in " + go(k[1], kOpen);
      case Tag::LetStarM:
        return "let *@" + t.mode + " = " + go(k[0], kOpen) + " in " + go(k[1], kOpen);
      case Tag::LetPair:
      case Tag::LetTensor: {
        Zone z = t.tag == Tag::LetPair ? Zone::Graded : Zone::Linear;
        std::string scrut = go(k[0], kOpen);
        std::string x = fresh(t, 0, "x");
        push(x, z);
        std::string y = fresh(t, 1, "y");
        push(y, z);
        std::string b = go(k[1], kOpen);
        pop(2);
        return "let (" + x + ", " + y + ") = " + scrut + " in " + b;
      }
      case Tag::LetF: {
        std::string scrut = go(k[0], kOpen);
        std::string x = fresh(t, 0, "x");
        push(x, Zone::Graded);
        std::string y = fresh(t, 1, "y");
        push(y, Zone::Linear);
        std::string b = go(k[1], kOpen);
        pop(2);
        return "let F(" + x + ", " + y + ") = " + scrut + " in " + b;
      }
      case Tag::Case:
        // The first branch is bracketed when open so its ';' stays unambiguous.
        return "case^" + t.grade + " " + go(k[0], kOpen) + " of " + go(k[1], kSum) + "; " +
               go(k[2], kOpen);
    }
    return "?";
  }

  std::vector<std::pair<std::string, Zone>> stack_;
};

}  // namespace

bool is_keyword(const std::string& s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

Names names_of(const Ctx& gctx, const Ctx& lctx) {
  Names n;
  for (const auto& h : gctx) n.graded.push_back(h.name);
  for (const auto& h : lctx) n.linear.push_back(h.name);
  return n;
}

std::string print_term(const TermPtr& t, const Names& scope) {
  if (!t) return "<none>";
  return Printer(scope).go(t, kOpen);
}

}  // namespace gradal
