#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gradal/frontend.hpp"
#include "gradal/parser.hpp"
#include "gradal/printer.hpp"
#include "gradal/reduction.hpp"

using namespace gradal;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(GRADAL_SOURCE_DIR) / "corpus";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// The CLI dumps with paths relative to corpus/, so spans match that.
std::string dump_of(const fs::path& file) {
  std::string rel = file.parent_path().filename().string() + "/" + file.filename().string();
  SourceModule m = parse_module(slurp(file), rel);
  Instance inst = resolve_instance(m, {}, file.parent_path().string());
  return render_report(check_module(m, inst));
}

ParseMode mode_of(Item::Kind k) {
  switch (k) {
    case Item::Kind::GladDef:
    case Item::Kind::JudgeGlad:
    case Item::Kind::CtxGlad:
    case Item::Kind::TypeGlad: return ParseMode::Glad;
    case Item::Kind::LinearDef:
    case Item::Kind::JudgeMixed:
    case Item::Kind::TypeLinear: return ParseMode::Linear;
    default: return ParseMode::Graded;
  }
}

}  // namespace

TEST_CASE("corpus size") {
  CHECK(files(kCorpus / "accept", ".gr").size() >= 40);
  CHECK(files(kCorpus / "reject", ".gr").size() >= 25);
  for (const auto& f : files(kCorpus / "reject", ".gr")) {
    CAPTURE(f);
    SourceModule m = parse_module(slurp(f), f.string());
    REQUIRE(m.items.size() == 1);
    CHECK(m.items[0].expect_reject);
  }
}

TEST_CASE("derivation dumps match goldens byte for byte") {
  for (const char* dir : {"accept", "reject"}) {
    for (const auto& f : files(kCorpus / dir, ".gr")) {
      CAPTURE(f);
      fs::path golden = kCorpus / "golden" / "derivations" /
                        (std::string(dir) + "-" + f.stem().string() + ".drv");
      REQUIRE(fs::exists(golden));
      CHECK(dump_of(f) == slurp(golden));
    }
  }
}

TEST_CASE("reduction traces match goldens and cover every rule") {
  std::set<std::string> fired;
  for (const auto& f : files(kCorpus / "traces", ".term")) {
    CAPTURE(f);
    std::string base = f.stem().string();  // name.fragment
    std::string frag = fs::path(base).extension().string().substr(1);
    ParseMode pm = frag == "linear" ? ParseMode::Linear
                   : frag == "glad" ? ParseMode::Glad
                                    : ParseMode::Graded;
    ReductionTrace tr = normalize(parse_term(slurp(f), pm), kDefaultFuel);
    CHECK_FALSE(tr.exhausted);
    fs::path golden = kCorpus / "golden" / "traces" / (fs::path(base).stem().string() + ".trace");
    REQUIRE(fs::exists(golden));
    CHECK(render_trace(tr) == slurp(golden));
    for (const auto& s : tr.steps) fired.insert((frag == "glad" ? "glad:" : "") + s.rule);
  }
  for (const char* r : {"gRED-unitBeta", "gRED-pairBeta", "gRED-coproductBetaLeft",
                        "gRED-coproductBetaRight", "gRED-lambda", "gRED-appL", "mRED-unitBeta",
                        "mRED-tensorBeta", "mRED-ladjBeta", "mRED-radjBeta", "mRED-lambda",
                        "mRED-appL", "glad:gRED-unitBeta", "glad:gRED-pairBeta",
                        "glad:gRED-lambda", "glad:gRED-coproductBetaLeft"}) {
    CAPTURE(r);
    CHECK(fired.count(r));
  }
}

TEST_CASE("parse and print round trip over the corpus") {
  for (const char* dir : {"accept", "reject"}) {
    for (const auto& f : files(kCorpus / dir, ".gr")) {
      SourceModule m = parse_module(slurp(f), f.string());
      for (const Item& it : m.items) {
        CAPTURE(f);
        Names scope;
        ParseMode pm = mode_of(it.kind);
        ParseMode hyp = pm == ParseMode::Glad ? pm : ParseMode::Graded;
        for (const auto& h : it.gctx) {
          CHECK(alpha_eq(h.type, parse_term(print_term(h.type, scope), hyp, scope)));
          scope.graded.push_back(h.name);
        }
        for (const auto& h : it.lctx) {
          CHECK(alpha_eq(h.type, parse_term(print_term(h.type, scope), ParseMode::Linear, scope)));
          scope.linear.push_back(h.name);
        }
        for (const TermPtr& t : {it.subject, it.type}) {
          if (!t) continue;
          std::string printed = print_term(t, scope);
          CAPTURE(printed);
          CHECK(alpha_eq(t, parse_term(printed, pm, scope)));
        }
      }
    }
  }
}
