// Acceptance gate: one line per criterion, non-zero exit if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "gradal/config.hpp"
#include "gradal/metatheory.hpp"

using namespace gradal;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = GRADAL_SOURCE_DIR;
const std::string kBinary = GRADAL_BINARY;

// Wall-clock limits in seconds.
constexpr double kLawLimit = 5, kCorpusLimit = 10, kSubstLimit = 120, kReductionLimit = 120,
                 kContractionLimit = 60, kRadjLimit = 30, kProbeLimit = 60;

// Generated items per fragment.
constexpr uint64_t kSubstCount = 300, kSubjectCount = 300, kContractionCount = 200,
                   kRadjCount = 100, kInversionCount = 300, kCtxCount = 100;
constexpr uint64_t kCtxDraws = 5;

constexpr int kMinAccept = 40, kMinReject = 25;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Runs a shell command, capturing stdout; returns the exit status.
int run(const std::string& cmd, std::string* out = nullptr) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string buf;
  char chunk[4096];
  std::size_t n;
  while ((n = fread(chunk, 1, sizeof chunk, p)) > 0) buf.append(chunk, n);
  int st = pclose(p);
  if (out) *out = std::move(buf);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// Runs a meta suite and checks every section: exactly `count` generated,
// no skips (unless allowed), checks_per_item checks per probed item, and no
// failures.
void meta(Outcome& o, const std::string& suite, const std::string& config, uint64_t count,
          bool allow_skips = false, uint64_t checks_per_item = 1) {
  MetaOptions m;
  m.suite = suite;
  m.config = config;
  m.count = count;
  MetaReport r = run_meta(m);
  std::string where = suite + "/" + config;
  if (r.sections.empty()) o.fail(where + ": no sections");
  for (const auto& s : r.sections) {
    std::string at = where + "/" + s.fragment;
    if (s.generated != count) o.fail(at + ": generated " + std::to_string(s.generated));
    if (!allow_skips && s.skipped) o.fail(at + ": skipped " + std::to_string(s.skipped));
    if (s.checks < (s.generated - s.skipped) * checks_per_item || s.checks == 0)
      o.fail(at + ": only " + std::to_string(s.checks) + " checks");
  }
  if (!r.failures.empty())
    o.fail(where + ": " + std::to_string(r.failures.size()) + " failures, first: " +
           r.failures.front().message);
}

// ---------------------------------------------------------------- criteria

Outcome laws() {
  Outcome o;
  for (const char* name : {"nat", "boolean", "none-one-tons", "variance", "trivial",
                           "nat-trivial-order", "none-one-tons-reflexive"}) {
    auto reg = load_config(name);
    ValidationReport rep = validate_semiring(*reg->default_semiring());
    if (!rep.ok()) o.fail(rep.render());
  }
  for (const char* name : {"lnld", "dmgl-recovery", "relevance", "variance-stack"}) {
    auto reg = load_config(name);
    ValidationReport rep = validate_mode_theory(*reg->default_theory());
    if (!rep.ok()) o.fail(rep.render());
  }
  // Published table entries.
  auto tons = load_config("none-one-tons");
  const Semiring& t = *tons->default_semiring();
  if (add(grade_of(t, "1"), grade_of(t, "1")) != grade_of(t, "ω")) o.fail("1+1 != ω");
  if (add(grade_of(t, "1"), grade_of(t, "ω")) != grade_of(t, "ω")) o.fail("1+ω != ω");
  auto var = load_config("variance");
  const Semiring& v = *var->default_semiring();
  if (mul(grade_of(v, "↓↓"), grade_of(v, "↓↓")) != grade_of(v, "↑↑")) o.fail("↓↓·↓↓ != ↑↑");
  if (mul(grade_of(v, "∼∼"), grade_of(v, "↓↓")) != grade_of(v, "∼∼")) o.fail("∼∼·↓↓ != ∼∼");
  o.detail = o.ok ? "7 semirings, 4 mode theories, 4 table entries" : o.detail;
  return o;
}

Outcome corpus() {
  Outcome o;
  fs::path dir = kRoot / "corpus";
  auto acc = files(dir / "accept", ".gr"), rej = files(dir / "reject", ".gr");
  if (int(acc.size()) < kMinAccept) o.fail("only " + std::to_string(acc.size()) + " accept");
  if (int(rej.size()) < kMinReject) o.fail("only " + std::to_string(rej.size()) + " reject");
  fs::path tmp = fs::temp_directory_path() / ("gradal-acceptance-" + std::to_string(getpid()));
  fs::remove_all(tmp);
  int rc = run("cd " + quote(dir.string()) + " && " + quote(kBinary) +
               " check --dump-derivations " + quote(tmp.string()) + " accept reject 2>&1");
  if (rc != 0) o.fail("gradal check exited " + std::to_string(rc));
  auto got = files(tmp, ".drv"), want = files(dir / "golden" / "derivations", ".drv");
  if (got.size() != want.size())
    o.fail(std::to_string(got.size()) + " dumps vs " + std::to_string(want.size()) + " goldens");
  for (const auto& w : want) {
    fs::path g = tmp / w.filename();
    if (!fs::exists(g) || slurp(g) != slurp(w)) o.fail("dump differs: " + w.filename().string());
  }
  fs::remove_all(tmp);
  if (o.ok)
    o.detail = std::to_string(acc.size()) + " accept, " + std::to_string(rej.size()) +
               " reject, " + std::to_string(want.size()) + " dumps byte-equal";
  return o;
}

Outcome substitution() {
  Outcome o;
  for (const char* c : {"nat", "none-one-tons", "lnld", "dmgl-recovery"})
    meta(o, "subst", c, kSubstCount);
  if (o.ok) o.detail = "300 cut pairs per fragment, 4 configs, 0 failures";
  return o;
}

Outcome subject_reduction() {
  Outcome o;
  for (const char* c : {"nat", "lnld"}) meta(o, "subject-reduction", c, kSubjectCount);
  if (o.ok) o.detail = "300 judgments per fragment (graded, mixed, glad), 0 failures";
  return o;
}

Outcome contraction() {
  Outcome o;
  meta(o, "contraction", "nat", kContractionCount);
  meta(o, "contraction", "lnld", kContractionCount);
  if (o.ok) o.detail = "200 per fragment (dmGL graded, mixed; GlaD), 0 failures";
  return o;
}

Outcome radj() {
  Outcome o;
  meta(o, "radj", "nat", kRadjCount);
  if (o.ok) o.detail = "100 mixed derivations, 0 failures";
  return o;
}

Outcome inversion() {
  Outcome o;
  // Only lambda, unit, pair and injection subjects are probed; others skip.
  meta(o, "inversion", "nat", kInversionCount, true);
  if (o.ok) o.detail = "graded derivations with introduction subjects, 0 failures";
  return o;
}

Outcome ctx_vectors() {
  Outcome o;
  // Each context is re-checked as generated plus under kCtxDraws vectors.
  meta(o, "ctx-vec", "nat", kCtxCount, false, 1 + kCtxDraws);
  meta(o, "ctx-vec", "lnld", kCtxCount, false, 1 + kCtxDraws);
  if (o.ok) o.detail = "100 contexts x 5 vectors per fragment, all accepted";
  return o;
}

Outcome traces() {
  Outcome o;
  fs::path dir = kRoot / "corpus";
  std::set<std::string> fired;
  auto terms = files(dir / "traces", ".term");
  for (const auto& f : terms) {
    std::string base = f.stem().string();
    std::string frag = fs::path(base).extension().string().substr(1);
    std::string out;
    int rc = run(quote(kBinary) + " reduce --fragment " + frag + " " + quote(f.string()), &out);
    if (rc != 0) o.fail(f.filename().string() + " exited " + std::to_string(rc));
    fs::path golden = dir / "golden" / "traces" / (fs::path(base).stem().string() + ".trace");
    if (out != slurp(golden)) o.fail("trace differs: " + golden.filename().string());
    std::istringstream lines(out);
    for (std::string line; std::getline(lines, line);)
      fired.insert((frag == "glad" ? "glad:" : "") + line.substr(0, line.find('\t')));
  }
  for (const char* r : {"gRED-unitBeta", "gRED-pairBeta", "gRED-coproductBetaLeft",
                        "gRED-coproductBetaRight", "gRED-lambda", "gRED-appL", "mRED-unitBeta",
                        "mRED-tensorBeta", "mRED-ladjBeta", "mRED-radjBeta", "mRED-lambda",
                        "mRED-appL", "glad:gRED-unitBeta", "glad:gRED-pairBeta",
                        "glad:gRED-lambda", "glad:gRED-coproductBetaLeft"})
    if (!fired.count(r)) o.fail(std::string("rule never fires: ") + r);
  if (o.ok)
    o.detail = "12 rules + 4 GlaD beta rules over " + std::to_string(terms.size()) + " traces";
  return o;
}

Outcome determinism() {
  Outcome o;
  for (const char* c : {"nat", "lnld"}) {
    for (const char* s : {"subst", "subject-reduction", "ctx-vec"}) {
      std::string cmd = quote(kBinary) + " meta --suite " + s + " --config " + c +
                        " --count 100 --seed 7";
      std::string a, b;
      int ra = run(cmd, &a), rb = run(cmd, &b);
      if (ra != 0 || rb != 0) o.fail(std::string(s) + "/" + c + " exit status");
      if (a != b || a.empty()) o.fail(std::string(s) + "/" + c + " reports differ");
    }
  }
  if (o.ok) o.detail = "6 suite/config pairs, byte-identical across two runs";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int n;
    const char* name;
    double limit;  // seconds; 0 for none
    std::function<Outcome()> f;
  };
  const std::vector<Criterion> all = {
      {1, "semiring and mode laws", kLawLimit, laws},
      {2, "golden derivation corpus", kCorpusLimit, corpus},
      {3, "substitution", kSubstLimit, substitution},
      {4, "subject reduction", kReductionLimit, subject_reduction},
      {5, "contraction", kContractionLimit, contraction},
      {6, "right-adjoint left rule", kRadjLimit, radj},
      {7, "inversion", kProbeLimit, inversion},
      {8, "context-vector independence", kProbeLimit, ctx_vectors},
      {9, "reduction-rule coverage", 0, traces},
      {10, "meta determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.f();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs >= c.limit)
      o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit) + " s");
    char time[64];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    std::cout << "criterion " << c.n << " " << (o.ok ? "PASS" : "FAIL") << " " << c.name << ": "
              << o.detail << " [" << time << "]" << std::endl;
    failed += !o.ok;
  }
  return failed ? 1 : 0;
}
