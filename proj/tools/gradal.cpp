#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gradal/config.hpp"
#include "gradal/frontend.hpp"
#include "gradal/metatheory.hpp"
#include "gradal/parser.hpp"
#include "gradal/reduction.hpp"

namespace fs = std::filesystem;
using namespace gradal;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Files named directly, plus every *.gr file under named directories, in a
// stable order.
std::vector<fs::path> expand(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    fs::path p(a);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".gr") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

int cmd_check(const std::vector<std::string>& paths, const std::string& config,
              const std::string& dump, bool strict, bool verbose) {
  int status = kOk;
  if (!dump.empty()) fs::create_directories(dump);
  CheckOptions opts;
  opts.strict = strict;
  std::size_t items = 0, files = 0;
  for (const fs::path& p : expand(paths)) {
    ++files;
    ModuleReport r;
    try {
      SourceModule m = parse_module(slurp(p), p.string());
      Instance inst = resolve_instance(m, config, p.parent_path().string());
      r = check_module(m, inst, opts);
    } catch (const Error& e) {
      std::cerr << render_error(diagnostic_of(e, p.string()));
      status = kUsage;
      continue;
    }
    items += r.items.size();
    if (!r.ok()) {
      std::cerr << render_failures(r);
      if (status == kOk) status = kFailed;
    } else if (verbose) {
      std::cout << p.string() << ": ok (" << r.items.size() << " items)\n";
    }
    if (!dump.empty()) {
      std::string name = p.parent_path().filename().string() + "-" + p.stem().string() + ".drv";
      std::ofstream(fs::path(dump) / name, std::ios::binary) << render_report(r);
    }
  }
  std::cout << files << " files, " << items << " items: "
            << (status == kOk ? "all expectations met" : "FAILED") << "\n";
  return status;
}

int cmd_reduce(const std::string& file, uint64_t fuel, const std::string& fragment) {
  if (fuel == 0) {
    std::cerr << "error: --fuel must be positive\n";
    return kUsage;
  }
  ParseMode pm = fragment == "linear" ? ParseMode::Linear
                 : fragment == "glad" ? ParseMode::Glad
                                      : ParseMode::Graded;
  TermPtr t;
  try {
    t = parse_term(slurp(file), pm);
  } catch (const Error& e) {
    std::cerr << render_error(diagnostic_of(e, file));
    return kUsage;
  }
  ReductionTrace tr = normalize(t, fuel);
  std::cout << render_trace(tr);
  return tr.exhausted ? kFailed : kOk;
}

int cmd_validate(const std::string& file) {
  try {
    auto reg = load_config(file);
    for (const auto& r : reg->reports()) std::cout << r.render() << "\n";
    std::cout << "ok\n";
    return kOk;
  } catch (const Error& e) {
    std::cerr << render_error(diagnostic_of(e, file));
    return kUsage;
  }
}

int cmd_meta(const MetaOptions& o, const std::string& out_dir) {
  MetaReport r;
  try {
    r = run_meta(o);
  } catch (const Error& e) {
    std::cerr << render_error(diagnostic_of(e));
    return kUsage;
  }
  std::cout << render_meta_report(r);
  if (!r.failures.empty() && !out_dir.empty()) {
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < r.failures.size(); ++i)
      std::ofstream(fs::path(out_dir) / ("repro-" + std::to_string(i) + ".gr"), std::ios::binary)
          << r.failures[i].reproducer;
  }
  return r.failures.empty() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradal: checker, reducer and metatheory fuzzer for dmGL and GlaD"};
  app.require_subcommand(1);

  std::vector<std::string> paths;
  std::string config, dump;
  bool strict = false, verbose = false;
  auto* check = app.add_subcommand("check", "check module files or directories of *.gr");
  check->add_option("paths", paths, "files or directories")->required();
  check->add_option("--config", config, "config name or path (overrides the module's)");
  check->add_option("--dump-derivations", dump, "directory for derivation dumps");
  check->add_flag("--strict", strict, "GlaD: compare types up to alpha only");
  check->add_flag("-v,--verbose", verbose, "report each file");

  std::string file, fragment = "graded";
  uint64_t fuel = default_fuel();
  auto* reduce = app.add_subcommand("reduce", "print the leftmost-outermost reduction trace");
  reduce->add_option("file", file, "file holding one term")->required();
  reduce->add_option("--fuel", fuel, "step budget");
  reduce->add_option("--fragment", fragment, "graded, linear or glad")
      ->check(CLI::IsMember({"graded", "linear", "glad"}));

  MetaOptions mo;
  std::string meta_out;
  auto* meta = app.add_subcommand("meta", "run a metatheory probe suite");
  meta->add_option("--suite", mo.suite, "subst, subject-reduction, contraction, radj, inversion, ctx-vec")
      ->required()
      ->check(CLI::IsMember(meta_suites()));
  meta->add_option("--count", mo.count, "derivations per fragment");
  meta->add_option("--seed", mo.seed, "generator seed");
  meta->add_option("--config", mo.config, "config name or path");
  meta->add_option("--depth", mo.depth, "maximum derivation depth");
  meta->add_option("--repro-dir", meta_out, "directory for reproducer files");

  std::string cfg_file;
  auto* validate = app.add_subcommand("validate-config", "load a config and run its law checks");
  validate->add_option("file", cfg_file, "config name or path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (*check) return cmd_check(paths, config, dump, strict, verbose);
  if (*reduce) return cmd_reduce(file, fuel, fragment);
  if (*meta) return cmd_meta(mo, meta_out);
  if (*validate) return cmd_validate(cfg_file);
  return kUsage;
}
