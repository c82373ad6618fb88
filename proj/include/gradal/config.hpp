#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gradal/modes.hpp"
#include "gradal/semiring.hpp"

namespace gradal {

// Everything a config file (and the files it `use`s) defines. Semirings and
// mode theories are owned here; grades and modes point into this object, so
// it must outlive every term checked against it.
class Registry {
 public:
  const Semiring& semiring(std::string_view id) const;  // ConfigError if absent
  const ModeTheory& theory(std::string_view id) const;
  const Semiring* find_semiring(std::string_view id) const;
  const ModeTheory* find_theory(std::string_view id) const;

  // First semiring / theory declared by the top-level file, falling back
  // to the first one pulled in through `use`.
  const Semiring* default_semiring() const;
  const ModeTheory* default_theory() const;

  const std::vector<std::shared_ptr<Semiring>>& semirings() const { return semirings_; }
  const std::vector<std::shared_ptr<ModeTheory>>& theories() const { return theories_; }
  const std::vector<ValidationReport>& reports() const { return reports_; }
  const std::string& name() const { return name_; }

 private:
  friend class ConfigLoader;
  std::string name_;
  std::vector<std::shared_ptr<Semiring>> semirings_;
  std::vector<std::shared_ptr<ModeTheory>> theories_;
  std::vector<std::string> loaded_files_;
  const Semiring* own_semiring_ = nullptr;
  const ModeTheory* own_theory_ = nullptr;
  std::vector<ValidationReport> reports_;
};

struct ConfigOptions {
  // Run the law checks and fail with ConfigError on any violation.
  bool validate = true;
  // Extra directories searched for `use`d and named configs, after the
  // including file's own directory.
  std::vector<std::string> search_dirs;
};

// Directories searched for configs by name: GRADAL_CONFIG_PATH entries
// (colon-separated) and then the shipped configs directory.
std::vector<std::string> default_config_dirs();

// `text` is parsed as a config; `base_dir` resolves `use` lines.
std::shared_ptr<Registry> parse_config(std::string_view text, const std::string& base_dir,
                                       const ConfigOptions& opts = {},
                                       const std::string& name = "<text>");
// A path to a .cfg file, or a bare name looked up in the search directories.
std::shared_ptr<Registry> load_config(const std::string& name_or_path,
                                      const ConfigOptions& opts = {},
                                      const std::string& from_dir = {});

// Single-object convenience forms. The registry owning the result is
// returned alongside it.
struct LoadedSemiring {
  std::shared_ptr<Registry> registry;
  const Semiring* semiring;
};
struct LoadedTheory {
  std::shared_ptr<Registry> registry;
  const ModeTheory* theory;
};
LoadedSemiring parse_semiring_config(std::string_view text, const ConfigOptions& opts = {});
LoadedTheory parse_mode_config(std::string_view text, const std::string& base_dir = {},
                               const ConfigOptions& opts = {});

}  // namespace gradal
