#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vlsc/source_models.hpp"

namespace vlsc::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kTheoremViolation = 3,
  kResourceLimit = 4,
};

enum class SourceKind { Iid, Mixed, Switching };

// A source read from a key-value file; see README for the grammar.
struct SourceConfig {
  SourceKind kind = SourceKind::Iid;
  Distribution first;
  std::optional<Distribution> second;
  double weight = 0.5;
  SwitchingRule rule;
};

SourceConfig parse_source(std::istream& in);
SourceConfig load_source(const std::string& path);

Spectrum spectrum_of(const SourceConfig& src, int n, const SpectrumLimits& limits = {});

// Grid syntax: comma-separated items, each a number, "a:b" (step 1),
// "a:b:s" (step s) or "a:b:*f" (geometric, factor f). Empty text is an
// empty grid.
std::vector<double> parse_real_grid(const std::string& text, const std::string& key);
std::vector<int> parse_int_grid(const std::string& text, const std::string& key);

// Runs one command line (args excludes the program name) and returns the
// process exit code. Reports go to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vlsc::cli
