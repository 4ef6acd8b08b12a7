#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csl/config.hpp"

namespace csl::cli {

inline constexpr const char* kToolName = "cslsim";
inline constexpr const char* kVersion = "1.0.0";

enum class Format { Csv, Json };

struct ScenarioRequest {
  std::string scenario;  // twoslit | scatter | twoparticle | oracle-check
  std::string config_path;
  std::vector<std::string> overrides;  // key=value, applied after the file
  std::string output_path;             // empty: the `out` stream passed to run
  Format format = Format::Csv;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitOther = 1;

std::vector<std::string> scenarios();
/// Keys accepted by a scenario. Throws ConfigError for an unknown scenario.
std::vector<std::string> valid_keys(const std::string& scenario);

/// Runs the request, writing the report to `out` (or to output_path) and a
/// one-line `error category=<config|domain|numerical|internal>: ...` to
/// `err` on failure. Returns the exit code.
int run(const ScenarioRequest& request, std::ostream& out, std::ostream& err);

/// Same for an already assembled configuration.
int run(const std::string& scenario, const KeyValueConfig& config, const ScenarioRequest& request, std::ostream& out,
        std::ostream& err);

}  // namespace csl::cli
