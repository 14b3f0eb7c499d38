#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "etk/function_model.hpp"

namespace etk {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Parsed run configuration. `raw` is the merged config the hash is computed over.
struct RunConfig {
  nlohmann::json raw;
  FunctionSpec function;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::string hash;  // 16 hex digits, FNV-1a of raw.dump()
};

/// ParseError / InvalidArgument on malformed or non-positive parameters.
RunConfig parse_run_config(const nlohmann::json& raw);

/// Hex FNV-1a 64 of the compact dump.
std::string config_hash(const nlohmann::json& raw);

struct CommandResult {
  int exit_code = 0;  // 0 success, 2 config error, 3 honest negative
  std::string summary;
  std::vector<std::string> artifacts;
};

CommandResult cmd_covering_search(const RunConfig& config);
CommandResult cmd_entropy(const RunConfig& config);
CommandResult cmd_example_product(const RunConfig& config);

/// The example-product verdicts without touching the filesystem.
nlohmann::json example_product_report(const RunConfig& config);

/// Dispatches by command name; config errors become exit 2 with a JSON message in summary.
CommandResult run_command(const std::string& command, const nlohmann::json& raw);

}  // namespace etk
