#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "etk/etk.h"

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string function;
  std::string compact_set;
  int n_cover = 0;
  double r_start = 0.0;
  long long seed = -1;
  std::string out_dir = ".";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

int config_error(const std::string& msg) {
  std::cerr << json{{"error", "ConfigError"}, {"message", msg}}.dump() << "\n";
  return 2;
}

bool read_text(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// JSON text, a path to a JSON file, or a short name
json function_arg(const std::string& arg) {
  if (arg == "exp") return {{"kind", "exp"}};
  if (arg == "lacunary") return {{"kind", "product"}, {"zeros", {{100, 0}, {1e4, 0}, {1e8, 0}, {1e16, 0}}},
                                 {"tail_zeros_lower_modulus", 1e32}};
  if (!arg.empty() && arg[0] == '{') return json::parse(arg);
  std::string text;
  if (!read_text(arg, text)) throw std::runtime_error("cannot read function '" + arg + "'");
  return json::parse(text);
}

json& at_path(json& root, const std::vector<const char*>& path) {
  json* node = &root;
  for (const char* key : path) node = &(*node)[key];
  return *node;
}

int run(const std::string& command, const Flags& f) {
  json cfg = json::object();
  try {
    if (!f.config.empty()) {
      std::string text;
      if (!read_text(f.config, text)) return config_error("cannot read config '" + f.config + "'");
      cfg = json::parse(text);
      if (!cfg.is_object()) return config_error("config must be a JSON object");
    }
    if (!f.function.empty()) cfg["function"] = function_arg(f.function);
    if (!f.compact_set.empty()) at_path(cfg, {"entropy", "compact_set"}) = json::parse(f.compact_set);
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  if (f.seed >= 0) cfg["seed"] = static_cast<std::uint64_t>(f.seed);
  if (!cfg.contains("threads")) cfg["threads"] = f.threads;
  cfg["out_dir"] = f.out_dir;
  std::vector<const char*> cover = {"covering"};
  if (command == "entropy") cover = {"entropy", "bound"};
  if (command == "example-product") cover = {"example", "entropy"};
  if (f.n_cover > 0) at_path(cfg, cover)["N"] = f.n_cover;
  if (f.r_start > 0.0) at_path(cfg, cover)["R_start"] = f.r_start;

  int exit_code = 2;
  char* summary = nullptr;
  const etk_status s = etk_run(command.c_str(), cfg.dump().c_str(), &exit_code, &summary);
  if (s != ETK_OK) {
    std::cerr << json{{"error", "InternalError"}, {"message", etk_last_error()}}.dump() << "\n";
    return 2;
  }
  (exit_code == 2 ? std::cerr : std::cout) << (summary ? summary : "") << "\n";
  etk_string_free(summary);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-covering domains and entropy bounds for entire functions"};
  app.set_version_flag("--version", std::string(etk_version()));
  app.require_subcommand(1);
  Flags f;
  const char* commands[] = {"covering-search", "entropy", "example-product"};
  const char* help[] = {"search for a self-covering domain V", "entropy estimates and certificate bounds",
                        "lacunary product example checks"};
  for (int i = 0; i < 3; ++i) {
    auto* sub = app.add_subcommand(commands[i], help[i]);
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--function", f.function, "function JSON, file, or exp | lacunary");
    sub->add_option("--n-cover", f.n_cover, "covering multiplicity N")->check(CLI::PositiveNumber);
    sub->add_option("--r-start", f.r_start, "first radius of the geometric schedule")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "master seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", f.out_dir, "artifact directory");
    sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    if (i == 1) sub->add_option("--compact-set", f.compact_set, "compact set JSON");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (const char* c : commands)
    if (app.got_subcommand(c)) return run(c, f);
  return 2;
}
