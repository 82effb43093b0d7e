#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psmaudit/psmaudit.hpp"

namespace psm_cli {

using ojson = nlohmann::ordered_json;

// Options every subcommand understands.
struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: PSM_AUDIT_THREADS, else 1
  std::string report;    // empty: report body to stdout
  bool csv = false;
};

struct Output {
  std::string body;     // report body (JSON or CSV)
  std::string summary;  // human-readable lines
};

using Runner = std::function<Output(CLI::App& sub)>;

struct Registry {
  GlobalOptions global;
  std::vector<std::pair<CLI::App*, Runner>> commands;
};

// Standard JSON report: tool version, command, resolved config, result.
std::string envelope(const CLI::App& sub, const ojson& result);

ojson parse_json(const std::string& text);

// Model hyperparameter flags shared by train and mia-calibrate.
void add_model_options(CLI::App* sub, psmaudit::ModelParams& params,
                       std::string& kind);

psmaudit::PasswordCorpus load_corpus_arg(const std::string& path,
                                         std::size_t max_len);

void register_model_commands(CLI::App& app, Registry& reg);
void register_attack_commands(CLI::App& app, Registry& reg);
void register_guessing_commands(CLI::App& app, Registry& reg);

}  // namespace psm_cli
