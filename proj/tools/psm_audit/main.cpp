#include <chrono>
#include <ctime>
#include <iostream>

#include "common.hpp"

namespace {

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit toolkit for data-driven password strength models"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", psmaudit::toolkit_version());
  app.set_config("--config", "", "key=value (TOML) config file");

  psm_cli::Registry reg;
  app.add_option("--seed", reg.global.seed, "seed for every random choice")
      ->capture_default_str();
  app.add_option("--threads", reg.global.threads,
                 "worker threads (default: PSM_AUDIT_THREADS, else 1)");
  app.add_option("--report", reg.global.report,
                 "write the report here (default: standard output)");
  app.add_flag("--csv", reg.global.csv, "CSV report where the command has one");

  psm_cli::register_model_commands(app, reg);
  psm_cli::register_attack_commands(app, reg);
  psm_cli::register_guessing_commands(app, reg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [sub, run] : reg.commands) {
    if (!sub->parsed()) continue;
    try {
      const auto start = std::chrono::steady_clock::now();
      psm_cli::Output out = run(*sub);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (reg.global.report.empty()) {
        std::cout << out.body;
        std::cerr << out.summary;
      } else {
        psmaudit::write_text_file(reg.global.report, out.body);
        psm_cli::ojson meta;
        meta["tool"] = psmaudit::toolkit_version();
        meta["command"] = sub->get_name();
        meta["generated_at"] = utc_now();
        meta["elapsed_seconds"] = seconds;
        psmaudit::write_text_file(reg.global.report + ".meta.json",
                                  meta.dump(2) + "\n");
        std::cout << out.summary;
      }
      return 0;
    } catch (const CLI::ParseError& e) {
      return app.exit(e) == 0 ? 0 : 2;
    } catch (const psmaudit::Error& e) {
      std::cerr << "psm-audit " << sub->get_name() << ": " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "psm-audit " << sub->get_name() << ": " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
