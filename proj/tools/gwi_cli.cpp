// Command-line harness: gwi <simulate|stationary|analytics|tails|verify> --config c.json

#include "gwi/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

int report_error(const char* kind, const std::string& message, int code) {
  const nlohmann::json diag{{"error", kind}, {"message", message}};
  std::cerr << diag.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order Galton-Watson processes with immigration"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> tol;
  unsigned threads = 1;

  for (const char* name : {"simulate", "stationary", "analytics", "tails", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Override the output directory");
    sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Override the truncation tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gwi::kExitConfig;
  }
  const std::string action = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) throw gwi::ConfigError("cannot read config '" + config_path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw gwi::ConfigError(e.what());
    }
    if (!doc.is_object()) throw gwi::ConfigError("config: expected an object");
    if (doc.contains("action") && doc["action"] != action) {
      throw gwi::ConfigError("config action '" + doc["action"].dump() +
                             "' does not match subcommand '" + action + "'");
    }
    doc["action"] = action;
    if (seed) doc["seed"] = *seed;
    if (out_dir) doc["output_dir"] = *out_dir;
    if (tol) doc["tol"] = *tol;

    const gwi::ExperimentConfig config = gwi::parse_config(doc);
    const gwi::RunResult result = gwi::run(config, threads);

    if (config.action == gwi::Action::kVerify) {
      for (const auto& o : result.outcomes) {
        std::printf("%-10s %-40s observed=%.6g predicted=%.6g tolerance=%.3g\n",
                    gwi::to_string(o.status).c_str(), o.name.c_str(), o.observed, o.predicted,
                    o.tolerance);
      }
    } else {
      std::cout << result.summary.dump(2) << '\n';
    }
    return result.exit_code;
  } catch (const gwi::ConfigError& e) {
    return report_error("config", e.what(), gwi::kExitConfig);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), 1);
  }
}
