#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "potlab/cli.hpp"
#include "potlab/error.hpp"

namespace cli = potlab::cli;

namespace {

int validation_failure(const potlab::ValidationError& e) {
  std::cerr << "invalid config: " << e.what() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"potlab: nonlinear potential estimates for measure data problems"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "potlab-out";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* run = app.add_subcommand("run", "Run the scenarios of a JSON config");
  run->add_option("--config", config, "Scenario or batch JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");

  bool as_json = false;
  auto* list = app.add_subcommand("list", "List built-in scenarios");
  list->add_flag("--json", as_json, "Print full descriptors");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config, "Scenario or batch JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto batch = cli::load_batch(config);
      return cli::run_batch(batch, out, jobs, std::cout);
    }
    if (*validate) {
      const auto batch = cli::load_batch(config);
      std::cout << batch.scenarios.size() << " scenario(s) valid\n";
      return 0;
    }
    if (*list) {
      if (as_json) {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& e : cli::list_builtin_scenarios()) all.push_back(e.descriptor);
        std::cout << all.dump(2) << '\n';
      } else {
        for (const auto& e : cli::list_builtin_scenarios()) std::cout << e.id << "  " << e.description << '\n';
      }
      return 0;
    }
  } catch (const potlab::ValidationError& e) {
    return validation_failure(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
