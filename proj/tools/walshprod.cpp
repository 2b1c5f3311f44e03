#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "walshprod/errors.hpp"
#include "walshprod/experiments.hpp"

namespace ex = walshprod::experiments;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 2;
constexpr int kExitConfig = 3;
constexpr int kExitBudget = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected products of hypercube monomial feature matrices"};
  std::string command;
  std::string config_path;
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  bool exact = false;
  bool mc = false;

  std::string names;
  for (const auto& n : ex::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  auto* exact_flag = app.add_flag("--exact", exact, "force exact enumeration");
  auto* mc_flag = app.add_flag("--mc", mc, "force Monte Carlo");
  exact_flag->excludes(mc_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  ex::RunOptions options;
  if (*seed_opt) options.seed = seed;
  if (*threads_opt) options.threads = threads;
  if (exact) options.method = ex::MethodChoice::Exact;
  if (mc) options.method = ex::MethodChoice::MonteCarlo;

  try {
    const ex::json config = ex::load_config(config_path);
    if (!*threads_opt && config.is_object() && config.contains("threads")) {
      if (!config.at("threads").is_number_integer() || config.at("threads").get<int>() < 1) {
        throw walshprod::ConfigError("threads must be a positive integer");
      }
      options.threads = config.at("threads").get<int>();
    }
    const ex::Report report = ex::run(command, config, options);
    ex::write_outputs(out, report, config);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& a : report.assertions) {
      const char* status = a.skipped ? "SKIP" : (a.passed ? "PASS" : "FAIL");
      std::cout << status << ' ' << a.name << ": " << a.detail << '\n';
    }
    return report.all_passed() ? kExitPass : kExitAssertion;
  } catch (const walshprod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const walshprod::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
