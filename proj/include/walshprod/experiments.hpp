#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace walshprod::experiments {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultSlack = 1.5;
/// mc-vs-exact skips its z-score assertion below this many trials.
inline constexpr int kMinTrialsForAssertion = 30;

enum class MethodChoice { Auto, Exact, MonteCarlo };

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's "seed"
  int threads = 1;
  std::optional<MethodChoice> method;  // overrides the config's "method"
};

struct Assertion {
  std::string name;
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<Assertion> assertions;
  std::vector<std::string> warnings;
  json row_metadata = json::array();  // runtimes, spec hashes; kept out of the CSV
  std::uint64_t master_seed = 0;
  double runtime_seconds = 0.0;

  bool all_passed() const;
};

const std::vector<std::string>& command_names();

/// Parses a config file. Throws ConfigError on unreadable or malformed input.
json load_config(const std::filesystem::path& path);

/// Runs one command. Throws ConfigError for invalid configs and
/// BudgetExceeded when an enumeration exceeds the configured cap.
Report run(const std::string& command, const json& config, const RunOptions& options = {});

Report verify_eq1(const json& config, const RunOptions& options);
Report scaling_sweep(const json& config, const RunOptions& options);
Report counting_bounds(const json& config, const RunOptions& options);
Report mc_vs_exact(const json& config, const RunOptions& options);
Report weighted_sum_sweep(const json& config, const RunOptions& options);

/// 17 significant digits, '.' decimal separator.
std::string format_double(double value);

/// Every ratio is finite and at most slack * max(ratio over the first two points).
bool bounded_by_slack(std::span<const double> ratios, double slack);

std::string to_csv(const Report& report);
json summary(const Report& report, const json& config);
std::uint64_t config_hash(const json& config);

/// Writes <out>/<command>.csv and <out>/summary.json, creating <out>.
void write_outputs(const std::filesystem::path& out, const Report& report, const json& config);

}  // namespace walshprod::experiments
