#include <cmath>
#include <cstdio>
#include <fstream>

#include "config.hpp"
#include "walshprod/rng.hpp"

namespace walshprod::experiments {

bool Report::all_passed() const {
  for (const auto& a : assertions) {
    if (!a.skipped && !a.passed) return false;
  }
  return true;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"verify-eq1", "scaling-sweep", "counting-bounds", "mc-vs-exact",
                                              "weighted-sum-sweep"};
  return names;
}

Report run(const std::string& command, const json& config, const RunOptions& options) {
  if (config.is_object() && config.contains("command")) {
    const std::string declared = detail::as_config("command", [&] { return config.at("command").get<std::string>(); });
    if (declared != command) {
      throw ConfigError("config is for command \"" + declared + "\", not \"" + command + "\"");
    }
  }
  if (command == "verify-eq1") return verify_eq1(config, options);
  if (command == "scaling-sweep") return scaling_sweep(config, options);
  if (command == "counting-bounds") return counting_bounds(config, options);
  if (command == "mc-vs-exact") return mc_vs_exact(config, options);
  if (command == "weighted-sum-sweep") return weighted_sum_sweep(config, options);
  throw ConfigError("unknown command \"" + command + "\"");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

bool bounded_by_slack(std::span<const double> ratios, double slack) {
  if (ratios.empty()) return true;
  double reference = ratios[0];
  if (ratios.size() > 1) reference = std::max(reference, ratios[1]);
  for (double r : ratios) {
    if (!std::isfinite(r) || r > slack * reference) return false;
  }
  return true;
}

std::string to_csv(const Report& report) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(report.header);
  for (const auto& row : report.rows) line(row);
  return out;
}

std::uint64_t config_hash(const json& config) {
  // FNV-1a over the canonical (sorted-key) dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

json summary(const Report& report, const json& config) {
  json assertions = json::array();
  for (const auto& a : report.assertions) {
    assertions.push_back({{"name", a.name},
                          {"passed", a.passed},
                          {"skipped", a.skipped},
                          {"detail", a.detail}});
  }
  json rows = report.row_metadata;
  for (auto& r : rows) {
    if (r.contains("spec_hash")) r["spec_hash"] = hex(r["spec_hash"].get<std::uint64_t>());
  }
  return {{"command", report.command},
          {"schema_version", kSchemaVersion},
          {"config_hash", hex(config_hash(config))},
          {"rng", {{"algorithm", std::string(kRngAlgorithm)},
                   {"trial_seed_mixing", std::string(kTrialSeedMixing)},
                   {"master_seed", report.master_seed}}},
          {"all_passed", report.all_passed()},
          {"assertions", assertions},
          {"warnings", report.warnings},
          {"rows", rows},
          {"row_count", report.rows.size()},
          {"runtime_seconds", report.runtime_seconds}};
}

void write_outputs(const std::filesystem::path& out, const Report& report, const json& config) {
  std::filesystem::create_directories(out);
  {
    std::ofstream csv(out / (report.command + ".csv"), std::ios::binary);
    csv << to_csv(report);
    if (!csv) throw std::runtime_error("failed writing " + (out / (report.command + ".csv")).string());
  }
  std::ofstream js(out / "summary.json", std::ios::binary);
  js << summary(report, config).dump(2) << '\n';
  if (!js) throw std::runtime_error("failed writing " + (out / "summary.json").string());
}

}  // namespace walshprod::experiments
