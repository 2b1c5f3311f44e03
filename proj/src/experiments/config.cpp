#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "walshprod/exact_engine.hpp"

namespace walshprod::experiments {

namespace {

const char* const kCommonKeys[] = {"schema_version", "command", "seed", "budget", "slack", "method",
                                   "trials", "threads", "comment"};

}  // namespace

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

namespace detail {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

void check_common(const json& config, std::initializer_list<const char*> command_keys) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("schema_version")) throw ConfigError("config lacks schema_version");
  if (!config.at("schema_version").is_number_integer() ||
      config.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  for (const auto& [key, value] : config.items()) {
    bool known = false;
    for (const char* a : kCommonKeys) known = known || key == a;
    for (const char* a : command_keys) known = known || key == a;
    if (!known) throw ConfigError("config: unknown key \"" + key + "\"");
  }
  // Validate shared settings even for commands that ignore them.
  budget(config);
  slack(config);
  method(config, {});
}

std::uint64_t master_seed(const json& config, const RunOptions& options) {
  if (options.seed) return *options.seed;
  return as_config("seed", [&] { return get_or<std::uint64_t>(config, "seed", 0); });
}

double budget(const json& config) {
  const double b = as_config("budget", [&] { return get_or<double>(config, "budget", kDefaultBudget); });
  if (!(b > 0)) throw ConfigError("budget must be positive");
  return b;
}

double slack(const json& config) {
  const double s = as_config("slack", [&] { return get_or<double>(config, "slack", kDefaultSlack); });
  if (!(s >= 1.0)) throw ConfigError("slack must be at least 1");
  return s;
}

MethodChoice method(const json& config, const RunOptions& options) {
  if (options.method) return *options.method;
  const std::string m = as_config("method", [&] { return get_or<std::string>(config, "method", "auto"); });
  if (m == "auto") return MethodChoice::Auto;
  if (m == "exact") return MethodChoice::Exact;
  if (m == "mc") return MethodChoice::MonteCarlo;
  throw ConfigError("method must be \"auto\", \"exact\" or \"mc\"");
}

std::vector<int> dims(const json& config) {
  if (!config.contains("dims")) throw ConfigError("config lacks the dimension schedule \"dims\"");
  auto out = as_config("dims", [&] { return config.at("dims").get<std::vector<int>>(); });
  if (out.empty()) throw ConfigError("dims must be nonempty");
  std::set<int> seen;
  for (int d : out) {
    if (d < 1 || d > kMaxDimension) throw ConfigError("dims entry " + std::to_string(d) + " out of range");
    if (!seen.insert(d).second) throw ConfigError("dims entries must be distinct");
  }
  return out;
}

std::vector<std::int64_t> sample_sizes(const json& rule, const std::vector<int>& ds) {
  return as_config("n", [&] {
    std::vector<std::int64_t> out;
    if (rule.is_number_integer()) {
      out.assign(ds.size(), rule.get<std::int64_t>());
    } else {
      check_keys(rule, {"rule", "c", "alpha", "values"}, "n");
      const std::string kind = rule.at("rule").get<std::string>();
      if (kind == "power") {
        const double c = get_or<double>(rule, "c", 1.0);
        const double alpha = rule.at("alpha").get<double>();
        for (int d : ds) out.push_back(std::llround(c * std::pow(static_cast<double>(d), alpha)));
      } else if (kind == "list") {
        out = rule.at("values").get<std::vector<std::int64_t>>();
        if (out.size() != ds.size()) throw ConfigError("n values must match dims in length");
      } else {
        throw ConfigError("n rule must be \"power\" or \"list\"");
      }
    }
    for (auto n : out) {
      if (n < 1) throw ConfigError("sample size must be at least 1");
    }
    return out;
  });
}

SetFamily parse_family(const json& desc, int d) {
  return as_config("family", [&] {
    if (desc.contains("members")) {
      check_keys(desc, {"members", "degree_bound"}, "family");
      std::vector<SubsetMask> members;
      for (const auto& coords : desc.at("members")) {
        const auto c = coords.get<std::vector<int>>();
        members.emplace_back(d, std::span<const int>(c));
      }
      std::optional<int> bound;
      if (desc.contains("degree_bound")) bound = desc.at("degree_bound").get<int>();
      return SetFamily(d, std::move(members), bound);
    }
    const std::string gen = desc.at("generator").get<std::string>();
    if (gen == "all_size") {
      check_keys(desc, {"generator", "sizes", "within"}, "family");
      const auto sizes = desc.at("sizes").get<std::vector<int>>();
      if (desc.contains("within")) {
        const auto coords = desc.at("within").get<std::vector<int>>();
        return all_subsets_of_size(d, sizes, SubsetMask(d, std::span<const int>(coords)));
      }
      return all_subsets_of_size(d, sizes);
    }
    if (gen == "blocked") {
      check_keys(desc, {"generator", "exponents", "sizes"}, "family");
      const auto structure =
          BlockStructure::from_exponents(d, desc.at("exponents").get<std::vector<double>>());
      const auto sizes = desc.at("sizes").get<std::vector<int>>();
      return blocked_family(structure, sizes);
    }
    throw ConfigError("family generator must be \"all_size\" or \"blocked\"");
  });
}

std::vector<double> parse_weights(const json& rule, const SetFamily& family, std::int64_t n, int d) {
  return as_config("weights", [&] {
    check_keys(rule, {"rule", "c", "value", "values", "scale"}, "weights");
    const std::string kind = rule.at("rule").get<std::string>();
    const double scale = get_or<double>(rule, "scale", 1.0);
    std::vector<double> w;
    if (kind == "small") {
      const double c = get_or<double>(rule, "c", 1.0);
      w.assign(family.size(), small_weight(n, d, family.effective_degree(), c));
    } else if (kind == "inv_sqrt_n") {
      w.assign(family.size(), 1.0 / std::sqrt(static_cast<double>(n)));
    } else if (kind == "constant") {
      w.assign(family.size(), rule.at("value").get<double>());
    } else if (kind == "explicit") {
      w = rule.at("values").get<std::vector<double>>();
    } else {
      throw ConfigError("weight rule must be \"small\", \"inv_sqrt_n\", \"constant\" or \"explicit\"");
    }
    for (double& x : w) x *= scale;
    return w;
  });
}

ProductSpec parse_chain(const json& chain, int d, std::int64_t n) {
  return as_config("chain", [&] {
    if (!chain.is_array()) throw ConfigError("chain must be an array");
    std::vector<WeightedFamily> positions;
    for (const auto& pos : chain) {
      check_keys(pos, {"family", "weights"}, "chain position");
      SetFamily family = parse_family(pos.at("family"), d);
      const json rule = pos.contains("weights") ? pos.at("weights") : json{{"rule", "small"}};
      std::vector<double> w = parse_weights(rule, family, n, d);
      positions.emplace_back(std::move(family), std::move(w));
    }
    return ProductSpec(n, std::move(positions));
  });
}

}  // namespace detail

}  // namespace walshprod::experiments
