#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "walshprod/errors.hpp"
#include "walshprod/experiments.hpp"
#include "walshprod/family.hpp"
#include "walshprod/matrix_engine.hpp"

namespace walshprod::experiments::detail {

/// Throws ConfigError unless every key of `obj` is in `allowed`.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where);

/// Checks schema_version and the common keys shared by every command.
void check_common(const json& config, std::initializer_list<const char*> command_keys);

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

std::uint64_t master_seed(const json& config, const RunOptions& options);
double budget(const json& config);
double slack(const json& config);
MethodChoice method(const json& config, const RunOptions& options);

std::vector<int> dims(const json& config);

/// "n": integer, {"rule": "power", "c": c, "alpha": a} or {"rule": "list", "values": [...]}.
std::vector<std::int64_t> sample_sizes(const json& rule, const std::vector<int>& dims);

SetFamily parse_family(const json& desc, int d);
std::vector<double> parse_weights(const json& rule, const SetFamily& family, std::int64_t n, int d);
/// "chain": [{"family": ..., "weights": ...}, ...]
ProductSpec parse_chain(const json& chain, int d, std::int64_t n);

/// Runs `fn`, rethrowing parse and validation failures as ConfigError.
template <class Fn>
auto as_config(const std::string& where, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace walshprod::experiments::detail
