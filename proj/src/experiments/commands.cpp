#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "config.hpp"
#include "walshprod/combinatorics.hpp"
#include "walshprod/exact_engine.hpp"
#include "walshprod/linalg.hpp"
#include "walshprod/rng.hpp"

namespace walshprod::experiments {

using detail::as_config;
using detail::get_or;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

Report start_report(const std::string& command, std::vector<std::string> header, std::uint64_t seed) {
  Report r;
  r.command = command;
  r.header = std::move(header);
  r.master_seed = seed;
  return r;
}

int trials(const json& config, int fallback) {
  const int t = as_config("trials", [&] { return get_or<int>(config, "trials", fallback); });
  if (t < 2) throw ConfigError("trials must be at least 2");
  return t;
}

// Least-squares slope of log(y) against log(x); NaN if any y <= 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(y[i] > 0)) return std::nan("");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

// ------------------------------------------------------------- verify-eq1

Report verify_eq1(const json& config, const RunOptions& options) {
  detail::check_common(config, {"cases", "grid"});
  const double cap = detail::budget(config);
  Report report = start_report("verify-eq1",
                               {"d", "n", "size_s", "size_s_prime", "norm", "expected", "rel_error", "pass"},
                               detail::master_seed(config, options));
  if (options.method == MethodChoice::MonteCarlo) {
    report.warnings.push_back("verify-eq1 always uses the exact engine; --mc ignored");
  }

  struct Case {
    int d;
    std::int64_t n;
    SetFamily s;
    SetFamily s_prime;
  };
  std::vector<Case> cases;
  if (config.contains("cases")) {
    as_config("cases", [&] {
      for (const auto& c : config.at("cases")) {
        detail::check_keys(c, {"d", "n", "s", "s_prime"}, "verify-eq1 case");
        const int d = c.at("d").get<int>();
        cases.push_back({d, c.at("n").get<std::int64_t>(), detail::parse_family(c.at("s"), d),
                         detail::parse_family(c.at("s_prime"), d)});
      }
      return 0;
    });
  }
  if (config.contains("grid")) {
    as_config("grid", [&] {
      const json& g = config.at("grid");
      detail::check_keys(g, {"dims", "n", "sizes"}, "verify-eq1 grid");
      for (int d : detail::dims(g)) {
        std::vector<int> all_sizes(static_cast<std::size_t>(d));
        std::iota(all_sizes.begin(), all_sizes.end(), 1);
        // Nonempty subsets in (size, lexicographic) order; S takes the first
        // a of them and S' the next b, so the two families never share a member.
        const SetFamily pool = all_subsets_of_size(d, all_sizes);
        for (auto n : g.at("n").get<std::vector<std::int64_t>>()) {
          for (const auto& ab : g.at("sizes")) {
            const auto sz = ab.get<std::vector<int>>();
            if (sz.size() != 2 || sz[0] < 1 || sz[1] < 1) throw ConfigError("grid sizes must be pairs [a, b] with a, b >= 1");
            const auto a = static_cast<std::size_t>(sz[0]);
            const auto b = static_cast<std::size_t>(sz[1]);
            if (a + b > pool.size()) {
              throw ConfigError("d = " + std::to_string(d) + " has only " + std::to_string(pool.size()) +
                                " nonempty subsets, cannot pick " + std::to_string(a + b));
            }
            std::vector<SubsetMask> first(pool.members().begin(), pool.members().begin() + static_cast<std::ptrdiff_t>(a));
            std::vector<SubsetMask> second(pool.members().begin() + static_cast<std::ptrdiff_t>(a),
                                           pool.members().begin() + static_cast<std::ptrdiff_t>(a + b));
            cases.push_back({d, n, SetFamily(d, first), SetFamily(d, second)});
          }
        }
      }
      return 0;
    });
  }
  if (cases.empty()) throw ConfigError("verify-eq1 needs \"cases\" or \"grid\"");
  std::stable_sort(cases.begin(), cases.end(), [](const Case& x, const Case& y) {
    return std::tuple(x.d, x.n, x.s.size(), x.s_prime.size()) < std::tuple(y.d, y.n, y.s.size(), y.s_prime.size());
  });

  Stopwatch total;
  bool all_ok = true;
  double worst = 0.0;
  for (const auto& c : cases) {
    if (c.n < 1) throw ConfigError("n must be at least 1");
    for (const auto& s : c.s.members()) {
      if (c.s_prime.contains(s)) {
        throw ConfigError("S and S' must be disjoint; both contain " + s.to_string());
      }
    }
    Stopwatch clock;
    const double w = 1.0 / std::sqrt(static_cast<double>(c.n));
    const ProductSpec spec = as_config("verify-eq1 chain", [&] {
      return ProductSpec(c.n, {WeightedFamily::uniform(c.s, w), WeightedFamily::uniform(c.s_prime, w),
                               WeightedFamily::uniform(c.s, w)});
    });
    const ExpectationMatrix e = exact_expected_M(spec, {cap, options.threads});
    const double norm = operator_norm(e.values).value;
    const double expected = static_cast<double>(c.s_prime.size()) / static_cast<double>(c.n);
    const double rel = std::abs(norm - expected) / expected;
    const bool pass = rel <= 1e-9;
    all_ok = all_ok && pass;
    worst = std::max(worst, rel);
    report.rows.push_back({fmt(c.d), fmt(c.n), std::to_string(c.s.size()), std::to_string(c.s_prime.size()),
                           fmt(norm), fmt(expected), fmt(rel), pass ? "true" : "false"});
    report.row_metadata.push_back({{"d", c.d},
                                   {"n", c.n},
                                   {"method", "exact"},
                                   {"spec_hash", spec.hash()},
                                   {"runtime_seconds", clock.seconds()}});
  }
  report.assertions.push_back({"norm_equals_size_over_n", all_ok, false,
                               "max relative error " + fmt(worst) + " (tolerance 1e-9) over " +
                                   std::to_string(cases.size()) + " cases"});
  report.runtime_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------- scaling-sweep

namespace {

std::size_t qualifying_middle(const ProductSpec& spec, const json& config) {
  const int m = spec.m();
  const auto& pattern = spec.pattern();
  auto qualifies = [&](int j) {
    return j >= 1 && j < m && !pattern.equal(static_cast<std::size_t>(j), 0) &&
           !pattern.equal(static_cast<std::size_t>(j), static_cast<std::size_t>(m));
  };
  if (config.contains("middle")) {
    const int j = as_config("middle", [&] { return config.at("middle").get<int>(); }) - 1;
    if (!qualifies(j)) {
      throw ConfigError("middle position " + std::to_string(j + 1) +
                        " must be an interior chain position whose family differs from both ends");
    }
    return static_cast<std::size_t>(j);
  }
  int best = -1;
  for (int j = 1; j < m; ++j) {
    if (!qualifies(j)) continue;
    if (best < 0 || spec.at(static_cast<std::size_t>(j)).family().effective_degree() <
                        spec.at(static_cast<std::size_t>(best)).family().effective_degree()) {
      best = j;
    }
  }
  if (best < 0) {
    throw ConfigError("no qualifying middle family: the chain needs an interior family distinct from "
                      "the first and last families");
  }
  return static_cast<std::size_t>(best);
}

struct NormEstimate {
  double norm = 0.0;
  double std_error = 0.0;
  Method method = Method::Exact;
  std::uint64_t spec_hash = 0;
  std::optional<int> trials;
};

NormEstimate estimate_norm(const ProductSpec& spec, MethodChoice choice, double cap, bool mc_fallback,
                           int trial_count, std::uint64_t seed, int threads) {
  bool exact = choice == MethodChoice::Exact;
  if (choice == MethodChoice::Auto) exact = exact_work_estimate(spec) <= cap || !mc_fallback;
  NormEstimate out;
  out.spec_hash = spec.hash();
  if (exact) {
    const ExpectationMatrix e = exact_expected_M(spec, {cap, threads});
    out.norm = operator_norm(e.values).value;
    return out;
  }
  const MCEstimate est = mc_expected_M(spec, trial_count, seed, threads);
  out.norm = operator_norm(est.mean.values).value;
  // |norm(A) - norm(B)| <= ||A - B||_F, so the Frobenius norm of the entrywise
  // standard errors is a conservative standard error for the norm.
  out.std_error = est.std_error.norm();
  out.method = Method::MonteCarlo;
  out.trials = trial_count;
  return out;
}

}  // namespace

Report scaling_sweep(const json& config, const RunOptions& options) {
  detail::check_common(config,
                       {"dims", "n", "chain", "middle", "decrease_from", "mc_fallback", "expect_naive_decay"});
  const std::uint64_t seed = detail::master_seed(config, options);
  Report report = start_report("scaling-sweep",
                               {"d", "n", "norm", "stderr", "reference_scale", "ratio", "naive_reference_scale",
                                "naive_ratio", "method"},
                               seed);
  std::vector<int> ds = detail::dims(config);
  std::sort(ds.begin(), ds.end());
  if (!config.contains("n")) throw ConfigError("scaling-sweep needs a sample-size rule \"n\"");
  if (!config.contains("chain")) throw ConfigError("scaling-sweep needs a \"chain\"");
  const std::vector<std::int64_t> ns = detail::sample_sizes(config.at("n"), ds);
  const double cap = detail::budget(config);
  const double slack_factor = detail::slack(config);
  const MethodChoice choice = detail::method(config, options);
  const bool mc_fallback = as_config("mc_fallback", [&] { return get_or<bool>(config, "mc_fallback", true); });
  const bool naive_decay = as_config("expect_naive_decay", [&] { return get_or<bool>(config, "expect_naive_decay", false); });
  const int trial_count = trials(config, 2000);
  const int decrease_from = as_config("decrease_from", [&] {
    return get_or<int>(config, "decrease_from", ds.size() > 1 ? ds[1] : ds[0]);
  });

  Stopwatch total;
  std::vector<double> norms, errors, ratios, naive_ratios, dvals;
  std::vector<double> degrees;
  bool any_mc = false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int d = ds[i];
    const std::int64_t n = ns[i];
    Stopwatch clock;
    const ProductSpec spec = detail::parse_chain(config.at("chain"), d, n);
    const std::size_t j = qualifying_middle(spec, config);
    const double p_eff = spec.at(j).family().effective_degree();
    const double p_naive = spec.at(j).family().degree_bound();
    const double outer = spec.at(0).max_weight() * spec.chain().back().max_weight();
    const double ref = std::pow(static_cast<double>(d), p_eff) * outer;
    const double naive_ref = std::pow(static_cast<double>(d), p_naive) * outer;

    const NormEstimate est = estimate_norm(spec, choice, cap, mc_fallback, trial_count,
                                           CounterRng(seed).at(static_cast<std::uint64_t>(d)), options.threads);
    any_mc = any_mc || est.method == Method::MonteCarlo;
    const double ratio = est.norm / ref;
    const double naive_ratio = est.norm / naive_ref;
    norms.push_back(est.norm);
    errors.push_back(est.std_error);
    ratios.push_back(ratio);
    naive_ratios.push_back(naive_ratio);
    dvals.push_back(d);
    degrees.push_back(p_eff);
    report.rows.push_back({fmt(d), fmt(n), fmt(est.norm), fmt(est.std_error), fmt(ref), fmt(ratio),
                           fmt(naive_ref), fmt(naive_ratio), to_string(est.method)});
    json meta = {{"d", d},
                 {"n", n},
                 {"method", to_string(est.method)},
                 {"spec_hash", est.spec_hash},
                 {"middle_position", j + 1},
                 {"effective_degree", p_eff},
                 {"degree_bound", p_naive},
                 {"runtime_seconds", clock.seconds()}};
    if (est.trials) meta["trials"] = *est.trials;
    report.row_metadata.push_back(meta);
  }

  report.assertions.push_back({"ratio_bounded", bounded_by_slack(ratios, slack_factor), false,
                               "every ratio <= " + fmt(slack_factor) + " x max ratio over the two smallest d"});

  // Decay is predicted only when n = c d^alpha with alpha above the middle degree.
  const json& nrule = config.at("n");
  const double max_degree = *std::max_element(degrees.begin(), degrees.end());
  const bool decay_predicted = nrule.is_object() && nrule.value("rule", "") == "power" &&
                               nrule.contains("alpha") && nrule.at("alpha").get<double>() > max_degree;
  Assertion decreasing{"norm_decreasing", true, false, ""};
  if (!decay_predicted) {
    decreasing.skipped = true;
    decreasing.detail = "n is not of the form c d^alpha with alpha above the middle degree";
  } else {
    int checked = 0;
    for (std::size_t i = 1; i < ds.size(); ++i) {
      if (ds[i - 1] < decrease_from) continue;
      ++checked;
      // Monte Carlo points may tie within noise: allow 4 combined standard errors.
      const double tol = 4.0 * std::hypot(errors[i - 1], errors[i]);
      if (!(norms[i] < norms[i - 1] + tol)) {
        decreasing.passed = false;
        decreasing.detail += "d=" + std::to_string(ds[i]) + " norm " + fmt(norms[i]) + " not below d=" +
                             std::to_string(ds[i - 1]) + " norm " + fmt(norms[i - 1]) + "; ";
      }
    }
    if (decreasing.detail.empty()) {
      decreasing.detail = "strictly decreasing over " + std::to_string(checked) + " steps from d=" +
                          std::to_string(decrease_from) + (any_mc ? " (4 stderr tolerance)" : "");
    }
  }
  report.assertions.push_back(decreasing);

  if (naive_decay) {
    const double slope = loglog_slope(dvals, naive_ratios);
    const double head = naive_ratios.size() > 1 ? std::min(naive_ratios[0], naive_ratios[1]) : naive_ratios[0];
    const bool ok = naive_ratios.size() >= 3 && slope < 0 && naive_ratios.back() < head;
    report.assertions.push_back({"naive_ratio_decays", ok, false,
                                 "log-log slope " + fmt(slope) + ", last " + fmt(naive_ratios.back()) +
                                     " vs min of first two " + fmt(head)});
  }
  report.runtime_seconds = total.seconds();
  return report;
}

// -------------------------------------------------------- counting-bounds

Report counting_bounds(const json& config, const RunOptions& options) {
  detail::check_common(config, {"d_max", "q_max", "p_max", "p_total_max", "engine", "constrained", "recursion"});
  Report report = start_report("counting-bounds", {"kind", "d", "q", "p", "v", "count", "bound", "pass"},
                               detail::master_seed(config, options));
  const auto [d_max, q_max, p_max, p_total_max, engine_name, constrained, recursion] = as_config("counting-bounds", [&] {
    const int pm = get_or<int>(config, "p_max", 6);
    return std::tuple(get_or<int>(config, "d_max", 4), get_or<int>(config, "q_max", 4), pm,
                      get_or<int>(config, "p_total_max", pm), get_or<std::string>(config, "engine", "auto"),
                      get_or<bool>(config, "constrained", true), get_or<bool>(config, "recursion", true));
  });
  if (d_max < 1 || q_max < 1 || p_max < 0 || p_total_max < 0) throw ConfigError("counting ranges must be positive");
  if (d_max > 30) throw ConfigError("d_max above 30 is not supported (row parity uses a 32-bit mask)");
  CountEngine engine = CountEngine::Auto;
  if (engine_name == "exhaustive") {
    engine = CountEngine::Exhaustive;
  } else if (engine_name == "dp") {
    engine = CountEngine::DynamicProgram;
  } else if (engine_name != "auto") {
    throw ConfigError("engine must be \"auto\", \"exhaustive\" or \"dp\"");
  }
  if (engine == CountEngine::Exhaustive && d_max * q_max > kExhaustiveCellLimit) {
    throw BudgetExceeded("exhaustive counting needs d*q <= " + std::to_string(kExhaustiveCellLimit) +
                             "; requested up to " + std::to_string(d_max * q_max) + " cells (use engine \"auto\")",
                         d_max * q_max, kExhaustiveCellLimit);
  }

  Stopwatch total;
  bool even_rows_ok = true, recursion_ok = true, constrained_ok = true, agree = true;
  int cross_checks = 0;
  auto row = [&](const std::string& kind, int d, int q, const std::string& p, const std::string& v, Count count,
                 const std::string& bound, bool pass) {
    report.rows.push_back({kind, fmt(d), fmt(q), p, v, to_string(count), bound, pass ? "true" : "false"});
  };
  auto can_cross_check = [&](int d, int q) { return engine == CountEngine::Auto && d * q <= kExhaustiveCellLimit; };

  for (int d = 1; d <= d_max; ++d) {
    for (int q = 1; q <= q_max; ++q) {
      for (int p = 0; p <= p_max; ++p) {
        const Count c = count_Mp(d, q, p, engine);
        if (can_cross_check(d, q)) {
          ++cross_checks;
          agree = agree && c == count_Mp(d, q, p, CountEngine::DynamicProgram);
        }
        const double bound = even_rows_bound(d, q, p);
        const bool pass = to_double(c) <= bound;
        even_rows_ok = even_rows_ok && pass;
        row("even_rows", d, q, fmt(p), "-", c, fmt(bound), pass);
      }
    }
  }
  if (recursion) {
    for (int d = 1; d <= d_max; ++d) {
      for (int q = 1; q <= q_max; ++q) {
        for (const auto& step : check_recursion(d, q, p_max, engine).steps) {
          recursion_ok = recursion_ok && step.holds;
          row("recursion", d, q, fmt(step.p), "-", step.m_p, to_string(step.factor * step.m_p_minus_2), step.holds);
        }
      }
    }
  }
  if (constrained) {
    for (int d = 1; d <= d_max; ++d) {
      for (int q = 1; q <= q_max; ++q) {
        std::optional<ConstrainedCountTable> table;
        if (engine != CountEngine::DynamicProgram && d * q <= kExhaustiveCellLimit) table.emplace(d, q);
        std::vector<int> caps(static_cast<std::size_t>(q), 0);
        while (true) {
          const int p_total = std::accumulate(caps.begin(), caps.end(), 0);
          if (p_total <= p_total_max) {
            std::string caps_str;
            for (std::size_t j = 0; j < caps.size(); ++j) caps_str += (j ? ";" : "") + std::to_string(caps[j]);
            for (std::uint32_t vm = 0; vm < (std::uint32_t{1} << d); ++vm) {
              std::vector<int> v(static_cast<std::size_t>(d));
              std::string v_str;
              int weight = 0;
              for (int r = 0; r < d; ++r) {
                v[static_cast<std::size_t>(r)] = static_cast<int>((vm >> r) & 1U);
                weight += v[static_cast<std::size_t>(r)];
                v_str += static_cast<char>('0' + v[static_cast<std::size_t>(r)]);
              }
              const Count c = table ? table->count(caps, v)
                                    : count_constrained(d, q, caps, v, CountEngine::DynamicProgram);
              if (table && can_cross_check(d, q)) {
                ++cross_checks;
                agree = agree && c == count_constrained(d, q, caps, v, CountEngine::DynamicProgram);
              }
              const double bound = constrained_bound(d, q, p_total, weight);
              const bool pass = to_double(c) <= bound;
              constrained_ok = constrained_ok && pass;
              row("constrained", d, q, caps_str, v_str, c, fmt(bound), pass);
            }
          }
          int j = 0;
          while (j < q && ++caps[static_cast<std::size_t>(j)] > p_total_max) caps[static_cast<std::size_t>(j++)] = 0;
          if (j == q) break;
        }
      }
    }
  }

  report.assertions.push_back({"even_rows_bound", even_rows_ok, false, "count_Mp <= (q^2 d)^{p/2}"});
  if (recursion) {
    report.assertions.push_back({"recursion", recursion_ok, false, "m_p <= d C(q,2) m_{p-2}"});
  }
  if (constrained) {
    report.assertions.push_back(
        {"constrained_bound", constrained_ok, false, "count <= 2^{q|v|+2} (q^2 d)^{(|p|-|v|)/2}"});
  }
  Assertion agreement{"engines_agree", agree, cross_checks == 0,
                      std::to_string(cross_checks) + " exhaustive/dynamic-program cross checks"};
  report.assertions.push_back(agreement);
  report.row_metadata.push_back({{"rows", report.rows.size()}, {"runtime_seconds", total.seconds()}});
  report.runtime_seconds = total.seconds();
  return report;
}

// ------------------------------------------------------------ mc-vs-exact

Report mc_vs_exact(const json& config, const RunOptions& options) {
  detail::check_common(config, {"d", "n", "chain"});
  const std::uint64_t seed = detail::master_seed(config, options);
  Report report = start_report("mc-vs-exact", {"row", "col", "exact", "mc_mean", "stderr", "z"}, seed);
  const auto [d, n] = as_config("mc-vs-exact", [&] {
    return std::pair(config.at("d").get<int>(), config.at("n").get<std::int64_t>());
  });
  if (!config.contains("chain")) throw ConfigError("mc-vs-exact needs a \"chain\"");
  const ProductSpec spec = detail::parse_chain(config.at("chain"), d, n);
  const int trial_count = trials(config, 1000);
  const double cap = detail::budget(config);
  if (options.method && *options.method != MethodChoice::Auto) {
    report.warnings.push_back("mc-vs-exact always runs both engines; method override ignored");
  }

  Stopwatch clock;
  const ExpectationMatrix exact = exact_expected_M(spec, {cap, options.threads});
  const MCEstimate mc = mc_expected_M(spec, trial_count, seed, options.threads);
  double max_z = 0.0;
  double max_diff = 0.0;
  for (Eigen::Index r = 0; r < exact.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < exact.values.cols(); ++c) {
      const double diff = std::abs(mc.mean.values(r, c) - exact.values(r, c));
      const double se = mc.std_error(r, c);
      double z = 0.0;
      if (se > 0) {
        z = diff / se;
      } else if (diff > 1e-12 * std::max(1.0, std::abs(exact.values(r, c)))) {
        z = std::numeric_limits<double>::infinity();
      }
      max_z = std::max(max_z, z);
      max_diff = std::max(max_diff, diff);
      report.rows.push_back({std::to_string(r), std::to_string(c), fmt(exact.values(r, c)),
                             fmt(mc.mean.values(r, c)), fmt(se), fmt(z)});
    }
  }
  Assertion a{"mc_within_4_stderr", max_z <= 4.0, false,
              "max |exact - mc| / stderr = " + fmt(max_z) + ", max |exact - mc| = " + fmt(max_diff)};
  if (trial_count < kMinTrialsForAssertion) {
    a.skipped = true;
    a.detail += " (skipped: " + std::to_string(trial_count) + " trials is too few for a z-score test)";
    report.warnings.push_back("insufficient trials (" + std::to_string(trial_count) + " < " +
                              std::to_string(kMinTrialsForAssertion) + "); assertion skipped");
  }
  report.assertions.push_back(a);
  report.row_metadata.push_back({{"d", d},
                                 {"n", n},
                                 {"spec_hash", spec.hash()},
                                 {"trials", trial_count},
                                 {"max_z", max_z},
                                 {"max_abs_diff", max_diff},
                                 {"runtime_seconds", clock.seconds()}});
  report.runtime_seconds = clock.seconds();
  return report;
}

// ------------------------------------------------------ weighted-sum-sweep

namespace {

struct Shape {
  std::string name;
  bool uses_a;
  bool uses_target;
};

const std::vector<Shape>& all_shapes() {
  static const std::vector<Shape> shapes{
      {"b", false, false}, {"b_target", false, true}, {"ab", true, false}, {"ab_target", true, true}};
  return shapes;
}

std::vector<double> unit_weights(std::size_t k, const std::string& kind, const CounterRng& rng,
                                 std::uint64_t offset) {
  std::vector<double> w(k, 0.0);
  if (kind == "zero" || k == 0) return w;
  if (kind == "uniform") {
    std::fill(w.begin(), w.end(), 1.0 / std::sqrt(static_cast<double>(k)));
    return w;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = rng.uniform01(offset + i);
    ss += w[i] * w[i];
  }
  const double norm = std::sqrt(ss);
  for (double& x : w) x /= norm;
  return w;
}

double l2(const std::vector<double>& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

}  // namespace

Report weighted_sum_sweep(const json& config, const RunOptions& options) {
  detail::check_common(config, {"dims", "degrees", "complete", "target_size", "shapes", "weights", "a_equals_b"});
  const std::uint64_t seed = detail::master_seed(config, options);
  Report report = start_report("weighted-sum-sweep", {"shape", "d", "lhs", "scale", "ratio"}, seed);
  std::vector<int> ds = detail::dims(config);
  std::sort(ds.begin(), ds.end());
  const double cap = detail::budget(config);
  const double slack_factor = detail::slack(config);
  const auto [degrees, complete, target_size, weight_kind, a_equals_b] = as_config("weighted-sum-sweep", [&] {
    return std::tuple(config.at("degrees").get<std::vector<int>>(), get_or<std::string>(config, "complete", "exact"),
                      get_or<int>(config, "target_size", 0), get_or<std::string>(config, "weights", "random"),
                      get_or<bool>(config, "a_equals_b", false));
  });
  const std::size_t q = degrees.size();
  if (q == 0) throw ConfigError("degrees must be nonempty");
  if (complete != "exact" && complete != "up_to") throw ConfigError("complete must be \"exact\" or \"up_to\"");
  if (weight_kind != "random" && weight_kind != "uniform" && weight_kind != "zero") {
    throw ConfigError("weights must be \"random\", \"uniform\" or \"zero\"");
  }
  std::vector<Shape> shapes;
  if (config.contains("shapes")) {
    for (const auto& name : as_config("shapes", [&] { return config.at("shapes").get<std::vector<std::string>>(); })) {
      auto it = std::find_if(all_shapes().begin(), all_shapes().end(), [&](const Shape& s) { return s.name == name; });
      if (it == all_shapes().end()) throw ConfigError("unknown shape \"" + name + "\"");
      shapes.push_back(*it);
    }
  } else {
    shapes = all_shapes();
  }
  for (const auto& s : shapes) {
    if (s.uses_a && q < 2) throw ConfigError("shape \"" + s.name + "\" needs at least two families");
  }
  if (target_size < 0) throw ConfigError("target_size must be nonnegative");

  Stopwatch total;
  std::map<std::string, std::vector<double>> ratios;
  bool nonnegative = true;
  for (int d : ds) {
    Stopwatch clock;
    if (target_size > d) throw ConfigError("target_size exceeds d = " + std::to_string(d));
    std::vector<SetFamily> fams;
    for (int p : degrees) {
      if (p < 0 || p > d) throw ConfigError("degree " + std::to_string(p) + " outside [0, d] for d = " + std::to_string(d));
      std::vector<int> sizes;
      if (complete == "exact") {
        sizes.push_back(p);
      } else {
        for (int s = 0; s <= p; ++s) sizes.push_back(s);
      }
      fams.push_back(all_subsets_of_size(d, sizes));
    }
    SubsetMask target(d);
    for (int i = 0; i < target_size; ++i) target.insert(i);

    const CounterRng rng(CounterRng(seed).at(static_cast<std::uint64_t>(d)));
    const std::vector<double> b = unit_weights(fams.back().size(), weight_kind, rng, 0);
    std::vector<double> a;
    if (q >= 2) {
      if (a_equals_b) {
        if (!(fams[q - 2] == fams[q - 1])) throw ConfigError("a_equals_b needs equal last two families");
        a = b;
      } else {
        a = unit_weights(fams[q - 2].size(), weight_kind, rng, std::uint64_t{1} << 40);
      }
    }
    double head_b = 0, head_ab = 0;
    for (std::size_t t = 0; t + 1 < q; ++t) head_b += degrees[t];
    for (std::size_t t = 0; t + 2 < q; ++t) head_ab += degrees[t];

    json meta = {{"d", d}, {"b_norm", l2(b)}};
    for (const auto& shape : shapes) {
      MonomialSumTerms terms;
      terms.b = b;
      if (shape.uses_a) terms.a = a;
      if (shape.uses_target) terms.target = target;
      terms.budget = cap;
      const double lhs = weighted_monomial_sum(fams, terms);
      const double scale = shape.uses_a ? l2(a) * l2(b) * std::pow(static_cast<double>(d), head_ab / 2.0)
                                        : l2(b) * std::pow(static_cast<double>(d), head_b / 2.0);
      const double ratio = lhs == 0.0 ? 0.0 : lhs / scale;
      nonnegative = nonnegative && lhs >= 0.0;
      ratios[shape.name].push_back(ratio);
      report.rows.push_back({shape.name, fmt(d), fmt(lhs), fmt(scale), fmt(ratio)});
    }
    meta["runtime_seconds"] = clock.seconds();
    report.row_metadata.push_back(meta);
  }
  for (const auto& shape : shapes) {
    report.assertions.push_back({shape.name + "_ratio_bounded", bounded_by_slack(ratios[shape.name], slack_factor),
                                 false, "every ratio <= " + fmt(slack_factor) + " x max over the two smallest d"});
  }
  report.assertions.push_back({"lhs_nonnegative", nonnegative, false, "nonnegative weights give nonnegative sums"});
  report.runtime_seconds = total.seconds();
  return report;
}

}  // namespace walshprod::experiments
