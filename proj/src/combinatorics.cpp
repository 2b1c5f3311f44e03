#include "walshprod/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace walshprod {

namespace {

void check_shape(int d, int q) {
  if (d < 1 || q < 1) throw std::invalid_argument("matrix shape must be at least 1 x 1");
}

bool use_exhaustive(int d, int q, CountEngine engine) {
  const bool fits = d * q <= kExhaustiveCellLimit;
  switch (engine) {
    case CountEngine::Exhaustive:
      if (!fits) {
        throw std::invalid_argument("exhaustive scan limited to d*q <= " +
                                    std::to_string(kExhaustiveCellLimit));
      }
      return true;
    case CountEngine::DynamicProgram:
      return false;
    case CountEngine::Auto:
      break;
  }
  return fits;
}

void check_parity(int d, std::span<const int> row_parity) {
  if (static_cast<int>(row_parity.size()) != d) {
    throw std::invalid_argument("row parity vector must have length d = " + std::to_string(d));
  }
  for (int v : row_parity) {
    if (v != 0 && v != 1) throw std::invalid_argument("row parity entries must be 0 or 1");
  }
}

void check_caps(int q, std::span<const int> caps) {
  if (static_cast<int>(caps.size()) != q) {
    throw std::invalid_argument("column caps must have length q = " + std::to_string(q));
  }
  for (int c : caps) {
    if (c < 0) throw std::invalid_argument("column caps must be nonnegative");
  }
}

// Bit r*q + j of a matrix word is entry (r, j).
std::uint32_t row_mask(int q, int r) { return ((std::uint32_t{1} << q) - 1) << (r * q); }

std::uint32_t column_mask(int d, int q, int j) {
  std::uint32_t mask = 0;
  for (int r = 0; r < d; ++r) mask |= std::uint32_t{1} << (r * q + j);
  return mask;
}

Count scan_Mp(int d, int q, int p) {
  const std::uint64_t total = std::uint64_t{1} << (d * q);
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) rows[static_cast<std::size_t>(r)] = row_mask(q, r);
  Count count = 0;
  for (std::uint64_t a = 0; a < total; ++a) {
    const auto bits = static_cast<std::uint32_t>(a);
    if (std::popcount(bits) != p) continue;
    bool even = true;
    for (std::uint32_t rm : rows) {
      if (std::popcount(bits & rm) & 1) {
        even = false;
        break;
      }
    }
    if (even) ++count;
  }
  return count;
}

Count dp_Mp(int d, int q, int p) {
  // [t^p] (sum_{w even} C(q, w) t^w)^d
  std::vector<Count> poly(static_cast<std::size_t>(p + 1), 0);
  poly[0] = 1;
  for (int r = 0; r < d; ++r) {
    std::vector<Count> next(poly.size(), 0);
    for (int have = 0; have <= p; ++have) {
      if (poly[static_cast<std::size_t>(have)] == 0) continue;
      for (int w = 0; w <= q && have + w <= p; w += 2) {
        next[static_cast<std::size_t>(have + w)] += poly[static_cast<std::size_t>(have)] * binomial(q, w);
      }
    }
    poly = std::move(next);
  }
  return poly[static_cast<std::size_t>(p)];
}

Count scan_constrained(int d, int q, std::span<const int> caps, std::span<const int> parity) {
  const std::uint64_t total = std::uint64_t{1} << (d * q);
  std::vector<std::uint32_t> cols(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) cols[static_cast<std::size_t>(j)] = column_mask(d, q, j);
  Count count = 0;
  for (std::uint64_t a = 0; a < total; ++a) {
    const auto bits = static_cast<std::uint32_t>(a);
    bool ok = true;
    for (int r = 0; r < d && ok; ++r) {
      ok = (std::popcount(bits & row_mask(q, r)) & 1) == parity[static_cast<std::size_t>(r)];
    }
    for (int j = 0; j < q && ok; ++j) {
      ok = std::popcount(bits & cols[static_cast<std::size_t>(j)]) <= caps[static_cast<std::size_t>(j)];
    }
    if (ok) ++count;
  }
  return count;
}

Count dp_constrained(int d, int q, std::span<const int> caps, std::span<const int> parity) {
  // State: column loads in mixed radix (cap_j + 1), caps clipped to d.
  std::vector<int> radix(static_cast<std::size_t>(q));
  std::size_t states = 1;
  for (int j = 0; j < q; ++j) {
    radix[static_cast<std::size_t>(j)] = std::min(caps[static_cast<std::size_t>(j)], d) + 1;
    states *= static_cast<std::size_t>(radix[static_cast<std::size_t>(j)]);
  }
  std::vector<std::size_t> stride(static_cast<std::size_t>(q));
  std::size_t s = 1;
  for (int j = 0; j < q; ++j) {
    stride[static_cast<std::size_t>(j)] = s;
    s *= static_cast<std::size_t>(radix[static_cast<std::size_t>(j)]);
  }

  std::vector<Count> ways(states, 0);
  ways[0] = 1;
  std::vector<int> load(static_cast<std::size_t>(q));
  for (int r = 0; r < d; ++r) {
    std::vector<Count> next(states, 0);
    for (std::size_t state = 0; state < states; ++state) {
      if (ways[state] == 0) continue;
      std::size_t rest = state;
      for (int j = 0; j < q; ++j) {
        load[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(radix[static_cast<std::size_t>(j)]));
        rest /= static_cast<std::size_t>(radix[static_cast<std::size_t>(j)]);
      }
      for (std::uint32_t choice = 0; choice < (std::uint32_t{1} << q); ++choice) {
        if ((std::popcount(choice) & 1) != parity[static_cast<std::size_t>(r)]) continue;
        std::size_t target = state;
        bool fits = true;
        for (int j = 0; j < q && fits; ++j) {
          if (!((choice >> j) & 1U)) continue;
          if (load[static_cast<std::size_t>(j)] + 1 >= radix[static_cast<std::size_t>(j)]) fits = false;
          target += stride[static_cast<std::size_t>(j)];
        }
        if (fits) next[target] += ways[state];
      }
    }
    ways = std::move(next);
  }
  Count total = 0;
  for (Count w : ways) total += w;
  return total;
}

}  // namespace

Count count_Mp(int d, int q, int p, CountEngine engine) {
  check_shape(d, q);
  if (p < 0) throw std::invalid_argument("count_Mp: p must be nonnegative");
  if (p % 2 == 1 || p > d * q) return 0;
  return use_exhaustive(d, q, engine) ? scan_Mp(d, q, p) : dp_Mp(d, q, p);
}

Count count_constrained(int d, int q, std::span<const int> column_caps,
                        std::span<const int> row_parity, CountEngine engine) {
  check_shape(d, q);
  check_caps(q, column_caps);
  check_parity(d, row_parity);
  return use_exhaustive(d, q, engine) ? scan_constrained(d, q, column_caps, row_parity)
                                      : dp_constrained(d, q, column_caps, row_parity);
}

ConstrainedCountTable::ConstrainedCountTable(int d, int q) : d_(d), q_(q) {
  check_shape(d, q);
  if (d * q > kExhaustiveCellLimit) {
    throw std::invalid_argument("exhaustive scan limited to d*q <= " +
                                std::to_string(kExhaustiveCellLimit));
  }
  std::size_t sum_states = 1;
  for (int j = 0; j < q; ++j) sum_states *= static_cast<std::size_t>(d + 1);
  cells_.assign(sum_states << d, 0);

  std::vector<std::uint32_t> cols(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) cols[static_cast<std::size_t>(j)] = column_mask(d, q, j);
  const std::uint64_t total = std::uint64_t{1} << (d * q);
  for (std::uint64_t a = 0; a < total; ++a) {
    const auto bits = static_cast<std::uint32_t>(a);
    std::size_t sums = 0;
    for (int j = q - 1; j >= 0; --j) {
      sums = sums * static_cast<std::size_t>(d + 1) +
             static_cast<std::size_t>(std::popcount(bits & cols[static_cast<std::size_t>(j)]));
    }
    std::size_t parity = 0;
    for (int r = 0; r < d; ++r) {
      parity |= static_cast<std::size_t>(std::popcount(bits & row_mask(q, r)) & 1) << r;
    }
    ++cells_[(sums << d) | parity];
  }
}

Count ConstrainedCountTable::count(std::span<const int> column_caps,
                                   std::span<const int> row_parity) const {
  check_caps(q_, column_caps);
  check_parity(d_, row_parity);
  std::size_t parity = 0;
  for (int r = 0; r < d_; ++r) parity |= static_cast<std::size_t>(row_parity[static_cast<std::size_t>(r)]) << r;

  // Odometer over column-sum vectors c <= min(caps, d).
  std::vector<int> limit(static_cast<std::size_t>(q_));
  for (int j = 0; j < q_; ++j) limit[static_cast<std::size_t>(j)] = std::min(column_caps[static_cast<std::size_t>(j)], d_);
  std::vector<int> c(static_cast<std::size_t>(q_), 0);
  Count total = 0;
  while (true) {
    std::size_t sums = 0;
    for (int j = q_ - 1; j >= 0; --j) sums = sums * static_cast<std::size_t>(d_ + 1) + static_cast<std::size_t>(c[static_cast<std::size_t>(j)]);
    total += cells_[(sums << d_) | parity];
    int j = 0;
    while (j < q_ && c[static_cast<std::size_t>(j)] == limit[static_cast<std::size_t>(j)]) c[static_cast<std::size_t>(j++)] = 0;
    if (j == q_) break;
    ++c[static_cast<std::size_t>(j)];
  }
  return total;
}

double even_rows_bound(int d, int q, int p) {
  return std::pow(static_cast<double>(q) * q * d, p / 2.0);
}

double constrained_bound(int d, int q, int p_total, int parity_weight) {
  return std::pow(2.0, q * parity_weight + 2) *
         std::pow(static_cast<double>(q) * q * d, (p_total - parity_weight) / 2.0);
}

RecursionReport check_recursion(int d, int q, int p_max, CountEngine engine) {
  RecursionReport report;
  const Count factor = static_cast<Count>(d) * binomial(q, 2);
  for (int p = 2; p <= p_max; p += 2) {
    RecursionStep step;
    step.p = p;
    step.m_p = count_Mp(d, q, p, engine);
    step.m_p_minus_2 = count_Mp(d, q, p - 2, engine);
    step.factor = factor;
    step.holds = step.m_p <= factor * step.m_p_minus_2;
    report.all_hold = report.all_hold && step.holds;
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace walshprod
