#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "walshprod/count.hpp"

namespace walshprod {

// Counting binary d x q matrices with parity-constrained row sums.
//
//   M_p         = { A : sum of entries = p, every row sum even }
//   C(p_vec, v) = { A : row sums = v (mod 2), column j sum <= p_vec[j] }
//
// Two engines: an exhaustive scan over all 2^{dq} matrices (the oracle,
// limited to d*q <= kExhaustiveCellLimit) and a row-by-row dynamic program.

inline constexpr int kExhaustiveCellLimit = 24;

enum class CountEngine {
  Auto,        // exhaustive when d*q <= kExhaustiveCellLimit, else dynamic program
  Exhaustive,
  DynamicProgram,
};

Count count_Mp(int d, int q, int p, CountEngine engine = CountEngine::Auto);

/// `row_parity` has length d with entries in {0, 1}; `column_caps` has length q.
Count count_constrained(int d, int q, std::span<const int> column_caps,
                        std::span<const int> row_parity, CountEngine engine = CountEngine::Auto);

/// Histogram of all 2^{dq} matrices by (column sums, row parity); answers
/// count_constrained for every (caps, parity) from a single scan.
class ConstrainedCountTable {
 public:
  ConstrainedCountTable(int d, int q);

  int rows() const { return d_; }
  int cols() const { return q_; }
  Count count(std::span<const int> column_caps, std::span<const int> row_parity) const;

 private:
  int d_;
  int q_;
  // index = (column-sum vector in base d+1) * 2^d + row-parity bits
  std::vector<Count> cells_;
};

/// (q^2 d)^{p/2}.
double even_rows_bound(int d, int q, int p);
/// 2^{q |v| + 2} (q^2 d)^{(|p|_1 - |v|_1)/2}.
double constrained_bound(int d, int q, int p_total, int parity_weight);

struct RecursionStep {
  int p = 0;
  Count m_p = 0;
  Count m_p_minus_2 = 0;
  Count factor = 0;  // d * C(q, 2)
  bool holds = false;  // m_p <= factor * m_{p-2}
};

struct RecursionReport {
  std::vector<RecursionStep> steps;  // one per even p in [2, p_max]
  bool all_hold = true;
};

/// Checks m_p <= d * C(q, 2) * m_{p-2} for even p <= p_max.
RecursionReport check_recursion(int d, int q, int p_max, CountEngine engine = CountEngine::Auto);

}  // namespace walshprod
