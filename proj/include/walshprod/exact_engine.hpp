#pragma once

#include <cstdint>
#include <functional>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walshprod/count.hpp"
#include "walshprod/family.hpp"
#include "walshprod/matrix_engine.hpp"

namespace walshprod {

/// Largest ground set for which partitions are enumerated.
inline constexpr int kMaxPartitionSize = 12;

/// Default work cap: elementary parity evaluations per exact computation.
inline constexpr double kDefaultBudget = 1e8;

/// A partition of {0, ..., k-1}, stored as its restricted growth string:
/// labels[r] is the block of r, blocks numbered by least element.
class SetPartition {
 public:
  SetPartition() = default;
  /// Throws std::invalid_argument unless `labels` is a restricted growth string.
  explicit SetPartition(std::vector<int> labels);
  static SetPartition from_blocks(int k, const std::vector<std::vector<int>>& blocks);
  static SetPartition discrete(int k);

  int ground_size() const { return static_cast<int>(labels_.size()); }
  int block_count() const { return blocks_; }
  int block_of(int r) const { return labels_[static_cast<std::size_t>(r)]; }
  const std::vector<int>& labels() const { return labels_; }
  /// Bitmask over the ground set for each block, in canonical order.
  std::vector<std::uint32_t> block_masks() const;
  std::string to_string() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  std::vector<int> labels_;
  int blocks_ = 0;
};

/// Range over all partitions of {0..k-1} in canonical (lexicographic
/// restricted-growth) order. Requires 1 <= k <= kMaxPartitionSize.
class SetPartitions {
 public:
  explicit SetPartitions(int k);

  class iterator {
   public:
    using value_type = SetPartition;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const SetPartition& operator*() const { return current_; }
    const SetPartition* operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(std::default_sentinel_t) const { return done_; }

   private:
    friend class SetPartitions;
    explicit iterator(int k);
    std::vector<int> labels_;
    std::vector<int> prefix_max_;
    SetPartition current_;
    bool done_ = true;
  };

  iterator begin() const { return iterator(k_); }
  std::default_sentinel_t end() const { return {}; }

 private:
  int k_;
};

SetPartitions set_partitions(int k);
std::uint64_t bell_number(int k);

/// (pi_1 over the m sample positions, pi_2 over the m+1 feature positions).
struct StratumKey {
  SetPartition samples;
  SetPartition features;
};

struct ExactOptions {
  double budget = kDefaultBudget;
  int threads = 1;
};

/// Work estimate prod_i |S_i| * Bell(m) used for the budget check.
double exact_work_estimate(const ProductSpec& spec);

/// E[M] by expanding the chain over feature tuples and sample-index
/// partitions; expectations resolved by the parity rule per sample block.
/// Throws BudgetExceeded when exact_work_estimate exceeds options.budget.
ExpectationMatrix exact_expected_M(const ProductSpec& spec, const ExactOptions& options = {});

/// The part of E[M] from index tuples whose sample equalities follow
/// key.samples and whose feature equalities follow key.features exactly.
/// Throws std::invalid_argument for a key that does not fit the spec or merges
/// positions holding different families.
ExpectationMatrix stratum_contribution(const ProductSpec& spec, const StratumKey& key,
                                       const ExactOptions& options = {});

/// Every (pi_1, pi_2) whose feature partition only merges equal families.
std::vector<StratumKey> valid_strata(const ProductSpec& spec);

/// Filters index tuples (k_1, ..., k_q) into the families.
using TuplePredicate = std::function<bool(std::span<const std::size_t>)>;

struct MonomialSumTerms {
  std::vector<double> b;                 // weights on the last family
  std::optional<std::vector<double>> a;  // weights on the second-to-last family
  std::optional<SubsetMask> target;      // extra factor x^{S*}
  TuplePredicate constraint;             // admitted tuples; all when empty
  double budget = kDefaultBudget;
};

/// sum over admitted tuples of a_{S_{q-1}} b_{S_q} E[x^{S_1} ... x^{S_q} x^{S*}].
double weighted_monomial_sum(std::span<const SetFamily> families, const MonomialSumTerms& terms);

/// Number of tuples (S_1, ..., S_q) with x^{S_1} ... x^{S_q} = x^{target} on the cube.
Count count_nonzero_tuples(std::span<const SetFamily> families,
                           const std::optional<SubsetMask>& target, double budget = kDefaultBudget);

}  // namespace walshprod
