#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "walshprod/hypercube.hpp"

namespace walshprod {

/// An ordered collection of distinct subsets of [d]. The member order fixes the
/// row/column indexing of every matrix built from the family.
class SetFamily {
 public:
  SetFamily() = default;
  /// `degree_bound` defaults to the largest member degree (0 for an empty family).
  SetFamily(int d, std::vector<SubsetMask> members, std::optional<int> degree_bound = {});

  int dimension() const { return d_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<SubsetMask>& members() const { return members_; }
  const SubsetMask& operator[](std::size_t i) const { return members_[i]; }
  int degree_bound() const { return degree_bound_; }

  /// Degree used for scaling references. Equals degree_bound() except for
  /// blocked families, where it is sum_k s_k * p_k.
  double effective_degree() const { return effective_degree_.value_or(degree_bound_); }
  SetFamily with_effective_degree(double degree) const;

  std::optional<std::size_t> index_of(const SubsetMask& s) const;
  bool contains(const SubsetMask& s) const { return index_of(s).has_value(); }

  /// Ordered equality: same dimension and same member list in the same order.
  friend bool operator==(const SetFamily& a, const SetFamily& b) {
    return a.d_ == b.d_ && a.members_ == b.members_;
  }

 private:
  int d_ = 0;
  std::vector<SubsetMask> members_;
  int degree_bound_ = 0;
  std::optional<double> effective_degree_;
  std::unordered_map<SubsetMask, std::size_t, SubsetMaskHash> index_;
};

/// A family together with one nonnegative weight per member.
class WeightedFamily {
 public:
  WeightedFamily(SetFamily family, std::vector<double> weights);
  static WeightedFamily uniform(SetFamily family, double weight);

  const SetFamily& family() const { return family_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::size_t size() const { return family_.size(); }
  double max_weight() const;

 private:
  SetFamily family_;
  std::vector<double> weights_;
};

/// All subsets of [d] whose size lies in `sizes`, ordered by size and then
/// lexicographically.
SetFamily all_subsets_of_size(int d, std::span<const int> sizes);
SetFamily all_subsets_of_size(int d, std::initializer_list<int> sizes);
/// Same, but drawing coordinates only from `ground`.
SetFamily all_subsets_of_size(int d, std::span<const int> sizes, const SubsetMask& ground);

/// Disjoint coordinate blocks T_1..T_l with size exponents s_k.
class BlockStructure {
 public:
  BlockStructure(int d, std::vector<SubsetMask> blocks, std::vector<double> exponents);

  /// Realizes |T_k| = round(d^{s_k}) clipped to [1, remaining]. Blocks are
  /// sized smallest exponent first (so sublinear blocks keep their size when
  /// a linear block would otherwise absorb every coordinate) and laid out
  /// contiguously in declaration order.
  static BlockStructure from_exponents(int d, std::vector<double> exponents);

  int dimension() const { return d_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<SubsetMask>& blocks() const { return blocks_; }
  const std::vector<double>& exponents() const { return exponents_; }

 private:
  int d_;
  std::vector<SubsetMask> blocks_;
  std::vector<double> exponents_;
};

/// All disjoint unions of S_k within T_k with |S_k| = per_block_sizes[k].
/// The result carries effective degree sum_k s_k * per_block_sizes[k].
SetFamily blocked_family(const BlockStructure& structure, std::span<const int> per_block_sizes);

/// Which chain positions hold identical families. Positions are 0-based.
class EqualityPattern {
 public:
  EqualityPattern() = default;
  explicit EqualityPattern(std::vector<int> class_of) : class_of_(std::move(class_of)) {}

  std::size_t size() const { return class_of_.size(); }
  bool equal(std::size_t i, std::size_t j) const { return class_of_[i] == class_of_[j]; }
  /// class id of position i: the smallest position holding the same family.
  int class_of(std::size_t i) const { return class_of_[i]; }
  const std::vector<int>& classes() const { return class_of_; }
  /// 1-based equalities, e.g. "{1=3}"; "{}" when all families differ.
  std::string to_string() const;

  friend bool operator==(const EqualityPattern&, const EqualityPattern&) = default;

 private:
  std::vector<int> class_of_;
};

/// Two families in a chain share a member without being identical.
class TrivialIntersectionViolation : public std::invalid_argument {
 public:
  TrivialIntersectionViolation(std::size_t first, std::size_t second, SubsetMask shared);

  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }
  const SubsetMask& shared_member() const { return shared_; }

 private:
  std::size_t first_;
  std::size_t second_;
  SubsetMask shared_;
};

EqualityPattern validate_chain(std::span<const SetFamily> families);

/// c * min(n^{-1/2}, d^{-degree/2}).
double small_weight(long long n, int d, double degree, double c = 1.0);

}  // namespace walshprod
