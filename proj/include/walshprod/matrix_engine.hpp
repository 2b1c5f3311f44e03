#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "walshprod/family.hpp"
#include "walshprod/hypercube.hpp"

namespace walshprod {

/// The chain (n; A_1, ..., A_{m+1}) defining
///   M = A_1^T (A_2 A_2^T) ... (A_m A_m^T) A_{m+1},  A_i = X_{S_i} Diag(w^{(i)}).
/// Construction validates the chain (trivial intersection, common dimension,
/// m >= 1, n >= 1).
class ProductSpec {
 public:
  ProductSpec(std::int64_t n, std::vector<WeightedFamily> chain);

  std::int64_t n() const { return n_; }
  /// Chain length parameter: the chain has m + 1 positions.
  int m() const { return static_cast<int>(chain_.size()) - 1; }
  int dimension() const { return chain_.front().family().dimension(); }
  const std::vector<WeightedFamily>& chain() const { return chain_; }
  const WeightedFamily& at(std::size_t position) const { return chain_[position]; }
  const EqualityPattern& pattern() const { return pattern_; }

  ProductSpec with_n(std::int64_t n) const { return ProductSpec(n, chain_); }

  /// FNV-1a over n, every member's parity words and every weight's bit pattern.
  std::uint64_t hash() const;

 private:
  std::int64_t n_;
  std::vector<WeightedFamily> chain_;
  EqualityPattern pattern_;
};

enum class Method { Exact, MonteCarlo };
std::string to_string(Method m);

/// E[M] (or one stratum of it), rows indexed by S_1 and columns by S_{m+1}.
struct ExpectationMatrix {
  Eigen::MatrixXd values;
  Method method = Method::Exact;
  std::uint64_t spec_hash = 0;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> trials;
  std::optional<std::uint64_t> partition_count;
};

struct MCEstimate {
  ExpectationMatrix mean;
  Eigen::MatrixXd std_error;  // entrywise sample std / sqrt(trials)
  int trials = 0;
  std::uint64_t master_seed = 0;
};

/// n x |family| matrix with entry (i, S) = x^S(x^{(i)}).
Eigen::MatrixXd build_X(const SetFamily& family, const Dataset& data);
/// build_X with column S scaled by w_S.
Eigen::MatrixXd build_A(const WeightedFamily& wf, const Dataset& data);

enum class Association {
  Gram,     // A_1^T (A_2 A_2^T) ... (A_m A_m^T) A_{m+1}, explicit n x n Grams
  Feature,  // (A_1^T A_2)(A_2^T A_3) ... (A_m^T A_{m+1})
};

/// Cheaper association for this spec by flop count.
Association preferred_association(const ProductSpec& spec);

Eigen::MatrixXd realize_M(const ProductSpec& spec, const Dataset& data, Association order);
Eigen::MatrixXd realize_M(const ProductSpec& spec, const Dataset& data);

/// Accumulations above this many (n * trials) terms use compensated summation.
inline constexpr double kCompensatedSumThreshold = 1e6;

/// Mean of realize_M over `trials` independent datasets; trial t draws its
/// dataset from derive_trial_seed(master_seed, t). Results do not depend on
/// `threads`. Requires trials >= 2.
MCEstimate mc_expected_M(const ProductSpec& spec, int trials, std::uint64_t master_seed,
                         int threads = 1);

}  // namespace walshprod
