#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace walshprod {

/// Largest supported hypercube dimension; parity words are fixed-width.
inline constexpr int kMaxDimension = 1024;

/// A subset S of {0, ..., d-1}, i.e. the Fourier-Walsh monomial x^S.
class SubsetMask {
 public:
  static constexpr int kWords = kMaxDimension / 64;

  SubsetMask() = default;
  explicit SubsetMask(int d);
  SubsetMask(int d, std::initializer_list<int> coords);
  SubsetMask(int d, std::span<const int> coords);

  int dimension() const { return d_; }
  int degree() const;
  bool empty() const;
  bool contains(int coord) const;
  void insert(int coord);
  std::vector<int> coordinates() const;

  /// Number of coordinates shared with `other`.
  int overlap(const SubsetMask& other) const;

  SubsetMask& operator^=(const SubsetMask& other);
  friend SubsetMask operator^(SubsetMask a, const SubsetMask& b) { return a ^= b; }

  friend bool operator==(const SubsetMask& a, const SubsetMask& b) {
    return a.d_ == b.d_ && a.words_ == b.words_;
  }

  std::size_t hash() const;
  std::string to_string() const;

  /// Raw parity word (bit j of word w is coordinate 64*w + j).
  std::uint64_t word(int w) const { return words_[static_cast<std::size_t>(w)]; }
  int used_words() const { return (d_ + 63) / 64; }

 private:
  friend class SignVector;
  std::uint16_t d_ = 0;
  std::array<std::uint64_t, kWords> words_{};
};

struct SubsetMaskHash {
  std::size_t operator()(const SubsetMask& s) const { return s.hash(); }
};

/// Symmetric difference. Throws DimensionMismatch on unequal dimensions.
SubsetMask symmetric_difference(const SubsetMask& a, const SubsetMask& b);

/// A point of {-1,+1}^d, stored as the mask of coordinates equal to -1.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(int d) : negatives_(d) {}
  /// Entries must all be exactly -1 or +1.
  explicit SignVector(std::span<const int> entries);
  static SignVector from_negatives(SubsetMask negatives) {
    SignVector x;
    x.negatives_ = negatives;
    return x;
  }

  int dimension() const { return negatives_.dimension(); }
  int operator[](int coord) const { return negatives_.contains(coord) ? -1 : 1; }
  const SubsetMask& negatives() const { return negatives_; }

  friend bool operator==(const SignVector&, const SignVector&) = default;

 private:
  SubsetMask negatives_;
};

/// x^S evaluated at x: +1 or -1 (the empty monomial is +1).
int monomial_eval(const SubsetMask& s, const SignVector& x);

/// E[x^{S_1} ... x^{S_q}] under the uniform measure: 1 iff the XOR of all sets
/// vanishes. An empty list has expectation 1.
int expectation_of_product(std::span<const SubsetMask> sets);

/// n points of {-1,+1}^d. Sampled datasets remember their seed.
class Dataset {
 public:
  static Dataset sample(int n, int d, std::uint64_t seed);
  static Dataset from_rows(std::vector<SignVector> rows);

  int n() const { return static_cast<int>(rows_.size()); }
  int dimension() const { return d_; }
  const std::vector<SignVector>& rows() const { return rows_; }
  const SignVector& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  int d_ = 0;
  std::vector<SignVector> rows_;
  std::optional<std::uint64_t> seed_;
};

}  // namespace walshprod
