#include "walshprod/hypercube.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "walshprod/errors.hpp"
#include "walshprod/rng.hpp"

namespace walshprod {

namespace {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDimension) {
    throw std::invalid_argument("dimension " + std::to_string(d) + " outside [1, " +
                                std::to_string(kMaxDimension) + "]");
  }
}

void require_same_dimension(int a, int b) {
  if (a != b) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

}  // namespace

SubsetMask::SubsetMask(int d) : d_(static_cast<std::uint16_t>(d)) { check_dimension(d); }

SubsetMask::SubsetMask(int d, std::initializer_list<int> coords)
    : SubsetMask(d, std::span<const int>(coords.begin(), coords.size())) {}

SubsetMask::SubsetMask(int d, std::span<const int> coords) : SubsetMask(d) {
  for (int c : coords) insert(c);
}

int SubsetMask::degree() const {
  int total = 0;
  for (int w = 0; w < used_words(); ++w) total += std::popcount(words_[w]);
  return total;
}

bool SubsetMask::empty() const {
  for (int w = 0; w < used_words(); ++w) {
    if (words_[w] != 0) return false;
  }
  return true;
}

bool SubsetMask::contains(int coord) const {
  if (coord < 0 || coord >= d_) return false;
  return (words_[coord / 64] >> (coord % 64)) & 1U;
}

void SubsetMask::insert(int coord) {
  if (coord < 0 || coord >= d_) {
    throw std::out_of_range("coordinate " + std::to_string(coord) + " not in [0, " +
                            std::to_string(d_) + ")");
  }
  words_[coord / 64] |= std::uint64_t{1} << (coord % 64);
}

std::vector<int> SubsetMask::coordinates() const {
  std::vector<int> out;
  for (int w = 0; w < used_words(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(64 * w + std::countr_zero(bits));
      bits &= bits - 1;
    }
  }
  return out;
}

int SubsetMask::overlap(const SubsetMask& other) const {
  require_same_dimension(d_, other.d_);
  int total = 0;
  for (int w = 0; w < used_words(); ++w) total += std::popcount(words_[w] & other.words_[w]);
  return total;
}

SubsetMask& SubsetMask::operator^=(const SubsetMask& other) {
  require_same_dimension(d_, other.d_);
  for (int w = 0; w < used_words(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

std::size_t SubsetMask::hash() const {
  std::uint64_t h = splitmix64_mix(d_);
  for (int w = 0; w < used_words(); ++w) h = splitmix64_mix(h ^ words_[w]);
  return static_cast<std::size_t>(h);
}

std::string SubsetMask::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int c : coordinates()) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '}';
  return os.str();
}

SubsetMask symmetric_difference(const SubsetMask& a, const SubsetMask& b) { return a ^ b; }

SignVector::SignVector(std::span<const int> entries)
    : negatives_(static_cast<int>(entries.size())) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] == -1) {
      negatives_.insert(static_cast<int>(i));
    } else if (entries[i] != 1) {
      throw std::invalid_argument("sign vector entries must be -1 or +1");
    }
  }
}

int monomial_eval(const SubsetMask& s, const SignVector& x) {
  require_same_dimension(s.dimension(), x.dimension());
  const SubsetMask& neg = x.negatives();
  int parity = 0;
  for (int w = 0; w < s.used_words(); ++w) parity ^= std::popcount(s.word(w) & neg.word(w)) & 1;
  return parity != 0 ? -1 : 1;
}

int expectation_of_product(std::span<const SubsetMask> sets) {
  if (sets.empty()) return 1;
  SubsetMask acc = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) acc ^= sets[i];
  return acc.empty() ? 1 : 0;
}

Dataset Dataset::sample(int n, int d, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  check_dimension(d);
  const CounterRng rng(seed);
  const int words = (d + 63) / 64;
  Dataset data;
  data.d_ = d;
  data.seed_ = seed;
  data.rows_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SubsetMask neg(d);
    for (int w = 0; w < words; ++w) {
      std::uint64_t bits = rng.at(static_cast<std::uint64_t>(i) * words + w);
      const int live = std::min(64, d - 64 * w);
      if (live < 64) bits &= (std::uint64_t{1} << live) - 1;
      for (std::uint64_t b = bits; b != 0; b &= b - 1) neg.insert(64 * w + std::countr_zero(b));
    }
    data.rows_.push_back(SignVector::from_negatives(neg));
  }
  return data;
}

Dataset Dataset::from_rows(std::vector<SignVector> rows) {
  if (rows.empty()) throw std::invalid_argument("dataset needs at least one row");
  const int d = rows.front().dimension();
  for (const auto& r : rows) require_same_dimension(d, r.dimension());
  Dataset data;
  data.d_ = d;
  data.rows_ = std::move(rows);
  return data;
}

}  // namespace walshprod
