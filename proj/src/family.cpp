#include "walshprod/family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "walshprod/errors.hpp"

namespace walshprod {

SetFamily::SetFamily(int d, std::vector<SubsetMask> members, std::optional<int> degree_bound)
    : d_(d), members_(std::move(members)) {
  int max_degree = 0;
  index_.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const SubsetMask& s = members_[i];
    if (s.dimension() != d) {
      throw DimensionMismatch("family member " + s.to_string() + " has dimension " +
                              std::to_string(s.dimension()) + ", family has " +
                              std::to_string(d));
    }
    if (!index_.emplace(s, i).second) {
      throw std::invalid_argument("duplicate family member " + s.to_string());
    }
    max_degree = std::max(max_degree, s.degree());
  }
  degree_bound_ = degree_bound.value_or(max_degree);
  if (degree_bound_ < max_degree) {
    throw std::invalid_argument("member degree " + std::to_string(max_degree) +
                                " exceeds degree bound " + std::to_string(degree_bound_));
  }
}

SetFamily SetFamily::with_effective_degree(double degree) const {
  SetFamily copy = *this;
  copy.effective_degree_ = degree;
  return copy;
}

std::optional<std::size_t> SetFamily::index_of(const SubsetMask& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightedFamily::WeightedFamily(SetFamily family, std::vector<double> weights)
    : family_(std::move(family)), weights_(std::move(weights)) {
  if (weights_.size() != family_.size()) {
    throw std::invalid_argument("weight vector has length " + std::to_string(weights_.size()) +
                                ", family has " + std::to_string(family_.size()) + " members");
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
}

WeightedFamily WeightedFamily::uniform(SetFamily family, double weight) {
  std::vector<double> w(family.size(), weight);
  return WeightedFamily(std::move(family), std::move(w));
}

double WeightedFamily::max_weight() const {
  double m = 0.0;
  for (double w : weights_) m = std::max(m, w);
  return m;
}

namespace {

// Lexicographic k-combinations of `pool`.
void append_combinations(int d, const std::vector<int>& pool, int k,
                         std::vector<SubsetMask>& out) {
  const int n = static_cast<int>(pool.size());
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    SubsetMask s(d);
    for (int i : idx) s.insert(pool[static_cast<std::size_t>(i)]);
    out.push_back(s);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

SetFamily all_subsets_of_size(int d, std::span<const int> sizes, const SubsetMask& ground) {
  if (ground.dimension() != d) throw DimensionMismatch("ground set dimension mismatch");
  const std::vector<int> pool = ground.coordinates();
  std::vector<int> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<SubsetMask> members;
  for (int k : sorted) {
    if (k < 0 || k > static_cast<int>(pool.size())) {
      throw std::invalid_argument("subset size " + std::to_string(k) + " outside [0, " +
                                  std::to_string(pool.size()) + "]");
    }
    append_combinations(d, pool, k, members);
  }
  return SetFamily(d, std::move(members));
}

SetFamily all_subsets_of_size(int d, std::span<const int> sizes) {
  SubsetMask all(d);
  for (int i = 0; i < d; ++i) all.insert(i);
  return all_subsets_of_size(d, sizes, all);
}

SetFamily all_subsets_of_size(int d, std::initializer_list<int> sizes) {
  return all_subsets_of_size(d, std::span<const int>(sizes.begin(), sizes.size()));
}

BlockStructure::BlockStructure(int d, std::vector<SubsetMask> blocks,
                               std::vector<double> exponents)
    : d_(d), blocks_(std::move(blocks)), exponents_(std::move(exponents)) {
  if (blocks_.size() != exponents_.size()) {
    throw std::invalid_argument("one exponent per block required");
  }
  SubsetMask seen(d);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].dimension() != d) throw DimensionMismatch("block dimension mismatch");
    if (!(exponents_[k] >= 0.0 && exponents_[k] <= 1.0)) {
      throw std::invalid_argument("block exponents must lie in [0, 1]");
    }
    if (seen.overlap(blocks_[k]) != 0) throw std::invalid_argument("blocks must be disjoint");
    seen ^= blocks_[k];
  }
}

BlockStructure BlockStructure::from_exponents(int d, std::vector<double> exponents) {
  const std::size_t l = exponents.size();
  if (l == 0) throw std::invalid_argument("at least one block required");
  if (static_cast<std::size_t>(d) < l) {
    throw std::invalid_argument("dimension too small for " + std::to_string(l) + " blocks");
  }
  for (double s : exponents) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("block exponents must lie in [0, 1]");
  }
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return exponents[a] < exponents[b]; });

  std::vector<int> sizes(l);
  int remaining = d;
  for (std::size_t pos = 0; pos < l; ++pos) {
    const std::size_t k = order[pos];
    const int still_needed = static_cast<int>(l - pos - 1);
    const int target = static_cast<int>(std::lround(std::pow(static_cast<double>(d), exponents[k])));
    sizes[k] = std::clamp(target, 1, remaining - still_needed);
    remaining -= sizes[k];
  }

  std::vector<SubsetMask> blocks;
  int next = 0;
  for (std::size_t k = 0; k < l; ++k) {
    SubsetMask b(d);
    for (int i = 0; i < sizes[k]; ++i) b.insert(next++);
    blocks.push_back(b);
  }
  return BlockStructure(d, std::move(blocks), std::move(exponents));
}

SetFamily blocked_family(const BlockStructure& structure, std::span<const int> per_block_sizes) {
  const int d = structure.dimension();
  const std::size_t l = structure.block_count();
  if (per_block_sizes.size() != l) throw std::invalid_argument("one size per block required");

  std::vector<std::vector<SubsetMask>> parts(l);
  int naive_degree = 0;
  double effective = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    const SubsetMask& block = structure.blocks()[k];
    const int size = per_block_sizes[k];
    if (size < 0 || size > block.degree()) {
      throw std::invalid_argument("block " + std::to_string(k) + " has " +
                                  std::to_string(block.degree()) + " coordinates, cannot pick " +
                                  std::to_string(size));
    }
    append_combinations(d, block.coordinates(), size, parts[k]);
    naive_degree += size;
    effective += structure.exponents()[k] * size;
  }

  std::vector<SubsetMask> members{SubsetMask(d)};
  for (const auto& choices : parts) {
    std::vector<SubsetMask> next;
    next.reserve(members.size() * choices.size());
    for (const auto& prefix : members) {
      for (const auto& c : choices) next.push_back(prefix ^ c);
    }
    members = std::move(next);
  }
  return SetFamily(d, std::move(members), naive_degree).with_effective_degree(effective);
}

std::string EqualityPattern::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t j = 0; j < class_of_.size(); ++j) {
    const auto root = static_cast<std::size_t>(class_of_[j]);
    if (root == j) continue;
    if (!first) os << ',';
    os << root + 1 << '=' << j + 1;
    first = false;
  }
  os << '}';
  return os.str();
}

TrivialIntersectionViolation::TrivialIntersectionViolation(std::size_t first, std::size_t second,
                                                           SubsetMask shared)
    : std::invalid_argument("families " + std::to_string(first + 1) + " and " +
                            std::to_string(second + 1) + " share member " + shared.to_string() +
                            " but are not identical"),
      first_(first),
      second_(second),
      shared_(shared) {}

EqualityPattern validate_chain(std::span<const SetFamily> families) {
  std::vector<int> class_of(families.size());
  for (std::size_t j = 0; j < families.size(); ++j) {
    class_of[j] = static_cast<int>(j);
    if (families[j].dimension() != families.front().dimension()) {
      throw DimensionMismatch("chain families have different dimensions");
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (families[i] == families[j]) {
        class_of[j] = class_of[i];
        break;
      }
      const SetFamily& small = families[i].size() <= families[j].size() ? families[i] : families[j];
      const SetFamily& large = &small == &families[i] ? families[j] : families[i];
      for (const auto& s : small.members()) {
        if (large.contains(s)) throw TrivialIntersectionViolation(i, j, s);
      }
    }
  }
  return EqualityPattern(std::move(class_of));
}

double small_weight(long long n, int d, double degree, double c) {
  const double by_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double by_d = std::pow(static_cast<double>(d), -degree / 2.0);
  return c * std::min(by_n, by_d);
}

}  // namespace walshprod
