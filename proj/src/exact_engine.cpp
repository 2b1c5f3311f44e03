#include "walshprod/exact_engine.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "walshprod/errors.hpp"

namespace walshprod {

// ---------------------------------------------------------------- partitions

SetPartition::SetPartition(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("partition of an empty ground set");
  int next = 0;
  for (int label : labels_) {
    if (label < 0 || label > next) {
      throw std::invalid_argument("labels are not a restricted growth string");
    }
    if (label == next) ++next;
  }
  blocks_ = next;
}

SetPartition SetPartition::from_blocks(int k, const std::vector<std::vector<int>>& blocks) {
  std::vector<int> owner(static_cast<std::size_t>(k), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw std::invalid_argument("partition blocks must be nonempty");
    for (int r : blocks[b]) {
      if (r < 0 || r >= k || owner[static_cast<std::size_t>(r)] != -1) {
        throw std::invalid_argument("blocks must be disjoint subsets of the ground set");
      }
      owner[static_cast<std::size_t>(r)] = static_cast<int>(b);
    }
  }
  std::vector<int> relabel(blocks.size(), -1);
  std::vector<int> labels(static_cast<std::size_t>(k));
  int next = 0;
  for (int r = 0; r < k; ++r) {
    const int b = owner[static_cast<std::size_t>(r)];
    if (b < 0) throw std::invalid_argument("blocks do not cover the ground set");
    if (relabel[static_cast<std::size_t>(b)] < 0) relabel[static_cast<std::size_t>(b)] = next++;
    labels[static_cast<std::size_t>(r)] = relabel[static_cast<std::size_t>(b)];
  }
  return SetPartition(std::move(labels));
}

SetPartition SetPartition::discrete(int k) {
  std::vector<int> labels(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) labels[static_cast<std::size_t>(r)] = r;
  return SetPartition(std::move(labels));
}

std::vector<std::uint32_t> SetPartition::block_masks() const {
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(blocks_), 0);
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    masks[static_cast<std::size_t>(labels_[r])] |= std::uint32_t{1} << r;
  }
  return masks;
}

std::string SetPartition::to_string() const {
  std::ostringstream os;
  os << '{';
  const auto masks = block_masks();
  for (std::size_t b = 0; b < masks.size(); ++b) {
    if (b > 0) os << ',';
    os << '{';
    bool first = true;
    for (std::size_t r = 0; r < labels_.size(); ++r) {
      if (!((masks[b] >> r) & 1U)) continue;
      if (!first) os << ',';
      os << r;
      first = false;
    }
    os << '}';
  }
  os << '}';
  return os.str();
}

SetPartitions::SetPartitions(int k) : k_(k) {
  if (k < 1 || k > kMaxPartitionSize) {
    throw std::invalid_argument("set_partitions: k = " + std::to_string(k) + " outside [1, " +
                                std::to_string(kMaxPartitionSize) + "]");
  }
}

SetPartitions::iterator::iterator(int k)
    : labels_(static_cast<std::size_t>(k), 0),
      prefix_max_(static_cast<std::size_t>(k), 0),
      current_(labels_),
      done_(false) {}

SetPartitions::iterator& SetPartitions::iterator::operator++() {
  // prefix_max_[i] = max(labels_[0..i-1]); position i may grow up to prefix_max_[i] + 1.
  const int k = static_cast<int>(labels_.size());
  int i = k - 1;
  while (i > 0 && labels_[static_cast<std::size_t>(i)] > prefix_max_[static_cast<std::size_t>(i)]) --i;
  if (i <= 0) {
    done_ = true;
    return *this;
  }
  ++labels_[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) {
    labels_[static_cast<std::size_t>(j)] = 0;
    prefix_max_[static_cast<std::size_t>(j)] =
        std::max(prefix_max_[static_cast<std::size_t>(j - 1)], labels_[static_cast<std::size_t>(j - 1)]);
  }
  current_ = SetPartition(labels_);
  return *this;
}

SetPartitions set_partitions(int k) { return SetPartitions(k); }

std::uint64_t bell_number(int k) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= k; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

// ---------------------------------------------------------------- expansion

namespace {

struct SampleTerm {
  std::vector<std::uint32_t> blocks;
  Count index_tuples;  // falling_factorial(n, #blocks)
};

std::vector<SampleTerm> sample_terms(int m, std::int64_t n) {
  std::vector<SampleTerm> terms;
  for (const auto& pi : set_partitions(m)) {
    terms.push_back({pi.block_masks(), falling_factorial(n, pi.block_count())});
  }
  return terms;
}

// Parity-rule evaluation of all partition terms for one feature tuple.
class TupleEvaluator {
 public:
  explicit TupleEvaluator(int m, int d)
      : acc_(std::size_t{1} << m, SubsetMask(d)),
        zero_(std::size_t{1} << m, 0) {}

  void load(std::span<const SubsetMask> diffs) {
    zero_[0] = 1;
    for (std::size_t s = 1; s < acc_.size(); ++s) {
      const int low = std::countr_zero(static_cast<unsigned>(s));
      acc_[s] = acc_[s & (s - 1)];
      acc_[s] ^= diffs[static_cast<std::size_t>(low)];
      zero_[s] = acc_[s].empty() ? 1 : 0;
    }
  }

  Count weight(const SampleTerm& term) const {
    if (term.index_tuples == 0) return 0;
    for (std::uint32_t block : term.blocks) {
      if (!zero_[block]) return 0;
    }
    return term.index_tuples;
  }

 private:
  std::vector<SubsetMask> acc_;
  std::vector<char> zero_;
};

void check_budget(const ProductSpec& spec, double budget) {
  const double work = exact_work_estimate(spec);
  if (work > budget) {
    std::ostringstream os;
    os << "exact enumeration needs ";
    for (std::size_t i = 0; i < spec.chain().size(); ++i) os << (i ? " x " : "") << spec.at(i).size();
    os << " x Bell(" << spec.m() << ") = " << work << " parity evaluations, budget is " << budget;
    throw BudgetExceeded(os.str(), work, budget);
  }
}

// Runs `row_fn(row)` for every row, striding rows across threads.
template <class RowFn>
void for_each_row(Eigen::Index rows, int threads, RowFn row_fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<Eigen::Index>(rows, 1))));
  if (threads == 1) {
    for (Eigen::Index r = 0; r < rows; ++r) row_fn(r);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (Eigen::Index r = w; r < rows; r += threads) row_fn(r);
    });
  }
}

// Calls visit(k, weight, diffs) for every feature tuple k with k[0] == row.
// weight is w1_{k1} * prod_{middle} (w_j)^2 * w_{m+1}.
template <class Visit>
void for_each_tuple(const ProductSpec& spec, std::size_t row, Visit visit) {
  const int m = spec.m();
  const auto& chain = spec.chain();
  for (const auto& wf : chain) {
    if (wf.size() == 0) return;
  }
  std::vector<std::size_t> k(static_cast<std::size_t>(m + 1), 0);
  k[0] = row;
  std::vector<SubsetMask> diffs(static_cast<std::size_t>(m), SubsetMask(spec.dimension()));
  while (true) {
    double weight = chain[0].weight(k[0]) * chain[static_cast<std::size_t>(m)].weight(k[static_cast<std::size_t>(m)]);
    for (int j = 1; j < m; ++j) {
      const double w = chain[static_cast<std::size_t>(j)].weight(k[static_cast<std::size_t>(j)]);
      weight *= w * w;
    }
    for (int j = 0; j < m; ++j) {
      diffs[static_cast<std::size_t>(j)] = chain[static_cast<std::size_t>(j)].family()[k[static_cast<std::size_t>(j)]] ^
                                           chain[static_cast<std::size_t>(j + 1)].family()[k[static_cast<std::size_t>(j + 1)]];
    }
    visit(std::span<const std::size_t>(k), weight, std::span<const SubsetMask>(diffs));

    // Odometer over positions 1..m, last position fastest.
    int pos = m;
    while (pos >= 1) {
      auto& idx = k[static_cast<std::size_t>(pos)];
      if (++idx < chain[static_cast<std::size_t>(pos)].size()) break;
      idx = 0;
      --pos;
    }
    if (pos < 1) return;
  }
}

ExpectationMatrix make_result(const ProductSpec& spec) {
  ExpectationMatrix result;
  result.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.at(0).size()),
                                        static_cast<Eigen::Index>(spec.chain().back().size()));
  result.method = Method::Exact;
  result.spec_hash = spec.hash();
  return result;
}

}  // namespace

double exact_work_estimate(const ProductSpec& spec) {
  double work = static_cast<double>(bell_number(spec.m()));
  for (const auto& wf : spec.chain()) work *= static_cast<double>(wf.size());
  return work;
}

ExpectationMatrix exact_expected_M(const ProductSpec& spec, const ExactOptions& options) {
  const int m = spec.m();
  if (m > kMaxPartitionSize) throw std::invalid_argument("chain too long for exact expansion");
  check_budget(spec, options.budget);
  const std::vector<SampleTerm> terms = sample_terms(m, spec.n());
  ExpectationMatrix result = make_result(spec);
  result.partition_count = terms.size();

  for_each_row(result.values.rows(), options.threads, [&](Eigen::Index row) {
    TupleEvaluator eval(m, spec.dimension());
    for_each_tuple(spec, static_cast<std::size_t>(row),
                   [&](std::span<const std::size_t> k, double weight, std::span<const SubsetMask> diffs) {
                     if (weight == 0.0) return;
                     eval.load(diffs);
                     Count total = 0;
                     for (const auto& term : terms) total += eval.weight(term);
                     if (total != 0) {
                       result.values(row, static_cast<Eigen::Index>(k[static_cast<std::size_t>(m)])) +=
                           weight * to_double(total);
                     }
                   });
  });
  return result;
}

namespace {

bool induces(std::span<const std::size_t> k, const EqualityPattern& pattern,
             const SetPartition& features) {
  // Feature positions r, t coincide iff they hold the same family and index.
  const auto& labels = features.labels();
  for (std::size_t t = 1; t < k.size(); ++t) {
    for (std::size_t r = 0; r < t; ++r) {
      const bool same = pattern.equal(r, t) && k[r] == k[t];
      if (same != (labels[r] == labels[t])) return false;
    }
  }
  return true;
}

void check_key(const ProductSpec& spec, const StratumKey& key) {
  const int m = spec.m();
  if (key.samples.ground_size() != m) {
    throw std::invalid_argument("sample partition must cover " + std::to_string(m) + " positions");
  }
  if (key.features.ground_size() != m + 1) {
    throw std::invalid_argument("feature partition must cover " + std::to_string(m + 1) +
                                " positions");
  }
  const auto& labels = key.features.labels();
  for (std::size_t t = 1; t < labels.size(); ++t) {
    for (std::size_t r = 0; r < t; ++r) {
      if (labels[r] == labels[t] && !spec.pattern().equal(r, t)) {
        throw std::invalid_argument("feature partition " + key.features.to_string() +
                                    " merges positions with different families");
      }
    }
  }
}

}  // namespace

ExpectationMatrix stratum_contribution(const ProductSpec& spec, const StratumKey& key,
                                       const ExactOptions& options) {
  const int m = spec.m();
  check_key(spec, key);
  check_budget(spec, options.budget);
  const SampleTerm term{key.samples.block_masks(),
                        falling_factorial(spec.n(), key.samples.block_count())};
  ExpectationMatrix result = make_result(spec);
  result.partition_count = 1;

  for_each_row(result.values.rows(), options.threads, [&](Eigen::Index row) {
    TupleEvaluator eval(m, spec.dimension());
    for_each_tuple(spec, static_cast<std::size_t>(row),
                   [&](std::span<const std::size_t> k, double weight, std::span<const SubsetMask> diffs) {
                     if (weight == 0.0 || !induces(k, spec.pattern(), key.features)) return;
                     eval.load(diffs);
                     const Count total = eval.weight(term);
                     if (total != 0) {
                       result.values(row, static_cast<Eigen::Index>(k[static_cast<std::size_t>(m)])) +=
                           weight * to_double(total);
                     }
                   });
  });
  return result;
}

std::vector<StratumKey> valid_strata(const ProductSpec& spec) {
  const int m = spec.m();
  std::vector<SetPartition> features;
  for (const auto& pi : set_partitions(m + 1)) {
    const auto& labels = pi.labels();
    bool ok = true;
    for (std::size_t t = 1; t < labels.size() && ok; ++t) {
      for (std::size_t r = 0; r < t; ++r) {
        if (labels[r] == labels[t] && !spec.pattern().equal(r, t)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) features.push_back(pi);
  }
  std::vector<StratumKey> keys;
  for (const auto& samples : set_partitions(m)) {
    for (const auto& f : features) keys.push_back({samples, f});
  }
  return keys;
}

// ---------------------------------------------------------- monomial sums

namespace {

// Enumerates prefixes (S_1..S_{q-1}); the last set is forced to
// prefix ^ target and looked up in the last family.
template <class Visit>
void for_each_nonzero_tuple(std::span<const SetFamily> families,
                            const std::optional<SubsetMask>& target, double budget, Visit visit) {
  if (families.empty()) throw std::invalid_argument("at least one family required");
  const int d = families.front().dimension();
  for (const auto& f : families) {
    if (f.dimension() != d) throw DimensionMismatch("families have different dimensions");
  }
  if (target && target->dimension() != d) throw DimensionMismatch("target dimension mismatch");
  for (const auto& f : families) {
    if (f.empty()) return;
  }

  const std::size_t q = families.size();
  double work = 1.0;
  for (std::size_t i = 0; i + 1 < q; ++i) work *= static_cast<double>(families[i].size());
  if (work > budget) {
    throw BudgetExceeded("monomial sum needs " + std::to_string(work) +
                             " prefix evaluations, budget is " + std::to_string(budget),
                         work, budget);
  }

  std::vector<std::size_t> k(q, 0);
  // prefix[i] = target ^ S_{k_0} ^ ... ^ S_{k_{i-1}}
  std::vector<SubsetMask> prefix(q, target.value_or(SubsetMask(d)));
  auto refresh = [&](std::size_t from) {
    for (std::size_t i = from; i + 1 < q; ++i) prefix[i + 1] = prefix[i] ^ families[i][k[i]];
  };
  refresh(0);
  while (true) {
    if (auto last = families[q - 1].index_of(prefix[q - 1])) {
      k[q - 1] = *last;
      visit(std::span<const std::size_t>(k));
    }
    if (q == 1) return;
    std::size_t pos = q - 2;
    while (true) {
      if (++k[pos] < families[pos].size()) break;
      k[pos] = 0;
      if (pos == 0) return;
      --pos;
    }
    refresh(pos);
  }
}

}  // namespace

double weighted_monomial_sum(std::span<const SetFamily> families, const MonomialSumTerms& terms) {
  const std::size_t q = families.size();
  if (q == 0) throw std::invalid_argument("at least one family required");
  if (terms.b.size() != families.back().size()) {
    throw std::invalid_argument("b must have one weight per member of the last family");
  }
  if (terms.a) {
    if (q < 2) throw std::invalid_argument("a requires at least two families");
    if (terms.a->size() != families[q - 2].size()) {
      throw std::invalid_argument("a must have one weight per member of the second-to-last family");
    }
  }
  double total = 0.0;
  for_each_nonzero_tuple(families, terms.target, terms.budget, [&](std::span<const std::size_t> k) {
    if (terms.constraint && !terms.constraint(k)) return;
    double term = terms.b[k[q - 1]];
    if (terms.a) term *= (*terms.a)[k[q - 2]];
    total += term;
  });
  return total;
}

Count count_nonzero_tuples(std::span<const SetFamily> families,
                           const std::optional<SubsetMask>& target, double budget) {
  Count total = 0;
  for_each_nonzero_tuple(families, target, budget, [&](std::span<const std::size_t>) { ++total; });
  return total;
}

}  // namespace walshprod
