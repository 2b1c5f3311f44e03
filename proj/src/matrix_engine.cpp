#include "walshprod/matrix_engine.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "walshprod/errors.hpp"
#include "walshprod/rng.hpp"

namespace walshprod {

ProductSpec::ProductSpec(std::int64_t n, std::vector<WeightedFamily> chain)
    : n_(n), chain_(std::move(chain)) {
  if (n_ < 1) throw std::invalid_argument("sample count n must be positive");
  if (chain_.size() < 2) {
    throw std::invalid_argument("a chain needs at least two positions (m >= 1)");
  }
  std::vector<SetFamily> families;
  families.reserve(chain_.size());
  for (const auto& wf : chain_) families.push_back(wf.family());
  pattern_ = validate_chain(families);
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (value >> (8 * byte)) & 0xFF;
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t ProductSpec::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(n_));
  fnv_mix(h, static_cast<std::uint64_t>(dimension()));
  for (const auto& wf : chain_) {
    fnv_mix(h, wf.size());
    for (std::size_t i = 0; i < wf.size(); ++i) {
      const SubsetMask& s = wf.family()[i];
      for (int w = 0; w < s.used_words(); ++w) fnv_mix(h, s.word(w));
      fnv_mix(h, std::bit_cast<std::uint64_t>(wf.weight(i)));
    }
  }
  return h;
}

std::string to_string(Method m) { return m == Method::Exact ? "exact" : "mc"; }

Eigen::MatrixXd build_X(const SetFamily& family, const Dataset& data) {
  if (family.dimension() != data.dimension()) {
    throw DimensionMismatch("family dimension " + std::to_string(family.dimension()) +
                            " vs dataset dimension " + std::to_string(data.dimension()));
  }
  Eigen::MatrixXd x(data.n(), static_cast<Eigen::Index>(family.size()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const SubsetMask& s = family[static_cast<std::size_t>(c)];
    for (int i = 0; i < data.n(); ++i) x(i, c) = monomial_eval(s, data.row(i));
  }
  return x;
}

Eigen::MatrixXd build_A(const WeightedFamily& wf, const Dataset& data) {
  Eigen::MatrixXd a = build_X(wf.family(), data);
  for (Eigen::Index c = 0; c < a.cols(); ++c) a.col(c) *= wf.weight(static_cast<std::size_t>(c));
  return a;
}

Association preferred_association(const ProductSpec& spec) {
  const double n = static_cast<double>(spec.n());
  const auto size = [&](int j) { return static_cast<double>(spec.at(static_cast<std::size_t>(j)).size()); };
  const int m = spec.m();
  double gram = 0.0;
  double feature = 0.0;
  for (int j = 1; j < m; ++j) {
    gram += n * n * size(j) + size(0) * n * n;
  }
  gram += size(0) * n * size(m);
  for (int j = 0; j < m; ++j) {
    feature += n * size(j) * size(j + 1);
    if (j > 0) feature += size(0) * size(j) * size(j + 1);
  }
  return feature <= gram ? Association::Feature : Association::Gram;
}

Eigen::MatrixXd realize_M(const ProductSpec& spec, const Dataset& data, Association order) {
  if (data.n() != spec.n()) {
    throw DimensionMismatch("dataset has " + std::to_string(data.n()) + " rows, spec expects n = " +
                            std::to_string(spec.n()));
  }
  const int m = spec.m();
  std::vector<Eigen::MatrixXd> a;
  a.reserve(static_cast<std::size_t>(m + 1));
  for (const auto& wf : spec.chain()) a.push_back(build_A(wf, data));

  if (order == Association::Gram) {
    Eigen::MatrixXd r = a[0].transpose();
    for (int j = 1; j < m; ++j) {
      const Eigen::MatrixXd gram = a[j] * a[j].transpose();
      r = r * gram;
    }
    return r * a[m];
  }
  Eigen::MatrixXd p = a[0].transpose() * a[1];
  for (int j = 1; j < m; ++j) p = p * (a[j].transpose() * a[j + 1]);
  return p;
}

Eigen::MatrixXd realize_M(const ProductSpec& spec, const Dataset& data) {
  return realize_M(spec, data, preferred_association(spec));
}

namespace {

// Elementwise Kahan accumulator over equally shaped matrices.
class MatrixAccumulator {
 public:
  MatrixAccumulator(Eigen::Index rows, Eigen::Index cols, bool compensated)
      : sum_(Eigen::MatrixXd::Zero(rows, cols)),
        comp_(Eigen::MatrixXd::Zero(rows, cols)),
        compensated_(compensated) {}

  void add(const Eigen::MatrixXd& x) {
    if (!compensated_) {
      sum_ += x;
      return;
    }
    const Eigen::MatrixXd y = x - comp_;
    const Eigen::MatrixXd t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  const Eigen::MatrixXd& sum() const { return sum_; }

 private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd comp_;
  bool compensated_;
};

}  // namespace

MCEstimate mc_expected_M(const ProductSpec& spec, int trials, std::uint64_t master_seed,
                         int threads) {
  if (trials < 2) throw std::invalid_argument("mc_expected_M needs at least 2 trials");
  threads = std::max(1, threads);
  const int n = static_cast<int>(spec.n());
  const int d = spec.dimension();
  const Association order = preferred_association(spec);
  const Eigen::Index rows = static_cast<Eigen::Index>(spec.at(0).size());
  const Eigen::Index cols = static_cast<Eigen::Index>(spec.chain().back().size());

  const bool compensated =
      static_cast<double>(spec.n()) * static_cast<double>(trials) > kCompensatedSumThreshold;
  // Shifted sums (relative to the first trial) keep the variance well conditioned.
  MatrixAccumulator shifted(rows, cols, compensated);
  MatrixAccumulator shifted_sq(rows, cols, compensated);
  Eigen::MatrixXd shift;

  // Trials are realized in fixed-size rounds and folded in trial order, so the
  // reduction is the same for any thread count.
  constexpr int kRound = 256;
  std::vector<Eigen::MatrixXd> slots(static_cast<std::size_t>(std::min(trials, kRound)));
  for (int begin = 0; begin < trials; begin += kRound) {
    const int count = std::min(kRound, trials - begin);
    auto work = [&](int worker) {
      for (int k = worker; k < count; k += threads) {
        const std::uint64_t seed = derive_trial_seed(master_seed, static_cast<std::uint64_t>(begin + k));
        slots[static_cast<std::size_t>(k)] = realize_M(spec, Dataset::sample(n, d, seed), order);
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (int k = 0; k < count; ++k) {
      const Eigen::MatrixXd& x = slots[static_cast<std::size_t>(k)];
      if (begin == 0 && k == 0) shift = x;
      const Eigen::MatrixXd delta = x - shift;
      shifted.add(delta);
      shifted_sq.add(delta.cwiseProduct(delta));
    }
  }

  const double t = trials;
  MCEstimate est;
  est.trials = trials;
  est.master_seed = master_seed;
  est.mean.values = shift + shifted.sum() / t;
  est.mean.method = Method::MonteCarlo;
  est.mean.spec_hash = spec.hash();
  est.mean.master_seed = master_seed;
  est.mean.trials = trials;
  const Eigen::MatrixXd var =
      ((shifted_sq.sum() - shifted.sum().cwiseProduct(shifted.sum()) / t) / (t - 1.0))
          .cwiseMax(0.0);
  est.std_error = (var / t).cwiseSqrt();
  return est;
}

}  // namespace walshprod
