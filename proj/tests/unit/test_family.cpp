#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "walshprod/count.hpp"
#include "walshprod/errors.hpp"
#include "walshprod/family.hpp"

using namespace walshprod;

namespace {

bool lex_less(const SubsetMask& a, const SubsetMask& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a.coordinates() < b.coordinates();
}

// Brute-force: all subsets of `pool` (by bitmask) whose size is in `sizes`.
std::set<std::vector<int>> subsets_by_mask(const std::vector<int>& pool, const std::set<int>& sizes) {
  std::set<std::vector<int>> out;
  for (std::uint32_t m = 0; m < (1U << pool.size()); ++m) {
    std::vector<int> s;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if ((m >> i) & 1U) s.push_back(pool[i]);
    }
    if (sizes.count(static_cast<int>(s.size()))) out.insert(s);
  }
  return out;
}

}  // namespace

TEST(AllSubsetsOfSize, Examples) {
  EXPECT_EQ(all_subsets_of_size(4, {1}).size(), 4u);
  EXPECT_EQ(all_subsets_of_size(4, {2}).size(), 6u);
  const SetFamily empty = all_subsets_of_size(3, {0});
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_TRUE(empty[0].empty());
  EXPECT_THROW(all_subsets_of_size(3, {4}), std::invalid_argument);
  EXPECT_THROW(all_subsets_of_size(3, {-1}), std::invalid_argument);
}

TEST(AllSubsetsOfSize, OrderCountAndDegree) {
  for (int d = 1; d <= 8; ++d) {
    for (int a = 0; a <= d; ++a) {
      for (int b = a; b <= d; b += 2) {
        const std::vector<int> sizes = a == b ? std::vector<int>{a} : std::vector<int>{a, b};
        const SetFamily f = all_subsets_of_size(d, sizes);
        Count expected = binomial(d, a) + (a == b ? 0 : binomial(d, b));
        ASSERT_EQ(static_cast<Count>(f.size()), expected);
        for (std::size_t i = 1; i < f.size(); ++i) ASSERT_TRUE(lex_less(f[i - 1], f[i]));
        EXPECT_EQ(f.degree_bound(), std::max(a, b));
        std::vector<int> pool(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) pool[static_cast<std::size_t>(i)] = i;
        std::set<std::vector<int>> got;
        for (const auto& s : f.members()) got.insert(s.coordinates());
        ASSERT_EQ(got, subsets_by_mask(pool, {sizes.begin(), sizes.end()}));
      }
    }
  }
}

TEST(AllSubsetsOfSize, WithinGround) {
  const SubsetMask ground(6, {3, 4, 5});
  const std::vector<int> sizes{2};
  const SetFamily f = all_subsets_of_size(6, sizes, ground);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], SubsetMask(6, {3, 4}));
  EXPECT_EQ(f[2], SubsetMask(6, {4, 5}));
}

TEST(SetFamily, Validation) {
  EXPECT_THROW(SetFamily(3, {SubsetMask(3, {0}), SubsetMask(3, {0})}), std::invalid_argument);
  EXPECT_THROW(SetFamily(3, {SubsetMask(4, {0})}), DimensionMismatch);
  EXPECT_THROW(SetFamily(3, {SubsetMask(3, {0, 1})}, 1), std::invalid_argument);
  const SetFamily f(3, {SubsetMask(3, {2}), SubsetMask(3, {0})}, 2);
  EXPECT_EQ(f.degree_bound(), 2);
  EXPECT_EQ(f.index_of(SubsetMask(3, {0})), std::optional<std::size_t>(1));
  EXPECT_FALSE(f.contains(SubsetMask(3, {1})));
  // Ordered equality.
  const SetFamily g(3, {SubsetMask(3, {0}), SubsetMask(3, {2})});
  EXPECT_FALSE(f == g);
}

TEST(WeightedFamily, Validation) {
  const SetFamily f = all_subsets_of_size(3, {1});
  EXPECT_THROW(WeightedFamily(f, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(WeightedFamily(f, {1.0, -1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(WeightedFamily(f, {1.0, NAN, 1.0}), std::invalid_argument);
  const WeightedFamily z(f, {0.0, 0.0, 0.0});
  EXPECT_EQ(z.max_weight(), 0.0);
  EXPECT_EQ(WeightedFamily::uniform(f, 0.25).max_weight(), 0.25);
}

TEST(BlockedFamily, TwoByTwo) {
  const BlockStructure bs(4, {SubsetMask(4, {0, 1}), SubsetMask(4, {2, 3})}, {1.0, 1.0});
  const std::vector<int> sizes{1, 1};
  EXPECT_EQ(blocked_family(bs, sizes).size(), 4u);
}

TEST(BlockedFamily, DegenerateSingleBlock) {
  for (int d = 1; d <= 7; ++d) {
    SubsetMask all(d);
    for (int i = 0; i < d; ++i) all.insert(i);
    const BlockStructure bs(d, {all}, {1.0});
    for (int k = 0; k <= d; ++k) {
      const std::vector<int> sizes{k};
      const SetFamily blocked = blocked_family(bs, sizes);
      const SetFamily plain = all_subsets_of_size(d, sizes);
      EXPECT_EQ(blocked, plain);
      EXPECT_DOUBLE_EQ(blocked.effective_degree(), k);
    }
  }
}

TEST(BlockedFamily, MixedSizes) {
  const BlockStructure bs(5, {SubsetMask(5, {0, 1}), SubsetMask(5, {2, 3, 4})}, {0.5, 1.0});
  const std::vector<int> sizes{1, 2};
  const SetFamily f = blocked_family(bs, sizes);
  ASSERT_EQ(f.size(), 6u);
  for (const auto& s : f.members()) {
    EXPECT_EQ(s.degree(), 3);
    EXPECT_EQ(s.overlap(SubsetMask(5, {0, 1})), 1);
  }
  EXPECT_EQ(f.degree_bound(), 3);
  EXPECT_DOUBLE_EQ(f.effective_degree(), 0.5 + 2.0);
  const std::vector<int> too_big{3, 1};
  EXPECT_THROW(blocked_family(bs, too_big), std::invalid_argument);
}

TEST(BlockedFamily, CountMatchesProductOfBinomials) {
  for (int d = 3; d <= 12; ++d) {
    const BlockStructure bs = BlockStructure::from_exponents(d, {1.0, 0.5});
    const int t0 = bs.blocks()[0].degree();
    const int t1 = bs.blocks()[1].degree();
    for (int a = 0; a <= std::min(t0, 2); ++a) {
      for (int b = 0; b <= std::min(t1, 2); ++b) {
        const std::vector<int> sizes{a, b};
        const SetFamily f = blocked_family(bs, sizes);
        ASSERT_EQ(static_cast<Count>(f.size()), binomial(t0, a) * binomial(t1, b));
        // direct enumeration: every subset with the right per-block counts
        std::size_t direct = 0;
        for (std::uint32_t m = 0; m < (1U << d); ++m) {
          SubsetMask s(d);
          for (int i = 0; i < d; ++i) {
            if ((m >> i) & 1U) s.insert(i);
          }
          if (s.overlap(bs.blocks()[0]) == a && s.overlap(bs.blocks()[1]) == b && s.degree() == a + b) {
            ++direct;
            ASSERT_TRUE(f.contains(s));
          }
        }
        ASSERT_EQ(direct, f.size());
      }
    }
  }
}

TEST(BlockStructure, FromExponents) {
  const BlockStructure bs = BlockStructure::from_exponents(16, {1.0, 0.5});
  EXPECT_EQ(bs.blocks()[1].degree(), 4);
  EXPECT_EQ(bs.blocks()[0].degree(), 12);
  EXPECT_EQ(bs.blocks()[0].overlap(bs.blocks()[1]), 0);
  const BlockStructure small = BlockStructure::from_exponents(2, {1.0, 1.0});
  EXPECT_EQ(small.blocks()[0].degree(), 1);
  EXPECT_EQ(small.blocks()[1].degree(), 1);
  EXPECT_THROW(BlockStructure::from_exponents(4, {1.5}), std::invalid_argument);
  EXPECT_THROW(BlockStructure::from_exponents(1, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(BlockStructure(4, {SubsetMask(4, {0, 1}), SubsetMask(4, {1, 2})}, {1.0, 1.0}),
               std::invalid_argument);
}

TEST(ValidateChain, Examples) {
  const SetFamily singles = all_subsets_of_size(4, {1});
  const SetFamily pairs = all_subsets_of_size(4, {2});
  std::vector<SetFamily> a{singles, pairs, singles};
  EXPECT_EQ(validate_chain(a).to_string(), "{1=3}");
  std::vector<SetFamily> b{singles, singles};
  EXPECT_EQ(validate_chain(b).to_string(), "{1=2}");
  std::vector<SetFamily> c{SetFamily(4, {SubsetMask(4, {0}), SubsetMask(4, {1})}),
                           SetFamily(4, {SubsetMask(4, {1}), SubsetMask(4, {2})})};
  try {
    validate_chain(c);
    FAIL() << "expected a violation";
  } catch (const TrivialIntersectionViolation& e) {
    EXPECT_EQ(e.first(), 0u);
    EXPECT_EQ(e.second(), 1u);
    EXPECT_EQ(e.shared_member(), SubsetMask(4, {1}));
  }
  std::vector<SetFamily> mixed{singles, all_subsets_of_size(5, {1})};
  EXPECT_THROW(validate_chain(mixed), DimensionMismatch);
}

TEST(ValidateChain, PermutedCopyIsRejected) {
  const SetFamily f(3, {SubsetMask(3, {0}), SubsetMask(3, {1})});
  const SetFamily g(3, {SubsetMask(3, {1}), SubsetMask(3, {0})});
  std::vector<SetFamily> chain{f, g};
  EXPECT_THROW(validate_chain(chain), TrivialIntersectionViolation);
}

// Accepts iff every pair is disjoint or identical; checked over all chains of
// three families drawn from small subfamilies of the cube on d = 3.
TEST(ValidateChain, AcceptanceCharacterization) {
  const int d = 3;
  std::vector<SetFamily> pool;
  for (std::uint32_t m = 1; m < (1U << 8); m += 3) {
    std::vector<SubsetMask> members;
    for (std::uint32_t s = 0; s < 8; ++s) {
      if ((m >> s) & 1U) {
        SubsetMask x(d);
        for (int i = 0; i < d; ++i) {
          if ((s >> i) & 1U) x.insert(i);
        }
        members.push_back(x);
      }
    }
    pool.emplace_back(d, members);
  }
  for (std::size_t i = 0; i < pool.size(); i += 5) {
    for (std::size_t j = 0; j < pool.size(); j += 3) {
      std::vector<SetFamily> chain{pool[i], pool[j], pool[i]};
      bool expected = pool[i] == pool[j];
      if (!expected) {
        expected = true;
        for (const auto& s : pool[i].members()) expected = expected && !pool[j].contains(s);
      }
      bool accepted = true;
      try {
        const EqualityPattern p = validate_chain(chain);
        EXPECT_TRUE(p.equal(0, 2));
        EXPECT_EQ(p.equal(0, 1), pool[i] == pool[j]);
      } catch (const TrivialIntersectionViolation&) {
        accepted = false;
      }
      ASSERT_EQ(accepted, expected);
    }
  }
}

TEST(SmallWeight, Formula) {
  EXPECT_DOUBLE_EQ(small_weight(64, 4, 2.0), 0.125);
  EXPECT_DOUBLE_EQ(small_weight(4, 16, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(small_weight(64, 4, 2.0, 3.0), 0.375);
}
