#include "ace/partitions.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "doctest.h"

using namespace ace;
using namespace ace::partitions;

namespace {

// Brute-force enumeration of set partitions of [m] via restricted growth
// strings, grouped by block-size multiset. Independent of the library's
// profile construction.
std::map<std::vector<int>, std::uint64_t> enumerate_profiles(int m) {
  std::map<std::vector<int>, std::uint64_t> counts;
  if (m == 0) {
    counts[{}] = 1;
    return counts;
  }
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  for (;;) {
    std::vector<int> block_sizes(static_cast<std::size_t>(m), 0);
    int max_label = 0;
    for (int label : rgs) {
      ++block_sizes[static_cast<std::size_t>(label)];
      max_label = std::max(max_label, label);
    }
    std::vector<int> sizes(block_sizes.begin(), block_sizes.begin() + max_label + 1);
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    ++counts[sizes];

    // Advance the restricted growth string: rgs[i] <= 1 + max(rgs[0..i-1]).
    int i = m - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[static_cast<std::size_t>(j)]);
      if (rgs[static_cast<std::size_t>(i)] < prefix_max + 1) break;
    }
    if (i == 0) return counts;
    ++rgs[static_cast<std::size_t>(i)];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }
}

}  // namespace

TEST_CASE("block size profiles match brute-force enumeration up to m = 8") {
  for (int m = 0; m <= 8; ++m) {
    const auto profiles = block_size_profiles(m);
    const auto expected = enumerate_profiles(m);
    REQUIRE(profiles.size() == expected.size());
    for (const auto& profile : profiles) {
      auto it = expected.find(profile.sizes);
      REQUIRE(it != expected.end());
      CHECK(profile.multiplicity == it->second);
    }
  }
}

TEST_CASE("profiles of [3]") {
  const auto profiles = block_size_profiles(3);
  REQUIRE(profiles.size() == 3);
  CHECK(profiles[0].sizes == std::vector<int>{3});
  CHECK(profiles[0].multiplicity == 1);
  CHECK(profiles[1].sizes == std::vector<int>{2, 1});
  CHECK(profiles[1].multiplicity == 3);
  CHECK(profiles[2].sizes == std::vector<int>{1, 1, 1});
  CHECK(profiles[2].multiplicity == 1);
}

TEST_CASE("profiles are ordered descending-lexicographically") {
  for (int m : {4, 6, 9}) {
    const auto profiles = block_size_profiles(m);
    for (std::size_t i = 1; i < profiles.size(); ++i) {
      CHECK(std::lexicographical_compare(profiles[i].sizes.begin(), profiles[i].sizes.end(),
                                         profiles[i - 1].sizes.begin(),
                                         profiles[i - 1].sizes.end()));
    }
  }
}

TEST_CASE("edge orders") {
  const auto empty = block_size_profiles(0);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].sizes.empty());
  CHECK(empty[0].multiplicity == 1);

  std::uint64_t total = 0;
  for (const auto& p : block_size_profiles(4)) total += p.multiplicity;
  CHECK(total == 15);

  CHECK_THROWS_AS(block_size_profiles(21), CapacityError);
  CHECK_THROWS_AS(block_size_profiles(-1), std::invalid_argument);
}

TEST_CASE("bell numbers") {
  CHECK(bell_number(0) == 1);
  CHECK(bell_number(3) == 5);
  CHECK(bell_number(5) == 52);
  CHECK_THROWS_AS(bell_number(21), CapacityError);

  for (int m = 0; m <= 12; ++m) {
    std::uint64_t total = 0;
    for (const auto& p : block_size_profiles(m)) total += p.multiplicity;
    CHECK(total == bell_number(m));
  }
  // Independent count for m = 5 through enumeration.
  std::uint64_t enumerated = 0;
  for (const auto& [sizes, count] : enumerate_profiles(5)) enumerated += count;
  CHECK(enumerated == 52);
}

TEST_CASE("partition weighted sums") {
  SUBCASE("m = 2 signed expands to k1^2 - k2") {
    const double k1 = 0.7;
    const double k2 = -1.3;
    const std::vector<double> w{k1, k2};
    CHECK(partition_weighted_sum(2, w, SignMode::AlternatingBlocks) ==
          doctest::Approx(k1 * k1 - k2).epsilon(1e-14));
  }
  SUBCASE("m = 1 unsigned is the weight itself") {
    const std::vector<double> w{3.25};
    CHECK(partition_weighted_sum(1, w, SignMode::Unsigned) == 3.25);
  }
  SUBCASE("unit weights reduce to Bell numbers") {
    for (int m = 0; m <= 12; ++m) {
      const std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
      CHECK(partition_weighted_sum(m, ones, SignMode::Unsigned) ==
            doctest::Approx(static_cast<double>(bell_number(m))).epsilon(1e-14));
    }
  }
  SUBCASE("m = 0 is the empty product") {
    CHECK(partition_weighted_sum(0, {}, SignMode::Unsigned) == 1.0);
    CHECK(partition_weighted_sum(0, {}, SignMode::AlternatingBlocks) == 1.0);
  }
  SUBCASE("missing weights are rejected") {
    const std::vector<double> w{1.0, 2.0};
    CHECK_THROWS_AS(partition_weighted_sum(3, w, SignMode::Unsigned), std::invalid_argument);
  }
}
