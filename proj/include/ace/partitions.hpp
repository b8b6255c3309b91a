#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ace/common.hpp"

namespace ace::partitions {

/// Hard cap on the partition order. Bell(20) still fits comfortably in 64 bits
/// and no statistically meaningful estimator order gets anywhere near it.
inline constexpr int kMaxOrder = 20;

/// One block-size multiset of a set partition of [m], together with the exact
/// number of set partitions of [m] realizing it.
struct BlockSizeProfile {
  std::vector<int> sizes;        // descending, sums to m
  std::uint64_t multiplicity;    // m! / ( prod_j (j!)^{c_j} * c_j! )

  int block_count() const { return static_cast<int>(sizes.size()); }
};

/// All block-size profiles of set partitions of [m], in descending
/// lexicographic order of the (descending) size vectors. m = 0 yields the
/// single empty profile with multiplicity 1.
std::vector<BlockSizeProfile> block_size_profiles(int m);

/// Bell number B(m), computed by the Bell triangle in exact integer arithmetic.
std::uint64_t bell_number(int m);

enum class SignMode {
  Unsigned,            // every partition counts positively
  AlternatingBlocks,   // weight (-1)^{#blocks}
};

/// Sum over all set partitions pi of [m] of
///   [sign] * prod_{B in pi} weight(|B|),
/// evaluated profile-by-profile with exact multiplicities (never enumerating
/// individual partitions). weights[j-1] is weight(j) and must cover 1..m.
/// m = 0 returns 1 (empty product over the empty partition).
double partition_weighted_sum(int m, std::span<const double> weights, SignMode sign);

}  // namespace ace::partitions
