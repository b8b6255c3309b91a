#include "ace/partitions.hpp"

#include <stdexcept>

namespace ace::partitions {

namespace {

void check_order(int m) {
  if (m < 0) throw std::invalid_argument("partitions: order must be non-negative");
  if (m > kMaxOrder) throw CapacityError("partitions: order exceeds the cap of 20");
}

// m! / ( prod_j (j!)^{c_j} * c_j! ) for a descending size vector. Each division
// below is exact: dividing m! by the block-size factorials one at a time walks
// through products of binomial coefficients, and the c_j! divisions then remove
// the orderings of equal-sized blocks.
std::uint64_t profile_multiplicity(int m, const std::vector<int>& sizes) {
  unsigned __int128 mult = factorial(m);
  int run_size = 0;
  int run_count = 0;
  auto close_run = [&]() {
    if (run_count > 0) mult /= factorial(run_count);
  };
  for (int s : sizes) {
    mult /= factorial(s);
    if (s == run_size) {
      ++run_count;
    } else {
      close_run();
      run_size = s;
      run_count = 1;
    }
  }
  close_run();
  return static_cast<std::uint64_t>(mult);
}

void emit_profiles(int remaining, int max_part, std::vector<int>& current, int m,
                   std::vector<BlockSizeProfile>& out) {
  if (remaining == 0) {
    out.push_back({current, profile_multiplicity(m, current)});
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    emit_profiles(remaining - part, part, current, m, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<BlockSizeProfile> block_size_profiles(int m) {
  check_order(m);
  std::vector<BlockSizeProfile> out;
  std::vector<int> current;
  emit_profiles(m, m, current, m, out);
  return out;
}

std::uint64_t bell_number(int m) {
  check_order(m);
  // Bell triangle: row r starts with the last entry of row r-1.
  std::vector<std::uint64_t> row{1};
  for (int r = 1; r <= m; ++r) {
    std::vector<std::uint64_t> next(r + 1);
    next[0] = row.back();
    for (int i = 1; i <= r; ++i) next[i] = next[i - 1] + row[i - 1];
    row = std::move(next);
  }
  return row[0];
}

double partition_weighted_sum(int m, std::span<const double> weights, SignMode sign) {
  check_order(m);
  if (static_cast<int>(weights.size()) < m) {
    throw std::invalid_argument("partition_weighted_sum: weights must cover orders 1.." +
                                std::to_string(m));
  }
  KahanSum total;
  for (const auto& profile : block_size_profiles(m)) {
    double term = static_cast<double>(profile.multiplicity);
    for (int s : profile.sizes) term *= weights[s - 1];
    if (sign == SignMode::AlternatingBlocks && profile.block_count() % 2 != 0) term = -term;
    total.add(term);
  }
  return total.value();
}

}  // namespace ace::partitions
