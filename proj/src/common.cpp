#include "ace/common.hpp"

namespace ace {

double kahan_sum(std::span<const double> xs) {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

double kahan_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("kahan_mean: empty input");
  return kahan_sum(xs) / static_cast<double>(xs.size());
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw CapacityError("factorial: n must be in [0, 20]");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x51A2B3C4D5E6F708ULL));
}

}  // namespace ace
