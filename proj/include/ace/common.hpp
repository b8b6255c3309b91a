#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace ace {

/// Raised when a request exceeds a hard capacity limit (e.g. combinatorial order caps).
class CapacityError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Raised when a design is degenerate (zero treatment variation after residualization).
class DegenerateDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the empirical moment-equation denominator is numerically zero.
/// Carries the offending denominator so callers can report it.
class WeakIdentificationError : public std::runtime_error {
 public:
  WeakIdentificationError(const std::string& msg, double denominator)
      : std::runtime_error(msg), denominator(denominator) {}
  double denominator;
};

/// Streaming compensated (Kahan) accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

double kahan_sum(std::span<const double> xs);
double kahan_mean(std::span<const double> xs);

/// Exact n! for 0 <= n <= 20 (fits in 64 bits).
std::uint64_t factorial(int n);

/// splitmix64 mixer; the basis for all derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ace
