#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qmcfold {

// Thrown when a request exceeds the documented desk-scale guards
// (O(N^2) error sums, brute-force criterion enumerations, log tables).
class ScaleGuardError : public std::runtime_error {
 public:
  explicit ScaleGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan) accumulator for long float sums.
struct KahanAccumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

inline std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace qmcfold
