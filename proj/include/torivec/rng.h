#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace torivec {

// Derives an independent child seed from a master seed and a stage label, so
// one --seed flag can drive synthesis, init, sampling and evaluation without
// the streams overlapping.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

// mt19937_64 with hand-rolled distributions. The engine output is fixed by
// the standard; std:: distributions are not, so we do not use them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive, via rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; second value cached.
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::int64_t i = static_cast<std::int64_t>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[uniform_int(0, i)]);
    }
  }

  // k distinct values from {0, ..., n-1}, in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace torivec
