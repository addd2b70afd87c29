#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace transg::numerics {

// mt19937_64 with hand-rolled distributions, so sequences are identical
// across standard libraries and the full state round-trips through a string.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n > 0.
  std::size_t uniform_index(std::size_t n);
  // Standard normal via Box-Muller (no cached second variate).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
  }

  std::string serialize() const;
  static SeededRng deserialize(const std::string& state);

  friend bool operator==(const SeededRng& a, const SeededRng& b) {
    return a.seed_ == b.seed_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace transg::numerics
