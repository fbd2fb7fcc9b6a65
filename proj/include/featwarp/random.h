#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace featwarp {

std::uint64_t splitmix64(std::uint64_t x);

// Stream seed for sub-task `counter` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Seeded generator with platform-independent distributions.
///
/// std::mt19937_64 output is fixed by the standard, but the standard
/// distributions are not, so the draws below are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace featwarp
