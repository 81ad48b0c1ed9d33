#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sail::nn {

// Deterministic random source. The raw engine is mt19937_64 (bit-exact by
// the standard); uniform/normal transforms are implemented here instead of
// relying on std distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. One pair of uniforms per pair of draws.
  double normal();

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
  }

  std::vector<double> normal_vec(std::size_t n);
  std::vector<double> uniform_vec(std::size_t n, double lo, double hi);

  // In-place Fisher-Yates shuffle of an index vector.
  void shuffle(std::vector<std::size_t>& idx);

  // Independent stream derived from this rng's seed and a stream id.
  Rng child(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 step, used for seed derivation.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sail::nn
