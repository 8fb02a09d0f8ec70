#pragma once

#include <cstdint>
#include <random>

namespace shdp {

// Seedable generator handed to every sampling routine. A fixed seed and a
// fixed call sequence reproduce outputs bit-exactly within one build.
// Each chain/thread owns its own Rng; none is ever shared.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  void reseed(std::uint64_t seed) {
    seed_ = seed;
    engine_.seed(seed);
  }

  engine_type& engine() { return engine_; }

  // Uniform on [0,1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform integer on {0,...,n-1}.
  int uniformInt(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace shdp
