#pragma once

#include <cstdint>
#include <random>

namespace gphase {

// Deterministic random stream: 64-bit-seeded Mersenne Twister with
// Box-Muller normals. Child streams derived from (seed, index) allow
// trajectory-level parallelism with reproducible results.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  // Standard normal.
  double gaussian();
  // Independent stream derived deterministically from this stream's seed.
  RandomStream child(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gphase
