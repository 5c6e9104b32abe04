#include "gphase/random.hpp"

#include <cmath>

#include "gphase/math_util.hpp"

namespace gphase {

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

std::uint64_t RandomStream::next_u64() { return eng_(); }

double RandomStream::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the argument of log strictly positive.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = kTwoPi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

RandomStream RandomStream::child(std::uint64_t index) const {
  return RandomStream(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
}

}  // namespace gphase
