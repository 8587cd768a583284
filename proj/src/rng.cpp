#include "rsgd/rng.hpp"

#include <cmath>
#include <numbers>

namespace rsgd {

RngStream::RngStream(std::uint64_t master_seed, const StreamCoord& coord) {
  std::uint64_t key = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  key = mix64(key ^ mix64(coord.run + 0x1));
  key = mix64(key ^ mix64(coord.iteration + 0x2545f4914f6cdd1dULL));
  key = mix64(key ^ mix64(coord.point + 0x3c6ef372fe94f82bULL));
  state_ = key;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace rsgd
