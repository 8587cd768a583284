#pragma once

#include <cstdint>
#include <limits>

namespace rsgd {

/// Position of one per-data-point draw: Monte Carlo run, iteration t and the
/// point's position in the K-sized batch (chunk j, sample k maps to j*R + k).
/// Keying on the batch position keeps draws paired across optimizers that
/// split the same batch into different chunk counts.
struct StreamCoord {
  std::uint64_t run = 0;
  std::uint64_t iteration = 0;
  std::uint64_t point = 0;

  bool operator==(const StreamCoord&) const = default;
  auto operator<=>(const StreamCoord&) const = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. The sequence is a pure function of
/// (master_seed, coord), so draws are reproducible under any execution order.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, const StreamCoord& coord);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53; }

  /// Standard normal (Box-Muller, second variate cached).
  double normal();

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rsgd
