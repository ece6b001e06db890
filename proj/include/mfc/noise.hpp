#pragma once

#include <cstdint>
#include <vector>

namespace mfc {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based standard normal generator.
///
/// key     = mix64(seed + mix64(stream))
/// word(i) = mix64(key + i * 0x9E3779B97F4A7C15)
/// draw k uses words 2k and 2k+1:
///   u1 = ((word(2k) >> 11) + 1) * 2^-53      in (0, 1]
///   u2 =  (word(2k+1) >> 11)    * 2^-53      in [0, 1)
///   z  = sqrt(-2 ln u1) * cos(2 pi u2)
/// Draw k depends only on (seed, stream, k), so streams can be split per
/// output and replayed from any position.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed, std::uint64_t stream = 0);

  double next();
  double at(std::uint64_t k) const;
  std::uint64_t position() const { return next_; }

 private:
  std::uint64_t word(std::uint64_t i) const;

  std::uint64_t key_;
  std::uint64_t next_ = 0;
};

struct NoiseSpec {
  double std = 0.0;
  std::uint64_t seed = 0;
};

/// Additive white Gaussian measurement noise, one independent stream per
/// output channel. Noise never touches the plant state.
class MeasurementNoise {
 public:
  MeasurementNoise(NoiseSpec spec, std::size_t channels);

  /// Adds one draw per channel to `y` in place.
  void apply(std::vector<double>& y);
  const NoiseSpec& spec() const { return spec_; }

 private:
  NoiseSpec spec_;
  std::vector<GaussianStream> streams_;
};

}  // namespace mfc
