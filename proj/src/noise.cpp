#include "mfc/noise.hpp"

#include <cmath>
#include <numbers>

#include "mfc/errors.hpp"

namespace mfc {

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed + mix64(stream))) {}

std::uint64_t GaussianStream::word(std::uint64_t i) const {
  return mix64(key_ + i * 0x9E3779B97F4A7C15ull);
}

double GaussianStream::at(std::uint64_t k) const {
  constexpr double kScale = 0x1.0p-53;
  const double u1 = static_cast<double>((word(2 * k) >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(word(2 * k + 1) >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double GaussianStream::next() { return at(next_++); }

MeasurementNoise::MeasurementNoise(NoiseSpec spec, std::size_t channels) : spec_(spec) {
  if (!(spec.std >= 0.0) || !std::isfinite(spec.std)) {
    throw ConfigError("noise standard deviation must be finite and >= 0");
  }
  streams_.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) streams_.emplace_back(spec.seed, c);
}

void MeasurementNoise::apply(std::vector<double>& y) {
  if (y.size() != streams_.size()) {
    throw ConfigError("measurement vector does not match the noise channel count");
  }
  for (std::size_t c = 0; c < y.size(); ++c) {
    // Streams advance even when std == 0.
    const double z = streams_[c].next();
    if (spec_.std > 0.0) y[c] += spec_.std * z;
  }
}

}  // namespace mfc
