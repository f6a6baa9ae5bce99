#pragma once

#include <cstdint>

#include "bellsim/core.hpp"

namespace bellsim {

/// SplitMix64 stream. Small, fast, and fully portable: output depends only
/// on the 64-bit state, never on platform or standard-library internals,
/// so seeded runs are bit-identical everywhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit();

  /// Fair bit from the top output bit.
  Bit next_bit();

  /// Uniform integer in [0, n), n >= 1. Rejection-free Lemire reduction
  /// with widening multiply, then rejection on the biased slice.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

/// What a derived stream is for. Part of the stream key, so streams for
/// different purposes never collide.
enum class StreamPurpose : std::uint64_t {
  SourceBit = 1,   ///< Apparatus-1 source bit per trial
  SettingDraw,     ///< per-trial detector setting
  Response,        ///< per-trial detector branch decisions
  NoiseRecord,     ///< drop/flip decisions per side
  DarkCount,       ///< dark-count insertion per side
  JointSample,     ///< reference joint sampler per trial
  Shuffle,         ///< test utilities
};

/// Derives independent streams from one root seed, keyed by
/// (purpose, side, trial). Changing what one key's stream is used for can
/// never perturb another key's stream, which is what makes the locality
/// permutation test meaningful rather than accidental.
class Substreams {
 public:
  explicit Substreams(std::uint64_t root_seed) : root_(root_seed) {}

  RngStream stream(StreamPurpose purpose, Side side, std::uint64_t trial) const;
  RngStream stream(StreamPurpose purpose, Side side) const {
    return stream(purpose, side, 0);
  }

  std::uint64_t root() const { return root_; }

 private:
  std::uint64_t root_;
};

/// Exact Poisson sample. Splits large means into chunks so Knuth's
/// product method never underflows.
std::int64_t sample_poisson(RngStream& rng, double mean);

}  // namespace bellsim
