#include "bellsim/rng.hpp"

#include <cmath>

namespace bellsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Bit RngStream::next_bit() { return static_cast<Bit>(next_u64() >> 63); }

std::uint64_t RngStream::next_below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection of the biased slice.
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream Substreams::stream(StreamPurpose purpose, Side side, std::uint64_t trial) const {
  std::uint64_t key = mix(root_ + kGolden * (static_cast<std::uint64_t>(purpose) + 1));
  key = mix(key + kGolden * (static_cast<std::uint64_t>(side) + 1));
  key = mix(key + kGolden * (trial + 1));
  return RngStream(key);
}

std::int64_t sample_poisson(RngStream& rng, double mean) {
  std::int64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double lambda = remaining > 16.0 ? 16.0 : remaining;
    remaining -= lambda;
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    std::int64_t k = -1;
    do {
      ++k;
      prod *= rng.next_unit();
    } while (prod > limit);
    total += k;
  }
  return total;
}

}  // namespace bellsim
