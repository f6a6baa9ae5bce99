#include "doctest.h"

#include "bellsim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace bellsim;

TEST_CASE("streams are deterministic") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substream keys are distinct") {
  const Substreams s(123);
  const auto v1 = s.stream(StreamPurpose::SourceBit, Side::A, 0).next_u64();
  const auto v2 = s.stream(StreamPurpose::SourceBit, Side::B, 0).next_u64();
  const auto v3 = s.stream(StreamPurpose::SettingDraw, Side::A, 0).next_u64();
  const auto v4 = s.stream(StreamPurpose::SourceBit, Side::A, 1).next_u64();
  CHECK(v1 != v2);
  CHECK(v1 != v3);
  CHECK(v1 != v4);
  CHECK(v2 != v3);
}

TEST_CASE("unit draws live in [0,1) and average one half") {
  RngStream rng(9);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("fair bits average one half") {
  const Substreams s(2024);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    sum += s.stream(StreamPurpose::SourceBit, Side::A, static_cast<std::uint64_t>(i)).next_bit();
  CHECK(std::fabs(sum / n - 0.5) < 0.01);
}

TEST_CASE("next_below stays in range and is roughly uniform") {
  RngStream rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.next_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) CHECK(std::fabs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
  CHECK(rng.next_below(1) == 0);
}

TEST_CASE("poisson sampling concentrates around its mean") {
  RngStream rng(31337);
  // mean 1000: a seeded draw must land within 3*sqrt(1000) of the mean
  const auto k = sample_poisson(rng, 1000.0);
  CHECK(std::fabs(static_cast<double>(k) - 1000.0) <= 3.0 * std::sqrt(1000.0));

  CHECK(sample_poisson(rng, 0.0) == 0);
  CHECK(sample_poisson(rng, -1.0) == 0);

  // small-mean average over many draws
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_poisson(rng, 2.5));
  CHECK(std::fabs(sum / n - 2.5) < 0.05);
}
