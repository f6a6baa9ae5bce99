#include "doctest.h"

#include "bellsim/coincidence.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/rng.hpp"

#include <vector>

using namespace bellsim;

namespace {

DetectionRecord rec(Side side, Tick t, Bit outcome = 0, Setting s = Setting::One,
                    std::int64_t id = 0) {
  return {side, s, outcome, t, id};
}

std::vector<DetectionRecord> left_at(std::initializer_list<Tick> times) {
  std::vector<DetectionRecord> v;
  std::int64_t id = 0;
  for (const Tick t : times) v.push_back(rec(Side::A, t, 0, Setting::One, id++));
  return v;
}

std::vector<DetectionRecord> right_at(std::initializer_list<Tick> times) {
  std::vector<DetectionRecord> v;
  std::int64_t id = 0;
  for (const Tick t : times) v.push_back(rec(Side::B, t, 0, Setting::One, id++));
  return v;
}

}  // namespace

TEST_CASE("matching basics") {
  SUBCASE("exact coincidence pairs") {
    const auto m = match(left_at({0}), right_at({0}), 5);
    CHECK(m.pairs.size() == 1);
    CHECK(m.singles.empty());
  }
  SUBCASE("outside the window leaves two singles") {
    const auto m = match(left_at({0}), right_at({30}), 5);
    CHECK(m.pairs.empty());
    CHECK(m.singles.size() == 2);
  }
  SUBCASE("greedy nearest: the prompt record wins, the delayed one is single") {
    const auto m = match(left_at({0, 30}), right_at({0}), 5);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].left.time == 0);
    CHECK(m.pairs[0].right.time == 0);
    REQUIRE(m.singles.size() == 1);
    CHECK(m.singles[0].time == 30);
  }
  SUBCASE("empty streams") {
    const auto m = match({}, right_at({1, 2}), 5);
    CHECK(m.pairs.empty());
    CHECK(m.singles.size() == 2);
  }
}

TEST_CASE("unsorted input is rejected") {
  auto left = left_at({10, 0});
  CHECK_THROWS_AS(match(left, right_at({0}), 5), UnsortedInputError);
  CHECK_THROWS_AS(match(right_at({0}), left, 5), UnsortedInputError);
}

TEST_CASE("equal-tick collisions pair in stream order") {
  // two left records at the same tick (stored release first), one right
  std::vector<DetectionRecord> left{rec(Side::A, 100, 1, Setting::Two, 0),
                                    rec(Side::A, 100, 1, Setting::One, 1)};
  const auto m = match(left, right_at({100}), 5);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].left.setting == Setting::Two);  // the stored release
  REQUIRE(m.singles.size() == 1);
  CHECK(m.singles[0].setting == Setting::One);
}

TEST_CASE("match properties on random streams") {
  RngStream rng(2718);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<DetectionRecord> left, right;
    Tick t = 0;
    for (std::uint64_t k = 0; k < 1 + rng.next_below(50); ++k) {
      t += static_cast<Tick>(rng.next_below(8));
      left.push_back(rec(Side::A, t, rng.next_bit(), Setting::One,
                         static_cast<std::int64_t>(k)));
    }
    t = 0;
    for (std::uint64_t k = 0; k < 1 + rng.next_below(50); ++k) {
      t += static_cast<Tick>(rng.next_below(8));
      right.push_back(rec(Side::B, t, rng.next_bit(), Setting::Two,
                          static_cast<std::int64_t>(k)));
    }
    const Tick w = static_cast<Tick>(rng.next_below(10));
    const MatchResult m = match(left, right, w);

    // partition: every record lands exactly once
    CHECK(m.pairs.size() * 2 + m.singles.size() == left.size() + right.size());
    for (const auto& p : m.pairs) {
      CHECK(p.left.time - p.right.time <= w);
      CHECK(p.right.time - p.left.time <= w);
    }

    // symmetry: swapping the streams mirrors the pairing
    const MatchResult swapped = match(right, left, w);
    REQUIRE(swapped.pairs.size() == m.pairs.size());
    for (std::size_t k = 0; k < m.pairs.size(); ++k) {
      CHECK(swapped.pairs[k].left == m.pairs[k].right);
      CHECK(swapped.pairs[k].right == m.pairs[k].left);
    }

    // window monotonicity: more window, never more singles
    std::size_t prev = left.size() + right.size() + 1;
    for (const Tick wk : {Tick{0}, Tick{1}, Tick{3}, Tick{6}, Tick{12}}) {
      const auto singles = match(left, right, wk).singles.size();
      CHECK(singles <= prev);
      prev = singles;
    }
  }
}

TEST_CASE("tally buckets by combo and outcome agreement") {
  MatchResult m;
  m.window = 5;
  m.pairs.push_back({rec(Side::A, 0, 0, Setting::One), rec(Side::B, 0, 1, Setting::One)});
  m.pairs.push_back({rec(Side::A, 9, 1, Setting::Two), rec(Side::B, 9, 1, Setting::Two)});
  m.singles.push_back(rec(Side::A, 20));
  const ComboTally t = tally(m);
  CHECK(t.n_opposite[0][0] == 1);
  CHECK(t.n_same[1][1] == 1);
  CHECK(t.n_singles == 1);
  CHECK(t.pairs_total() == 2);
  CHECK(t.records_total() == 5);

  // swapped pair sides land in the same bucket
  MatchResult mirrored;
  mirrored.pairs.push_back({rec(Side::B, 0, 1, Setting::One), rec(Side::A, 0, 0, Setting::One)});
  CHECK(tally(mirrored).n_opposite[0][0] == 1);
}

TEST_CASE("default timing never pairs across trials") {
  SimConfig cfg;
  cfg.strategy = Strategy::App1;
  cfg.pmap = PmapMode::Fixed;
  cfg.p_fixed = 0.5;
  cfg.n_trials = 5000;
  cfg.seed = 61;
  const RunOutput out = run(cfg);
  const MatchResult m = match(out.left, out.right, cfg.timing.window);
  for (const auto& p : m.pairs) CHECK(p.left.bullet_id == p.right.bullet_id);
}

TEST_CASE("ground-truth pairing of apparatus 1 matches the rule table") {
  SimConfig cfg;
  cfg.strategy = Strategy::App1;
  cfg.pmap = PmapMode::Fixed;
  cfg.p_fixed = 0.3;
  cfg.n_trials = 20000;
  cfg.seed = 62;
  const RunOutput out = run(cfg);
  const ComboTally t = pair_by_ground_truth(out.left, out.right);
  // A2 relays the bit, B1 relays the complement: always opposite.
  CHECK(t.n_same[1][0] == 0);
  CHECK(t.n_opposite[1][0] > 0);
  // A2 relays the bit, B2 outputs NOT(complement) = the bit: always same.
  CHECK(t.n_opposite[1][1] == 0);
  CHECK(t.n_same[1][1] > 0);
  CHECK(t.n_singles == 0);
}

TEST_CASE("ground-truth pairing flags missing partners") {
  SimConfig cfg;
  cfg.n_trials = 10;
  cfg.strategy = Strategy::Table;
  cfg.table_index = 8;
  cfg.seed = 5;
  RunOutput out = run(cfg);
  out.right.pop_back();
  CHECK_THROWS_AS(pair_by_ground_truth(out.left, out.right), MissingPartnerError);
}

TEST_CASE("dark records are excluded from ground-truth pairing") {
  SimConfig cfg;
  cfg.n_trials = 50;
  cfg.strategy = Strategy::Table;
  cfg.table_index = 8;
  cfg.seed = 6;
  RunOutput out = run(cfg);
  out.left.push_back(rec(Side::A, 9999, 1, Setting::One, kDarkBulletId));
  const ComboTally t = pair_by_ground_truth(out.left, out.right);
  CHECK(t.pairs_total() == 50);
}
