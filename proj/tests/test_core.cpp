#include "doctest.h"

#include "bellsim/core.hpp"
#include "bellsim/rng.hpp"

#include <algorithm>
#include <string>

using namespace bellsim;

namespace {

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  return std::any_of(errs.begin(), errs.end(), [&needle](const std::string& e) {
    return e.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("spin encoding") {
  CHECK(spin(0) == 1);
  CHECK(spin(1) == -1);
  CHECK(spin(0) * spin(0) == 1);
  CHECK(spin(1) * spin(1) == 1);
  CHECK(bit_not(0) == 1);
  CHECK(bit_not(1) == 0);
}

TEST_CASE("table indexing round trip and entries") {
  for (int k = 0; k < 16; ++k) CHECK(Table::from_index(k).index() == k);

  // index 8 = bits [1 0 0 0] = A1=1, A2=0, B1=0, B2=0
  const Table t = Table::from_index(8);
  CHECK(t.a1 == 1);
  CHECK(t.a2 == 0);
  CHECK(t.b1 == 0);
  CHECK(t.b2 == 0);
  CHECK(t.entry(Side::A, Setting::One) == 1);
  CHECK(t.entry(Side::A, Setting::Two) == 0);
  CHECK(t.entry(Side::B, Setting::One) == 0);
  CHECK(t.entry(Side::B, Setting::Two) == 0);
}

TEST_CASE("default config validates") {
  SimConfig cfg;
  cfg.n_trials = 100;
  CHECK(validate_config(cfg).empty());  // T=100, delays 30, window 5
}

TEST_CASE("window larger than the delay is rejected") {
  SimConfig cfg;
  cfg.n_trials = 100;
  cfg.timing.window = 40;  // violates window < delay_app1 (and delay_app2)
  const auto errs = validate_config(cfg);
  CHECK(!errs.empty());
  CHECK(mentions(errs, "InvalidTiming"));
}

TEST_CASE("pmap and strategy must agree") {
  SimConfig cfg;
  cfg.n_trials = 100;
  cfg.strategy = Strategy::App2;
  cfg.pmap = PmapMode::Sine;
  CHECK(mentions(validate_config(cfg), "InvalidMode"));

  cfg.strategy = Strategy::App1;
  CHECK(validate_config(cfg).empty());

  cfg.pmap = PmapMode::Power;
  CHECK(mentions(validate_config(cfg), "InvalidMode"));
  cfg.strategy = Strategy::App2;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("every violation is reported, not just the first") {
  SimConfig cfg;
  cfg.n_trials = 0;
  cfg.timing.window = 40;
  cfg.strategy = Strategy::App2;
  cfg.pmap = PmapMode::Sine;
  cfg.noise.flip_prob = 1.5;
  const auto errs = validate_config(cfg);
  CHECK(errs.size() >= 4);
  CHECK(mentions(errs, "InvalidTiming"));
  CHECK(mentions(errs, "InvalidMode"));
  CHECK(mentions(errs, "InvalidProbability"));
  CHECK(mentions(errs, "n_trials"));
  CHECK_THROWS_AS(require_valid(cfg), ConfigError);
}

TEST_CASE("probability fields are range checked") {
  SimConfig cfg;
  cfg.n_trials = 10;
  cfg.pmap = PmapMode::Fixed;
  cfg.p_fixed = 1.2;
  CHECK(mentions(validate_config(cfg), "InvalidProbability"));
  cfg.p_fixed = 1.0;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("cross-slot timing requires the explicit escape hatch") {
  SimConfig cfg;
  cfg.n_trials = 10;
  cfg.timing.delay_app1 = 100;  // = period: prompt and delayed slots touch
  cfg.timing.delay_app2 = 100;
  CHECK(mentions(validate_config(cfg), "InvalidTiming"));
  cfg.allow_cross_slot = true;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("validated timings separate all slots by more than the window") {
  // Property: whatever validates also satisfies the slot-separation
  // implications |t_prompt - t_delayed| = delay > w and
  // |t_delayed(n) - t_prompt(n+1)| = period - delay > w.
  RngStream rng(7);
  int accepted = 0;
  for (int iter = 0; iter < 500; ++iter) {
    SimConfig cfg;
    cfg.n_trials = 1;
    cfg.timing.period = static_cast<Tick>(2 + rng.next_below(200));
    cfg.timing.delay_app1 = static_cast<Tick>(rng.next_below(220));
    cfg.timing.delay_app2 = static_cast<Tick>(rng.next_below(220));
    cfg.timing.window = static_cast<Tick>(rng.next_below(60));
    if (!validate_config(cfg).empty()) continue;
    ++accepted;
    for (const Tick delay : {cfg.timing.delay_app1, cfg.timing.delay_app2}) {
      CHECK(delay > cfg.timing.window);
      CHECK(cfg.timing.period - delay > cfg.timing.window);
    }
  }
  CHECK(accepted > 10);  // the generator actually exercises the valid region
}
