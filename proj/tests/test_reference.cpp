#include "doctest.h"

#include "bellsim/reference.hpp"

#include <cmath>

using namespace bellsim;
using namespace bellsim::reference;

namespace {
constexpr double kPi = M_PI;
constexpr double kRoot2 = 1.4142135623730951;
}  // namespace

TEST_CASE("quantum curve hits its landmarks") {
  CHECK(qm_s(0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(qm_s(kPi / 8.0) == doctest::Approx(2.0 * kRoot2).epsilon(1e-12));
  CHECK(qm_s(kPi / 4.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quantum curve is symmetric about pi/8") {
  for (int i = 0; i <= 20; ++i) {
    const double x = (kPi / 8.0) * i / 20.0;
    CHECK(qm_s(kPi / 8.0 + x) == doctest::Approx(qm_s(kPi / 8.0 - x)).epsilon(1e-12));
  }
}

TEST_CASE("sine map values") {
  CHECK(delay_prob_sine(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(delay_prob_sine(kPi / 8.0) ==
        doctest::Approx(2.0 * kRoot2 - 2.0).epsilon(1e-12));
  // raw value at 3pi/8 is -2; the clamp makes it 0 exactly
  CHECK(delay_prob_sine(3.0 * kPi / 8.0) == 0.0);
}

TEST_CASE("power map values") {
  // u = 1 - pi/4 at pi/8; independently evaluated value
  CHECK(delay_prob_power(kPi / 8.0) == doctest::Approx(0.7455651929355734).epsilon(1e-9));
  // u <= 0 at phi = 0 (sin(pi/4) < pi/4), so the real-branch rule gives 0
  CHECK(delay_prob_power(0.0) == 0.0);
  CHECK(delay_prob_power(3.0 * kPi / 8.0) == 0.0);
}

TEST_CASE("calibrated map values and identity") {
  CHECK(delay_prob_calibrated(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(delay_prob_calibrated(kPi / 8.0) == doctest::Approx(kRoot2 - 1.0).epsilon(1e-12));
  for (int i = 0; i <= 16; ++i) {
    const double phi = (kPi / 4.0) * i / 16.0;
    CHECK(2.0 + 2.0 * delay_prob_calibrated(phi) ==
          doctest::Approx(qm_s(phi)).epsilon(1e-12));
  }
}

TEST_CASE("all maps stay inside [0,1]") {
  for (int i = 0; i <= 200; ++i) {
    const double phi = (kPi / 2.0) * i / 200.0;
    for (const double p :
         {delay_prob_sine(phi), delay_prob_power(phi), delay_prob_calibrated(phi)}) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("apparatus-1 oracle confirms the closed forms") {
  for (const double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const OracleResult r = oracle_app1(p);
    CHECK(r.e_coinc[0][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.e_coinc[0][1] == doctest::Approx(1.0 - 2.0 * p).epsilon(1e-12));
    CHECK(r.e_coinc[1][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.e_coinc[1][1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(r.s_coinc) == doctest::Approx(2.0 + 2.0 * p).epsilon(1e-12));

    CHECK(r.e_event[0][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.e_event[0][1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.e_event[1][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.e_event[1][1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(r.s_event) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(r.singles_fraction == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("apparatus-1 oracle with the NOT dropped on the prompt branch") {
  for (const double p : {0.0, 0.5, 1.0}) {
    const OracleResult r = oracle_app1(p, /*b2_nodelay_not=*/false);
    // coincidence magnitude is unchanged; the event-basis E(2,2) becomes 2p-1
    CHECK(std::fabs(r.s_coinc) == doctest::Approx(2.0 + 2.0 * p).epsilon(1e-12));
    CHECK(r.e_event[1][1] == doctest::Approx(2.0 * p - 1.0).epsilon(1e-12));
    CHECK(std::fabs(r.s_event) <= 2.0 + 1e-12);
  }
}

TEST_CASE("apparatus-2 oracle: pinned enumeration constants") {
  for (int L = 2; L <= 6; ++L) {
    const OracleResult r = oracle_app2(L);
    CHECK(r.e_coinc[0][0] == -1.0);
    CHECK(r.e_coinc[0][1] == -1.0);
    CHECK(r.e_coinc[1][0] == -1.0);
    CHECK(r.e_coinc[1][1] == 1.0);
    CHECK(std::fabs(r.s_coinc) == 4.0);  // pinned regression value

    CHECK(r.e_event[0][0] == 1.0);
    CHECK(r.e_event[0][1] == -1.0);
    CHECK(r.e_event[1][0] == -1.0);
    CHECK(r.e_event[1][1] == 1.0);
    CHECK(std::fabs(r.s_event) == 2.0);  // exact for every L
  }
  // enumeration sizes agree far inside any boundary-effect bound
  CHECK(std::fabs(std::fabs(oracle_app2(2).s_coinc) - std::fabs(oracle_app2(3).s_coinc)) <
        1.0 / 2.0);
  CHECK_THROWS(oracle_app2(1));
  CHECK_THROWS(oracle_app2(9));
}

TEST_CASE("apparatus-2 replay: storage and delay rules") {
  const TimingModel timing;  // period 100, slight delay 30
  // trial 0 carries set I, trial 1 carries set II
  const std::vector<Setting> ls{Setting::Two, Setting::One};
  const std::vector<Setting> rs{Setting::One, Setting::Two};
  const auto [left, right] = replay_app2(ls, rs, timing);

  // left: A2 under set I stores value 1, released at the next arrival;
  // A1 under set II emits 1 immediately. Stored release sorts first.
  REQUIRE(left.size() == 2);
  CHECK(left[0].time == 100);
  CHECK(left[0].setting == Setting::Two);
  CHECK(left[0].outcome == 1);
  CHECK(left[0].bullet_id == 0);
  CHECK(left[1].time == 100);
  CHECK(left[1].setting == Setting::One);
  CHECK(left[1].outcome == 1);
  CHECK(left[1].bullet_id == 1);

  // right: B1 under set I stores value 0, released at t=100; B2 under
  // set II emits 0 at t + 30.
  REQUIRE(right.size() == 2);
  CHECK(right[0].time == 100);
  CHECK(right[0].setting == Setting::One);
  CHECK(right[0].outcome == 0);
  CHECK(right[0].bullet_id == 0);
  CHECK(right[1].time == 130);
  CHECK(right[1].setting == Setting::Two);
  CHECK(right[1].outcome == 0);
  CHECK(right[1].bullet_id == 1);
}

TEST_CASE("joint sampler tracks its combo expectations") {
  RngStream rng(99);
  // degenerate combo: E(1,1) = cos(pi) = -1 at phi = pi/2
  for (int i = 0; i < 200; ++i) {
    const auto [a, b] = qm_sample(kPi / 2.0, Setting::One, Setting::One, rng);
    CHECK(a != b);
  }

  // the combo map adds up to the quantum curve
  for (int i = 0; i <= 16; ++i) {
    const double phi = (kPi / 4.0) * i / 16.0;
    const double s = qm_combo_e(phi, Setting::One, Setting::One) +
                     qm_combo_e(phi, Setting::One, Setting::Two) +
                     qm_combo_e(phi, Setting::Two, Setting::One) -
                     qm_combo_e(phi, Setting::Two, Setting::Two);
    CHECK(s == doctest::Approx(qm_s(phi)).epsilon(1e-12));
  }

  // statistical check of E and the marginals at pi/8
  const double phi = kPi / 8.0;
  const int n = 40000;
  int same = 0, ones_a = 0;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = qm_sample(phi, Setting::One, Setting::Two, rng);
    same += a == b;
    ones_a += a;
  }
  const double e = 2.0 * same / n - 1.0;
  CHECK(std::fabs(e - qm_combo_e(phi, Setting::One, Setting::Two)) < 0.02);
  CHECK(std::fabs(static_cast<double>(ones_a) / n - 0.5) < 0.01);
}
