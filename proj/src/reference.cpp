#include "bellsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bellsim::reference {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double qm_s(double phi) { return 2.0 * std::cos(2.0 * phi) + 2.0 * std::sin(2.0 * phi); }

double delay_prob_sine(double phi) {
  return clamp01(2.0 * std::sqrt(2.0) * std::sin(2.0 * phi + M_PI_4) - 2.0);
}

double delay_prob_power(double phi) {
  const double u = std::sin(2.0 * phi + M_PI_4) - M_PI_4;
  if (u <= 0.0) return 0.0;
  return clamp01(2.08 * std::pow(u, 2.0 / 3.0));
}

double delay_prob_calibrated(double phi) { return clamp01((qm_s(phi) - 2.0) / 2.0); }

double b2_probability(const SimConfig& cfg) {
  switch (cfg.pmap) {
    case PmapMode::Off:
      // Apparatus 1: never delay. Apparatus 2: rule executes as written.
      return cfg.strategy == Strategy::App2 ? 1.0 : 0.0;
    case PmapMode::Fixed: return cfg.p_fixed;
    case PmapMode::Sine: return delay_prob_sine(cfg.phi);
    case PmapMode::Power: return delay_prob_power(cfg.phi);
    case PmapMode::Calibrated: return delay_prob_calibrated(cfg.phi);
  }
  return 0.0;
}

namespace {

struct WeightedTally {
  double same[2][2]{};
  double opposite[2][2]{};
  double singles = 0.0;  // single records
  double pairs = 0.0;

  double finish(double e[2][2]) const {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double n = same[a][b] + opposite[a][b];
        e[a][b] = n > 0.0 ? (same[a][b] - opposite[a][b]) / n : 0.0;
      }
    return e[0][0] + e[0][1] + e[1][0] - e[1][1];
  }
};

}  // namespace

OracleResult oracle_app1(double p_delay, bool b2_nodelay_not) {
  WeightedTally coinc, event;

  // slot 0 = prompt (t), slot 1 = delayed (t + delay)
  for (int a = 0; a < 2; ++a) {              // source bit, weight 1/2
    const Bit x_left = static_cast<Bit>(a);
    const Bit x_right = bit_not(x_left);
    for (int sa = 0; sa < 2; ++sa) {         // A setting index, weight 1/2
      for (int sb = 0; sb < 2; ++sb) {       // B setting index, weight 1/2
        for (int branch_a = 0; branch_a < 2; ++branch_a) {  // weight 1/2
          // Left output per the detector rules.
          Bit out_a;
          int slot_a;
          if (sa == 0) {  // A1: bit at t, or NOT with delay
            out_a = branch_a == 0 ? x_left : bit_not(x_left);
            slot_a = branch_a;
          } else {        // A2: bit at t, or bit with delay
            out_a = x_left;
            slot_a = branch_a;
          }
          // Right output: B1 prompt bit; B2 branches on the delay draw.
          const int n_branches_b = sb == 1 ? 2 : 1;
          for (int branch_b = 0; branch_b < n_branches_b; ++branch_b) {
            double w = 0.5 * 0.25 * 0.5;
            Bit out_b;
            int slot_b;
            if (sb == 0) {
              out_b = x_right;
              slot_b = 0;
            } else if (branch_b == 0) {  // delayed, weight p
              w *= p_delay;
              out_b = bit_not(x_right);
              slot_b = 1;
            } else {                     // prompt, weight 1-p
              w *= 1.0 - p_delay;
              out_b = b2_nodelay_not ? bit_not(x_right) : x_right;
              slot_b = 0;
            }
            if (w == 0.0) continue;
            const bool same = out_a == out_b;
            // Event basis pairs the trial's two records regardless of slots.
            (same ? event.same : event.opposite)[sa][sb] += w;
            event.pairs += w;
            // Coincidence: equal slots pair, different slots give 2 singles.
            if (slot_a == slot_b) {
              (same ? coinc.same : coinc.opposite)[sa][sb] += w;
              coinc.pairs += w;
            } else {
              coinc.singles += 2.0 * w;
            }
          }
        }
      }
    }
  }

  OracleResult r;
  r.s_coinc = coinc.finish(r.e_coinc);
  r.s_event = event.finish(r.e_event);
  r.singles_fraction = coinc.singles / (coinc.singles + coinc.pairs);
  return r;
}

std::pair<std::vector<DetectionRecord>, std::vector<DetectionRecord>>
replay_app2(const std::vector<Setting>& left_settings,
            const std::vector<Setting>& right_settings, const TimingModel& timing) {
  if (left_settings.size() != right_settings.size())
    throw LengthMismatchError("replay_app2: setting sequences differ in length");

  // Instruction values, indexed [set][side][setting].
  static constexpr Bit kValue[2][2][2] = {{{0, 1}, {0, 1}}, {{1, 0}, {1, 0}}};

  std::vector<DetectionRecord> left, right;
  struct Stored {
    Bit outcome;
    Setting setting;
    std::int64_t id;
    bool present = false;
  };
  Stored pend_left{}, pend_right{};

  const auto n = static_cast<std::int64_t>(left_settings.size());
  for (std::int64_t k = 0; k < n; ++k) {
    const Tick t = k * timing.period;
    const int set = static_cast<int>(k % 2);  // 0 = I, 1 = II
    if (pend_left.present) {
      left.push_back({Side::A, pend_left.setting, pend_left.outcome, t, pend_left.id});
      pend_left.present = false;
    }
    if (pend_right.present) {
      right.push_back({Side::B, pend_right.setting, pend_right.outcome, t, pend_right.id});
      pend_right.present = false;
    }
    const Setting sa = left_settings[static_cast<std::size_t>(k)];
    const Setting sb = right_settings[static_cast<std::size_t>(k)];
    const Bit va = kValue[set][0][setting_index(sa)];
    const Bit vb = kValue[set][1][setting_index(sb)];
    if (set == 0) {
      if (sa == Setting::One) left.push_back({Side::A, sa, va, t, k});
      else pend_left = {va, sa, k, true};
      if (sb == Setting::Two) right.push_back({Side::B, sb, vb, t, k});
      else pend_right = {vb, sb, k, true};
    } else {
      if (sa == Setting::One) left.push_back({Side::A, sa, va, t, k});
      else left.push_back({Side::A, sa, va, t + timing.delay_app2, k});
      if (sb == Setting::Two) right.push_back({Side::B, sb, vb, t + timing.delay_app2, k});
      else pend_right = {vb, sb, k, true};
    }
  }
  const Tick flush = n * timing.period;
  if (pend_left.present)
    left.push_back({Side::A, pend_left.setting, pend_left.outcome, flush, pend_left.id});
  if (pend_right.present)
    right.push_back({Side::B, pend_right.setting, pend_right.outcome, flush, pend_right.id});
  return {std::move(left), std::move(right)};
}

namespace {

// Exact matcher for slot-separated streams: records pair iff their ticks
// are equal, taken in stream order within a tick.
void tally_same_tick(const std::vector<DetectionRecord>& left,
                     const std::vector<DetectionRecord>& right, std::int64_t same[2][2],
                     std::int64_t opposite[2][2], std::int64_t& singles, std::int64_t& pairs) {
  std::size_t i = 0, j = 0;
  while (i < left.size() && j < right.size()) {
    if (left[i].time < right[j].time) {
      ++singles;
      ++i;
    } else if (right[j].time < left[i].time) {
      ++singles;
      ++j;
    } else {
      const bool eq = left[i].outcome == right[j].outcome;
      (eq ? same : opposite)[setting_index(left[i].setting)][setting_index(right[j].setting)]++;
      ++pairs;
      ++i;
      ++j;
    }
  }
  singles += static_cast<std::int64_t>(left.size() - i + right.size() - j);
}

}  // namespace

OracleResult oracle_app2(int n_bullets, const TimingModel& timing) {
  if (n_bullets < 2 || n_bullets > 8)
    throw std::invalid_argument("oracle_app2: n_bullets must lie in [2, 8] (enumeration cap)");

  std::int64_t csame[2][2]{}, copp[2][2]{}, esame[2][2]{}, eopp[2][2]{};
  std::int64_t singles = 0, pairs = 0;

  const int total = 1 << n_bullets;
  std::vector<Setting> ls(static_cast<std::size_t>(n_bullets));
  std::vector<Setting> rs(static_cast<std::size_t>(n_bullets));
  for (int ia = 0; ia < total; ++ia) {
    for (int k = 0; k < n_bullets; ++k)
      ls[static_cast<std::size_t>(k)] = (ia >> k) & 1 ? Setting::Two : Setting::One;
    for (int ib = 0; ib < total; ++ib) {
      for (int k = 0; k < n_bullets; ++k)
        rs[static_cast<std::size_t>(k)] = (ib >> k) & 1 ? Setting::Two : Setting::One;
      auto [left, right] = replay_app2(ls, rs, timing);
      tally_same_tick(left, right, csame, copp, singles, pairs);
      // Event basis: join on bullet id (exactly one record per side per id).
      std::map<std::int64_t, const DetectionRecord*> by_id;
      for (const auto& rec : left) by_id[rec.bullet_id] = &rec;
      for (const auto& rec : right) {
        const auto* l = by_id.at(rec.bullet_id);
        const bool eq = l->outcome == rec.outcome;
        (eq ? esame : eopp)[setting_index(l->setting)][setting_index(rec.setting)]++;
      }
    }
  }

  OracleResult r;
  auto finish = [](const std::int64_t same[2][2], const std::int64_t opp[2][2], double e[2][2]) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::int64_t n = same[a][b] + opp[a][b];
        e[a][b] = n > 0 ? static_cast<double>(same[a][b] - opp[a][b]) / static_cast<double>(n)
                        : 0.0;
      }
    return e[0][0] + e[0][1] + e[1][0] - e[1][1];
  };
  r.s_coinc = finish(csame, copp, r.e_coinc);
  r.s_event = finish(esame, eopp, r.e_event);
  r.singles_fraction =
      static_cast<double>(singles) / static_cast<double>(singles + pairs);
  return r;
}

double qm_combo_e(double phi, Setting a, Setting b) {
  if (b == Setting::One) return std::cos(2.0 * phi);        // E(1,1), E(2,1)
  if (a == Setting::One) return std::sin(2.0 * phi);        // E(1,2)
  return -std::sin(2.0 * phi);                              // E(2,2)
}

std::pair<Bit, Bit> qm_sample(double phi, Setting a, Setting b, RngStream& rng) {
  const double e = qm_combo_e(phi, a, b);
  const bool same = rng.next_unit() < 0.5 * (1.0 + e);
  const Bit first = rng.next_bit();
  return {first, same ? first : bit_not(first)};
}

}  // namespace bellsim::reference
