#include "bellsim/strategies.hpp"

#include <algorithm>

namespace bellsim {

namespace {

Bit carried_bit(const Bullet& bullet, const char* op) {
  const auto* carried = std::get_if<CarriedBit>(&bullet.payload);
  if (!carried) throw WrongPayloadError(std::string(op) + ": carrier payload is not a bit");
  return carried->value;
}

}  // namespace

std::pair<Bullet, Bullet> app1_emit(std::int64_t trial_id, Tick period, RngStream& source) {
  const Bit a = source.next_bit();
  const Tick t = trial_id * period;
  Bullet left{trial_id, t, CarriedBit{a}};
  Bullet right{trial_id, t, CarriedBit{bit_not(a)}};
  return {left, right};
}

ScheduledOutput app1_respond(Side side, Setting setting, const Bullet& bullet,
                             const TimingModel& timing, double p_delay_b2,
                             bool b2_nodelay_not, RngStream& rng) {
  const Bit x = carried_bit(bullet, "app1_respond");
  const Tick t = bullet.emission_time;
  const Tick delayed = t + timing.delay_app1;

  if (side == Side::A) {
    const bool delay = rng.next_bit() != 0;
    if (setting == Setting::One)
      return delay ? ScheduledOutput{bit_not(x), delayed} : ScheduledOutput{x, t};
    return delay ? ScheduledOutput{x, delayed} : ScheduledOutput{x, t};
  }
  if (setting == Setting::One) return {x, t};
  // B2: the NOT is unconditional, only the delay is probabilistic.
  const bool delay = rng.next_unit() < p_delay_b2;
  if (delay) return {bit_not(x), delayed};
  return {b2_nodelay_not ? bit_not(x) : x, t};
}

std::pair<Bullet, Bullet> app2_emit(std::int64_t trial_id, Tick period) {
  const InstructionSet set = trial_id % 2 == 0 ? InstructionSet::I : InstructionSet::II;
  const Tick t = trial_id * period;
  return {Bullet{trial_id, t, set}, Bullet{trial_id, t, set}};
}

Bit instruction_value(InstructionSet set, Side side, Setting setting) {
  // Set I:  A1=0, A2=1, B1=0, B2=1.  Set II is its complement.
  const Bit base = setting == Setting::One ? 0 : 1;
  (void)side;  // both sides carry the same values within a set
  return set == InstructionSet::I ? base : bit_not(base);
}

std::vector<EmittedOutput> app2_respond(Side side, Setting setting, const Bullet& bullet,
                                        const TimingModel& timing, DetectorState& state,
                                        double p_b2_rule, RngStream& rng) {
  const auto* set_ptr = std::get_if<InstructionSet>(&bullet.payload);
  if (!set_ptr)
    throw WrongPayloadError("app2_respond: carrier payload is not an instruction set");
  const InstructionSet set = *set_ptr;
  const Tick t = bullet.emission_time;

  std::vector<EmittedOutput> out;
  // Stored bits from the previous carrier are released first.
  for (const auto& stored : state.pending)
    out.push_back({stored.outcome, t, stored.setting, stored.bullet_id});
  state.pending.clear();

  const Bit v = instruction_value(set, side, setting);
  const bool is_b2 = side == Side::B && setting == Setting::Two;
  const bool b2_as_written = !is_b2 || p_b2_rule >= 1.0 || rng.next_unit() < p_b2_rule;

  if (is_b2 && !b2_as_written) {
    out.push_back({v, t, setting, bullet.id});
    return out;
  }

  if (set == InstructionSet::I) {
    // A1, B2 immediate; A2, B1 stored until the next arrival.
    const bool immediate = (side == Side::A) == (setting == Setting::One);
    if (immediate) out.push_back({v, t, setting, bullet.id});
    else state.pending.push_back({v, setting, bullet.id});
  } else {
    // A1 immediate; A2, B2 slightly delayed; B1 stored.
    if (side == Side::A) {
      if (setting == Setting::One) out.push_back({v, t, setting, bullet.id});
      else out.push_back({v, t + timing.delay_app2, setting, bullet.id});
    } else {
      if (setting == Setting::One) state.pending.push_back({v, setting, bullet.id});
      else out.push_back({v, t + timing.delay_app2, setting, bullet.id});
    }
  }
  return out;
}

std::vector<EmittedOutput> app2_flush(DetectorState& state, Tick flush_time) {
  std::vector<EmittedOutput> out;
  for (const auto& stored : state.pending)
    out.push_back({stored.outcome, flush_time, stored.setting, stored.bullet_id});
  state.pending.clear();
  return out;
}

ScheduledOutput table_respond(Side side, Setting setting, const Bullet& bullet) {
  const auto* table = std::get_if<Table>(&bullet.payload);
  if (!table) throw WrongPayloadError("table_respond: carrier payload is not a table");
  return {table->entry(side, setting), bullet.emission_time};
}

std::vector<DetectionRecord> apply_noise(std::vector<DetectionRecord> records, Side side,
                                         const NoiseParams& params, const TimingModel& timing,
                                         std::int64_t n_trials,
                                         const std::vector<Setting>& settings_by_trial,
                                         const Substreams& streams) {
  if (!params.any()) return records;

  std::vector<DetectionRecord> out;
  out.reserve(records.size());
  RngStream rec_rng = streams.stream(StreamPurpose::NoiseRecord, side);
  for (auto rec : records) {
    const double u_drop = rec_rng.next_unit();
    const double u_flip = rec_rng.next_unit();
    if (u_drop < params.drop_prob) continue;
    if (u_flip < params.flip_prob) rec.outcome = bit_not(rec.outcome);
    out.push_back(rec);
  }

  if (params.dark_rate > 0.0) {
    RngStream dark_rng = streams.stream(StreamPurpose::DarkCount, side);
    const std::int64_t count = sample_poisson(dark_rng, params.dark_rate *
                                                            static_cast<double>(n_trials));
    const Tick horizon =
        n_trials * timing.period + std::max(timing.delay_app1, timing.delay_app2);
    for (std::int64_t k = 0; k < count; ++k) {
      const Tick t =
          static_cast<Tick>(dark_rng.next_below(static_cast<std::uint64_t>(horizon) + 1));
      const Bit outcome = dark_rng.next_bit();
      std::int64_t trial = t / timing.period;
      if (trial >= n_trials) trial = n_trials - 1;
      const Setting setting = settings_by_trial[static_cast<std::size_t>(trial)];
      out.push_back({side, setting, outcome, t, kDarkBulletId});
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) {
                     return a.time < b.time;
                   });
  return out;
}

}  // namespace bellsim
