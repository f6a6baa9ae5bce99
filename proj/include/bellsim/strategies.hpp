#pragma once

#include <utility>
#include <vector>

#include "bellsim/core.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

/// One scheduled detector output: what bit leaves the detector and when.
struct ScheduledOutput {
  Bit outcome = 0;
  Tick emit_time = 0;
};

/// Apparatus-1 source: the left carrier holds a uniformly drawn bit a,
/// the right carrier holds its complement. Shared id and emission time.
std::pair<Bullet, Bullet> app1_emit(std::int64_t trial_id, Tick period, RngStream& source);

/// Apparatus-1 detector rules. Everything here is side-local: the decision
/// sees only (side, setting, carried bit, side-local randomness).
///
///   A1: fair branch - the carried bit at t, or its NOT at t + delay.
///   A2: fair branch - the carried bit at t, or the same bit at t + delay.
///   B1: the carried bit at t, always.
///   B2: the NOT of the carried bit; with probability p_delay_b2 it is
///       emitted at t + delay, otherwise at t. Only the delay is
///       probabilistic; the NOT stays on both branches unless
///       b2_nodelay_not is false, in which case the non-delayed branch
///       emits the bit unchanged.
ScheduledOutput app1_respond(Side side, Setting setting, const Bullet& bullet,
                             const TimingModel& timing, double p_delay_b2,
                             bool b2_nodelay_not, RngStream& rng);

/// Apparatus-2 source: instruction set I on even trials, II on odd.
std::pair<Bullet, Bullet> app2_emit(std::int64_t trial_id, Tick period);

/// Predetermined outcome of an instruction set for one detector position.
/// Set I:  A1=0, A2=1, B1=0, B2=1.   Set II: A1=1, A2=0, B1=1, B2=0.
Bit instruction_value(InstructionSet set, Side side, Setting setting);

/// A bit a detector has stored for release when the next carrier arrives.
/// It keeps the setting and trial that stored it; the released record is
/// labeled with both.
struct StoredInstruction {
  Bit outcome = 0;
  Setting setting = Setting::One;
  std::int64_t bullet_id = 0;
};

/// Side-local detector memory for Apparatus 2. Holds at most one stored
/// instruction between carriers.
struct DetectorState {
  std::vector<StoredInstruction> pending;
};

/// A detector output together with the setting and trial that produced it
/// (needed because stored bits are released under a later carrier).
struct EmittedOutput {
  Bit outcome = 0;
  Tick emit_time = 0;
  Setting setting = Setting::One;
  std::int64_t bullet_id = 0;
};

/// Apparatus-2 detector rules, processed at carrier arrival. Any stored
/// bit from the previous carrier is released first (at the arrival tick),
/// then the new instruction is emitted, delayed, or stored:
///
///   set I:  A1, B2 immediate at t; A2, B1 stored, released at the next
///           arrival (t + period).
///   set II: A1 immediate at t; A2, B2 emitted at t + delay; B1 stored,
///           released at t + period.
///
/// p_b2_rule is the probability that B2 executes its rule as written;
/// otherwise B2 emits its instruction bit immediately at t with no
/// delay or storage.
std::vector<EmittedOutput> app2_respond(Side side, Setting setting, const Bullet& bullet,
                                        const TimingModel& timing, DetectorState& state,
                                        double p_b2_rule, RngStream& rng);

/// Releases whatever is still stored after the last carrier, at
/// flush_time (= last emission + period), so every carrier ends up with
/// exactly one output per side.
std::vector<EmittedOutput> app2_flush(DetectorState& state, Tick flush_time);

/// Deterministic table strategy: the table entry for (side, setting),
/// emitted promptly at the arrival tick.
ScheduledOutput table_respond(Side side, Setting setting, const Bullet& bullet);

/// Post-hoc noise on one side's time-sorted stream: independent drops and
/// bit flips per record, plus Poisson(dark_rate * n_trials) dark records
/// at uniform ticks with uniform outcomes, labeled with the setting the
/// detector holds at the insertion tick and bullet_id = kDarkBulletId.
/// Output is re-sorted by time. With all-zero params the stream is
/// returned unchanged.
std::vector<DetectionRecord> apply_noise(std::vector<DetectionRecord> records, Side side,
                                         const NoiseParams& params, const TimingModel& timing,
                                         std::int64_t n_trials,
                                         const std::vector<Setting>& settings_by_trial,
                                         const Substreams& streams);

}  // namespace bellsim
