#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bellsim {

/// Abstract integer time. All timestamps and delays live on an exact tick
/// grid so coincidence decisions are exact and reproducible.
using Tick = std::int64_t;

/// Binary detector outcome, 0 or 1.
using Bit = std::uint8_t;

/// ±1 encoding used by the correlators: 0 -> +1, 1 -> -1.
inline constexpr int spin(Bit b) { return 1 - 2 * static_cast<int>(b); }

inline constexpr Bit bit_not(Bit b) { return static_cast<Bit>(1u - b); }

enum class Side : std::uint8_t { A = 0, B = 1 };

enum class Setting : std::uint8_t { One = 1, Two = 2 };

inline constexpr int setting_index(Setting s) { return static_cast<int>(s) - 1; }
inline constexpr int setting_number(Setting s) { return static_cast<int>(s); }
inline constexpr Setting setting_from_number(int n) {
  return n == 1 ? Setting::One : Setting::Two;
}

const char* to_string(Side s);

/// Payload of an Apparatus-1 carrier: a single bit.
struct CarriedBit {
  Bit value = 0;
};

/// Payload of an Apparatus-2 carrier: which of the two instruction sets
/// the carrier brings. Carriers alternate I, II, I, II, ... by trial parity.
enum class InstructionSet : std::uint8_t { I = 0, II = 1 };

/// Deterministic lookup table payload: one predetermined outcome per
/// detector setting. There are 16 such tables, indexed by the 4-bit
/// number [A1 A2 B1 B2] (A1 is the most significant bit).
struct Table {
  Bit a1 = 0, a2 = 0, b1 = 0, b2 = 0;

  static Table from_index(int index);
  int index() const;
  Bit entry(Side side, Setting setting) const;
};

using Payload = std::variant<CarriedBit, InstructionSet, Table>;

/// One emitted carrier. The left and right carriers of a trial share the
/// same id and emission time; the payload is what the strategy sends.
struct Bullet {
  std::int64_t id = 0;
  Tick emission_time = 0;
  Payload payload;
};

/// Timing constants, all in ticks.
///
/// Valid configurations keep the three emission slots of a trial
/// (prompt t, delayed t+delay, next trial t+period) pairwise farther
/// apart than the coincidence window, so window matching never has to
/// disambiguate between slots.
struct TimingModel {
  Tick period = 100;      ///< ticks between carrier emissions
  Tick delay_app1 = 30;   ///< Apparatus-1 output delay
  Tick delay_app2 = 30;   ///< Apparatus-2 slight delay
  Tick window = 5;        ///< coincidence half-width |tL - tR| <= window
};

/// bullet_id of inserted dark counts; excluded from ground-truth pairing.
inline constexpr std::int64_t kDarkBulletId = -1;

/// The atomic unit flowing to analysis. `setting` is the setting that
/// produced the output (the setting at carrier arrival), even when the
/// output itself is emitted later.
struct DetectionRecord {
  Side side = Side::A;
  Setting setting = Setting::One;
  Bit outcome = 0;
  Tick time = 0;
  std::int64_t bullet_id = 0;

  bool operator==(const DetectionRecord&) const = default;
};

struct NoiseParams {
  double dark_rate = 0.0;  ///< expected dark counts per side per trial
  double drop_prob = 0.0;  ///< probability a record is deleted
  double flip_prob = 0.0;  ///< probability an outcome bit is inverted

  bool any() const { return dark_rate > 0.0 || drop_prob > 0.0 || flip_prob > 0.0; }
};

enum class Strategy : std::uint8_t { App1, App2, Table, QmReference };

/// How the probability applied to detector B2 is chosen.
///   Off        - Apparatus 1: never delay (p = 0); Apparatus 2: rules as written.
///   Fixed      - use p_fixed directly.
///   Sine       - clamped sinusoid p(phi) = 2*sqrt(2)*sin(2phi + pi/4) - 2.
///   Power      - clamped power law p(phi) = 2.08*(sin(2phi + pi/4) - pi/4)^(2/3).
///   Calibrated - p(phi) = (qm_s(phi) - 2)/2, which makes the Apparatus-1
///                coincidence value 2+2p land exactly on the quantum curve.
enum class PmapMode : std::uint8_t { Off, Fixed, Sine, Power, Calibrated };

const char* to_string(Strategy s);
const char* to_string(PmapMode m);

struct SimConfig {
  Strategy strategy = Strategy::App1;
  int table_index = 0;        ///< Strategy::Table only; bits [A1 A2 B1 B2]
  std::int64_t n_trials = 1;
  TimingModel timing;
  double phi = 0.0;           ///< detector angle, radians, in [0, pi/2]
  PmapMode pmap = PmapMode::Off;
  double p_fixed = 0.0;       ///< PmapMode::Fixed value, in [0, 1]
  std::uint64_t seed = 12345;
  NoiseParams noise;
  bool b2_nodelay_not = true;     ///< Apparatus 1: non-delayed B2 branch keeps the NOT
  bool allow_cross_slot = false;  ///< relax slot-separation checks (exploratory)
};

/// Returns every violated constraint, one diagnostic per violation;
/// empty means the config is valid.
std::vector<std::string> validate_config(const SimConfig& cfg);

/// Throws ConfigError listing all violations unless the config is valid.
void require_valid(const SimConfig& cfg);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WrongPayloadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsortedInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyComboError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingPartnerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LengthMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bellsim
