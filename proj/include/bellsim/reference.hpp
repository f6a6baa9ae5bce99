#pragma once

#include <utility>
#include <vector>

#include "bellsim/core.hpp"
#include "bellsim/rng.hpp"

namespace bellsim::reference {

/// Quantum CHSH prediction for detector angle phi with the two settings of
/// each side 90 degrees apart: S(phi) = 2*cos(2*phi) + 2*sin(2*phi).
/// Peaks at 2*sqrt(2) for phi = pi/8.
double qm_s(double phi);

/// Clamped sinusoidal delay-probability map:
/// p(phi) = clamp01(2*sqrt(2)*sin(2*phi + pi/4) - 2).
double delay_prob_sine(double phi);

/// Clamped power-law delay-probability map:
/// p(phi) = clamp01(2.08 * u^(2/3)) with u = sin(2*phi + pi/4) - pi/4,
/// and 0 whenever u <= 0 (real branch only).
double delay_prob_power(double phi);

/// Calibration map p(phi) = clamp01((qm_s(phi) - 2) / 2). Under the
/// Apparatus-1 coincidence closed form |S| = 2 + 2p this lands exactly on
/// the quantum curve for phi in [0, pi/4].
double delay_prob_calibrated(double phi);

/// The B2 probability a config's pmap mode resolves to. For Apparatus 1
/// this is the delay probability (Off = 0); for Apparatus 2 it is the
/// probability that the B2 instruction rule executes as written (Off = 1).
double b2_probability(const SimConfig& cfg);

/// Exact per-combo expectations computed by exhaustive weighted
/// enumeration, independent of the simulation path. s_* are signed;
/// indices are [A setting][B setting], zero-based.
struct OracleResult {
  double e_coinc[2][2]{};
  double e_event[2][2]{};
  double s_coinc = 0.0;
  double s_event = 0.0;
  double singles_fraction = 0.0;  ///< singles / (singles + pairs), event counting
};

/// Apparatus-1 oracle: enumerates source bit x A-side branch x B2 branch x
/// setting combo with their probabilities and applies the slot-matching
/// semantics symbolically. Valid whenever the timing slots are separated,
/// i.e. for every config that passes validation.
OracleResult oracle_app1(double p_delay, bool b2_nodelay_not = true);

/// Apparatus-2 oracle: replays every one of the 4^n_bullets joint setting
/// sequences through an independent implementation of the storage/delay
/// rules and an exact same-tick matcher, averaging tallies exactly.
/// n_bullets must lie in [2, 8] (enumeration cap).
OracleResult oracle_app2(int n_bullets, const TimingModel& timing = TimingModel{});

/// Independent replay of the Apparatus-2 rules for one prescribed setting
/// sequence; returns the (left, right) record streams including the final
/// flush release. Shared by oracle_app2 and the engine cross-check tests.
std::pair<std::vector<DetectionRecord>, std::vector<DetectionRecord>>
replay_app2(const std::vector<Setting>& left_settings,
            const std::vector<Setting>& right_settings,
            const TimingModel& timing = TimingModel{});

/// Per-combo expectation targeted by the reference joint sampler:
/// E(1,1) = E(2,1) = cos(2*phi), E(1,2) = sin(2*phi), E(2,2) = -sin(2*phi),
/// which sums to qm_s(phi) under the CHSH combination.
double qm_combo_e(double phi, Setting a, Setting b);

/// Joint (non-local by construction) outcome sampler whose per-combo
/// product expectation equals qm_combo_e and whose marginals are exactly
/// one half. Reference pipeline validation only; never an LHV strategy.
std::pair<Bit, Bit> qm_sample(double phi, Setting a, Setting b, RngStream& rng);

}  // namespace bellsim::reference
