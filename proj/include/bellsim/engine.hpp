#pragma once

#include <utility>
#include <vector>

#include "bellsim/core.hpp"

namespace bellsim {

/// Everything one simulation produces: the two time-sorted record streams
/// (noise already applied) and the ground-truth setting pair per trial.
/// run() is a pure function of the config, so identical configs give
/// bit-identical RunOutputs.
struct RunOutput {
  std::vector<DetectionRecord> left;
  std::vector<DetectionRecord> right;
  std::vector<std::pair<Setting, Setting>> ground_truth;  ///< index = bullet id
  SimConfig config;
};

/// Runs n_trials trials: draws each side's setting independently and
/// uniformly from {1, 2}, emits carriers, applies the strategy's detector
/// rules, then noise, and returns the sorted streams.
RunOutput run(const SimConfig& cfg);

/// As run(), but with prescribed setting sequences instead of sampled
/// ones (locality permutation tests, scripted replays). Both lists must
/// have length n_trials.
RunOutput replay_settings(const SimConfig& cfg, const std::vector<Setting>& left_settings,
                          const std::vector<Setting>& right_settings);

}  // namespace bellsim
