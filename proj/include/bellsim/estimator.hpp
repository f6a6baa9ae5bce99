#pragma once

#include <vector>

#include "bellsim/coincidence.hpp"
#include "bellsim/core.hpp"

namespace bellsim {

/// CHSH estimate from one tally. E is the expectation of the product of
/// the two ±1-encoded outcomes per combo, S the CHSH combination
/// E(1,1) + E(1,2) + E(2,1) - E(2,2). Standard errors come from
/// independent binomial propagation per combo.
struct ChshEstimate {
  double e[2][2]{};
  double stderr_e[2][2]{};
  std::int64_t n_pairs[2][2]{};
  std::int64_t n_singles = 0;
  double s = 0.0;
  double s_abs = 0.0;
  double stderr_s = 0.0;

  /// singles / (singles + pairs): a pair counts as one event, a single
  /// as one event.
  double singles_fraction() const;
};

/// Throws EmptyComboError naming the first combo with no pairs.
ChshEstimate estimate(const ComboTally& t);

struct SweepPoint {
  double phi = 0.0;              ///< radians
  double s_coinc = 0.0;          ///< |S| from coincidence matching
  double s_event = 0.0;          ///< |S| from ground-truth pairing
  double stderr_s = 0.0;         ///< standard error of the coincidence S
  double singles_fraction = 0.0;
  double s_qm = 0.0;             ///< quantum prediction at this phi
};

/// One full run per grid angle with the config's pmap applied; returns the
/// comparison table of coincidence |S|, event |S|, and the quantum curve.
std::vector<SweepPoint> sweep(const SimConfig& base, const std::vector<double>& phi_grid);

}  // namespace bellsim
