#pragma once

#include <cstdint>
#include <vector>

#include "bellsim/core.hpp"

namespace bellsim {

struct MatchedPair {
  DetectionRecord left;
  DetectionRecord right;
};

/// Partition of the two input streams into coincidence pairs and singles.
/// Every input record lands in exactly one pair or in singles.
struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<DetectionRecord> singles;
  Tick window = 0;
};

/// The coincidence monitor. Greedy sweep over both time-sorted streams:
/// whenever the two stream fronts are within the window they are paired,
/// otherwise the earlier front becomes a single. Because the streams are
/// sorted, the front of the other stream is always the nearest-in-time
/// candidate for the earliest unpaired record, with exact ties resolved
/// by stream order (stored-before-immediate at equal ticks), so this
/// greedy rule yields a maximum pairing.
/// Throws UnsortedInputError if either stream is not time-sorted.
MatchResult match(const std::vector<DetectionRecord>& left,
                  const std::vector<DetectionRecord>& right, Tick window);

/// Per setting-combination same/opposite counts. Indices are
/// [A setting][B setting], zero-based.
struct ComboTally {
  std::int64_t n_same[2][2]{};
  std::int64_t n_opposite[2][2]{};
  std::int64_t n_singles = 0;

  std::int64_t pairs_total() const;
  std::int64_t records_total() const;  ///< pairs*2 + singles
};

/// Buckets each matched pair by its (A setting, B setting) combination and
/// whether the outcomes agree; counts singles.
ComboTally tally(const MatchResult& m);

/// Ground-truth pairing: joins the two streams on bullet_id, ignoring
/// timestamps entirely. Dark records (bullet_id < 0) are skipped. Throws
/// MissingPartnerError if a bullet id has a record on only one side.
ComboTally pair_by_ground_truth(const std::vector<DetectionRecord>& left,
                                const std::vector<DetectionRecord>& right);

}  // namespace bellsim
