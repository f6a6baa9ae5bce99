#include "bellsim/coincidence.hpp"

#include <sstream>
#include <unordered_map>

namespace bellsim {

namespace {

void check_sorted(const std::vector<DetectionRecord>& records, const char* which) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].time < records[i - 1].time) {
      std::ostringstream os;
      os << "UnsortedInput: " << which << " stream out of order at index " << i;
      throw UnsortedInputError(os.str());
    }
  }
}

}  // namespace

MatchResult match(const std::vector<DetectionRecord>& left,
                  const std::vector<DetectionRecord>& right, Tick window) {
  check_sorted(left, "left");
  check_sorted(right, "right");

  MatchResult result;
  result.window = window;
  std::size_t i = 0, j = 0;
  while (i < left.size() && j < right.size()) {
    const Tick dt = left[i].time - right[j].time;
    if (dt < -window) {
      result.singles.push_back(left[i++]);
    } else if (dt > window) {
      result.singles.push_back(right[j++]);
    } else {
      result.pairs.push_back({left[i++], right[j++]});
    }
  }
  for (; i < left.size(); ++i) result.singles.push_back(left[i]);
  for (; j < right.size(); ++j) result.singles.push_back(right[j]);
  return result;
}

std::int64_t ComboTally::pairs_total() const {
  std::int64_t total = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) total += n_same[a][b] + n_opposite[a][b];
  return total;
}

std::int64_t ComboTally::records_total() const { return pairs_total() * 2 + n_singles; }

ComboTally tally(const MatchResult& m) {
  ComboTally t;
  for (const auto& p : m.pairs) {
    const DetectionRecord* a = &p.left;
    const DetectionRecord* b = &p.right;
    if (a->side == Side::B && b->side == Side::A) std::swap(a, b);
    const int ia = setting_index(a->setting);
    const int ib = setting_index(b->setting);
    if (a->outcome == b->outcome) ++t.n_same[ia][ib];
    else ++t.n_opposite[ia][ib];
  }
  t.n_singles = static_cast<std::int64_t>(m.singles.size());
  return t;
}

ComboTally pair_by_ground_truth(const std::vector<DetectionRecord>& left,
                                const std::vector<DetectionRecord>& right) {
  std::unordered_map<std::int64_t, const DetectionRecord*> right_by_id;
  right_by_id.reserve(right.size());
  for (const auto& rec : right) {
    if (rec.bullet_id < 0) continue;  // dark counts carry no ground truth
    if (!right_by_id.emplace(rec.bullet_id, &rec).second) {
      std::ostringstream os;
      os << "duplicate bullet id " << rec.bullet_id << " on right side";
      throw DataError(os.str());
    }
  }

  ComboTally t;
  std::size_t matched = 0;
  for (const auto& rec : left) {
    if (rec.bullet_id < 0) continue;
    const auto it = right_by_id.find(rec.bullet_id);
    if (it == right_by_id.end()) {
      std::ostringstream os;
      os << "MissingPartner: bullet " << rec.bullet_id << " has no right-side record";
      throw MissingPartnerError(os.str());
    }
    const DetectionRecord& partner = *it->second;
    const int ia = setting_index(rec.setting);
    const int ib = setting_index(partner.setting);
    if (rec.outcome == partner.outcome) ++t.n_same[ia][ib];
    else ++t.n_opposite[ia][ib];
    ++matched;
  }
  if (matched != right_by_id.size()) {
    std::ostringstream os;
    os << "MissingPartner: " << static_cast<long long>(right_by_id.size()) -
                                    static_cast<long long>(matched)
       << " right-side record(s) have no left-side partner";
    throw MissingPartnerError(os.str());
  }
  return t;
}

}  // namespace bellsim
