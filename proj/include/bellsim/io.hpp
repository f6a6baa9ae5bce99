#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/coincidence.hpp"
#include "bellsim/core.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/estimator.hpp"

namespace bellsim::io {

/// Event file layout: one JSON object per line. The first line is a header
/// {"config": {...}}; every following line is a record
/// {"side":"A"|"B","setting":1|2,"outcome":0|1,"t":<int>,"bullet":<int>}.
/// bullet = -1 marks dark counts. Records are merged across sides in time
/// order (ties: side A first), preserving each side's stream order.
void write_events_jsonl(std::ostream& os, const RunOutput& out);
void write_events_jsonl(const std::string& path, const RunOutput& out);

struct EventFile {
  std::optional<SimConfig> config;  ///< absent if the file has no header line
  std::vector<DetectionRecord> left;
  std::vector<DetectionRecord> right;
};

/// Parses an event file; throws DataError with the 1-based line number on
/// any malformed line.
EventFile read_events_jsonl(const std::string& path);

/// Pair lines {"pair":{"left":{...},"right":{...}}} followed by single
/// lines {"single":{...}}.
void write_match_jsonl(std::ostream& os, const MatchResult& m);
void write_match_jsonl(const std::string& path, const MatchResult& m);

/// Summary CSV: header
/// basis,E11,E12,E21,E22,S,S_abs,stderr,n_pairs,n_singles
/// and one row per provided basis.
std::string summary_csv(const ChshEstimate* coincidence, const ChshEstimate* event_basis);

/// 4-combo CSV block: combo,n_same,n_opposite (+ singles row).
std::string combo_tally_csv(const ComboTally& t);

/// Sweep CSV with columns phi_deg,S_coinc,S_event,stderr,singles_frac,S_qm.
std::string sweep_csv(const std::vector<SweepPoint>& rows);

std::string config_json(const SimConfig& cfg);
SimConfig config_from_json_text(const std::string& text);

// Token parsing shared by the CLI and the config echo round trip.
std::string strategy_token(const SimConfig& cfg);         // "app1", "table:9", ...
Strategy parse_strategy(const std::string& token, int& table_index);
PmapMode parse_pmap(const std::string& token);
const char* pmap_token(PmapMode m);

/// Angles: a "deg" suffix means degrees ("22.5deg"), bare numbers are
/// radians.
double parse_angle(const std::string& token);

/// Plain-text key=value config file: one pair per line, '#' comments and
/// blank lines allowed. Returns pairs in file order; throws ConfigError
/// with the line number on malformed lines, DataError if unreadable.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path);

}  // namespace bellsim::io
