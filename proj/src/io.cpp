#include "bellsim/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace bellsim::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json record_json(const DetectionRecord& r) {
  return json{{"side", to_string(r.side)},
              {"setting", setting_number(r.setting)},
              {"outcome", static_cast<int>(r.outcome)},
              {"t", r.time},
              {"bullet", r.bullet_id}};
}

json config_as_json(const SimConfig& cfg) {
  json j{{"strategy", strategy_token(cfg)},
         {"n", cfg.n_trials},
         {"phi", cfg.phi},
         {"pmap", pmap_token(cfg.pmap)},
         {"p", cfg.p_fixed},
         {"seed", cfg.seed},
         {"timing",
          {{"period", cfg.timing.period},
           {"delay_app1", cfg.timing.delay_app1},
           {"delay_app2", cfg.timing.delay_app2},
           {"window", cfg.timing.window}}},
         {"noise",
          {{"dark_rate", cfg.noise.dark_rate},
           {"drop_prob", cfg.noise.drop_prob},
           {"flip_prob", cfg.noise.flip_prob}}},
         {"b2_nodelay_not", cfg.b2_nodelay_not},
         {"allow_cross_slot", cfg.allow_cross_slot}};
  return j;
}

DetectionRecord record_from_json(const json& j) {
  DetectionRecord r;
  const std::string side = j.at("side").get<std::string>();
  if (side == "A") r.side = Side::A;
  else if (side == "B") r.side = Side::B;
  else throw DataError("side must be \"A\" or \"B\"");
  const int setting = j.at("setting").get<int>();
  if (setting != 1 && setting != 2) throw DataError("setting must be 1 or 2");
  r.setting = setting_from_number(setting);
  const int outcome = j.at("outcome").get<int>();
  if (outcome != 0 && outcome != 1) throw DataError("outcome must be 0 or 1");
  r.outcome = static_cast<Bit>(outcome);
  r.time = j.at("t").get<Tick>();
  if (r.time < 0) throw DataError("t must be non-negative");
  r.bullet_id = j.at("bullet").get<std::int64_t>();
  if (r.bullet_id < kDarkBulletId) throw DataError("bullet must be >= -1");
  return r;
}

}  // namespace

void write_events_jsonl(std::ostream& os, const RunOutput& out) {
  os << json{{"config", config_as_json(out.config)}}.dump() << '\n';
  // Merge both sorted streams by time, side A first at equal ticks; each
  // side's internal order is preserved so a reader can reconstruct the
  // streams exactly.
  std::size_t i = 0, j = 0;
  while (i < out.left.size() || j < out.right.size()) {
    const bool take_left =
        j >= out.right.size() ||
        (i < out.left.size() && out.left[i].time <= out.right[j].time);
    const DetectionRecord& r = take_left ? out.left[i++] : out.right[j++];
    os << record_json(r).dump() << '\n';
  }
}

void write_events_jsonl(const std::string& path, const RunOutput& out) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open " + path + " for writing");
  write_events_jsonl(f, out);
}

EventFile read_events_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  EventFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      if (line_no == 1 && j.contains("config")) {
        out.config = config_from_json_text(j.at("config").dump());
        continue;
      }
      const DetectionRecord r = record_from_json(j);
      (r.side == Side::A ? out.left : out.right).push_back(r);
    } catch (const DataError& e) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": " << e.what();
      throw DataError(os.str());
    } catch (const json::exception& e) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": " << e.what();
      throw DataError(os.str());
    }
  }
  return out;
}

void write_match_jsonl(std::ostream& os, const MatchResult& m) {
  for (const auto& p : m.pairs)
    os << json{{"pair", {{"left", record_json(p.left)}, {"right", record_json(p.right)}}}}
              .dump()
       << '\n';
  for (const auto& s : m.singles) os << json{{"single", record_json(s)}}.dump() << '\n';
}

void write_match_jsonl(const std::string& path, const MatchResult& m) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open " + path + " for writing");
  write_match_jsonl(f, m);
}

std::string summary_csv(const ChshEstimate* coincidence, const ChshEstimate* event_basis) {
  std::ostringstream os;
  os << "basis,E11,E12,E21,E22,S,S_abs,stderr,n_pairs,n_singles\n";
  const auto row = [&os](const char* name, const ChshEstimate& e) {
    std::int64_t pairs = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) pairs += e.n_pairs[a][b];
    os << name << ',' << fmt(e.e[0][0]) << ',' << fmt(e.e[0][1]) << ',' << fmt(e.e[1][0])
       << ',' << fmt(e.e[1][1]) << ',' << fmt(e.s) << ',' << fmt(e.s_abs) << ','
       << fmt(e.stderr_s) << ',' << pairs << ',' << e.n_singles << '\n';
  };
  if (coincidence) row("coincidence", *coincidence);
  if (event_basis) row("event", *event_basis);
  return os.str();
}

std::string combo_tally_csv(const ComboTally& t) {
  std::ostringstream os;
  os << "combo,n_same,n_opposite\n";
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      os << 'A' << a + 1 << 'B' << b + 1 << ',' << t.n_same[a][b] << ',' << t.n_opposite[a][b]
         << '\n';
  os << "singles," << t.n_singles << ",\n";
  return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& rows) {
  std::ostringstream os;
  os << "phi_deg,S_coinc,S_event,stderr,singles_frac,S_qm\n";
  for (const auto& r : rows)
    os << fmt(r.phi * 180.0 / M_PI) << ',' << fmt(r.s_coinc) << ',' << fmt(r.s_event) << ','
       << fmt(r.stderr_s) << ',' << fmt(r.singles_fraction) << ',' << fmt(r.s_qm) << '\n';
  return os.str();
}

std::string config_json(const SimConfig& cfg) { return config_as_json(cfg).dump(); }

SimConfig config_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  SimConfig cfg;
  int table_index = 0;
  cfg.strategy = parse_strategy(j.at("strategy").get<std::string>(), table_index);
  cfg.table_index = table_index;
  cfg.n_trials = j.at("n").get<std::int64_t>();
  cfg.phi = j.at("phi").get<double>();
  cfg.pmap = parse_pmap(j.at("pmap").get<std::string>());
  cfg.p_fixed = j.at("p").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  const json& t = j.at("timing");
  cfg.timing.period = t.at("period").get<Tick>();
  cfg.timing.delay_app1 = t.at("delay_app1").get<Tick>();
  cfg.timing.delay_app2 = t.at("delay_app2").get<Tick>();
  cfg.timing.window = t.at("window").get<Tick>();
  const json& nz = j.at("noise");
  cfg.noise.dark_rate = nz.at("dark_rate").get<double>();
  cfg.noise.drop_prob = nz.at("drop_prob").get<double>();
  cfg.noise.flip_prob = nz.at("flip_prob").get<double>();
  cfg.b2_nodelay_not = j.at("b2_nodelay_not").get<bool>();
  cfg.allow_cross_slot = j.value("allow_cross_slot", false);
  return cfg;
}

std::string strategy_token(const SimConfig& cfg) {
  if (cfg.strategy == Strategy::Table) return "table:" + std::to_string(cfg.table_index);
  return to_string(cfg.strategy);
}

Strategy parse_strategy(const std::string& token, int& table_index) {
  table_index = 0;
  if (token == "app1") return Strategy::App1;
  if (token == "app2") return Strategy::App2;
  if (token == "qm") return Strategy::QmReference;
  if (token.rfind("table:", 0) == 0) {
    const std::string idx = token.substr(6);
    try {
      std::size_t used = 0;
      table_index = std::stoi(idx, &used);
      if (used != idx.size()) throw std::invalid_argument(idx);
    } catch (const std::exception&) {
      throw ConfigError("InvalidConfig: bad table index in strategy token '" + token + "'");
    }
    return Strategy::Table;
  }
  throw ConfigError("InvalidConfig: unknown strategy '" + token +
                    "' (expected app1, app2, qm, or table:<0..15>)");
}

PmapMode parse_pmap(const std::string& token) {
  if (token == "off") return PmapMode::Off;
  if (token == "fixed") return PmapMode::Fixed;
  if (token == "sine" || token == "paper-eq3" || token == "eq3") return PmapMode::Sine;
  if (token == "power" || token == "paper-eq4" || token == "eq4") return PmapMode::Power;
  if (token == "calibrated") return PmapMode::Calibrated;
  throw ConfigError("InvalidMode: unknown pmap '" + token +
                    "' (expected off, fixed, sine, power, or calibrated)");
}

const char* pmap_token(PmapMode m) { return to_string(m); }

double parse_angle(const std::string& token) {
  std::string text = token;
  bool degrees = false;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  if (text.size() > 3 && text.compare(text.size() - 3, 3, "deg") == 0) {
    degrees = true;
    text.resize(text.size() - 3);
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("InvalidConfig: bad angle '" + token + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw ConfigError("InvalidConfig: bad angle '" + token + "'");
  return degrees ? v * M_PI / 180.0 : v;
}

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file " + path);
  const auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : s.substr(from, to - from + 1);
  };
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("InvalidConfig: " + path + " line " + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw ConfigError("InvalidConfig: " + path + " line " + std::to_string(line_no) +
                        ": empty key");
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

}  // namespace bellsim::io
