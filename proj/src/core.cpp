#include "bellsim/core.hpp"

#include <cmath>
#include <sstream>

namespace bellsim {

const char* to_string(Side s) { return s == Side::A ? "A" : "B"; }

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::App1: return "app1";
    case Strategy::App2: return "app2";
    case Strategy::Table: return "table";
    case Strategy::QmReference: return "qm";
  }
  return "?";
}

const char* to_string(PmapMode m) {
  switch (m) {
    case PmapMode::Off: return "off";
    case PmapMode::Fixed: return "fixed";
    case PmapMode::Sine: return "sine";
    case PmapMode::Power: return "power";
    case PmapMode::Calibrated: return "calibrated";
  }
  return "?";
}

Table Table::from_index(int index) {
  Table t;
  t.a1 = static_cast<Bit>((index >> 3) & 1);
  t.a2 = static_cast<Bit>((index >> 2) & 1);
  t.b1 = static_cast<Bit>((index >> 1) & 1);
  t.b2 = static_cast<Bit>(index & 1);
  return t;
}

int Table::index() const { return (a1 << 3) | (a2 << 2) | (b1 << 1) | b2; }

Bit Table::entry(Side side, Setting setting) const {
  if (side == Side::A) return setting == Setting::One ? a1 : a2;
  return setting == Setting::One ? b1 : b2;
}

namespace {

bool probability_ok(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> errs;
  auto add = [&errs](const std::string& msg) { errs.push_back(msg); };
  std::ostringstream os;

  const TimingModel& t = cfg.timing;
  if (t.period <= 0) {
    os.str("");
    os << "InvalidTiming: period must be positive (period=" << t.period << ")";
    add(os.str());
  }
  if (!(t.window > 0 && t.window < t.delay_app1)) {
    os.str("");
    os << "InvalidTiming: window must satisfy 0 < window < delay_app1 (window=" << t.window
       << ", delay_app1=" << t.delay_app1 << ")";
    add(os.str());
  }
  if (!(t.window > 0 && t.window < t.delay_app2)) {
    os.str("");
    os << "InvalidTiming: window must satisfy 0 < window < delay_app2 (window=" << t.window
       << ", delay_app2=" << t.delay_app2 << ")";
    add(os.str());
  }
  if (!cfg.allow_cross_slot) {
    if (!(t.delay_app1 + t.window < t.period)) {
      os.str("");
      os << "InvalidTiming: delay_app1 + window must be < period (" << t.delay_app1 << " + "
         << t.window << " vs " << t.period << "); pass allow_cross_slot to explore";
      add(os.str());
    }
    if (!(t.delay_app2 + t.window < t.period)) {
      os.str("");
      os << "InvalidTiming: delay_app2 + window must be < period (" << t.delay_app2 << " + "
         << t.window << " vs " << t.period << "); pass allow_cross_slot to explore";
      add(os.str());
    }
  }

  if (cfg.n_trials < 1) {
    os.str("");
    os << "InvalidConfig: n_trials must be >= 1 (n_trials=" << cfg.n_trials << ")";
    add(os.str());
  }
  if (!(std::isfinite(cfg.phi) && cfg.phi >= 0.0 && cfg.phi <= M_PI_2 + 1e-12)) {
    os.str("");
    os << "InvalidConfig: phi must lie in [0, pi/2] (phi=" << cfg.phi << ")";
    add(os.str());
  }
  if (cfg.strategy == Strategy::Table && (cfg.table_index < 0 || cfg.table_index > 15)) {
    os.str("");
    os << "InvalidConfig: table index must lie in [0, 15] (index=" << cfg.table_index << ")";
    add(os.str());
  }

  switch (cfg.pmap) {
    case PmapMode::Off:
      break;
    case PmapMode::Fixed:
      if (cfg.strategy != Strategy::App1 && cfg.strategy != Strategy::App2)
        add("InvalidMode: pmap 'fixed' requires strategy app1 or app2");
      if (!probability_ok(cfg.p_fixed)) add("InvalidProbability: p must lie in [0, 1]");
      break;
    case PmapMode::Sine:
      if (cfg.strategy != Strategy::App1) add("InvalidMode: pmap 'sine' requires strategy app1");
      break;
    case PmapMode::Calibrated:
      if (cfg.strategy != Strategy::App1)
        add("InvalidMode: pmap 'calibrated' requires strategy app1");
      break;
    case PmapMode::Power:
      if (cfg.strategy != Strategy::App2) add("InvalidMode: pmap 'power' requires strategy app2");
      break;
  }

  if (!(std::isfinite(cfg.noise.dark_rate) && cfg.noise.dark_rate >= 0.0))
    add("InvalidProbability: noise dark_rate must be >= 0");
  if (!probability_ok(cfg.noise.drop_prob))
    add("InvalidProbability: noise drop_prob must lie in [0, 1]");
  if (!probability_ok(cfg.noise.flip_prob))
    add("InvalidProbability: noise flip_prob must lie in [0, 1]");

  return errs;
}

void require_valid(const SimConfig& cfg) {
  const auto errs = validate_config(cfg);
  if (errs.empty()) return;
  std::string joined;
  for (const auto& e : errs) {
    if (!joined.empty()) joined += "; ";
    joined += e;
  }
  throw ConfigError(joined);
}

}  // namespace bellsim
