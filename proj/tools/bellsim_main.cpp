// bellsim: event-by-event CHSH simulator with coincidence-window analysis.
//
// Subcommands:
//   run       simulate one configuration, write events + summary
//   sweep     scan the detector angle and tabulate |S| vs the quantum curve
//   analyze   re-analyze a stored event file (window matching only)
//   oracle    print the closed-form/enumeration reference tables
//   selftest  run the oracle-vs-simulation invariant suite
//
// Exit codes: 0 ok, 1 selftest failure, 2 config error, 3 data error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bellsim/coincidence.hpp"
#include "bellsim/core.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/estimator.hpp"
#include "bellsim/io.hpp"
#include "bellsim/reference.hpp"
#include "bellsim/selftest.hpp"

namespace {

using namespace bellsim;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BELLSIM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric BELLSIM_SEED\n";
    }
  }
  return 12345;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("InvalidConfig: expected a boolean, got '" + v + "'");
}

struct ConfigFlags {
  std::string strategy = "app1";
  std::int64_t n = 100000;
  std::string phi = "0";
  std::string pmap = "off";
  double p = 0.0;
  std::uint64_t seed = default_seed();
  Tick period = 100;
  Tick delay_app1 = 30;
  Tick delay_app2 = 30;
  Tick window = 5;
  double noise_dark = 0.0;
  double noise_drop = 0.0;
  double noise_flip = 0.0;
  bool b2_nodelay_not = true;
  bool allow_cross_slot = false;
  std::string config_path;

  void add_to(CLI::App* cmd, bool with_phi) {
    cmd->add_option("--strategy", strategy,
                    "Strategy: app1, app2, qm, or table:<0..15> (bits [A1 A2 B1 B2])")
        ->capture_default_str();
    cmd->add_option("--n", n, "Trials per run")->capture_default_str();
    if (with_phi)
      cmd->add_option("--phi", phi, "Detector angle; bare radians or e.g. 22.5deg")
          ->capture_default_str();
    cmd->add_option("--pmap", pmap,
                    "B2 probability map: off, fixed, sine, power, calibrated")
        ->capture_default_str();
    cmd->add_option("--p", p, "Probability for --pmap fixed")->capture_default_str();
    cmd->add_option("--seed", seed, "Root RNG seed (default from BELLSIM_SEED if set)")
        ->capture_default_str();
    cmd->add_option("--period", period, "Ticks between emissions")->capture_default_str();
    cmd->add_option("--delay-app1", delay_app1, "Apparatus-1 output delay, ticks")
        ->capture_default_str();
    cmd->add_option("--delay-app2", delay_app2, "Apparatus-2 slight delay, ticks")
        ->capture_default_str();
    cmd->add_option("--window", window, "Coincidence half-width, ticks")
        ->capture_default_str();
    cmd->add_option("--noise-dark", noise_dark, "Expected dark counts per side per trial")
        ->capture_default_str();
    cmd->add_option("--noise-drop", noise_drop, "Per-record drop probability")
        ->capture_default_str();
    cmd->add_option("--noise-flip", noise_flip, "Per-record outcome flip probability")
        ->capture_default_str();
    cmd->add_option("--b2-nodelay-not", b2_nodelay_not,
                    "Apparatus 1: non-delayed B2 branch keeps the NOT (default true)")
        ->capture_default_str();
    cmd->add_flag("--allow-cross-slot", allow_cross_slot,
                  "Relax the slot-separation timing checks (exploratory)");
    cmd->add_option("--config", config_path,
                    "Read key=value defaults from a file (flags win)");
  }

  /// Applies key=value pairs from --config for every flag not given on the
  /// command line. Command-line flags always win.
  void apply_file(const CLI::App* cmd) {
    if (config_path.empty()) return;
    std::vector<std::pair<std::string, std::string>> pairs;
    try {
      pairs = io::read_kv_file(config_path);
    } catch (const DataError& e) {
      throw ConfigError(std::string("InvalidConfig: ") + e.what());
    }
    const auto given = [cmd](const std::string& flag) {
      const CLI::Option* opt = cmd->get_option_no_throw(flag);
      return opt != nullptr && opt->count() > 0;
    };
    for (const auto& [key, value] : pairs) {
      if (given("--" + key)) continue;
      try {
        if (key == "strategy") strategy = value;
        else if (key == "pmap") pmap = value;
        else if (key == "phi") {
          if (cmd->get_option_no_throw("--phi")) phi = value;
          else std::cerr << "warning: ignoring 'phi' from config (this command scans phi)\n";
        }
        else if (key == "n") n = std::stoll(value);
        else if (key == "p") p = std::stod(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "period") period = std::stoll(value);
        else if (key == "delay-app1") delay_app1 = std::stoll(value);
        else if (key == "delay-app2") delay_app2 = std::stoll(value);
        else if (key == "window") window = std::stoll(value);
        else if (key == "noise-dark") noise_dark = std::stod(value);
        else if (key == "noise-drop") noise_drop = std::stod(value);
        else if (key == "noise-flip") noise_flip = std::stod(value);
        else if (key == "b2-nodelay-not") b2_nodelay_not = parse_bool(value);
        else if (key == "allow-cross-slot") allow_cross_slot = parse_bool(value);
        else throw ConfigError("InvalidConfig: unknown config key '" + key + "'");
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        throw ConfigError("InvalidConfig: bad value '" + value + "' for config key '" + key +
                          "'");
      }
    }
  }

  SimConfig to_config() const {
    SimConfig cfg;
    cfg.strategy = io::parse_strategy(strategy, cfg.table_index);
    cfg.n_trials = n;
    cfg.phi = io::parse_angle(phi);
    cfg.pmap = io::parse_pmap(pmap);
    cfg.p_fixed = p;
    cfg.seed = seed;
    cfg.timing = {period, delay_app1, delay_app2, window};
    cfg.noise = {noise_dark, noise_drop, noise_flip};
    cfg.b2_nodelay_not = b2_nodelay_not;
    cfg.allow_cross_slot = allow_cross_slot;
    return cfg;
  }
};

int report_config_errors(const std::vector<std::string>& errs) {
  for (const auto& e : errs) std::cerr << "config error: " << e << '\n';
  return 2;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f << text;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else write_text(path, text);
}

std::optional<ChshEstimate> event_estimate_or_warn(const RunOutput& out) {
  const bool any_real = [&] {
    for (const auto& r : out.left)
      if (r.bullet_id >= 0) return true;
    return false;
  }();
  if (!any_real) {
    std::cerr << "note: no ground-truth ids in the data; event-basis estimate skipped\n";
    return std::nullopt;
  }
  try {
    return estimate(pair_by_ground_truth(out.left, out.right));
  } catch (const MissingPartnerError& e) {
    std::cerr << "note: event-basis estimate unavailable (" << e.what() << ")\n";
  } catch (const EmptyComboError& e) {
    std::cerr << "note: event-basis estimate unavailable (" << e.what() << ")\n";
  }
  return std::nullopt;
}

int do_run(const ConfigFlags& flags, const std::string& out_path,
           const std::string& summary_path, const std::string& tally_path) {
  const SimConfig cfg = flags.to_config();
  if (const auto errs = validate_config(cfg); !errs.empty()) return report_config_errors(errs);

  const RunOutput out = run(cfg);
  const ComboTally coinc_tally = tally(match(out.left, out.right, cfg.timing.window));
  const ChshEstimate coinc = estimate(coinc_tally);
  const auto event = event_estimate_or_warn(out);

  if (!out_path.empty()) io::write_events_jsonl(out_path, out);
  if (!tally_path.empty()) write_text(tally_path, io::combo_tally_csv(coinc_tally));
  emit(summary_path, io::summary_csv(&coinc, event ? &*event : nullptr));
  return 0;
}

int do_sweep(const ConfigFlags& flags, const std::string& phi_min, const std::string& phi_max,
             int steps, const std::string& out_path) {
  SimConfig cfg = flags.to_config();
  if (steps < 1) return report_config_errors({"InvalidConfig: steps must be >= 1"});
  const double lo = io::parse_angle(phi_min);
  const double hi = io::parse_angle(phi_max);
  if (hi < lo) return report_config_errors({"InvalidConfig: phi-max must be >= phi-min"});
  cfg.phi = lo;
  if (const auto errs = validate_config(cfg); !errs.empty()) return report_config_errors(errs);
  if (hi > M_PI / 4.0 + 1e-9)
    std::cerr << "warning: sweeping past 45deg, where the sine/calibrated maps clamp to 0\n";

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    grid.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(steps - 1));
  const auto rows = sweep(cfg, grid);
  emit(out_path, io::sweep_csv(rows));
  return 0;
}

int do_analyze(const std::string& in_path, std::optional<Tick> window,
               const std::string& scan_spec, const std::string& matches_path,
               const std::string& summary_path, const std::string& tally_path) {
  const io::EventFile file = io::read_events_jsonl(in_path);

  Tick w = 0;
  if (window) w = *window;
  else if (file.config) w = file.config->timing.window;
  else return report_config_errors({"InvalidConfig: file has no header; pass --window"});

  if (!scan_spec.empty()) {
    std::ostringstream os;
    os << "window,S_abs,stderr,n_pairs,n_singles,singles_frac\n";
    std::stringstream ss(scan_spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      Tick wk = 0;
      try {
        wk = static_cast<Tick>(std::stoll(tok));
      } catch (const std::exception&) {
        return report_config_errors({"InvalidConfig: bad window list entry '" + tok + "'"});
      }
      const ChshEstimate est = estimate(tally(match(file.left, file.right, wk)));
      std::int64_t pairs = 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) pairs += est.n_pairs[a][b];
      char buf[160];
      std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g,%lld,%lld,%.10g\n",
                    static_cast<long long>(wk), est.s_abs, est.stderr_s,
                    static_cast<long long>(pairs), static_cast<long long>(est.n_singles),
                    est.singles_fraction());
      os << buf;
    }
    emit(summary_path, os.str());
    return 0;
  }

  const MatchResult m = match(file.left, file.right, w);
  const ComboTally coinc_tally = tally(m);
  const ChshEstimate coinc = estimate(coinc_tally);
  RunOutput view;
  view.left = file.left;
  view.right = file.right;
  const auto event = event_estimate_or_warn(view);

  if (!matches_path.empty()) io::write_match_jsonl(matches_path, m);
  if (!tally_path.empty()) write_text(tally_path, io::combo_tally_csv(coinc_tally));
  emit(summary_path, io::summary_csv(&coinc, event ? &*event : nullptr));
  return 0;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int do_oracle(const std::string& which, int steps, int bullets, const std::string& phi_min,
              const std::string& phi_max, const std::string& out_path) {
  std::ostringstream os;
  if (which == "app1") {
    os << "p,E11_coinc,E12_coinc,E21_coinc,E22_coinc,S_abs_coinc,S_abs_event,singles_frac\n";
    for (int i = 0; i < steps; ++i) {
      const double p =
          steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
      const auto r = reference::oracle_app1(p);
      os << fmt_num(p) << ',' << fmt_num(r.e_coinc[0][0]) << ',' << fmt_num(r.e_coinc[0][1])
         << ',' << fmt_num(r.e_coinc[1][0]) << ',' << fmt_num(r.e_coinc[1][1]) << ','
         << fmt_num(std::fabs(r.s_coinc)) << ',' << fmt_num(std::fabs(r.s_event)) << ','
         << fmt_num(r.singles_fraction) << '\n';
    }
  } else if (which == "app2") {
    if (bullets < 2 || bullets > 8)
      return report_config_errors({"InvalidConfig: bullets must lie in [2, 8]"});
    os << "bullets,E11_coinc,E12_coinc,E21_coinc,E22_coinc,S_abs_coinc,S_abs_event,"
          "singles_frac\n";
    for (int L = 2; L <= bullets; ++L) {
      const auto r = reference::oracle_app2(L);
      os << L << ',' << fmt_num(r.e_coinc[0][0]) << ',' << fmt_num(r.e_coinc[0][1]) << ','
         << fmt_num(r.e_coinc[1][0]) << ',' << fmt_num(r.e_coinc[1][1]) << ','
         << fmt_num(std::fabs(r.s_coinc)) << ',' << fmt_num(std::fabs(r.s_event)) << ','
         << fmt_num(r.singles_fraction) << '\n';
    }
  } else if (which == "maps") {
    const double lo = io::parse_angle(phi_min);
    const double hi = io::parse_angle(phi_max);
    os << "phi_deg,S_qm,p_sine,p_power,p_calibrated\n";
    for (int i = 0; i < steps; ++i) {
      const double phi = steps == 1 ? lo
                                    : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(steps - 1);
      os << fmt_num(phi * 180.0 / M_PI) << ',' << fmt_num(reference::qm_s(phi)) << ','
         << fmt_num(reference::delay_prob_sine(phi)) << ','
         << fmt_num(reference::delay_prob_power(phi)) << ','
         << fmt_num(reference::delay_prob_calibrated(phi)) << '\n';
    }
  } else {
    return report_config_errors({"InvalidConfig: --which must be app1, app2, or maps"});
  }
  emit(out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-by-event CHSH simulator with coincidence-window analysis"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Simulate one configuration");
  ConfigFlags run_flags;
  run_flags.add_to(run_cmd, true);
  std::string run_out, run_summary, run_tally;
  run_cmd->add_option("--out", run_out, "Write the event stream to this JSONL file");
  run_cmd->add_option("--summary", run_summary, "Write the summary CSV here (default stdout)");
  run_cmd->add_option("--tally", run_tally, "Write the per-combo tally CSV here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Scan the detector angle");
  ConfigFlags sweep_flags;
  sweep_flags.pmap = "calibrated";
  sweep_flags.add_to(sweep_cmd, false);
  std::string phi_min = "0deg", phi_max = "45deg", sweep_out;
  int sweep_steps = 16;
  sweep_cmd->add_option("--phi-min", phi_min, "Sweep start angle")->capture_default_str();
  sweep_cmd->add_option("--phi-max", phi_max, "Sweep end angle")->capture_default_str();
  sweep_cmd->add_option("--steps", sweep_steps, "Grid points")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Write the sweep CSV here (default stdout)");

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "Re-analyze a stored event file");
  std::string an_in, an_scan, an_matches, an_summary, an_tally;
  Tick an_window = -1;
  bool an_window_given = false;
  an_cmd->add_option("--in", an_in, "Event JSONL file")->required();
  auto* wopt = an_cmd->add_option("--window", an_window,
                                  "Coincidence half-width (default: file header)");
  an_cmd->add_option("--window-scan", an_scan, "Comma list of windows; emits |S| vs window");
  an_cmd->add_option("--matches", an_matches, "Write pair/single JSONL here");
  an_cmd->add_option("--summary", an_summary, "Write the summary CSV here (default stdout)");
  an_cmd->add_option("--tally", an_tally, "Write the per-combo tally CSV here");

  // oracle
  auto* or_cmd = app.add_subcommand("oracle", "Print reference tables");
  std::string or_which = "maps", or_phi_min = "0deg", or_phi_max = "45deg", or_out;
  int or_steps = 17, or_bullets = 6;
  or_cmd->add_option("--which", or_which, "Table: app1, app2, or maps")
      ->capture_default_str();
  or_cmd->add_option("--steps", or_steps, "Grid points (app1 p grid / maps phi grid)")
      ->capture_default_str();
  or_cmd->add_option("--bullets", or_bullets, "Max carriers for the app2 enumeration (2..8)")
      ->capture_default_str();
  or_cmd->add_option("--phi-min", or_phi_min, "maps grid start")->capture_default_str();
  or_cmd->add_option("--phi-max", or_phi_max, "maps grid end")->capture_default_str();
  or_cmd->add_option("--out", or_out, "Write the CSV here (default stdout)");

  // selftest
  auto* st_cmd = app.add_subcommand("selftest", "Run the invariant suite");
  selftest::Options st_opts;
  bool st_list = false;
  st_cmd->add_flag("--list", st_list, "List check names and exit");
  st_cmd->add_option("--n", st_opts.n_trials, "Trials per fixture (capped at 100000)")
      ->capture_default_str();
  st_cmd->add_option("--seed", st_opts.seed, "Fixture seed")->capture_default_str();
  st_cmd->add_option("--noise-dark", st_opts.noise.dark_rate,
                     "Inject dark counts into every fixture");
  st_cmd->add_option("--noise-drop", st_opts.noise.drop_prob,
                     "Inject record drops into every fixture");
  st_cmd->add_option("--noise-flip", st_opts.noise.flip_prob,
                     "Inject outcome flips into every fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  an_window_given = wopt->count() > 0;

  try {
    if (run_cmd->parsed()) {
      run_flags.apply_file(run_cmd);
      return do_run(run_flags, run_out, run_summary, run_tally);
    }
    if (sweep_cmd->parsed()) {
      sweep_flags.apply_file(sweep_cmd);
      return do_sweep(sweep_flags, phi_min, phi_max, sweep_steps, sweep_out);
    }
    if (an_cmd->parsed())
      return do_analyze(an_in,
                        an_window_given ? std::optional<Tick>(an_window) : std::nullopt,
                        an_scan, an_matches, an_summary, an_tally);
    if (or_cmd->parsed())
      return do_oracle(or_which, or_steps, or_bullets, or_phi_min, or_phi_max, or_out);
    if (st_cmd->parsed()) {
      st_opts.list_only = st_list;
      return selftest::run_all(st_opts, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
