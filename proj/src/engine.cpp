#include "bellsim/engine.hpp"

#include <algorithm>

#include "bellsim/reference.hpp"
#include "bellsim/rng.hpp"
#include "bellsim/strategies.hpp"

namespace bellsim {

namespace {

void sort_stream(std::vector<DetectionRecord>& records) {
  // Streams are generated in arrival order; the stable sort keeps the
  // stored-before-immediate order at equal ticks.
  std::stable_sort(records.begin(), records.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) {
                     return a.time < b.time;
                   });
}

RunOutput simulate(const SimConfig& cfg, std::vector<Setting> alphas,
                   std::vector<Setting> betas) {
  const auto n = cfg.n_trials;
  const Substreams streams(cfg.seed);
  const double p_b2 = reference::b2_probability(cfg);

  std::vector<DetectionRecord> left, right;
  left.reserve(static_cast<std::size_t>(n));
  right.reserve(static_cast<std::size_t>(n));

  switch (cfg.strategy) {
    case Strategy::App1: {
      for (std::int64_t k = 0; k < n; ++k) {
        RngStream src = streams.stream(StreamPurpose::SourceBit, Side::A,
                                       static_cast<std::uint64_t>(k));
        const auto [bullet_l, bullet_r] = app1_emit(k, cfg.timing.period, src);
        const Setting sa = alphas[static_cast<std::size_t>(k)];
        const Setting sb = betas[static_cast<std::size_t>(k)];
        RngStream rng_a =
            streams.stream(StreamPurpose::Response, Side::A, static_cast<std::uint64_t>(k));
        const ScheduledOutput oa = app1_respond(Side::A, sa, bullet_l, cfg.timing, p_b2,
                                                cfg.b2_nodelay_not, rng_a);
        left.push_back({Side::A, sa, oa.outcome, oa.emit_time, k});
        RngStream rng_b =
            streams.stream(StreamPurpose::Response, Side::B, static_cast<std::uint64_t>(k));
        const ScheduledOutput ob = app1_respond(Side::B, sb, bullet_r, cfg.timing, p_b2,
                                                cfg.b2_nodelay_not, rng_b);
        right.push_back({Side::B, sb, ob.outcome, ob.emit_time, k});
      }
      break;
    }
    case Strategy::App2: {
      DetectorState state_l, state_r;
      for (std::int64_t k = 0; k < n; ++k) {
        const auto [bullet_l, bullet_r] = app2_emit(k, cfg.timing.period);
        const Setting sa = alphas[static_cast<std::size_t>(k)];
        const Setting sb = betas[static_cast<std::size_t>(k)];
        RngStream rng_a =
            streams.stream(StreamPurpose::Response, Side::A, static_cast<std::uint64_t>(k));
        for (const auto& e :
             app2_respond(Side::A, sa, bullet_l, cfg.timing, state_l, p_b2, rng_a))
          left.push_back({Side::A, e.setting, e.outcome, e.emit_time, e.bullet_id});
        RngStream rng_b =
            streams.stream(StreamPurpose::Response, Side::B, static_cast<std::uint64_t>(k));
        for (const auto& e :
             app2_respond(Side::B, sb, bullet_r, cfg.timing, state_r, p_b2, rng_b))
          right.push_back({Side::B, e.setting, e.outcome, e.emit_time, e.bullet_id});
      }
      const Tick flush = n * cfg.timing.period;
      for (const auto& e : app2_flush(state_l, flush))
        left.push_back({Side::A, e.setting, e.outcome, e.emit_time, e.bullet_id});
      for (const auto& e : app2_flush(state_r, flush))
        right.push_back({Side::B, e.setting, e.outcome, e.emit_time, e.bullet_id});
      break;
    }
    case Strategy::Table: {
      const Table table = Table::from_index(cfg.table_index);
      for (std::int64_t k = 0; k < n; ++k) {
        const Bullet bullet{k, k * cfg.timing.period, table};
        const Setting sa = alphas[static_cast<std::size_t>(k)];
        const Setting sb = betas[static_cast<std::size_t>(k)];
        const ScheduledOutput oa = table_respond(Side::A, sa, bullet);
        left.push_back({Side::A, sa, oa.outcome, oa.emit_time, k});
        const ScheduledOutput ob = table_respond(Side::B, sb, bullet);
        right.push_back({Side::B, sb, ob.outcome, ob.emit_time, k});
      }
      break;
    }
    case Strategy::QmReference: {
      for (std::int64_t k = 0; k < n; ++k) {
        const Setting sa = alphas[static_cast<std::size_t>(k)];
        const Setting sb = betas[static_cast<std::size_t>(k)];
        RngStream rng = streams.stream(StreamPurpose::JointSample, Side::A,
                                       static_cast<std::uint64_t>(k));
        const auto [oa, ob] = reference::qm_sample(cfg.phi, sa, sb, rng);
        const Tick t = k * cfg.timing.period;
        left.push_back({Side::A, sa, oa, t, k});
        right.push_back({Side::B, sb, ob, t, k});
      }
      break;
    }
  }

  sort_stream(left);
  sort_stream(right);
  if (cfg.noise.any()) {
    left = apply_noise(std::move(left), Side::A, cfg.noise, cfg.timing, n, alphas, streams);
    right = apply_noise(std::move(right), Side::B, cfg.noise, cfg.timing, n, betas, streams);
  }

  RunOutput out;
  out.left = std::move(left);
  out.right = std::move(right);
  out.ground_truth.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k)
    out.ground_truth.emplace_back(alphas[static_cast<std::size_t>(k)],
                                  betas[static_cast<std::size_t>(k)]);
  out.config = cfg;
  return out;
}

}  // namespace

RunOutput run(const SimConfig& cfg) {
  require_valid(cfg);
  const Substreams streams(cfg.seed);
  std::vector<Setting> alphas, betas;
  alphas.reserve(static_cast<std::size_t>(cfg.n_trials));
  betas.reserve(static_cast<std::size_t>(cfg.n_trials));
  for (std::int64_t k = 0; k < cfg.n_trials; ++k) {
    const auto trial = static_cast<std::uint64_t>(k);
    alphas.push_back(streams.stream(StreamPurpose::SettingDraw, Side::A, trial).next_bit()
                         ? Setting::Two
                         : Setting::One);
    betas.push_back(streams.stream(StreamPurpose::SettingDraw, Side::B, trial).next_bit()
                        ? Setting::Two
                        : Setting::One);
  }
  return simulate(cfg, std::move(alphas), std::move(betas));
}

RunOutput replay_settings(const SimConfig& cfg, const std::vector<Setting>& left_settings,
                          const std::vector<Setting>& right_settings) {
  require_valid(cfg);
  if (static_cast<std::int64_t>(left_settings.size()) != cfg.n_trials ||
      static_cast<std::int64_t>(right_settings.size()) != cfg.n_trials)
    throw LengthMismatchError("replay_settings: setting sequences must have length n_trials");
  return simulate(cfg, left_settings, right_settings);
}

}  // namespace bellsim
