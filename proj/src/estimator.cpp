#include "bellsim/estimator.hpp"

#include <cmath>
#include <sstream>

#include "bellsim/engine.hpp"
#include "bellsim/reference.hpp"

namespace bellsim {

double ChshEstimate::singles_fraction() const {
  std::int64_t pairs = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) pairs += n_pairs[a][b];
  const std::int64_t events = pairs + n_singles;
  return events > 0 ? static_cast<double>(n_singles) / static_cast<double>(events) : 0.0;
}

ChshEstimate estimate(const ComboTally& t) {
  ChshEstimate r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::int64_t n = t.n_same[a][b] + t.n_opposite[a][b];
      if (n < 1) {
        std::ostringstream os;
        os << "EmptyCombo: combo (A" << a + 1 << ",B" << b + 1 << ") has no pairs";
        throw EmptyComboError(os.str());
      }
      const double f = static_cast<double>(t.n_same[a][b]) / static_cast<double>(n);
      r.e[a][b] = 2.0 * f - 1.0;
      r.stderr_e[a][b] = 2.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(n));
      r.n_pairs[a][b] = n;
    }
  }
  r.n_singles = t.n_singles;
  r.s = r.e[0][0] + r.e[0][1] + r.e[1][0] - r.e[1][1];
  r.s_abs = std::fabs(r.s);
  double var = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) var += r.stderr_e[a][b] * r.stderr_e[a][b];
  r.stderr_s = std::sqrt(var);
  return r;
}

std::vector<SweepPoint> sweep(const SimConfig& base, const std::vector<double>& phi_grid) {
  if (phi_grid.empty()) throw ConfigError("sweep: phi grid must be non-empty");
  std::vector<SweepPoint> rows;
  rows.reserve(phi_grid.size());
  for (const double phi : phi_grid) {
    SimConfig cfg = base;
    cfg.phi = phi;
    const RunOutput out = run(cfg);
    const ChshEstimate coinc = estimate(tally(match(out.left, out.right, cfg.timing.window)));
    const ChshEstimate event = estimate(pair_by_ground_truth(out.left, out.right));
    rows.push_back({phi, coinc.s_abs, event.s_abs, coinc.stderr_s, coinc.singles_fraction(),
                    reference::qm_s(phi)});
  }
  return rows;
}

}  // namespace bellsim
