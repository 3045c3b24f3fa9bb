#include "swiptbeam/channel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swiptbeam {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  auto sized = [](const std::vector<double>& v, int n) {
    return v.size() == 1 || v.size() == static_cast<size_t>(n);
  };
  if (n_tx < 2) bad.push_back("n_tx: must be at least 2");
  if (n_desired < 1) bad.push_back("n_desired: must be at least 1");
  if (n_roaming < 0) bad.push_back("n_roaming: must be nonnegative");
  if (n_roaming > 0 && n_rx_eav < 1) bad.push_back("n_rx_eav: must be at least 1");
  if (n_roaming > 0 && n_rx_eav >= n_tx) bad.push_back("n_rx_eav: must be smaller than n_tx");
  if (!sized(gamma_req_db, n_desired)) bad.push_back("gamma_req_db: needs 1 or n_desired entries");
  if (!sized(p_min_desired_dbm, n_desired)) bad.push_back("p_min_desired_dbm: needs 1 or n_desired entries");
  if (!sized(p_min_roaming_dbm, std::max(n_roaming, 1))) bad.push_back("p_min_roaming_dbm: needs 1 or n_roaming entries");
  if (r_eav_bits.size() != 1 && r_eav_bits.size() != static_cast<size_t>(n_roaming * n_desired))
    bad.push_back("r_eav_bits: needs 1 or n_roaming*n_desired entries");
  for (double v : gamma_req_db)
    if (!std::isfinite(v)) bad.push_back("gamma_req_db: entries must be finite");
  for (double v : r_eav_bits)
    if (!(v > 0.0)) bad.push_back("r_eav_bits: entries must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) bad.push_back("eta: must lie in [0, 1]");
  if (!(carrier_hz > 0.0)) bad.push_back("carrier_hz: must be positive");
  if (!(d_ref_m > 0.0)) bad.push_back("d_ref_m: must be positive");
  if (!(d_ref_m < d_max_m)) bad.push_back("d_max_m: must exceed d_ref_m");
  if (!(pl_breakpoint_m > 0.0)) bad.push_back("pl_breakpoint_m: must be positive");
  if (!std::isfinite(rician_k_db)) bad.push_back("rician_k_db: must be finite");
  return bad;
}

void ScenarioConfig::validate_or_throw() const {
  std::vector<std::string> bad = validate();
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "invalid scenario config:";
  for (const std::string& b : bad) msg << "\n  " << b;
  throw std::invalid_argument(msg.str());
}

double path_loss_db(double d_m, const ScenarioConfig& cfg) {
  if (d_m < cfg.d_ref_m) throw std::out_of_range("path_loss_db: distance below the model's reference distance");
  // free space at the carrier: 20 log10(4 pi d f / c)
  constexpr double kSpeedOfLight = 299792458.0;
  const double fterm = 20.0 * std::log10(4.0 * M_PI * cfg.carrier_hz / kSpeedOfLight);
  auto fspl = [&](double d) { return 10.0 * cfg.pl_exponent_near * std::log10(d) + fterm; };
  double bp = cfg.pl_breakpoint_m;
  double pl = d_m <= bp ? fspl(d_m) : fspl(bp) + 10.0 * cfg.pl_exponent_far * std::log10(d_m / bp);
  return pl - cfg.antenna_gain_tx_db - cfg.antenna_gain_rx_db;
}

ComplexMatrix rician_channel(int rows, int cols, double k_factor_linear, Rng& rng) {
  double los = std::sqrt(k_factor_linear / (k_factor_linear + 1.0));
  double diffuse = std::sqrt(1.0 / (k_factor_linear + 1.0));
  double phi = rng.uniform(0.0, 2.0 * M_PI);
  Complex los_term = los * Complex(std::cos(phi), std::sin(phi));
  ComplexMatrix H(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) H(i, j) = los_term + diffuse * rng.cnormal();
  return H;
}

ChannelRealization generate_scenario(const ScenarioConfig& cfg) { return generate_scenario(cfg, cfg.seed); }

ChannelRealization generate_scenario(const ScenarioConfig& cfg, uint64_t seed) {
  cfg.validate_or_throw();
  Rng rng(seed);
  double k_factor = db_to_linear(cfg.rician_k_db);
  ChannelRealization out;
  out.seed = seed;
  for (int k = 0; k < cfg.n_desired; ++k) {
    double d = rng.uniform(cfg.d_ref_m, cfg.d_max_m);
    double amp = std::pow(10.0, -path_loss_db(d, cfg) / 20.0);
    out.distance_desired_m.push_back(d);
    out.h.push_back(amp * rician_channel(cfg.n_tx, 1, k_factor, rng).col(0));
  }
  for (int m = 0; m < cfg.n_roaming; ++m) {
    double d = rng.uniform(cfg.d_ref_m, cfg.d_max_m);
    double amp = std::pow(10.0, -path_loss_db(d, cfg) / 20.0);
    out.distance_roaming_m.push_back(d);
    out.g.push_back(amp * rician_channel(cfg.n_tx, cfg.n_rx_eav, k_factor, rng));
  }
  return out;
}

}  // namespace swiptbeam
