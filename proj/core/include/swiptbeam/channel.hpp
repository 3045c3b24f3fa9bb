#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swiptbeam/hermitian.hpp"
#include "swiptbeam/units.hpp"

namespace swiptbeam {

// Deterministic random stream. Normal draws use Box-Muller on top of the
// mt19937_64 bit stream, so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  Complex cnormal() {
    double re = normal(), im = normal();
    return Complex(re, im) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 gen_;
};

// Stream splitter for deriving independent per-task seeds.
uint64_t mix_seed(uint64_t seed, uint64_t salt);

struct ScenarioConfig {
  int n_tx = 8;
  int n_rx_eav = 2;
  int n_desired = 3;
  int n_roaming = 2;

  // Scalar entries broadcast to every receiver (or receiver pair).
  std::vector<double> gamma_req_db{10.0};      // per desired receiver
  std::vector<double> r_eav_bits{1.0};         // per (roaming, desired) pair, row major
  std::vector<double> p_min_desired_dbm{0.0};  // per desired receiver
  std::vector<double> p_min_roaming_dbm{0.0};  // per roaming receiver

  double eta = 0.5;
  double sigma_ant_dbm = -114.0;
  double sigma_s_dbm = -53.0;
  double carrier_hz = 470e6;
  double d_ref_m = 2.0;
  double d_max_m = 50.0;
  double rician_k_db = 3.0;
  double antenna_gain_tx_db = 10.0;
  double antenna_gain_rx_db = 10.0;
  double pl_breakpoint_m = 10.0;
  double pl_exponent_near = 2.0;
  double pl_exponent_far = 3.5;
  uint64_t seed = 1;

  // Field names with the constraint each violates; empty when valid.
  std::vector<std::string> validate() const;
  void validate_or_throw() const;  // std::invalid_argument listing all violations

  double gamma_req_db_at(int k) const { return broadcast(gamma_req_db, k); }
  double r_eav_bits_at(int m, int k) const {
    return r_eav_bits.size() == 1 ? r_eav_bits[0] : r_eav_bits[m * n_desired + k];
  }
  double p_min_desired_dbm_at(int k) const { return broadcast(p_min_desired_dbm, k); }
  double p_min_roaming_dbm_at(int m) const { return broadcast(p_min_roaming_dbm, m); }

 private:
  static double broadcast(const std::vector<double>& v, int i) {
    return v.size() == 1 ? v[0] : v[static_cast<size_t>(i)];
  }
};

struct ChannelRealization {
  std::vector<ComplexVector> h;  // desired receivers, length n_tx each
  std::vector<ComplexMatrix> g;  // roaming receivers, n_tx x n_rx_eav each
  std::vector<double> distance_desired_m;
  std::vector<double> distance_roaming_m;
  uint64_t seed = 0;
};

// Net large-scale loss in dB, antenna gains already subtracted: free space
// propagation up to the breakpoint, a steeper slope beyond it. Throws
// std::out_of_range when d_m < cfg.d_ref_m.
double path_loss_db(double d_m, const ScenarioConfig& cfg);

// Unit mean power entries sqrt(K/(K+1)) e^{j phi} + sqrt(1/(K+1)) CN(0,1),
// with one line-of-sight phase phi shared by the whole matrix.
ComplexMatrix rician_channel(int rows, int cols, double k_factor_linear, Rng& rng);

// Draws one receiver placement and fading realization. The per-receiver draw
// order is fixed: desired receivers first, then roaming; distance, phase,
// fading entries. Identical seeds give identical realizations.
ChannelRealization generate_scenario(const ScenarioConfig& cfg);
ChannelRealization generate_scenario(const ScenarioConfig& cfg, uint64_t seed);

}  // namespace swiptbeam
