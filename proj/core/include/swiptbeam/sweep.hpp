#pragma once

#include <iosfwd>
#include <string>
#include <swiptbeam/channel.hpp>
#include <vector>

namespace swiptbeam {

// The three resource allocation policies under comparison.
enum class Scheme { Optimal, ZfOptRho, ZfFixedRho };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// One Monte-Carlo campaign: solve every scheme on every (gamma, n_tx) grid
// point over shared per-(n_tx, trial) channel draws, so curves are paired.
struct SweepSpec {
  std::vector<double> gamma_req_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<int> n_tx_grid{5, 8};
  std::vector<Scheme> schemes{Scheme::Optimal, Scheme::ZfOptRho,
                              Scheme::ZfFixedRho};
  int trials = 50;
  ScenarioConfig base;
  uint64_t seed = 1;
  int threads = 0;  // worker pool size; 0 picks the hardware count

  std::vector<std::string> validate() const;
  void validate_or_throw() const;
};

// Aggregates for one (gamma, n_tx, scheme) grid point. Means are linear
// averages over the trials where every compared scheme succeeded, converted
// to dBm afterwards; rates are per-scheme over all trials.
struct SweepRow {
  double gamma_req_db = 0.0;
  int n_tx = 0;
  Scheme scheme = Scheme::Optimal;
  int trials = 0;
  int used = 0;        // jointly successful trials behind the means
  int infeasible = 0;  // this scheme alone
  int failed = 0;      // solver or recovery failures, this scheme alone
  double feasibility_rate = 0.0;
  double rank_one_rate = 0.0;  // before repair, over this scheme's solves
  double total_power_dbm = 0.0;
  double signal_power_dbm = 0.0;
  double an_power_dbm = 0.0;
  double secrecy_bits = 0.0;     // mean per desired receiver
  double harvested_dbm = 0.0;    // desired plus roaming, idle-roamer convention
  double mean_solve_ms = 0.0;    // not serialized; timing is machine-bound
};

struct SweepReport {
  std::vector<SweepRow> rows;  // gamma-major, then n_tx, then scheme

  const SweepRow* find(double gamma_req_db, int n_tx, Scheme scheme) const;
};

SweepReport run_sweep(const SweepSpec& spec);

// CSV plot data: one "# swiptbeam sweep v1" comment line, a header row, one
// row per grid point, 4 decimals throughout. Reruns of the same spec are
// byte-identical.
void emit_csv(const SweepReport& report, std::ostream& out);
void emit_csv(const SweepReport& report, const std::string& path);

}  // namespace swiptbeam
