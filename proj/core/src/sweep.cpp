#include "swiptbeam/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "swiptbeam/baselines.hpp"
#include "swiptbeam/metrics.hpp"
#include "swiptbeam/recovery.hpp"
#include "swiptbeam/units.hpp"

namespace swiptbeam {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Optimal: return "optimal";
    case Scheme::ZfOptRho: return "zf-opt-rho";
    case Scheme::ZfFixedRho: return "zf-fixed-rho";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "optimal") return Scheme::Optimal;
  if (name == "zf-opt-rho") return Scheme::ZfOptRho;
  if (name == "zf-fixed-rho") return Scheme::ZfFixedRho;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (optimal, zf-opt-rho, zf-fixed-rho)");
}

std::vector<std::string> SweepSpec::validate() const {
  std::vector<std::string> bad = base.validate();
  if (gamma_req_grid_db.empty()) bad.push_back("gamma_req_grid_db: empty");
  if (n_tx_grid.empty()) bad.push_back("n_tx_grid: empty");
  for (int n : n_tx_grid)
    if (n < 1) bad.push_back("n_tx_grid: entries must be >= 1");
  if (schemes.empty()) bad.push_back("schemes: empty");
  if (trials < 1) bad.push_back("trials: must be >= 1");
  if (threads < 0) bad.push_back("threads: must be >= 0");
  return bad;
}

void SweepSpec::validate_or_throw() const {
  std::vector<std::string> bad = validate();
  if (bad.empty()) return;
  std::string msg = "invalid sweep spec:";
  for (const std::string& b : bad) msg += " [" + b + "]";
  throw std::invalid_argument(msg);
}

const SweepRow* SweepReport::find(double gamma_req_db, int n_tx,
                                  Scheme scheme) const {
  for (const SweepRow& r : rows)
    if (r.gamma_req_db == gamma_req_db && r.n_tx == n_tx && r.scheme == scheme)
      return &r;
  return nullptr;
}

namespace {

enum class CellState { Ok, Infeasible, Failed };

struct TrialCell {
  CellState state = CellState::Failed;
  bool rank_one = false;
  double total_w = 0.0;
  double signal_w = 0.0;
  double an_w = 0.0;
  double secrecy_bits = 0.0;
  double harvested_w = 0.0;
  double solve_ms = 0.0;
};

TrialCell solve_cell(const ScenarioConfig& cfg, const ChannelRealization& ch,
                     const ProblemInstance& inst, Scheme scheme) {
  TrialCell cell;
  BeamformingSolution sol;
  DualCertificate cert;
  try {
    switch (scheme) {
      case Scheme::Optimal:
        std::tie(sol, cert) = solve_program(build_program(inst));
        break;
      case Scheme::ZfOptRho: std::tie(sol, cert) = solve_baseline1(inst); break;
      case Scheme::ZfFixedRho: std::tie(sol, cert) = solve_baseline2(inst); break;
    }
  } catch (const std::exception&) {
    return cell;
  }
  cell.solve_ms = sol.solve_ms;
  if (sol.status == SolutionStatus::Infeasible) {
    cell.state = CellState::Infeasible;
    return cell;
  }
  if (sol.status != SolutionStatus::Optimal) return cell;

  cell.rank_one = rank_profile(sol.W).all_rank_one();
  std::vector<ComplexMatrix> W = sol.W;
  ComplexMatrix V = sol.V;
  std::vector<double> rho = sol.rho;
  if (scheme == Scheme::Optimal && !cell.rank_one) {
    try {
      RecoveredBeams rec = recover_rank_one(inst, sol, cert);
      for (size_t k = 0; k < rec.w.size(); ++k)
        W[k] = rec.w[k] * rec.w[k].adjoint();
      V = rec.V;
      rho = rec.rho;
    } catch (const std::exception&) {
      return cell;
    }
  }
  if (!verify_primal(inst, W, V, rho).feasible()) return cell;

  MetricsReport rep = evaluate_links(cfg, ch, W, V, rho);
  cell.total_w = rep.total_tx_power_w;
  cell.an_w = std::real(V.trace());
  cell.signal_w = cell.total_w - cell.an_w;
  double secrecy = 0.0;
  for (double b : rep.secrecy_bits) secrecy += b;
  cell.secrecy_bits = secrecy / static_cast<double>(rep.secrecy_bits.size());
  double harvested = 0.0;
  for (double e : rep.harvested_desired_w) harvested += e;
  for (double e : rep.harvested_roaming_w) harvested += e;
  cell.harvested_w = harvested;
  cell.state = CellState::Ok;
  return cell;
}

double mean_dbm(double sum_w, int count) {
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return watt_to_dbm(sum_w / count);
}

void format_value(std::string& out, double v) {
  char buf[48];
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.4f", v);
  out += buf;
}

}  // namespace

SweepReport run_sweep(const SweepSpec& spec) {
  spec.validate_or_throw();
  const int G = static_cast<int>(spec.gamma_req_grid_db.size());
  const int N = static_cast<int>(spec.n_tx_grid.size());
  const int S = static_cast<int>(spec.schemes.size());
  const int T = spec.trials;

  std::vector<TrialCell> cells(static_cast<size_t>(G) * N * S * T);
  auto cell_at = [&](int g, int n, int s, int t) -> TrialCell& {
    return cells[((static_cast<size_t>(g) * N + n) * S + s) * T + t];
  };

  const int items = N * T;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int item = next.fetch_add(1); item < items; item = next.fetch_add(1)) {
      const int n = item / T, t = item % T;
      ScenarioConfig cfg = spec.base;
      cfg.n_tx = spec.n_tx_grid[n];
      uint64_t draw_seed =
          mix_seed(mix_seed(spec.seed, static_cast<uint64_t>(cfg.n_tx)),
                   static_cast<uint64_t>(t));
      ChannelRealization ch = generate_scenario(cfg, draw_seed);
      for (int g = 0; g < G; ++g) {
        cfg.gamma_req_db = {spec.gamma_req_grid_db[g]};
        ProblemInstance inst = ProblemInstance::make(cfg, ch);
        for (int s = 0; s < S; ++s)
          cell_at(g, n, s, t) = solve_cell(cfg, ch, inst, spec.schemes[s]);
      }
    }
  };

  int nthreads = spec.threads > 0
                     ? spec.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, items));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  SweepReport report;
  for (int g = 0; g < G; ++g)
    for (int n = 0; n < N; ++n) {
      std::vector<bool> joint(T, true);
      for (int t = 0; t < T; ++t)
        for (int s = 0; s < S; ++s)
          if (cell_at(g, n, s, t).state != CellState::Ok) joint[t] = false;
      for (int s = 0; s < S; ++s) {
        SweepRow row;
        row.gamma_req_db = spec.gamma_req_grid_db[g];
        row.n_tx = spec.n_tx_grid[n];
        row.scheme = spec.schemes[s];
        row.trials = T;
        double total = 0.0, signal = 0.0, an = 0.0, secrecy = 0.0,
               harvested = 0.0, ms = 0.0;
        int ok = 0, rank_one = 0;
        for (int t = 0; t < T; ++t) {
          const TrialCell& cell = cell_at(g, n, s, t);
          if (cell.state == CellState::Infeasible) ++row.infeasible;
          if (cell.state == CellState::Failed) ++row.failed;
          if (cell.state == CellState::Ok) {
            ++ok;
            rank_one += cell.rank_one ? 1 : 0;
            ms += cell.solve_ms;
          }
          if (!joint[t]) continue;
          ++row.used;
          total += cell.total_w;
          signal += cell.signal_w;
          an += cell.an_w;
          secrecy += cell.secrecy_bits;
          harvested += cell.harvested_w;
        }
        row.feasibility_rate = static_cast<double>(ok) / T;
        row.rank_one_rate = ok ? static_cast<double>(rank_one) / ok : 0.0;
        row.mean_solve_ms = ok ? ms / ok : 0.0;
        row.total_power_dbm = mean_dbm(total, row.used);
        row.signal_power_dbm = mean_dbm(signal, row.used);
        row.an_power_dbm = mean_dbm(an, row.used);
        row.secrecy_bits =
            row.used ? secrecy / row.used : std::numeric_limits<double>::quiet_NaN();
        row.harvested_dbm = mean_dbm(harvested, row.used);
        report.rows.push_back(row);
      }
    }
  return report;
}

void emit_csv(const SweepReport& report, std::ostream& out) {
  std::string buf;
  buf += "# swiptbeam sweep v1\n";
  buf +=
      "gamma_req_db,n_tx,scheme,trials,used,infeasible,failed,"
      "feasibility_rate,rank_one_rate,total_power_dbm,signal_power_dbm,"
      "an_power_dbm,secrecy_bits,harvested_dbm\n";
  for (const SweepRow& r : report.rows) {
    char head[96];
    std::snprintf(head, sizeof head, "%.4f,%d,%s,%d,%d,%d,%d,", r.gamma_req_db,
                  r.n_tx, to_string(r.scheme), r.trials, r.used, r.infeasible,
                  r.failed);
    buf += head;
    format_value(buf, r.feasibility_rate);
    buf += ',';
    format_value(buf, r.rank_one_rate);
    buf += ',';
    format_value(buf, r.total_power_dbm);
    buf += ',';
    format_value(buf, r.signal_power_dbm);
    buf += ',';
    format_value(buf, r.an_power_dbm);
    buf += ',';
    format_value(buf, r.secrecy_bits);
    buf += ',';
    format_value(buf, r.harvested_dbm);
    buf += '\n';
  }
  out << buf;
}

void emit_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(report, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace swiptbeam
