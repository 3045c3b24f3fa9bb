#include "swiptbeam/config_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swiptbeam {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

double parse_double(const std::string& s, const std::string& where) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not a number: '" + s + "'");
  }
  if (used != s.size())
    throw std::invalid_argument(where + ": trailing junk in '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& where) {
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not an integer: '" + s + "'");
  }
  if (used != s.size())
    throw std::invalid_argument(where + ": trailing junk in '" + s + "'");
  return v;
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += shortest(v[i]);
  }
  return out;
}

// one setter per key, shared by the parser and the canonical dumper
struct Key {
  const char* name;
  std::function<void(SweepSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const SweepSpec&)> get;
};

std::vector<double> parse_double_list(const std::string& v, const std::string& w) {
  std::vector<double> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_double(item, w));
  return out;
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = {
      {"gamma_req_grid_db",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.gamma_req_grid_db = parse_double_list(v, w);
       },
       [](const SweepSpec& s) { return join_doubles(s.gamma_req_grid_db); }},
      {"n_tx_grid",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.n_tx_grid.clear();
         for (const std::string& item : split_list(v))
           s.n_tx_grid.push_back(static_cast<int>(parse_int(item, w)));
       },
       [](const SweepSpec& s) {
         std::string out;
         for (size_t i = 0; i < s.n_tx_grid.size(); ++i) {
           if (i) out += ", ";
           out += std::to_string(s.n_tx_grid[i]);
         }
         return out;
       }},
      {"schemes",
       [](SweepSpec& s, const std::string& v, const std::string&) {
         s.schemes.clear();
         for (const std::string& item : split_list(v))
           s.schemes.push_back(scheme_from_string(item));
       },
       [](const SweepSpec& s) {
         std::string out;
         for (size_t i = 0; i < s.schemes.size(); ++i) {
           if (i) out += ", ";
           out += to_string(s.schemes[i]);
         }
         return out;
       }},
      {"trials",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.trials = static_cast<int>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.trials); }},
      {"seed",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.seed = static_cast<uint64_t>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.seed); }},
      {"threads",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.threads = static_cast<int>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.threads); }},
      {"n_desired",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.n_desired = static_cast<int>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.base.n_desired); }},
      {"n_roaming",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.n_roaming = static_cast<int>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.base.n_roaming); }},
      {"n_rx_eav",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.n_rx_eav = static_cast<int>(parse_int(v, w));
       },
       [](const SweepSpec& s) { return std::to_string(s.base.n_rx_eav); }},
      {"r_eav_bits",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.r_eav_bits = parse_double_list(v, w);
       },
       [](const SweepSpec& s) { return join_doubles(s.base.r_eav_bits); }},
      {"p_min_desired_dbm",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.p_min_desired_dbm = parse_double_list(v, w);
       },
       [](const SweepSpec& s) { return join_doubles(s.base.p_min_desired_dbm); }},
      {"p_min_roaming_dbm",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.p_min_roaming_dbm = parse_double_list(v, w);
       },
       [](const SweepSpec& s) { return join_doubles(s.base.p_min_roaming_dbm); }},
      {"eta",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.eta = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.eta); }},
      {"sigma_ant_dbm",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.sigma_ant_dbm = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.sigma_ant_dbm); }},
      {"sigma_s_dbm",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.sigma_s_dbm = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.sigma_s_dbm); }},
      {"carrier_hz",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.carrier_hz = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.carrier_hz); }},
      {"d_ref_m",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.d_ref_m = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.d_ref_m); }},
      {"d_max_m",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.d_max_m = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.d_max_m); }},
      {"rician_k_db",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.rician_k_db = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.rician_k_db); }},
      {"antenna_gain_tx_db",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.antenna_gain_tx_db = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.antenna_gain_tx_db); }},
      {"antenna_gain_rx_db",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.antenna_gain_rx_db = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.antenna_gain_rx_db); }},
      {"pl_breakpoint_m",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.pl_breakpoint_m = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.pl_breakpoint_m); }},
      {"pl_exponent_near",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.pl_exponent_near = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.pl_exponent_near); }},
      {"pl_exponent_far",
       [](SweepSpec& s, const std::string& v, const std::string& w) {
         s.base.pl_exponent_far = parse_double(v, w);
       },
       [](const SweepSpec& s) { return shortest(s.base.pl_exponent_far); }},
  };
  return keys;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("complex entries must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

ComplexVector vector_from_json(const json& j) {
  ComplexVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = complex_from_json(j[i]);
  return v;
}

json matrix_to_json(const ComplexMatrix& M) {
  json out = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(complex_to_json(M(i, j)));
    out.push_back(row);
  }
  return out;
}

ComplexMatrix matrix_from_json(const json& j) {
  int rows = static_cast<int>(j.size());
  int cols = rows ? static_cast<int>(j[0].size()) : 0;
  ComplexMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw std::invalid_argument("ragged matrix rows");
    for (int c = 0; c < cols; ++c) M(i, c) = complex_from_json(j[i][c]);
  }
  return M;
}

json load_json(const std::string& path, const char* schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(schema) + ": cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (j.value("schema", "") != schema)
    throw std::runtime_error(path + ": expected schema '" + schema + "'");
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

SweepSpec parse_sweep_config(std::istream& in, const std::string& context) {
  SweepSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = context + ":" + std::to_string(lineno);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    bool known = false;
    for (const Key& k : key_table())
      if (key == k.name) {
        k.set(spec, value, where + " (" + key + ")");
        known = true;
        break;
      }
    if (!known) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
  spec.validate_or_throw();
  return spec;
}

SweepSpec load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_sweep_config(in, path);
}

std::string dump_sweep_config(const SweepSpec& spec) {
  std::string out = "# swiptbeam config v1\n";
  for (const Key& k : key_table()) {
    out += k.name;
    out += " = ";
    out += k.get(spec);
    out += '\n';
  }
  return out;
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  json j;
  j["schema"] = "swiptbeam-instance-v1";
  j["n_tx"] = inst.n_tx;
  j["eta"] = inst.eta;
  j["sigma_ant_w"] = inst.sigma_ant_w;
  j["sigma_s_w"] = inst.sigma_s_w;
  j["gamma_req"] = inst.gamma_req;
  j["r_eav_bits"] = inst.r_eav_bits;
  j["p_min_desired_w"] = inst.p_min_desired_w;
  j["p_min_roaming_w"] = inst.p_min_roaming_w;
  j["h"] = json::array();
  for (const ComplexVector& h : inst.h) j["h"].push_back(vector_to_json(h));
  j["g"] = json::array();
  for (const ComplexMatrix& g : inst.g) j["g"].push_back(matrix_to_json(g));
  write_json(j, path);
}

ProblemInstance load_instance(const std::string& path) {
  json j = load_json(path, "swiptbeam-instance-v1");
  ProblemInstance inst;
  try {
    inst.n_tx = j.at("n_tx").get<int>();
    inst.eta = j.at("eta").get<double>();
    inst.sigma_ant_w = j.at("sigma_ant_w").get<double>();
    inst.sigma_s_w = j.at("sigma_s_w").get<double>();
    inst.gamma_req = j.at("gamma_req").get<std::vector<double>>();
    inst.r_eav_bits = j.at("r_eav_bits").get<std::vector<double>>();
    inst.p_min_desired_w = j.at("p_min_desired_w").get<std::vector<double>>();
    inst.p_min_roaming_w = j.at("p_min_roaming_w").get<std::vector<double>>();
    for (const json& h : j.at("h")) inst.h.push_back(vector_from_json(h));
    for (const json& g : j.at("g")) inst.g.push_back(matrix_from_json(g));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  inst.validate_or_throw();
  return inst;
}

void save_solution(const ProblemInstance& inst, const BeamformingSolution& sol,
                   const DualCertificate& cert, const std::string& path) {
  json j;
  j["schema"] = "swiptbeam-solution-v1";
  j["status"] = to_string(sol.status);
  j["iterations"] = sol.iterations;
  j["solve_ms"] = sol.solve_ms;
  j["gap"] = sol.gap;
  j["primal_residual"] = sol.primal_residual;
  j["dual_residual"] = sol.dual_residual;
  if (sol.status == SolutionStatus::Optimal) {
    j["objective_w"] = sol.objective_w;
    j["rho"] = sol.rho;
    j["W"] = json::array();
    for (const ComplexMatrix& Wk : sol.W) j["W"].push_back(matrix_to_json(Wk));
    j["V"] = matrix_to_json(sol.V);

    json c;
    c["duality_gap"] = cert.duality_gap;
    c["alpha"] = cert.alpha;
    c["beta"] = cert.beta;
    c["nu"] = cert.nu;
    c["Z"] = json::array();
    for (const ComplexMatrix& Zk : cert.Z) c["Z"].push_back(matrix_to_json(Zk));
    c["Y"] = matrix_to_json(cert.Y);
    c["X"] = json::array();
    for (const auto& row : cert.X) {
      json r = json::array();
      for (const ComplexMatrix& Xmk : row) r.push_back(matrix_to_json(Xmk));
      c["X"].push_back(r);
    }
    j["certificate"] = c;

    FeasibilityReport rep = verify_primal(inst, sol.W, sol.V, sol.rho);
    json f;
    f["worst"] = rep.worst;
    f["sinr_margin"] = rep.sinr_margin;
    f["harvest_margin"] = rep.harvest_margin;
    f["roam_margin"] = rep.roam_margin;
    f["rate_cap_margin"] = rep.rate_cap_margin;
    f["split_margin"] = rep.split_margin;
    f["beam_eig_floor"] = rep.beam_eig_floor;
    f["noise_eig_floor"] = rep.noise_eig_floor;
    j["feasibility"] = f;
  }
  write_json(j, path);
}

}  // namespace swiptbeam
