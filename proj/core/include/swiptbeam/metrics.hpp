#pragma once

#include <swiptbeam/channel.hpp>
#include <vector>

namespace swiptbeam {

// Closed-form link quantities for one channel draw and one transmit design
// (beam covariances W_k, noise covariance V, splitting ratios rho_k).
// Powers are in Watts, rates in bits per channel use.

// rho h^H W_k h / (rho (sum_{j!=k} h^H W_j h + h^H V h + sigma_ant) + sigma_s).
// The splitter feeds a rho share of the received power to the decoder, whose
// own processing noise sigma_s is not split.
double sinr(const std::vector<ComplexMatrix>& W, const ComplexMatrix& V,
            const ComplexVector& h, double rho, int k, double sigma_ant_w,
            double sigma_s_w);

// log2 det(I + Q^{-1} G^H W G) with Q = G^H V G + (sigma_ant + sigma_s) I:
// an idle receiver decoding the beam with its full received power. Evaluated
// through the eigenvalues of the symmetrized pencil for stability.
double eav_rate_upper(const ComplexMatrix& W, const ComplexMatrix& V,
                      const ComplexMatrix& G, double sigma_ant_w,
                      double sigma_s_w);

// [log2(1 + sinr_k) - max_m eav_rate_upper(m, k)]^+, with an empty
// eavesdropper set contributing 0 bits.
double secrecy_rate(const std::vector<ComplexMatrix>& W, const ComplexMatrix& V,
                    const ChannelRealization& ch, double rho, int k,
                    double sigma_ant_w, double sigma_s_w);

// eta (1 - rho) (sum_j h^H W_j h + h^H V h + sigma_ant)
double harvested_desired(const std::vector<ComplexMatrix>& W,
                         const ComplexMatrix& V, const ComplexVector& h,
                         double rho, double eta, double sigma_ant_w);

// eta (sum_k tr(G^H W_k G) + tr(G^H V G) + n_rx sigma_ant); an idle receiver
// harvests everything it picks up.
double harvested_roaming(const std::vector<ComplexMatrix>& W,
                         const ComplexMatrix& V, const ComplexMatrix& G,
                         double eta, double sigma_ant_w);

// det(I + A) - (1 + tr A) for PSD A. Nonnegative, and zero exactly when A has
// rank at most one, which is what makes the trace form of the rate cap tight
// for rank-one beams. Throws std::invalid_argument on non-PSD input.
double det_trace_gap(const ComplexMatrix& A);

// Largest eigenvalue margin of the linear rate cap
//   G^H W G <= (2^r - 1) (G^H V G + (sigma_ant + sigma_s) I),
// i.e. (2^r - 1) - lambda_max(Q^{-1/2} G^H W G Q^{-1/2}). Nonnegative when
// the cap holds. For rank-one W the cap is equivalent to
// eav_rate_upper <= r; for higher rank it only implies a bound.
double rate_cap_margin(const ComplexMatrix& W, const ComplexMatrix& V,
                       const ComplexMatrix& G, double sigma_ant_w,
                       double sigma_s_w, double r_bits);

bool rate_cap_holds(const ComplexMatrix& W, const ComplexMatrix& V,
                    const ComplexMatrix& G, double sigma_ant_w,
                    double sigma_s_w, double r_bits, double tol = 1e-8);

struct MetricsReport {
  std::vector<double> sinr;                       // per desired receiver
  std::vector<double> cap_desired_bits;           // log2(1 + sinr)
  std::vector<std::vector<double>> cap_eav_bits;  // [roaming][desired]
  std::vector<double> secrecy_bits;
  std::vector<double> harvested_desired_w;
  std::vector<double> harvested_roaming_w;
  double total_tx_power_w = 0.0;
};

MetricsReport evaluate_links(const ScenarioConfig& cfg,
                             const ChannelRealization& ch,
                             const std::vector<ComplexMatrix>& W,
                             const ComplexMatrix& V,
                             const std::vector<double>& rho);

}  // namespace swiptbeam
