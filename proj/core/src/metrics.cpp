#include "swiptbeam/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swiptbeam/hermitian.hpp"
#include "swiptbeam/units.hpp"

namespace swiptbeam {

namespace {
double quad(const ComplexMatrix& A, const ComplexVector& h) {
  return std::real(Complex(h.adjoint() * A * h));
}

// eigenvalues of Q^{-1/2} G^H W G Q^{-1/2} with Q = G^H V G + sigma I
RealVector pencil_eigs(const ComplexMatrix& W, const ComplexMatrix& V,
                       const ComplexMatrix& G, double sigma_w) {
  int nr = static_cast<int>(G.cols());
  ComplexMatrix Q = G.adjoint() * V * G +
                    sigma_w * ComplexMatrix::Identity(nr, nr);
  ComplexMatrix S = G.adjoint() * W * G;
  Eigen::LLT<ComplexMatrix> llt((Q + Q.adjoint()) / 2.0);
  ComplexMatrix M = llt.matrixL().solve(S);
  M = llt.matrixL().solve(M.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((M + M.adjoint()) / 2.0,
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}
}  // namespace

double sinr(const std::vector<ComplexMatrix>& W, const ComplexMatrix& V,
            const ComplexVector& h, double rho, int k, double sigma_ant_w,
            double sigma_s_w) {
  double signal = quad(W[k], h);
  double interference = 0.0;
  for (size_t j = 0; j < W.size(); ++j)
    if (static_cast<int>(j) != k) interference += quad(W[j], h);
  interference += quad(V, h) + sigma_ant_w;
  return rho * signal / (rho * interference + sigma_s_w);
}

double eav_rate_upper(const ComplexMatrix& W, const ComplexMatrix& V,
                      const ComplexMatrix& G, double sigma_ant_w,
                      double sigma_s_w) {
  RealVector lam = pencil_eigs(W, V, G, sigma_ant_w + sigma_s_w);
  double bits = 0.0;
  for (int i = 0; i < lam.size(); ++i)
    bits += std::log2(1.0 + std::max(lam[i], 0.0));
  return bits;
}

double secrecy_rate(const std::vector<ComplexMatrix>& W, const ComplexMatrix& V,
                    const ChannelRealization& ch, double rho, int k,
                    double sigma_ant_w, double sigma_s_w) {
  double cap = std::log2(1.0 + sinr(W, V, ch.h[k], rho, k, sigma_ant_w, sigma_s_w));
  double worst = 0.0;
  for (const ComplexMatrix& G : ch.g)
    worst = std::max(worst, eav_rate_upper(W[k], V, G, sigma_ant_w, sigma_s_w));
  return std::max(0.0, cap - worst);
}

double harvested_desired(const std::vector<ComplexMatrix>& W,
                         const ComplexMatrix& V, const ComplexVector& h,
                         double rho, double eta, double sigma_ant_w) {
  double power = quad(V, h) + sigma_ant_w;
  for (const ComplexMatrix& Wj : W) power += quad(Wj, h);
  return eta * (1.0 - rho) * power;
}

double harvested_roaming(const std::vector<ComplexMatrix>& W,
                         const ComplexMatrix& V, const ComplexMatrix& G,
                         double eta, double sigma_ant_w) {
  double power = static_cast<double>(G.cols()) * sigma_ant_w;
  power += std::real((G.adjoint() * V * G).trace());
  for (const ComplexMatrix& Wj : W)
    power += std::real((G.adjoint() * Wj * G).trace());
  return eta * power;
}

double det_trace_gap(const ComplexMatrix& A) {
  if (!is_psd(A)) throw std::invalid_argument("det_trace_gap: input not positive semidefinite");
  RealVector lam = eig_hermitian((A + A.adjoint()) / 2.0).values;
  double det = 1.0, tr = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    det *= 1.0 + lam[i];
    tr += lam[i];
  }
  return det - (1.0 + tr);
}

double rate_cap_margin(const ComplexMatrix& W, const ComplexMatrix& V,
                       const ComplexMatrix& G, double sigma_ant_w,
                       double sigma_s_w, double r_bits) {
  RealVector lam = pencil_eigs(W, V, G, sigma_ant_w + sigma_s_w);
  return (std::exp2(r_bits) - 1.0) - lam.maxCoeff();
}

bool rate_cap_holds(const ComplexMatrix& W, const ComplexMatrix& V,
                    const ComplexMatrix& G, double sigma_ant_w,
                    double sigma_s_w, double r_bits, double tol) {
  return rate_cap_margin(W, V, G, sigma_ant_w, sigma_s_w, r_bits) >= -tol;
}

MetricsReport evaluate_links(const ScenarioConfig& cfg,
                             const ChannelRealization& ch,
                             const std::vector<ComplexMatrix>& W,
                             const ComplexMatrix& V,
                             const std::vector<double>& rho) {
  double sa = dbm_to_watt(cfg.sigma_ant_dbm);
  double ss = dbm_to_watt(cfg.sigma_s_dbm);
  MetricsReport rep;
  rep.cap_eav_bits.resize(ch.g.size());
  for (size_t m = 0; m < ch.g.size(); ++m) {
    rep.cap_eav_bits[m].resize(ch.h.size());
    for (size_t k = 0; k < ch.h.size(); ++k)
      rep.cap_eav_bits[m][k] = eav_rate_upper(W[k], V, ch.g[m], sa, ss);
    rep.harvested_roaming_w.push_back(
        harvested_roaming(W, V, ch.g[m], cfg.eta, sa));
  }
  for (size_t k = 0; k < ch.h.size(); ++k) {
    double s = sinr(W, V, ch.h[k], rho[k], static_cast<int>(k), sa, ss);
    double cap = std::log2(1.0 + s);
    double worst = 0.0;
    for (size_t m = 0; m < ch.g.size(); ++m)
      worst = std::max(worst, rep.cap_eav_bits[m][k]);
    rep.sinr.push_back(s);
    rep.cap_desired_bits.push_back(cap);
    rep.secrecy_bits.push_back(std::max(0.0, cap - worst));
    rep.harvested_desired_w.push_back(
        harvested_desired(W, V, ch.h[k], rho[k], cfg.eta, sa));
  }
  rep.total_tx_power_w = std::real(V.trace());
  for (const ComplexMatrix& Wk : W) rep.total_tx_power_w += std::real(Wk.trace());
  return rep;
}

}  // namespace swiptbeam
