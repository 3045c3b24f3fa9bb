#include "swiptbeam/baselines.hpp"

#include <stdexcept>

#include "swiptbeam/hermitian.hpp"

namespace swiptbeam {

ZfDirectionSet zf_directions(const std::vector<ComplexVector>& h) {
  const int K = static_cast<int>(h.size());
  if (K == 0) throw std::invalid_argument("zf_directions: no receivers");
  const int n = static_cast<int>(h[0].size());
  for (const ComplexVector& hk : h)
    if (hk.size() != n || hk.norm() == 0.0)
      throw std::invalid_argument("zf_directions: channels must be same-length and nonzero");
  if (K > n)
    throw std::invalid_argument("zf_directions: more receivers than antennas leaves no null space");

  ZfDirectionSet set;
  set.w.reserve(K);
  set.q.assign(K, 0.0);
  if (K == 1) {
    ComplexVector w = h[0] / h[0].norm();
    fix_eigenvector_phase(w);
    set.w.push_back(std::move(w));
    return set;
  }
  for (int k = 0; k < K; ++k) {
    ComplexMatrix gram = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < K; ++j)
      if (j != k) gram += h[j] * h[j].adjoint();
    set.w.push_back(eig_hermitian(gram).vectors.col(0));
  }
  return set;
}

namespace {

std::vector<ComplexMatrix> direction_columns(const ProblemInstance& inst) {
  ZfDirectionSet set = zf_directions(inst.h);
  std::vector<ComplexMatrix> dirs;
  dirs.reserve(set.w.size());
  for (const ComplexVector& w : set.w) dirs.push_back(w);
  return dirs;
}

}  // namespace

std::pair<BeamformingSolution, DualCertificate> solve_baseline1(
    const ProblemInstance& inst, const cone::Settings& settings) {
  return solve_program(build_program(inst, direction_columns(inst)), settings);
}

std::pair<BeamformingSolution, DualCertificate> solve_baseline2(
    const ProblemInstance& inst, const cone::Settings& settings) {
  return solve_program(build_program(inst, direction_columns(inst), 0.5), settings);
}

}  // namespace swiptbeam
