#pragma once

#include <swiptbeam/program.hpp>
#include <vector>

namespace swiptbeam {

// Unit beam directions that land in the null space of every other desired
// receiver's channel, so the information beams cause no multiuser
// interference by construction.
struct ZfDirectionSet {
  std::vector<ComplexVector> w;
  std::vector<double> q;  // beam powers, zeroed until a solve assigns them
};

// Direction k is the minimum eigenvector of the Gram matrix of the other
// channels, phase-fixed for determinism. A single receiver gets matched
// filtering instead. Throws std::invalid_argument when there are more
// receivers than transmit antennas, where nulling is impossible.
ZfDirectionSet zf_directions(const std::vector<ComplexVector>& h);

// Power minimization with the beams pinned to the zero-forcing directions
// and the splits left free.
std::pair<BeamformingSolution, DualCertificate> solve_baseline1(
    const ProblemInstance& inst, const cone::Settings& settings = {});

// Same restriction with every split pinned to one half.
std::pair<BeamformingSolution, DualCertificate> solve_baseline2(
    const ProblemInstance& inst, const cone::Settings& settings = {});

}  // namespace swiptbeam
