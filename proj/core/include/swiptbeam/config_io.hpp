#pragma once

#include <iosfwd>
#include <string>
#include <swiptbeam/program.hpp>
#include <swiptbeam/sweep.hpp>

namespace swiptbeam {

// key = value sweep configuration ("swiptbeam config v1"): one pair per
// line, '#' starts a comment, lists are comma separated, unknown keys are
// errors. docs/FORMATS.md lists every key.
SweepSpec parse_sweep_config(std::istream& in, const std::string& context);
SweepSpec load_sweep_config(const std::string& path);

// Canonical dump: every key in fixed order with shortest round-trip
// numbers. Parsing the dump reproduces the spec.
std::string dump_sweep_config(const SweepSpec& spec);

// Problem instances and solve results as versioned JSON with full double
// precision ("swiptbeam-instance-v1" / "swiptbeam-solution-v1").
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);
void save_solution(const ProblemInstance& inst, const BeamformingSolution& sol,
                   const DualCertificate& cert, const std::string& path);

}  // namespace swiptbeam
