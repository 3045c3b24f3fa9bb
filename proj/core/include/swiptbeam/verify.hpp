#pragma once

#include <iosfwd>
#include <string>
#include <swiptbeam/program.hpp>
#include <vector>

namespace swiptbeam {

// End-to-end invariant suites run against freshly solved instances:
// the determinant-trace gap fuzz, the rate-cap LMI equivalence and its
// rank-two counterexample, objective homogeneity and unitary invariance,
// objective monotonicity in the targets, the closed-form split and
// complementarity checks, the rank-one rate with forced recovery, and the
// scalar grid-search oracle.
struct VerifyCheck {
  std::string name;
  int passed = 0;
  int total = 0;
  bool ok = false;
  bool skipped = false;
  std::string note;
};

struct VerifySummary {
  std::vector<VerifyCheck> checks;
  bool all_ok() const {
    for (const VerifyCheck& c : checks)
      if (!c.ok && !c.skipped) return false;
    return true;
  }
};

struct VerifyOptions {
  int seeds = 50;    // instances behind the solve-based checks
  uint64_t seed = 1;
  ScenarioConfig base;
  cone::Settings solver;  // loosen to watch the KKT checks catch it
};

VerifySummary run_verify(const VerifyOptions& opt);

// One [ OK ]/[FAIL]/[SKIP] line per check plus a closing tally.
void print_summary(const VerifySummary& summary, std::ostream& out);

}  // namespace swiptbeam
