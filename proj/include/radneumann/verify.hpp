#pragma once

// Named check suites over the structural properties of the radial problem:
// eigenfunctions, oscillation of the comparison equation, the nonlinearity
// hypotheses, and the traced branches with their lambda = 1 solutions.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "radneumann/nonlinearity.hpp"

namespace radneumann {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerifyOptions {
    int dim = 2;
    int k = 2;
    Tolerances tol;
    NonlinearitySpec spec = make_rational_family(120.0, 1.0, 1.0);
    std::uint64_t seed = 1;
    bool parallel = false;
};

/// Suite names in execution order (without "all").
const std::vector<std::string>& suite_names();

/// Runs the selected suite ("all" for every suite) and returns its checks.
std::vector<CheckResult> run_suites(const std::string& selector, const VerifyOptions& opts);

/// Prints one line per check plus a summary; returns 0 iff every check passed.
int run_verify(const std::string& selector, const VerifyOptions& opts, std::ostream& out);

}  // namespace radneumann
