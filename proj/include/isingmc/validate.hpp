#pragma once

#include <string>
#include <vector>

namespace isingmc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    int failures = 0;
    std::vector<CheckResult> checks;
};

/// Runs one of the in-process validation suites: "rng" (generator fidelity and
/// interleaving identity), "exp" (approximation error bounds and masking),
/// "trajectory" (cross-engine bit-exact equivalence), "boltzmann" (sampling
/// against exact enumeration), or "all".
SuiteReport run_validation_suite(const std::string& suite);

std::string suite_report_json(const SuiteReport& report);

}  // namespace isingmc
