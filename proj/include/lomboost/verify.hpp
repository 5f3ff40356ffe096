#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lomboost {

/// Deliberate defects used to exercise the failure path of the checks.
enum class InjectedFault {
    None,
    /// Inflates every strong-concavity modulus fourfold.
    Modulus,
};

struct VerifyOptions {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    InjectedFault fault = InjectedFault::None;
};

struct PropertyResult {
    std::string name;
    bool passed = true;
    std::size_t trials = 0;
    /// JSON description of the first violating instance, if any.
    std::string counterexample;
};

/// Runs every randomized property check. Each property draws from its own
/// generator seeded from `seed`, so results are reproducible.
std::vector<PropertyResult> run_verification(const VerifyOptions& options);

/// "name: PASS (N trials)" per line, with the counterexample after failures.
void print_verification(std::ostream& out, const std::vector<PropertyResult>& results);

}  // namespace lomboost
