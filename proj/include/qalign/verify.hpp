// SPDX-License-Identifier: Apache-2.0

// Invariant checks behind `qalign verify`.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qalign {

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 0;
    /// Name of a circuit to corrupt before checking ("popcount", "entangler",
    /// "oracle"); used to confirm the checks catch faults.
    std::string inject_fault;
};

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace qalign
