#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reqc::validation {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20211;
    /// Run only this criterion when set.
    std::optional<int> only;
};

inline constexpr int kCriterionCount = 10;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS [n] name: detail" / "FAIL [n] ...".
std::string format_result(const CriterionResult& r);

}  // namespace reqc::validation
