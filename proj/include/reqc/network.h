#pragma once

#include <optional>

namespace reqc::network {

struct RepeaterChain {
    int links = 1;
    double link_fidelity = 1.0;
    double bsm_fidelity = 1.0;
};

inline constexpr double kBellThreshold = 0.78;

/// F_link^N * F_BSM^(N-1).
double chain_fidelity(const RepeaterChain& chain);

/// Inclusive: F >= 0.78.
bool bell_threshold_check(double fidelity);

struct BsmRequirement {
    double fidelity = 0.0;
    // Set when no BSM fidelity <= 1 reaches the target.
    bool infeasible = false;
};

/// (F_target / F_link^N)^(1 / (N - 1)). Throws for N < 2.
BsmRequirement required_bsm_fidelity(int links, double link_fidelity, double target_fidelity);

}  // namespace reqc::network
