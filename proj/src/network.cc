#include "reqc/network.h"

#include <cmath>

#include "reqc/common.h"

namespace reqc::network {

namespace {

void require_unit(double f, const char* what) {
    require(f >= 0.0 && f <= 1.0, std::string(what) + " must be in [0, 1]");
}

}  // namespace

double chain_fidelity(const RepeaterChain& chain) {
    require(chain.links >= 1, "chain_fidelity: need at least one link");
    require_unit(chain.link_fidelity, "chain_fidelity: link fidelity");
    require_unit(chain.bsm_fidelity, "chain_fidelity: BSM fidelity");
    return std::pow(chain.link_fidelity, chain.links) * std::pow(chain.bsm_fidelity, chain.links - 1);
}

bool bell_threshold_check(double fidelity) {
    require_unit(fidelity, "bell_threshold_check: fidelity");
    return fidelity >= kBellThreshold;
}

BsmRequirement required_bsm_fidelity(int links, double link_fidelity, double target_fidelity) {
    require(links >= 2, "required_bsm_fidelity: a chain of one link performs no BSM");
    require(link_fidelity > 0.0 && link_fidelity <= 1.0, "required_bsm_fidelity: link fidelity must be in (0, 1]");
    require(target_fidelity > 0.0 && target_fidelity <= 1.0,
            "required_bsm_fidelity: target fidelity must be in (0, 1]");
    const double f = std::pow(target_fidelity / std::pow(link_fidelity, links), 1.0 / (links - 1));
    return {f, f > 1.0};
}

}  // namespace reqc::network
