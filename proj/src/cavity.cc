#include "reqc/cavity.h"

#include <cmath>

namespace reqc::cavity {

void CavityParams::validate() const {
    require(quality_factor > 0.0, "cavity: quality_factor must be > 0");
    require(mode_volume > 0.0, "cavity: mode_volume must be > 0");
    require(branching_ratio > 0.0 && branching_ratio <= 1.0, "cavity: branching_ratio must be in (0, 1]");
    require(outcoupling_ratio >= 0.0 && outcoupling_ratio <= 1.0, "cavity: outcoupling_ratio must be in [0, 1]");
    require(wavelength_m > 0.0, "cavity: wavelength must be > 0");
}

void EmitterParams::validate() const {
    require(lifetime_s > 0.0, "emitter: lifetime must be > 0");
    require(pure_dephasing_s > 0.0, "emitter: pure dephasing time must be > 0");
}

double ideal_purcell(const CavityParams& cavity) {
    require(cavity.quality_factor > 0.0, "ideal_purcell: quality_factor must be > 0");
    require(cavity.mode_volume > 0.0, "ideal_purcell: mode_volume must be > 0");
    return 3.0 / (4.0 * kPi * kPi) * cavity.quality_factor / cavity.mode_volume;
}

double effective_purcell(const CavityParams& cavity) {
    cavity.validate();
    return cavity.branching_ratio * ideal_purcell(cavity);
}

double enhanced_rate(double purcell, const EmitterParams& emitter) {
    require(purcell >= 0.0, "enhanced_rate: Purcell factor must be >= 0");
    emitter.validate();
    return (purcell + 1.0) / emitter.lifetime_s;
}

double beta_factor(double purcell) {
    require(purcell >= 0.0, "beta_factor: Purcell factor must be >= 0");
    return purcell / (purcell + 1.0);
}

double total_dephasing(const EmitterParams& emitter) {
    emitter.validate();
    const double rate = 1.0 / (2.0 * emitter.lifetime_s) + 1.0 / emitter.pure_dephasing_s;
    if (rate == 0.0) {
        return kInf;
    }
    // Keep the lifetime limit exact instead of round-tripping through 1/x.
    if (std::isinf(emitter.pure_dephasing_s)) {
        return 2.0 * emitter.lifetime_s;
    }
    if (std::isinf(emitter.lifetime_s)) {
        return emitter.pure_dephasing_s;
    }
    return 1.0 / rate;
}

double indistinguishability(double t2_s, double t1_effective_s) {
    require(t2_s > 0.0, "indistinguishability: T2 must be > 0");
    require(t1_effective_s > 0.0, "indistinguishability: T1 must be > 0");
    return t2_s / (2.0 * t1_effective_s);
}

double cooperativity(double indistinguishability, double purcell) {
    require(indistinguishability >= 0.0 && indistinguishability <= 1.0,
            "cooperativity: indistinguishability must be in [0, 1]");
    require(purcell >= 0.0, "cooperativity: Purcell factor must be >= 0");
    return indistinguishability * purcell / 2.0;
}

bool fourier_limit_check(double cooperativity, double t1_s, double linewidth_hz) {
    require(cooperativity > 0.0 && t1_s > 0.0 && linewidth_hz > 0.0,
            "fourier_limit_check: all inputs must be > 0");
    return cooperativity > 2.0 * kPi * t1_s * linewidth_hz;
}

double photon_budget(const BudgetChain& chain) {
    require(chain.source_rate >= 0.0, "photon_budget: source rate must be >= 0");
    double rate = chain.source_rate;
    for (const auto& stage : chain.stages) {
        require(stage.efficiency >= 0.0 && stage.efficiency <= 1.0,
                "photon_budget: efficiency of stage '" + stage.label + "' must be in [0, 1]");
        rate *= stage.efficiency;
    }
    return rate;
}

double homogeneous_linewidth(double t2_s) {
    require(t2_s > 0.0, "homogeneous_linewidth: T2 must be > 0");
    return 1.0 / (kPi * t2_s);
}

double mode_volume_in_cubic_wavelengths(double volume_m3, double wavelength_m, double refractive_index) {
    require(volume_m3 > 0.0 && wavelength_m > 0.0 && refractive_index > 0.0,
            "mode_volume_in_cubic_wavelengths: inputs must be > 0");
    const double unit = wavelength_m / refractive_index;
    return volume_m3 / (unit * unit * unit);
}

}  // namespace reqc::cavity
