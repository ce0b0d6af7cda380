#pragma once

#include <string>
#include <vector>

#include "reqc/common.h"

namespace reqc::cavity {

struct CavityParams {
    double quality_factor = 0.0;
    // In units of (lambda/n)^3.
    double mode_volume = 0.0;
    double branching_ratio = 1.0;
    // kappa_x / kappa.
    double outcoupling_ratio = 1.0;
    double wavelength_m = 580e-9;

    void validate() const;
};

struct EmitterParams {
    double lifetime_s = 0.0;
    double pure_dephasing_s = kInf;

    double free_space_rate() const { return 1.0 / lifetime_s; }
    void validate() const;
};

struct BudgetStage {
    std::string label;
    double efficiency = 1.0;
};

struct BudgetChain {
    double source_rate = 0.0;
    std::vector<BudgetStage> stages;
};

/// Purcell factor without the branching ratio: (3 / 4 pi^2) Q / V.
double ideal_purcell(const CavityParams& cavity);

/// Lifetime-reduction factor on the cavity-coupled transition, zeta times the ideal value.
double effective_purcell(const CavityParams& cavity);

/// Emission rate (F_p + 1) / T1 in 1/s.
double enhanced_rate(double purcell, const EmitterParams& emitter);

/// Fraction of emission going into the cavity mode.
double beta_factor(double purcell);

/// T2 from 1/T2 = 1/(2 T1) + 1/T2*. Either time may be infinite.
double total_dephasing(const EmitterParams& emitter);

/// T2 / (2 T1_eff). Pass T1 for the bare value or T1 / (F_p + 1) inside a cavity.
double indistinguishability(double t2_s, double t1_effective_s);

double cooperativity(double indistinguishability, double purcell);

/// True iff C > 2 pi T1 gamma_h (strict).
bool fourier_limit_check(double cooperativity, double t1_s, double linewidth_hz);

/// Detected photon rate after every stage of the chain.
double photon_budget(const BudgetChain& chain);

/// Homogeneous linewidth 1 / (pi T2) in Hz.
double homogeneous_linewidth(double t2_s);

/// Converts an absolute mode volume (m^3) into (lambda/n)^3 units.
double mode_volume_in_cubic_wavelengths(double volume_m3, double wavelength_m, double refractive_index);

}  // namespace reqc::cavity
