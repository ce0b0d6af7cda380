#pragma once

#include "reqc/common.h"

namespace reqc::interactions {

enum class DipoleMode { isotropic, angular };
enum class DipoleKind { electric, magnetic };

// 600 MHz nm^3 puts the blockade shift at 75 MHz for a 2 nm separation.
inline constexpr double kDefaultCouplingMhzNm3 = 600.0;
inline constexpr double kDefaultExclusionRadiusNm = 1.0;

struct DipoleModel {
    double coupling_mhz_nm3 = kDefaultCouplingMhzNm3;
    DipoleMode mode = DipoleMode::isotropic;
    DipoleKind kind = DipoleKind::electric;
};

/// Frequency shift in MHz for an ion pair separated by `displacement` (nm).
/// Angular mode keeps the sign of (1 - 3 cos^2 theta) with theta measured from z.
double dipole_shift(const DipoleModel& model, const Vec3& displacement);

/// Largest separation at which |shift| can still reach `min_shift_mhz`.
double interaction_radius(const DipoleModel& model, double min_shift_mhz);

bool energy_transfer_excluded(const Vec3& displacement, double exclusion_radius_nm = kDefaultExclusionRadiusNm);

/// (r_ref / r)^6.
double relative_transfer_rate(double r_nm, double r_ref_nm);

enum class CavityGateScheme { excitation_transfer, dispersive };

struct CavityGateParams {
    double cavity_decay_hz = 0.0;
    double atomic_decay_hz = 0.0;
    double coupling_hz = 0.0;
    CavityGateScheme scheme = CavityGateScheme::excitation_transfer;
};

struct Infidelity {
    double value = 0.0;
    // Set when the scaling law is pushed past the regime where it means anything.
    bool beyond_validity = false;
};

Infidelity cavity_gate_infidelity(const CavityGateParams& params);

}  // namespace reqc::interactions
