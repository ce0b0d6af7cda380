#include "reqc/interactions.h"

#include <algorithm>
#include <cmath>

namespace reqc::interactions {

double dipole_shift(const DipoleModel& model, const Vec3& displacement) {
    const double r2 = displacement.norm2();
    require(r2 > 0.0, "dipole_shift: zero displacement");
    require(model.coupling_mhz_nm3 > 0.0, "dipole_shift: coupling constant must be > 0");
    const double r = std::sqrt(r2);
    const double base = model.coupling_mhz_nm3 / (r2 * r);
    if (model.mode == DipoleMode::isotropic) {
        return base;
    }
    const double cos2 = displacement.z * displacement.z / r2;
    return base * (1.0 - 3.0 * cos2);
}

double interaction_radius(const DipoleModel& model, double min_shift_mhz) {
    require(min_shift_mhz > 0.0, "interaction_radius: minimum shift must be > 0");
    const double peak = model.mode == DipoleMode::isotropic ? 1.0 : 2.0;
    return std::cbrt(peak * model.coupling_mhz_nm3 / min_shift_mhz);
}

bool energy_transfer_excluded(const Vec3& displacement, double exclusion_radius_nm) {
    return displacement.norm() < exclusion_radius_nm;
}

double relative_transfer_rate(double r_nm, double r_ref_nm) {
    require(r_nm > 0.0 && r_ref_nm > 0.0, "relative_transfer_rate: radii must be > 0");
    return std::pow(r_ref_nm / r_nm, 6);
}

Infidelity cavity_gate_infidelity(const CavityGateParams& p) {
    require(p.coupling_hz > 0.0, "cavity_gate_infidelity: coupling g must be > 0");
    require(p.cavity_decay_hz > 0.0 && p.atomic_decay_hz > 0.0, "cavity_gate_infidelity: decay rates must be > 0");
    const double ratio = p.cavity_decay_hz * p.atomic_decay_hz / (p.coupling_hz * p.coupling_hz);
    const double value = p.scheme == CavityGateScheme::dispersive ? ratio : std::sqrt(ratio);
    return {std::min(value, 1.0), value >= 1.0};
}

}  // namespace reqc::interactions
