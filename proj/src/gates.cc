#include "reqc/gates.h"

#include <algorithm>
#include <cmath>

namespace reqc::gates {

bool satisfies_time_bandwidth(const GatePulse& pulse, double floor) {
    require(pulse.duration_s > 0.0 && pulse.bandwidth_mhz > 0.0, "pulse: duration and bandwidth must be > 0");
    return pulse.duration_s * pulse.bandwidth_mhz * 1e6 >= floor;
}

std::vector<GatePulse> blockade_cnot_sequence(double pulse_duration_s, double bandwidth_mhz) {
    return {
        {pulse_duration_s, bandwidth_mhz, PulseRole::excite_control},
        {pulse_duration_s, bandwidth_mhz, PulseRole::qubit_rotation_1},
        {pulse_duration_s, bandwidth_mhz, PulseRole::qubit_rotation_2},
        {pulse_duration_s, bandwidth_mhz, PulseRole::deexcite_control},
    };
}

double FidelityBudget::term(const std::string& label) const {
    for (const auto& t : terms) {
        if (t.label == label) {
            return t.error;
        }
    }
    return 0.0;
}

FidelityBudget compose_budget(std::vector<ErrorTerm> terms) {
    // Sum log survivals so tiny errors are not swallowed by 1 - e rounding.
    double log_survival = 0.0;
    for (const auto& t : terms) {
        require(t.error >= 0.0 && t.error <= 1.0, "compose_budget: term '" + t.label + "' must be in [0, 1]");
        log_survival += std::log1p(-t.error);
    }
    return {std::move(terms), -std::expm1(log_survival)};
}

FidelityBudget gate_budget(double decoherence, double internal_crosstalk, double external_crosstalk,
                           double blockade_leakage) {
    return compose_budget({{"decoherence", decoherence},
                           {"internal_crosstalk", internal_crosstalk},
                           {"external_crosstalk", external_crosstalk},
                           {"blockade_leakage", blockade_leakage}});
}

double decoherence_error(double excited_time_s, double optical_t2_s) {
    require(optical_t2_s > 0.0, "decoherence_error: T2 must be > 0");
    require(excited_time_s >= 0.0, "decoherence_error: time must be >= 0");
    return -std::expm1(-excited_time_s / optical_t2_s);
}

CnotError cnot_error(double single_gate_error) {
    require(single_gate_error >= 0.0 && single_gate_error <= 1.0, "cnot_error: error must be in [0, 1]");
    const double total = -std::expm1(4.0 * std::log1p(-single_gate_error));
    return {total, single_gate_error > 0.25};
}

BandwidthCheck bandwidth_feasible(double bandwidth_mhz, const crystal::HostMaterial& host, double divisor) {
    require(bandwidth_mhz > 0.0, "bandwidth_feasible: bandwidth must be > 0");
    require(divisor > 0.0, "bandwidth_feasible: divisor must be > 0");
    return {bandwidth_mhz <= host.level_spacing_mhz / divisor, host.level_spacing_mhz / bandwidth_mhz};
}

ShiftErrorModel::ShiftErrorModel(std::vector<std::pair<double, double>> anchors) : anchors_(std::move(anchors)) {
    require(!anchors_.empty(), "ShiftErrorModel: need at least one anchor");
    double sum_log = 0.0;
    for (const auto& [shift, error] : anchors_) {
        require(shift > 0.0 && error > 0.0, "ShiftErrorModel: anchors must be positive");
        sum_log += std::log(shift * error);
    }
    coefficient_ = std::exp(sum_log / static_cast<double>(anchors_.size()));
}

double ShiftErrorModel::error(double shift_mhz) const {
    require(shift_mhz > 0.0, "shift_to_error: shift must be > 0");
    return std::clamp(coefficient_ / shift_mhz, 0.0, 1.0);
}

double ShiftErrorModel::min_shift_for(double max_error) const {
    require(max_error > 0.0, "min_shift_for: error must be > 0");
    return coefficient_ / max_error;
}

const ShiftErrorModel& default_shift_error_model() {
    static const ShiftErrorModel model({{10.0, 2e-3}, {2.5, 1e-2}});
    return model;
}

double shift_to_error(const ShiftErrorModel& model, double shift_mhz) { return model.error(shift_mhz); }

int dark_state_pulse_count(GateKind gate, Regime regime) {
    if (regime == Regime::ensemble) {
        return gate == GateKind::single ? 4 : 12;
    }
    return gate == GateKind::single ? 2 : 4;
}

}  // namespace reqc::gates
