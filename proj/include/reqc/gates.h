#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reqc/crystal.h"

namespace reqc::gates {

enum class PulseRole { excite_control, deexcite_control, qubit_rotation_1, qubit_rotation_2 };

struct GatePulse {
    double duration_s = 0.0;
    double bandwidth_mhz = 0.0;
    PulseRole role = PulseRole::excite_control;
};

inline constexpr double kDefaultTimeBandwidthFloor = 0.5;

bool satisfies_time_bandwidth(const GatePulse& pulse, double floor = kDefaultTimeBandwidthFloor);

/// Blockade CNOT: excite control, two-pulse rotation on the target, de-excite control.
std::vector<GatePulse> blockade_cnot_sequence(double pulse_duration_s, double bandwidth_mhz);

struct ErrorTerm {
    std::string label;
    double error = 0.0;
};

struct FidelityBudget {
    std::vector<ErrorTerm> terms;
    double total = 0.0;

    double term(const std::string& label) const;
};

/// total = 1 - prod(1 - e_i).
FidelityBudget compose_budget(std::vector<ErrorTerm> terms);

/// The four standard gate error sources.
FidelityBudget gate_budget(double decoherence, double internal_crosstalk, double external_crosstalk,
                           double blockade_leakage);

/// 1 - exp(-t / T2), the excited-state dephasing loss over `excited_time_s`.
double decoherence_error(double excited_time_s, double optical_t2_s);

struct CnotError {
    double total = 0.0;
    bool beyond_validity = false;
};

/// Control sits excited through three pulse slots, the target through one:
/// 1 - (1 - e)^4, about 4e for small e.
CnotError cnot_error(double single_gate_error);

struct BandwidthCheck {
    bool internal_ok = false;
    double margin = 0.0;
};

BandwidthCheck bandwidth_feasible(double bandwidth_mhz, const crystal::HostMaterial& host, double divisor = 10.0);

/// error(shift) = a / shift, with a fitted to (shift, error) anchors by least
/// squares on log(error) at fixed slope -1.
class ShiftErrorModel {
public:
    explicit ShiftErrorModel(std::vector<std::pair<double, double>> anchors);

    double coefficient() const { return coefficient_; }
    const std::vector<std::pair<double, double>>& anchors() const { return anchors_; }

    /// Clamped to [0, 1].
    double error(double shift_mhz) const;
    /// Smallest shift whose predicted error is at most `max_error`.
    double min_shift_for(double max_error) const;

private:
    std::vector<std::pair<double, double>> anchors_;
    double coefficient_ = 0.0;
};

/// Anchored at 10 MHz -> 2e-3 and 2.5 MHz -> 1e-2.
const ShiftErrorModel& default_shift_error_model();

double shift_to_error(const ShiftErrorModel& model, double shift_mhz);

enum class GateKind { single, two_qubit };
enum class Regime { ensemble, single_ion };

int dark_state_pulse_count(GateKind gate, Regime regime);

}  // namespace reqc::gates
