#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "reqc/common.h"

namespace reqc::readout {

enum class QubitState { bright, dark };

const char* to_string(QubitState s);

// Chance per qubit -> buffer transfer that the qubit decays during the
// transfer pulse and its state is re-randomised. Chosen so the default
// four-cycle buffer readout lands at 99.9% after 40 us.
inline constexpr double kDefaultTransferError = 1.5e-3;

struct ReadoutConfig {
    /// Detected photons per second while the readout ion is bright.
    double detection_rate = 1e6;
    double background_rate = 0.0;
    /// Blockade shift over readout decay rate. Only gates validity; see dark_leak_fraction.
    double shift_over_decay = 5.0;
    /// Qubit T1 in units of 1 / detection_rate. Infinity disables decay.
    double qubit_lifetime_ratio = 1e4;
    /// Residual bright rate of a blockaded readout ion, as a fraction of detection_rate.
    double dark_leak_fraction = 0.0;
    double transfer_error = kDefaultTransferError;
    double prior_bright = 0.5;
    /// Buffer protocol: number of qubit -> buffer cycles and window per cycle (units of 1 / rate).
    int buffer_cycles = 4;
    double buffer_window_ratio = 10.0;

    void validate() const;

    double bright_rate() const { return detection_rate + background_rate; }
    double dark_rate() const { return background_rate + dark_leak_fraction * detection_rate; }
    double decay_rate() const { return std::isinf(qubit_lifetime_ratio) ? 0.0 : detection_rate / qubit_lifetime_ratio; }
    double buffer_window_s() const { return buffer_window_ratio / detection_rate; }
};

struct ReadoutTrace {
    double duration_s = 0.0;
    std::vector<double> detections_s;
    QubitState true_initial_state = QubitState::bright;
    /// When a dark qubit decayed and the readout ion turned bright.
    std::optional<double> decay_time_s;
};

ReadoutTrace simulate_trace(const ReadoutConfig& config, QubitState state, double duration_s, Rng& rng);
ReadoutTrace simulate_trace(const ReadoutConfig& config, QubitState state, double duration_s, std::uint64_t seed);

struct LogLikelihood {
    double bright = 0.0;
    double dark = 0.0;
};

/// Exact continuous-time likelihoods of the detections in [0, duration_s)
/// under "bright from t = 0" and "dark, decaying at a random exponential time".
LogLikelihood trace_log_likelihood(std::span<const double> detections_s, double duration_s,
                                   const ReadoutConfig& config);

struct DiscriminationResult {
    QubitState decided = QubitState::dark;
    double posterior_bright = 0.5;
    bool correct = false;
};

/// Posterior from log-likelihoods; ties go to dark.
DiscriminationResult decide(const LogLikelihood& ll, double prior_bright, QubitState truth);

DiscriminationResult bayes_discriminate(const ReadoutTrace& trace, const ReadoutConfig& config);

/// Discrete-time variant on binned counts. The dark qubit may decay only at
/// bin boundaries, with probability 1 - exp(-gamma * bin_width) per boundary.
LogLikelihood binned_log_likelihood(std::span<const int> counts, double bin_width_s, const ReadoutConfig& config);

DiscriminationResult bayes_discriminate_binned(std::span<const int> counts, double bin_width_s,
                                               const ReadoutConfig& config, QubitState truth);

std::vector<int> bin_trace(const ReadoutTrace& trace, int bins);

struct FidelityPoint {
    double duration_s = 0.0;
    double fidelity = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

/// Monte-Carlo readout fidelity. Trial t uses stream t of `seed`, alternating
/// true states, and is scored on prefixes of a single trace at every duration.
std::vector<FidelityPoint> fidelity_curve(const ReadoutConfig& config, std::span<const double> durations_s,
                                          std::int64_t trials, std::uint64_t seed);
std::vector<FidelityPoint> fidelity_curve_reference(const ReadoutConfig& config, std::span<const double> durations_s,
                                                    std::int64_t trials, std::uint64_t seed);

struct BufferResult {
    double fidelity = 0.0;
    double std_error = 0.0;
    double total_duration_s = 0.0;
    int cycles = 0;
    std::int64_t trials = 0;
};

/// Buffer-ion readout: the qubit's state is copied to a buffer ion `cycles`
/// times and each copy is read for one window. A failed transfer re-randomises
/// the qubit. Cycle likelihoods are fused with a two-state forward pass.
BufferResult buffer_protocol(const ReadoutConfig& config, int cycles, std::int64_t trials, std::uint64_t seed);
BufferResult buffer_protocol_reference(const ReadoutConfig& config, int cycles, std::int64_t trials,
                                       std::uint64_t seed);

/// Columns: duration_us, fidelity, stderr, trials.
void write_fidelity_csv(std::ostream& out, std::span<const FidelityPoint> points);

/// Posterior P(initial = bright) from per-cycle likelihoods under the transfer model.
double fuse_cycles(std::span<const LogLikelihood> cycles, double transfer_error, double prior_bright);

}  // namespace reqc::readout
