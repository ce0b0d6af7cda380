#include "reqc/readout.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "reqc/csv.h"

namespace reqc::readout {

namespace {

constexpr double kNegInf = -kInf;
constexpr std::uint64_t kTransferStream = 0x7472616e73666572ULL;

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// k * log(rate) with the 0 * log(0) = 0 convention.
double log_pow(double rate, std::int64_t k) {
    if (k == 0) return 0.0;
    return rate > 0.0 ? static_cast<double>(k) * std::log(rate) : kNegInf;
}

// log of the integral of exp(lambda * tau) over [u, v].
double log_exp_integral(double lambda, double u, double v) {
    const double w = v - u;
    if (w <= 0.0) return kNegInf;
    if (std::abs(lambda) * w < 1e-10) {
        return std::log(w) + lambda * 0.5 * (u + v);
    }
    if (lambda > 0.0) {
        return lambda * v + std::log(-std::expm1(-lambda * w)) - std::log(lambda);
    }
    return lambda * u + std::log(-std::expm1(lambda * w)) - std::log(-lambda);
}

void append_arrivals(double rate, double from, double to, Rng& rng, std::vector<double>& out) {
    if (rate <= 0.0) return;
    double t = from;
    for (;;) {
        t += exponential(rng, rate);
        if (t >= to) return;
        out.push_back(t);
    }
}

QubitState trial_state(std::int64_t trial) { return trial % 2 == 0 ? QubitState::bright : QubitState::dark; }

void score_trial(const ReadoutConfig& config, std::span<const double> durations, double horizon,
                 std::uint64_t seed, std::int64_t trial, std::vector<std::int64_t>& correct) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(trial));
    const ReadoutTrace trace = simulate_trace(config, trial_state(trial), horizon, rng);
    for (std::size_t i = 0; i < durations.size(); ++i) {
        const auto end = std::lower_bound(trace.detections_s.begin(), trace.detections_s.end(), durations[i]);
        const std::span<const double> prefix(trace.detections_s.data(),
                                             static_cast<std::size_t>(end - trace.detections_s.begin()));
        const auto ll = trace_log_likelihood(prefix, durations[i], config);
        correct[i] += decide(ll, config.prior_bright, trace.true_initial_state).correct ? 1 : 0;
    }
}

std::vector<FidelityPoint> to_points(std::span<const double> durations, const std::vector<std::int64_t>& correct,
                                     std::int64_t trials) {
    std::vector<FidelityPoint> out;
    out.reserve(durations.size());
    for (std::size_t i = 0; i < durations.size(); ++i) {
        const double f = static_cast<double>(correct[i]) / static_cast<double>(trials);
        out.push_back({durations[i], f, std::sqrt(f * (1.0 - f) / static_cast<double>(trials)), trials});
    }
    return out;
}

double curve_horizon(std::span<const double> durations) {
    double h = 0.0;
    for (double d : durations) {
        require(d >= 0.0, "fidelity_curve: durations must be >= 0");
        h = std::max(h, d);
    }
    return h;
}

bool buffer_trial_correct(const ReadoutConfig& config, int cycles, std::uint64_t seed, std::int64_t trial) {
    Rng transfer_rng = make_rng(stream_seed(seed, kTransferStream), static_cast<std::uint64_t>(trial));
    const QubitState initial = trial_state(trial);
    QubitState qubit = initial;
    const double window = config.buffer_window_s();
    std::vector<LogLikelihood> lls;
    lls.reserve(static_cast<std::size_t>(cycles));
    for (int c = 0; c < cycles; ++c) {
        if (uniform01(transfer_rng) < config.transfer_error) {
            qubit = uniform01(transfer_rng) < 0.5 ? QubitState::bright : QubitState::dark;
        }
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(trial) * static_cast<std::uint64_t>(cycles) +
                                     static_cast<std::uint64_t>(c));
        const ReadoutTrace trace = simulate_trace(config, qubit, window, rng);
        lls.push_back(trace_log_likelihood(trace.detections_s, window, config));
    }
    const double posterior = fuse_cycles(lls, config.transfer_error, config.prior_bright);
    const QubitState decided = posterior > 0.5 ? QubitState::bright : QubitState::dark;
    return decided == initial;
}

BufferResult make_buffer_result(const ReadoutConfig& config, int cycles, std::int64_t correct,
                                std::int64_t trials) {
    const double f = static_cast<double>(correct) / static_cast<double>(trials);
    return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(trials)), cycles * config.buffer_window_s(), cycles,
            trials};
}

}  // namespace

const char* to_string(QubitState s) { return s == QubitState::bright ? "bright" : "dark"; }

void ReadoutConfig::validate() const {
    require(detection_rate > 0.0, "readout: detection_rate must be > 0");
    require(background_rate >= 0.0, "readout: background_rate must be >= 0");
    require(shift_over_decay > 0.0, "readout: shift_over_decay must be > 0");
    require(qubit_lifetime_ratio > 0.0, "readout: qubit_lifetime_ratio must be > 0");
    require(dark_leak_fraction >= 0.0 && dark_leak_fraction <= 1.0, "readout: dark_leak_fraction must be in [0, 1]");
    require(transfer_error >= 0.0 && transfer_error <= 1.0, "readout: transfer_error must be in [0, 1]");
    require(prior_bright >= 0.0 && prior_bright <= 1.0, "readout: prior_bright must be in [0, 1]");
    require(buffer_cycles >= 1, "readout: buffer_cycles must be >= 1");
    require(buffer_window_ratio > 0.0, "readout: buffer_window_ratio must be > 0");
}

ReadoutTrace simulate_trace(const ReadoutConfig& config, QubitState state, double duration_s, Rng& rng) {
    config.validate();
    require(duration_s >= 0.0, "simulate_trace: duration must be >= 0");
    ReadoutTrace trace;
    trace.duration_s = duration_s;
    trace.true_initial_state = state;
    // The decay time is drawn for both states so a trace's stream usage does
    // not depend on the state beyond the arrivals themselves.
    const double decay = exponential(rng, config.decay_rate());
    if (state == QubitState::bright) {
        append_arrivals(config.bright_rate(), 0.0, duration_s, rng, trace.detections_s);
        return trace;
    }
    const double switch_on = std::min(decay, duration_s);
    append_arrivals(config.dark_rate(), 0.0, switch_on, rng, trace.detections_s);
    if (decay < duration_s) {
        trace.decay_time_s = decay;
        append_arrivals(config.bright_rate(), decay, duration_s, rng, trace.detections_s);
    }
    return trace;
}

ReadoutTrace simulate_trace(const ReadoutConfig& config, QubitState state, double duration_s, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return simulate_trace(config, state, duration_s, rng);
}

LogLikelihood trace_log_likelihood(std::span<const double> detections, double duration, const ReadoutConfig& config) {
    const double b = config.bright_rate();
    const double a = config.dark_rate();
    const double gamma = config.decay_rate();
    const auto k = static_cast<std::int64_t>(detections.size());

    LogLikelihood ll;
    ll.bright = log_pow(b, k) - b * duration;

    // No decay inside the window.
    double dark = -gamma * duration + log_pow(a, k) - a * duration;
    if (gamma > 0.0) {
        // Decay at tau in [t_j, t_{j+1}): j detections at rate a, the rest at rate b.
        const double lambda = b - a - gamma;
        const double base = std::log(gamma) - b * duration;
        for (std::int64_t j = 0; j <= k; ++j) {
            const double pre = log_pow(a, j);
            if (pre == kNegInf) break;
            const double u = j == 0 ? 0.0 : detections[static_cast<std::size_t>(j - 1)];
            const double v = j == k ? duration : detections[static_cast<std::size_t>(j)];
            const double seg = log_exp_integral(lambda, u, v);
            if (seg == kNegInf) continue;
            dark = log_add(dark, base + pre + log_pow(b, k - j) + seg);
        }
    }
    ll.dark = dark;
    return ll;
}

DiscriminationResult decide(const LogLikelihood& ll, double prior_bright, QubitState truth) {
    const double lb = std::log(prior_bright) + ll.bright;
    const double ld = std::log1p(-prior_bright) + ll.dark;
    DiscriminationResult r;
    if (lb == kNegInf && ld == kNegInf) {
        r.posterior_bright = prior_bright;
    } else if (ld == kNegInf) {
        r.posterior_bright = 1.0;
    } else if (lb == kNegInf) {
        r.posterior_bright = 0.0;
    } else {
        r.posterior_bright = 1.0 / (1.0 + std::exp(ld - lb));
    }
    r.decided = r.posterior_bright > 0.5 ? QubitState::bright : QubitState::dark;
    r.correct = r.decided == truth;
    return r;
}

DiscriminationResult bayes_discriminate(const ReadoutTrace& trace, const ReadoutConfig& config) {
    config.validate();
    return decide(trace_log_likelihood(trace.detections_s, trace.duration_s, config), config.prior_bright,
                  trace.true_initial_state);
}

LogLikelihood binned_log_likelihood(std::span<const int> counts, double bin_width, const ReadoutConfig& config) {
    require(bin_width > 0.0, "binned_log_likelihood: bin width must be > 0");
    const double b = config.bright_rate() * bin_width;
    const double a = config.dark_rate() * bin_width;
    const double log_flip = std::log(-std::expm1(-config.decay_rate() * bin_width));
    const double log_stay = -config.decay_rate() * bin_width;

    auto emit = [](double mean, int c) { return log_pow(mean, c) - mean - std::lgamma(c + 1.0); };

    LogLikelihood ll;
    // Forward pass over {dark, bright} for the dark hypothesis.
    double dark = 0.0;
    double bright = kNegInf;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        require(counts[i] >= 0, "binned_log_likelihood: counts must be >= 0");
        if (i > 0) {
            const double nd = dark + log_stay;
            const double nb = log_add(bright, dark + log_flip);
            dark = nd;
            bright = nb;
        }
        dark += emit(a, counts[i]);
        bright += emit(b, counts[i]);
        ll.bright += emit(b, counts[i]);
    }
    ll.dark = log_add(dark, bright);
    return ll;
}

DiscriminationResult bayes_discriminate_binned(std::span<const int> counts, double bin_width,
                                               const ReadoutConfig& config, QubitState truth) {
    config.validate();
    return decide(binned_log_likelihood(counts, bin_width, config), config.prior_bright, truth);
}

std::vector<int> bin_trace(const ReadoutTrace& trace, int bins) {
    require(bins >= 1, "bin_trace: need at least one bin");
    require(trace.duration_s > 0.0, "bin_trace: duration must be > 0");
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    const double width = trace.duration_s / bins;
    for (double t : trace.detections_s) {
        const auto i = std::min(bins - 1, static_cast<int>(t / width));
        ++counts[static_cast<std::size_t>(i)];
    }
    return counts;
}

std::vector<FidelityPoint> fidelity_curve_reference(const ReadoutConfig& config, std::span<const double> durations,
                                                    std::int64_t trials, std::uint64_t seed) {
    config.validate();
    require(trials >= 1, "fidelity_curve: trials must be >= 1");
    const double horizon = curve_horizon(durations);
    std::vector<std::int64_t> correct(durations.size(), 0);
    for (std::int64_t t = 0; t < trials; ++t) {
        score_trial(config, durations, horizon, seed, t, correct);
    }
    return to_points(durations, correct, trials);
}

std::vector<FidelityPoint> fidelity_curve(const ReadoutConfig& config, std::span<const double> durations,
                                          std::int64_t trials, std::uint64_t seed) {
    config.validate();
    require(trials >= 1, "fidelity_curve: trials must be >= 1");
    const double horizon = curve_horizon(durations);
    std::vector<std::int64_t> correct(durations.size(), 0);
#pragma omp parallel
    {
        std::vector<std::int64_t> local(durations.size(), 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t t = 0; t < trials; ++t) {
            score_trial(config, durations, horizon, seed, t, local);
        }
#pragma omp critical
        for (std::size_t i = 0; i < local.size(); ++i) {
            correct[i] += local[i];
        }
    }
    return to_points(durations, correct, trials);
}

void write_fidelity_csv(std::ostream& out, std::span<const FidelityPoint> points) {
    out << "duration_us,fidelity,stderr,trials\n";
    for (const auto& p : points) {
        out << csv_line({fmt_g6(p.duration_s * 1e6), fmt_g6(p.fidelity), fmt_g6(p.std_error), std::to_string(p.trials)});
    }
    if (!out) {
        throw IoError("write_fidelity_csv: stream failure");
    }
}

double fuse_cycles(std::span<const LogLikelihood> cycles, double transfer_error, double prior_bright) {
    require(!cycles.empty(), "fuse_cycles: need at least one cycle");
    // Each transfer re-randomises the qubit with probability p: flip with p / 2.
    const double flip = 0.5 * transfer_error;
    const double log_flip = flip > 0.0 ? std::log(flip) : kNegInf;
    const double log_keep = std::log1p(-flip);

    // Backward messages beta[s] = log P(observations from this cycle on | qubit state s at this cycle).
    std::array<double, 2> beta{0.0, 0.0};  // [bright, dark]
    for (std::size_t c = cycles.size(); c-- > 0;) {
        std::array<double, 2> next = beta;
        if (c + 1 < cycles.size()) {
            next[0] = log_add(log_keep + beta[0], log_flip + beta[1]);
            next[1] = log_add(log_flip + beta[0], log_keep + beta[1]);
        }
        beta = {cycles[c].bright + next[0], cycles[c].dark + next[1]};
    }
    // The first transfer can already corrupt the copy.
    const LogLikelihood initial{log_add(log_keep + beta[0], log_flip + beta[1]),
                                log_add(log_flip + beta[0], log_keep + beta[1])};
    return decide(initial, prior_bright, QubitState::bright).posterior_bright;
}

BufferResult buffer_protocol_reference(const ReadoutConfig& config, int cycles, std::int64_t trials,
                                       std::uint64_t seed) {
    config.validate();
    require(cycles >= 1, "buffer_protocol: cycles must be >= 1");
    require(trials >= 1, "buffer_protocol: trials must be >= 1");
    std::int64_t correct = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        correct += buffer_trial_correct(config, cycles, seed, t) ? 1 : 0;
    }
    return make_buffer_result(config, cycles, correct, trials);
}

BufferResult buffer_protocol(const ReadoutConfig& config, int cycles, std::int64_t trials, std::uint64_t seed) {
    config.validate();
    require(cycles >= 1, "buffer_protocol: cycles must be >= 1");
    require(trials >= 1, "buffer_protocol: trials must be >= 1");
    std::int64_t correct = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct)
    for (std::int64_t t = 0; t < trials; ++t) {
        correct += buffer_trial_correct(config, cycles, seed, t) ? 1 : 0;
    }
    return make_buffer_result(config, cycles, correct, trials);
}

}  // namespace reqc::readout
