#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>
#include <sstream>

#include "reqc/readout.h"
#include "reqc/validation/oracles.h"

using namespace reqc;
using namespace reqc::readout;

namespace {

// Best achievable buffer fidelity if every cycle revealed the buffer state perfectly:
// enumerate all observed state sequences under the transfer Markov chain.
double perfect_observation_bound(double transfer_error, int cycles) {
    const double flip = 0.5 * transfer_error;
    double total = 0.0;
    for (unsigned obs = 0; obs < (1u << cycles); ++obs) {
        double p[2];
        for (int initial = 0; initial < 2; ++initial) {
            double prob = 1.0;
            int prev = initial;
            for (int c = 0; c < cycles; ++c) {
                const int s = (obs >> c) & 1u;
                prob *= s == prev ? 1.0 - flip : flip;
                prev = s;
            }
            p[initial] = prob;
        }
        total += 0.5 * std::max(p[0], p[1]);
    }
    return total;
}

}  // namespace

TEST(Readout, DarkWithoutDecayOrBackgroundIsSilent) {
    ReadoutConfig cfg;
    cfg.qubit_lifetime_ratio = kInf;
    for (std::uint64_t s = 0; s < 200; ++s) {
        EXPECT_TRUE(simulate_trace(cfg, QubitState::dark, 1e-4, s).detections_s.empty());
    }
}

TEST(Readout, BrightCountIsPoissonMean) {
    const ReadoutConfig cfg;
    const double duration = 10.0 / cfg.detection_rate;
    const int n = 10000;
    double sum = 0.0;
    for (int s = 0; s < n; ++s) {
        sum += static_cast<double>(simulate_trace(cfg, QubitState::bright, duration, s).detections_s.size());
    }
    EXPECT_NEAR(sum / n, 10.0, 3.0 * std::sqrt(10.0 / n));
}

TEST(Readout, TracesAreDeterministicAndSorted) {
    const ReadoutConfig cfg;
    const auto a = simulate_trace(cfg, QubitState::bright, 2e-5, 123);
    const auto b = simulate_trace(cfg, QubitState::bright, 2e-5, 123);
    EXPECT_EQ(a.detections_s, b.detections_s);
    EXPECT_TRUE(std::is_sorted(a.detections_s.begin(), a.detections_s.end()));
    for (double t : a.detections_s) EXPECT_LT(t, 2e-5);
}

TEST(Readout, EmptyWindowDecidesDarkConfidently) {
    const ReadoutConfig cfg;
    const double duration = 10.0 / cfg.detection_rate;
    const auto ll = trace_log_likelihood({}, duration, cfg);
    const auto r = decide(ll, 0.5, QubitState::dark);
    EXPECT_EQ(r.decided, QubitState::dark);
    EXPECT_LT(r.posterior_bright, 1e-3);
    EXPECT_NEAR(ll.bright, -10.0, 1e-12);
}

TEST(Readout, DetectionWithoutDarkChannelIsCertainBright) {
    ReadoutConfig cfg;
    cfg.qubit_lifetime_ratio = kInf;
    const std::vector<double> det{3e-7};
    const auto r = decide(trace_log_likelihood(det, 1e-6, cfg), 0.5, QubitState::bright);
    EXPECT_EQ(r.decided, QubitState::bright);
    EXPECT_DOUBLE_EQ(r.posterior_bright, 1.0);
}

TEST(Readout, ZeroDurationTieGoesDark) {
    const ReadoutConfig cfg;
    ReadoutTrace t;
    t.duration_s = 0.0;
    t.true_initial_state = QubitState::dark;
    const auto r = bayes_discriminate(t, cfg);
    EXPECT_DOUBLE_EQ(r.posterior_bright, 0.5);
    EXPECT_EQ(r.decided, QubitState::dark);
    EXPECT_TRUE(r.correct);
}

TEST(Readout, DarkLikelihoodMatchesQuadrature) {
    ReadoutConfig cfg;
    cfg.qubit_lifetime_ratio = 3.0;
    cfg.background_rate = 2e5;
    cfg.dark_leak_fraction = 0.05;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto state = s % 2 ? QubitState::dark : QubitState::bright;
        const auto trace = simulate_trace(cfg, state, 6e-6, s);
        const double closed = trace_log_likelihood(trace.detections_s, trace.duration_s, cfg).dark;
        const double quad = std::log(oracle::dark_likelihood_quadrature(trace.detections_s, trace.duration_s, cfg));
        EXPECT_NEAR(closed, quad, 1e-7) << "seed " << s;
    }
}

TEST(Readout, BinnedMatchesExhaustiveEnumeration) {
    Rng rng = make_rng(5, 5);
    for (int c = 0; c < 60; ++c) {
        ReadoutConfig cfg;
        cfg.qubit_lifetime_ratio = 2.0 + 10.0 * uniform01(rng);
        cfg.background_rate = 1e5 * uniform01(rng);
        const int bins = 1 + c % 10;
        const double width = 0.5e-6;
        const auto trace = simulate_trace(cfg, c % 2 ? QubitState::dark : QubitState::bright, width * bins, rng);
        const auto counts = bin_trace(trace, bins);
        const auto fast = bayes_discriminate_binned(counts, width, cfg, trace.true_initial_state);
        const auto slow = oracle::exhaustive_map(counts, width, cfg);
        EXPECT_EQ(fast.decided, slow.decided);
        EXPECT_NEAR(fast.posterior_bright, slow.posterior_bright, 1e-10);
    }
}

TEST(Readout, BinTraceConservesCounts) {
    const ReadoutConfig cfg;
    const auto trace = simulate_trace(cfg, QubitState::bright, 2e-5, 77);
    const auto counts = bin_trace(trace, 7);
    int total = 0;
    for (int k : counts) total += k;
    EXPECT_EQ(static_cast<std::size_t>(total), trace.detections_s.size());
    EXPECT_THROW(bin_trace(trace, 0), DomainError);
}

TEST(Readout, FidelityCurveLimits) {
    const ReadoutConfig cfg;
    const std::vector<double> d{0.0, 1e-6, 5e-6, 20e-6};
    const auto pts = fidelity_curve(cfg, d, 4000, 3);
    EXPECT_DOUBLE_EQ(pts[0].fidelity, 0.5);
    EXPECT_LT(pts[1].fidelity, pts[2].fidelity);
    EXPECT_GT(pts[3].fidelity, 0.99);

    ReadoutConfig stable = cfg;
    stable.qubit_lifetime_ratio = kInf;
    const std::vector<double> longer{50e-6};
    EXPECT_DOUBLE_EQ(fidelity_curve(stable, longer, 2000, 3)[0].fidelity, 1.0);
}

TEST(Readout, FidelityCurveScaleInvariant) {
    ReadoutConfig cfg;
    cfg.qubit_lifetime_ratio = 20.0;
    const std::vector<double> d{2e-6, 5e-6};
    ReadoutConfig fast = cfg;
    fast.detection_rate *= 4.0;
    const std::vector<double> d4{0.5e-6, 1.25e-6};
    const auto a = fidelity_curve(cfg, d, 20000, 1);
    const auto b = fidelity_curve(fast, d4, 20000, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double sigma = std::hypot(a[i].std_error, b[i].std_error);
        EXPECT_NEAR(a[i].fidelity, b[i].fidelity, 3.0 * sigma + 1e-12);
    }
}

TEST(Readout, ParallelMatchesReference) {
    ReadoutConfig cfg;
    cfg.qubit_lifetime_ratio = 50.0;
    const std::vector<double> d{1e-6, 3e-6, 8e-6};
    const int saved = omp_get_max_threads();
    for (int threads : {1, 3, 8}) {
        omp_set_num_threads(threads);
        const auto par = fidelity_curve(cfg, d, 3000, 9);
        const auto ref = fidelity_curve_reference(cfg, d, 3000, 9);
        for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(par[i].fidelity, ref[i].fidelity);
        EXPECT_EQ(buffer_protocol(cfg, 3, 2000, 9).fidelity, buffer_protocol_reference(cfg, 3, 2000, 9).fidelity);
    }
    omp_set_num_threads(saved);
}

TEST(Readout, SingleCycleBufferReducesToFidelityCurve) {
    ReadoutConfig cfg;
    cfg.transfer_error = 0.0;
    cfg.qubit_lifetime_ratio = 30.0;
    const std::vector<double> window{cfg.buffer_window_s()};
    const auto curve = fidelity_curve(cfg, window, 5000, 13);
    const auto buf = buffer_protocol(cfg, 1, 5000, 13);
    EXPECT_EQ(buf.fidelity, curve[0].fidelity);
    EXPECT_DOUBLE_EQ(buf.total_duration_s, window[0]);
}

TEST(Readout, HalfTransferErrorCapsFidelity) {
    ReadoutConfig cfg;
    cfg.transfer_error = 0.5;
    for (int cycles = 1; cycles <= 6; ++cycles) {
        const double bound = perfect_observation_bound(0.5, cycles);
        EXPECT_LE(bound, 0.75 + 1e-12);
        const auto r = buffer_protocol(cfg, cycles, 4000, 21);
        EXPECT_LE(r.fidelity, bound + 3.0 * r.std_error) << cycles << " cycles";
    }
    EXPECT_DOUBLE_EQ(perfect_observation_bound(0.0, 4), 1.0);
}

TEST(Readout, BufferReachesTargetAtFortyMicroseconds) {
    const ReadoutConfig cfg;
    const auto r = buffer_protocol(cfg, cfg.buffer_cycles, 20000, 4);
    EXPECT_DOUBLE_EQ(r.total_duration_s, 40e-6);
    EXPECT_GE(r.fidelity + 3 * r.std_error, 0.999 - 5e-4);
}

TEST(Readout, FuseCyclesPerfectTransfer) {
    // With perfect transfers fusion is a plain product of likelihoods.
    const std::vector<LogLikelihood> lls{{-1.0, -2.0}, {-0.5, -0.1}, {-3.0, -3.5}};
    const double post = fuse_cycles(lls, 0.0, 0.5);
    EXPECT_NEAR(post, 1.0 / (1.0 + std::exp(-5.6 - (-4.5))), 1e-12);
    // A fully random first transfer leaves nothing to learn.
    EXPECT_NEAR(fuse_cycles(lls, 1.0, 0.5), 0.5, 1e-12);
    EXPECT_THROW(fuse_cycles({}, 0.0, 0.5), DomainError);
}

TEST(Readout, ConfigValidation) {
    ReadoutConfig cfg;
    cfg.detection_rate = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.transfer_error = 2.0;
    EXPECT_THROW(buffer_protocol(cfg, 1, 10, 0), DomainError);
    EXPECT_THROW(buffer_protocol(ReadoutConfig{}, 0, 10, 0), DomainError);
}

TEST(Readout, FidelityCsvFormat) {
    const std::vector<FidelityPoint> pts{{1e-6, 0.82, 0.0121, 1000}};
    std::ostringstream out;
    write_fidelity_csv(out, pts);
    EXPECT_EQ(out.str(), "duration_us,fidelity,stderr,trials\n1,0.82,0.0121,1000\n");
}
