#include "reqc/validation/oracles.h"

#include <cmath>
#include <deque>

#include "reqc/interactions.h"

namespace reqc::oracle {

using readout::QubitState;

namespace {

long double poisson_pmf(long double mean, int k) {
    if (mean == 0.0L) return k == 0 ? 1.0L : 0.0L;
    long double p = std::exp(-mean);
    for (int i = 1; i <= k; ++i) {
        p *= mean / i;
    }
    return p;
}

}  // namespace

MapDecision exhaustive_map(std::span<const int> counts, double bin_width, const readout::ReadoutConfig& config) {
    const int bins = static_cast<int>(counts.size());
    const long double bright_mean = config.bright_rate() * bin_width;
    const long double dark_mean = config.dark_rate() * bin_width;
    const long double stay = std::exp(-static_cast<long double>(config.decay_rate()) * bin_width);

    // Bit i of `path` set = readout ion bright during bin i.
    long double like_bright = 0.0L;
    long double like_dark = 0.0L;
    for (std::uint32_t path = 0; path < (1u << bins); ++path) {
        for (int start_bright = 0; start_bright <= 1; ++start_bright) {
            long double p = 1.0L;
            for (int i = 0; i < bins && p > 0.0L; ++i) {
                const bool on = (path >> i) & 1u;
                if (i == 0) {
                    if (on != static_cast<bool>(start_bright)) p = 0.0L;
                } else {
                    const bool prev = (path >> (i - 1)) & 1u;
                    if (prev && !on) p = 0.0L;
                    else if (!prev && !on) p *= stay;
                    else if (!prev && on) p *= 1.0L - stay;
                }
                p *= poisson_pmf(on ? bright_mean : dark_mean, counts[static_cast<std::size_t>(i)]);
            }
            (start_bright ? like_bright : like_dark) += p;
        }
    }
    const long double wb = config.prior_bright * like_bright;
    const long double wd = (1.0L - config.prior_bright) * like_dark;
    MapDecision d;
    d.posterior_bright = wb + wd > 0.0L ? static_cast<double>(wb / (wb + wd)) : config.prior_bright;
    d.decided = wb > wd ? QubitState::bright : QubitState::dark;
    return d;
}

double dark_likelihood_quadrature(std::span<const double> det, double duration, const readout::ReadoutConfig& config,
                                  int panels) {
    const double a = config.dark_rate();
    const double b = config.bright_rate();
    const double g = config.decay_rate();
    const auto k = det.size();

    // Likelihood of the detections given a decay at tau, times the decay density.
    auto integrand = [&](double tau) {
        std::size_t before = 0;
        while (before < k && det[before] < tau) ++before;
        double v = g * std::exp(-g * tau) * std::exp(-a * tau - b * (duration - tau));
        v *= std::pow(a, static_cast<double>(before)) * std::pow(b, static_cast<double>(k - before));
        return v;
    };

    double total = std::exp(-g * duration) * std::pow(a, static_cast<double>(k)) * std::exp(-a * duration);
    if (g == 0.0) return total;
    std::vector<double> knots{0.0};
    for (double t : det) knots.push_back(t);
    knots.push_back(duration);
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double lo = knots[s], hi = knots[s + 1];
        if (hi <= lo) continue;
        const double h = (hi - lo) / (2 * panels);
        // Evaluate just inside the gap so the detection count is the gap's own.
        const double eps = 1e-12 * (hi - lo);
        double sum = integrand(lo + eps) + integrand(hi - eps);
        for (int i = 1; i < 2 * panels; ++i) {
            sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + i * h);
        }
        total += sum * h / 3.0;
    }
    return total;
}

std::set<std::int64_t> reachable_qubits(const crystal::DopantEnsemble& ens, const nodesearch::SearchConfig& config) {
    const auto& ds = ens.dopants;
    const std::size_t n = ds.size();
    std::size_t root = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (ds[i].species == crystal::Species::readout) root = i;
    }
    if (root == n) return {};

    std::vector<char> usable(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (ds[i].position - ds[root].position).norm();
        usable[i] = ds[i].species == crystal::Species::qubit && r >= config.exclusion_radius_nm;
    }
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec3 d = ds[i].position - ds[j].position;
            if (d.norm2() == 0.0) continue;
            adj[i][j] = std::abs(interactions::dipole_shift(config.dipole, d)) >= config.min_shift_mhz;
        }
    }
    std::set<std::int64_t> out;
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> q{root};
    seen[root] = 1;
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop_front();
        for (std::size_t w = 0; w < n; ++w) {
            if (adj[v][w] && usable[w] && !seen[w]) {
                seen[w] = 1;
                out.insert(ds[w].id);
                q.push_back(w);
            }
        }
    }
    return out;
}

double poisson_nn_mean(double intensity) {
    return std::tgamma(4.0 / 3.0) * std::cbrt(3.0 / (4.0 * kPi * intensity));
}

double sign_test_p_value(int wins, int trials) {
    long double p = 0.0L;
    for (int k = wins; k <= trials; ++k) {
        p += std::exp(std::lgamma(trials + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(trials - k + 1.0L) -
                      trials * std::log(2.0L));
    }
    return static_cast<double>(p);
}

std::size_t perfect_packing_capacity(double window, double spacing) {
    // Place centres greedily at 0, s, 2s, ... and count until past the window.
    std::size_t n = 0;
    for (double x = 0.0; x <= window + 1e-12; x = (n) * spacing) {
        ++n;
    }
    return n;
}

}  // namespace reqc::oracle
