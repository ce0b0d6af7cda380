#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "reqc/crystal.h"
#include "reqc/nodesearch.h"
#include "reqc/readout.h"

// Slow, obviously-correct reference computations used to check the fast paths.
// Nothing here shares code with the implementations it checks.
namespace reqc::oracle {

struct MapDecision {
    readout::QubitState decided = readout::QubitState::dark;
    double posterior_bright = 0.5;
};

/// Maximum a posteriori initial state for binned counts by enumerating every
/// one of the 2^bins hidden state sequences. Ties go to dark.
MapDecision exhaustive_map(std::span<const int> counts, double bin_width_s, const readout::ReadoutConfig& config);

/// Dark-hypothesis likelihood of a continuous trace by composite Simpson
/// quadrature over the decay time, with `panels` panels per inter-detection gap.
double dark_likelihood_quadrature(std::span<const double> detections_s, double duration_s,
                                  const readout::ReadoutConfig& config, int panels = 2000);

/// Ids reachable from the readout ion through |shift| >= min_shift links among
/// eligible qubit-species dopants (breadth-first over an explicit adjacency matrix).
std::set<std::int64_t> reachable_qubits(const crystal::DopantEnsemble& ensemble, const nodesearch::SearchConfig& config);

/// Gamma(4/3) (3 / (4 pi n))^(1/3).
double poisson_nn_mean(double intensity_nm3);

/// One-sided sign-test p-value: P(X >= wins) for X ~ Binomial(trials, 1/2).
double sign_test_p_value(int wins, int trials);

/// Largest number of centres with pairwise spacing >= s that fit in [0, W].
std::size_t perfect_packing_capacity(double window_ghz, double spacing_ghz);

}  // namespace reqc::oracle
