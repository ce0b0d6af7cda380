#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reqc/common.h"

namespace reqc::crystal {

// Cation density reproducing a 1.7 nm mean nearest-neighbour spacing at 1%
// doping under the Poisson law <r_nn> = 0.554 n^(-1/3).
inline constexpr double kDefaultCationDensity = 3.46;
inline constexpr double kPoissonNnCoefficient = 0.55396;  // Gamma(4/3) (3 / 4 pi)^(1/3)

struct HostMaterial {
    std::string name = "Eu:YSO";
    double cation_density_nm3 = kDefaultCationDensity;
    double optical_t2_s = 1.5e-3;
    double hyperfine_spread_mhz = 850.0;
    double level_spacing_mhz = 100.0;
    double addressable_width_ghz = 100.0;
    // Share of dopants that can serve as qubits (right crystal site, isotope and
    // hyperfine preparation).
    // The remainder are spectators: they occupy space but never join a node.
    double qubit_fraction = 0.20;

    void validate() const;
};

enum class Species { qubit, readout, spectator };

const char* to_string(Species s);
Species species_from_string(const std::string& s);

struct Dopant {
    std::int64_t id = 0;
    Vec3 position;
    Species species = Species::qubit;
    double resonance_offset_ghz = 0.0;
};

struct DopantEnsemble {
    double box_edge_nm = 0.0;
    double concentration = 0.0;
    double cation_density_nm3 = kDefaultCationDensity;
    std::uint64_t seed = 0;
    std::vector<Dopant> dopants;

    /// Index of the readout ion in `dopants`, or -1.
    std::int64_t readout_index() const;
    std::vector<Vec3> positions() const;
};

/// Homogeneous Poisson placement with intensity concentration * rho, plus one
/// readout ion at the box centre (always index 0, id 0).
DopantEnsemble place_dopants(const HostMaterial& host, double concentration, double box_edge_nm,
                             std::uint64_t seed);

/// Independent uniform offsets on [0, W] for every qubit-species dopant.
DopantEnsemble assign_frequencies(DopantEnsemble ensemble, const HostMaterial& host, std::uint64_t seed);

struct NnStats {
    double mean = 0.0;
    double median = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> histogram;
};

/// Nearest-neighbour distances over all dopants, grid accelerated and OpenMP parallel.
std::vector<double> nearest_neighbor_distances(const DopantEnsemble& ensemble);
/// O(N^2) serial reference for nearest_neighbor_distances.
std::vector<double> nearest_neighbor_distances_reference(const DopantEnsemble& ensemble);

NnStats nearest_neighbor_stats(const DopantEnsemble& ensemble, double bin_width_nm = 0.1);

/// Expected Poisson nearest-neighbour mean 0.554 n^(-1/3) for intensity n (nm^-3).
double poisson_nn_mean(double intensity_nm3);

/// Number of dopants in `volume_um3` cubic micrometres.
double ions_in_volume(double concentration, const HostMaterial& host, double volume_um3);

/// Spectral density of ions across an inhomogeneous line, per kHz.
double ions_per_khz(double ion_count, double width_ghz);

// Line-oriented text format. Header lines carry seed, concentration, box edge
// and cation density; each dopant record is
//   id x y z species offset_ghz
// with coordinates in nm and six decimals on every real field.
void write_ensemble(std::ostream& out, const DopantEnsemble& ensemble);
DopantEnsemble read_ensemble(std::istream& in);

}  // namespace reqc::crystal
