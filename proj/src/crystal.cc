#include "reqc/crystal.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "reqc/spatial_index.h"

namespace reqc::crystal {

void HostMaterial::validate() const {
    require(cation_density_nm3 > 0.0, "host: cation_density must be > 0");
    require(optical_t2_s > 0.0, "host: optical_t2 must be > 0");
    require(hyperfine_spread_mhz > 0.0, "host: hyperfine_spread must be > 0");
    require(level_spacing_mhz > 0.0, "host: level_spacing must be > 0");
    require(addressable_width_ghz > 0.0, "host: addressable_width must be > 0");
    require(qubit_fraction >= 0.0 && qubit_fraction <= 1.0, "host: qubit_fraction must be in [0, 1]");
}

const char* to_string(Species s) {
    switch (s) {
        case Species::qubit: return "qubit";
        case Species::readout: return "readout";
        case Species::spectator: return "spectator";
    }
    return "?";
}

Species species_from_string(const std::string& s) {
    if (s == "qubit") return Species::qubit;
    if (s == "readout") return Species::readout;
    if (s == "spectator") return Species::spectator;
    throw IoError("unknown species '" + s + "'");
}

std::int64_t DopantEnsemble::readout_index() const {
    for (std::size_t i = 0; i < dopants.size(); ++i) {
        if (dopants[i].species == Species::readout) {
            return static_cast<std::int64_t>(i);
        }
    }
    return -1;
}

std::vector<Vec3> DopantEnsemble::positions() const {
    std::vector<Vec3> out;
    out.reserve(dopants.size());
    for (const auto& d : dopants) {
        out.push_back(d.position);
    }
    return out;
}

DopantEnsemble place_dopants(const HostMaterial& host, double concentration, double box_edge_nm,
                             std::uint64_t seed) {
    host.validate();
    require(concentration >= 0.0 && concentration <= 1.0, "place_dopants: concentration must be in [0, 1]");
    require(box_edge_nm > 0.0, "place_dopants: box edge must be > 0");

    DopantEnsemble ens;
    ens.box_edge_nm = box_edge_nm;
    ens.concentration = concentration;
    ens.cation_density_nm3 = host.cation_density_nm3;
    ens.seed = seed;

    Rng rng = make_rng(seed, 0);
    const double mean_count = concentration * host.cation_density_nm3 * box_edge_nm * box_edge_nm * box_edge_nm;
    std::size_t count = 0;
    if (mean_count > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(mean_count);
        count = static_cast<std::size_t>(poisson(rng));
    }

    ens.dopants.reserve(count + 1);
    const double c = box_edge_nm / 2.0;
    ens.dopants.push_back({0, {c, c, c}, Species::readout, 0.0});
    for (std::size_t i = 0; i < count; ++i) {
        Dopant d;
        d.id = static_cast<std::int64_t>(i + 1);
        d.position = {box_edge_nm * uniform01(rng), box_edge_nm * uniform01(rng), box_edge_nm * uniform01(rng)};
        d.species = uniform01(rng) < host.qubit_fraction ? Species::qubit : Species::spectator;
        ens.dopants.push_back(d);
    }
    return ens;
}

DopantEnsemble assign_frequencies(DopantEnsemble ensemble, const HostMaterial& host, std::uint64_t seed) {
    host.validate();
    Rng rng = make_rng(seed, 1);
    for (auto& d : ensemble.dopants) {
        if (d.species == Species::qubit) {
            d.resonance_offset_ghz = host.addressable_width_ghz * uniform01(rng);
        }
    }
    return ensemble;
}

std::vector<double> nearest_neighbor_distances_reference(const DopantEnsemble& ensemble) {
    const auto& ds = ensemble.dopants;
    require(ds.size() >= 2, "nearest_neighbor_stats: need at least two dopants");
    std::vector<double> out(ds.size(), kInf);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double best = kInf;
        for (std::size_t j = 0; j < ds.size(); ++j) {
            if (i != j) {
                best = std::min(best, (ds[i].position - ds[j].position).norm2());
            }
        }
        out[i] = std::sqrt(best);
    }
    return out;
}

std::vector<double> nearest_neighbor_distances(const DopantEnsemble& ensemble) {
    const auto& ds = ensemble.dopants;
    require(ds.size() >= 2, "nearest_neighbor_stats: need at least two dopants");
    const std::vector<Vec3> pts = ensemble.positions();
    const double box = ensemble.box_edge_nm;
    const double spacing = std::cbrt(box * box * box / static_cast<double>(pts.size()));
    const SpatialIndex index(pts, box, spacing);

    std::vector<double> out(pts.size(), kInf);
    const auto n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double radius = spacing;
        double best = kInf;
        for (;;) {
            index.for_each_within(pts[i], radius, [&](std::size_t j) {
                if (j != static_cast<std::size_t>(i)) {
                    best = std::min(best, (pts[j] - pts[i]).norm2());
                }
            });
            // A hit inside the query ball is the true nearest neighbour.
            if (best <= radius * radius || radius > 2.0 * box) {
                break;
            }
            radius *= 2.0;
        }
        out[i] = std::sqrt(best);
    }
    return out;
}

NnStats nearest_neighbor_stats(const DopantEnsemble& ensemble, double bin_width_nm) {
    require(bin_width_nm > 0.0, "nearest_neighbor_stats: bin width must be > 0");
    std::vector<double> d = nearest_neighbor_distances(ensemble);
    NnStats s;
    double sum = 0.0;
    for (double v : d) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(d.size());
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size() / 2;
    s.median = d.size() % 2 ? d[m] : 0.5 * (d[m - 1] + d[m]);
    s.bin_width = bin_width_nm;
    s.histogram.assign(static_cast<std::size_t>(d.back() / bin_width_nm) + 1, 0);
    for (double v : d) {
        ++s.histogram[static_cast<std::size_t>(v / bin_width_nm)];
    }
    return s;
}

double poisson_nn_mean(double intensity_nm3) {
    require(intensity_nm3 > 0.0, "poisson_nn_mean: intensity must be > 0");
    return kPoissonNnCoefficient * std::cbrt(1.0 / intensity_nm3);
}

double ions_in_volume(double concentration, const HostMaterial& host, double volume_um3) {
    require(volume_um3 > 0.0, "ions_in_volume: volume must be > 0");
    require(concentration >= 0.0 && concentration <= 1.0, "ions_in_volume: concentration must be in [0, 1]");
    constexpr double kNm3PerUm3 = 1e9;
    return concentration * host.cation_density_nm3 * volume_um3 * kNm3PerUm3;
}

double ions_per_khz(double ion_count, double width_ghz) {
    require(width_ghz > 0.0, "ions_per_khz: width must be > 0");
    require(ion_count >= 0.0, "ions_per_khz: ion count must be >= 0");
    return ion_count / (width_ghz * 1e6);
}

void write_ensemble(std::ostream& out, const DopantEnsemble& e) {
    char buf[256];
    out << "# reqc ensemble v1\n";
    out << "seed " << e.seed << '\n';
    std::snprintf(buf, sizeof buf, "concentration %.6f\nbox_edge_nm %.6f\ncation_density_nm3 %.6f\ncount %zu\n",
                  e.concentration, e.box_edge_nm, e.cation_density_nm3, e.dopants.size());
    out << buf;
    for (const auto& d : e.dopants) {
        std::snprintf(buf, sizeof buf, "%" PRId64 " %.6f %.6f %.6f %s %.6f\n", d.id, d.position.x, d.position.y,
                      d.position.z, to_string(d.species), d.resonance_offset_ghz);
        out << buf;
    }
    if (!out) {
        throw IoError("write_ensemble: stream failure");
    }
}

namespace {

template <class T>
T read_field(std::istream& in, const char* key) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string k;
        T v{};
        if (!(ls >> k >> v) || k != key) {
            throw IoError(std::string("read_ensemble: expected '") + key + "', got '" + line + "'");
        }
        return v;
    }
    throw IoError(std::string("read_ensemble: missing '") + key + "'");
}

}  // namespace

DopantEnsemble read_ensemble(std::istream& in) {
    DopantEnsemble e;
    e.seed = read_field<std::uint64_t>(in, "seed");
    e.concentration = read_field<double>(in, "concentration");
    e.box_edge_nm = read_field<double>(in, "box_edge_nm");
    e.cation_density_nm3 = read_field<double>(in, "cation_density_nm3");
    const auto count = read_field<std::size_t>(in, "count");
    e.dopants.reserve(count);
    std::string line;
    while (e.dopants.size() < count && std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        Dopant d;
        std::string species;
        if (!(ls >> d.id >> d.position.x >> d.position.y >> d.position.z >> species >> d.resonance_offset_ghz)) {
            throw IoError("read_ensemble: malformed dopant record '" + line + "'");
        }
        d.species = species_from_string(species);
        e.dopants.push_back(d);
    }
    if (e.dopants.size() != count) {
        throw IoError("read_ensemble: truncated dopant list");
    }
    return e;
}

}  // namespace reqc::crystal
