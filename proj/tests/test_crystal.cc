#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reqc/crystal.h"

using namespace reqc;
using namespace reqc::crystal;

namespace {

// Mean NN distance over ions far enough from the walls that truncation cannot matter.
double interior_nn_mean(const DopantEnsemble& ens, double margin) {
    const auto d = nearest_neighbor_distances(ens);
    double sum = 0.0;
    int n = 0;
    const double L = ens.box_edge_nm;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3& p = ens.dopants[i].position;
        if (std::min({p.x, p.y, p.z, L - p.x, L - p.y, L - p.z}) > margin) {
            sum += d[i];
            ++n;
        }
    }
    return sum / n;
}

}  // namespace

TEST(Crystal, EmptyConcentrationKeepsOnlyReadout) {
    const auto ens = place_dopants(HostMaterial{}, 0.0, 20.0, 3);
    ASSERT_EQ(ens.dopants.size(), 1u);
    EXPECT_EQ(ens.dopants[0].species, Species::readout);
    EXPECT_EQ(ens.readout_index(), 0);
    EXPECT_EQ(ens.dopants[0].position, (Vec3{10, 10, 10}));
}

TEST(Crystal, PlacementIsDeterministicAndInsideBox) {
    const auto a = place_dopants(HostMaterial{}, 0.02, 15.0, 99);
    const auto b = place_dopants(HostMaterial{}, 0.02, 15.0, 99);
    ASSERT_EQ(a.dopants.size(), b.dopants.size());
    for (std::size_t i = 0; i < a.dopants.size(); ++i) {
        EXPECT_EQ(a.dopants[i].position, b.dopants[i].position);
        EXPECT_EQ(a.dopants[i].species, b.dopants[i].species);
        const Vec3& p = a.dopants[i].position;
        EXPECT_TRUE(p.x >= 0 && p.x < 15 && p.y >= 0 && p.y < 15 && p.z >= 0 && p.z < 15);
    }
}

TEST(Crystal, PoissonCountAcrossSeeds) {
    const HostMaterial host;
    const double c = 0.01, edge = 10.0;
    const double mean = c * host.cation_density_nm3 * edge * edge * edge;  // 34.6
    double sum = 0.0, sum2 = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        const double n = static_cast<double>(place_dopants(host, c, edge, s).dopants.size() - 1);
        sum += n;
        sum2 += n * n;
    }
    const double m = sum / seeds;
    const double var = sum2 / seeds - m * m;
    EXPECT_NEAR(m, mean, 3.0 * std::sqrt(mean / seeds));
    EXPECT_NEAR(var / mean, 1.0, 0.3);
}

TEST(Crystal, QubitFractionRespected) {
    HostMaterial host;
    host.qubit_fraction = 0.3;
    const auto ens = place_dopants(host, 0.02, 40.0, 5);
    const double n = static_cast<double>(ens.dopants.size() - 1);
    const auto q = std::count_if(ens.dopants.begin(), ens.dopants.end(),
                                 [](const Dopant& d) { return d.species == Species::qubit; });
    EXPECT_NEAR(q / n, 0.3, 4.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST(Crystal, FrequenciesUniformOverWindow) {
    HostMaterial host;
    host.qubit_fraction = 1.0;
    const auto ens = assign_frequencies(place_dopants(host, 0.02, 40.0, 11), host, 11);
    constexpr int bins = 10;
    std::vector<double> counts(bins, 0.0);
    double n = 0.0, sum = 0.0, mx = 0.0;
    for (const auto& d : ens.dopants) {
        if (d.species != Species::qubit) continue;
        ++n;
        sum += d.resonance_offset_ghz;
        mx = std::max(mx, d.resonance_offset_ghz);
        counts[std::min(bins - 1, static_cast<int>(d.resonance_offset_ghz / 10.0))] += 1.0;
    }
    EXPECT_NEAR(sum / n, 50.0, 4.0 * 100.0 / std::sqrt(12.0 * n));
    EXPECT_LT(mx, 100.0);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - n / bins) * (c - n / bins) / (n / bins);
    EXPECT_LT(chi2, 27.88);  // chi^2_9 at p = 0.001
}

TEST(Crystal, FrequencyAssignmentDeterministic) {
    const HostMaterial host;
    const auto base = place_dopants(host, 0.03, 12.0, 8);
    const auto a = assign_frequencies(base, host, 8);
    const auto b = assign_frequencies(base, host, 8);
    for (std::size_t i = 0; i < a.dopants.size(); ++i) {
        EXPECT_EQ(a.dopants[i].resonance_offset_ghz, b.dopants[i].resonance_offset_ghz);
    }
}

TEST(Crystal, TwoDopantsNnMean) {
    DopantEnsemble ens;
    ens.box_edge_nm = 10;
    ens.dopants = {{0, {1, 1, 1}, Species::readout, 0}, {1, {1, 4, 5}, Species::qubit, 0}};
    const auto s = nearest_neighbor_stats(ens);
    EXPECT_DOUBLE_EQ(s.mean, 5.0);
    EXPECT_DOUBLE_EQ(s.median, 5.0);
}

TEST(Crystal, NnStatsNeedTwoDopants) {
    EXPECT_THROW(nearest_neighbor_stats(place_dopants(HostMaterial{}, 0.0, 5.0, 1)), DomainError);
}

TEST(Crystal, GridMatchesBruteForce) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto ens = place_dopants(HostMaterial{}, 0.005, 25.0, seed);
        EXPECT_EQ(nearest_neighbor_distances(ens), nearest_neighbor_distances_reference(ens));
    }
    DopantEnsemble sparse;
    sparse.box_edge_nm = 100;
    sparse.dopants = {{0, {1, 1, 1}, Species::readout, 0}, {1, {99, 99, 99}, Species::qubit, 0},
                      {2, {50, 2, 97}, Species::qubit, 0}};
    EXPECT_EQ(nearest_neighbor_distances(sparse), nearest_neighbor_distances_reference(sparse));
}

TEST(Crystal, OnePercentGivesAboutOnePointSevenNm) {
    const auto ens = place_dopants(HostMaterial{}, 0.01, 40.0, 21);
    EXPECT_NEAR(interior_nn_mean(ens, 5.0), 1.7, 0.05);
    EXPECT_NEAR(poisson_nn_mean(0.01 * kDefaultCationDensity), 1.7, 0.01);
}

TEST(Crystal, NnDistanceHalvesAtEightfoldConcentration) {
    const double lo = interior_nn_mean(place_dopants(HostMaterial{}, 0.005, 50.0, 4), 6.0);
    const double hi = interior_nn_mean(place_dopants(HostMaterial{}, 0.04, 50.0, 4), 6.0);
    EXPECT_NEAR(hi / lo, 0.5, 0.02);
}

TEST(Crystal, IonCounts) {
    const HostMaterial host;
    EXPECT_NEAR(ions_in_volume(0.01, host, 1.0), 3.46e7, 1.0);
    EXPECT_DOUBLE_EQ(ions_in_volume(0.0, host, 7.0), 0.0);
    EXPECT_DOUBLE_EQ(ions_in_volume(0.01, host, 2.0), 2.0 * ions_in_volume(0.01, host, 1.0));
    EXPECT_NEAR(ions_per_khz(1e7, 100.0), 0.1, 1e-15);
}

TEST(Crystal, HostValidation) {
    HostMaterial host;
    host.qubit_fraction = 1.5;
    EXPECT_THROW(host.validate(), DomainError);
    EXPECT_THROW(place_dopants(HostMaterial{}, -0.1, 10.0, 0), DomainError);
    EXPECT_THROW(place_dopants(HostMaterial{}, 0.01, 0.0, 0), DomainError);
}

TEST(Crystal, SpeciesNames) {
    for (Species s : {Species::qubit, Species::readout, Species::spectator}) {
        EXPECT_EQ(species_from_string(to_string(s)), s);
    }
    EXPECT_THROW(species_from_string("ghost"), IoError);
}

TEST(Crystal, EnsembleRoundTrip) {
    const HostMaterial host;
    const auto ens = assign_frequencies(place_dopants(host, 0.02, 10.0, 17), host, 17);
    std::stringstream buf;
    write_ensemble(buf, ens);
    const auto back = read_ensemble(buf);
    EXPECT_EQ(back.seed, ens.seed);
    EXPECT_DOUBLE_EQ(back.concentration, ens.concentration);
    ASSERT_EQ(back.dopants.size(), ens.dopants.size());
    for (std::size_t i = 0; i < ens.dopants.size(); ++i) {
        EXPECT_EQ(back.dopants[i].id, ens.dopants[i].id);
        EXPECT_EQ(back.dopants[i].species, ens.dopants[i].species);
        EXPECT_NEAR(back.dopants[i].position.x, ens.dopants[i].position.x, 1e-6);
        EXPECT_NEAR(back.dopants[i].resonance_offset_ghz, ens.dopants[i].resonance_offset_ghz, 1e-6);
    }
    std::stringstream again;
    write_ensemble(again, back);
    std::stringstream first;
    write_ensemble(first, ens);
    EXPECT_EQ(again.str(), first.str());
}

TEST(Crystal, ReadEnsembleRejectsGarbage) {
    std::stringstream bad("# reqc ensemble v1\nseed 1\nconcentration 0.1\nbox_edge_nm 5\ncation_density_nm3 3.46\ncount 2\n0 1 1 1 readout 0\n");
    EXPECT_THROW(read_ensemble(bad), IoError);
    std::stringstream junk("hello\n");
    EXPECT_THROW(read_ensemble(junk), IoError);
}
