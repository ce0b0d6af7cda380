#include <gtest/gtest.h>

#include <omp.h>

#include <random>
#include <set>
#include <sstream>

#include "reqc/nodesearch.h"
#include "reqc/validation/oracles.h"

using namespace reqc;
using namespace reqc::nodesearch;
using crystal::Dopant;
using crystal::DopantEnsemble;
using crystal::Species;

namespace {

DopantEnsemble micro(std::vector<Vec3> qubits, double edge = 20.0) {
    DopantEnsemble e;
    e.box_edge_nm = edge;
    e.dopants.push_back({0, {edge / 2, edge / 2, edge / 2}, Species::readout, 0.0});
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        e.dopants.push_back({static_cast<std::int64_t>(i + 1), qubits[i], Species::qubit, 10.0 * (i + 1)});
    }
    return e;
}

std::set<std::int64_t> ids(const QubitGraph& g) {
    std::set<std::int64_t> s;
    for (const auto& n : g.nodes) s.insert(n.id);
    return s;
}

DopantEnsemble random_ensemble(double c, double edge, std::uint64_t seed) {
    const crystal::HostMaterial host;
    return crystal::assign_frequencies(crystal::place_dopants(host, c, edge, seed), host, seed);
}

std::size_t perfect_packing_capacity_formula(double w, double s) { return static_cast<std::size_t>(std::floor(w / s)) + 1; }

}  // namespace

TEST(ChannelAllocator, AcceptRejectRules) {
    ChannelAllocator a(100.0, 1.0);
    EXPECT_EQ(a.allocate(10.0), AllocStatus::accepted);
    EXPECT_EQ(a.check(10.5), AllocStatus::rejected_spacing);
    EXPECT_EQ(a.check(9.5), AllocStatus::rejected_spacing);
    EXPECT_EQ(a.check(11.0), AllocStatus::accepted);
    EXPECT_EQ(a.check(100.5), AllocStatus::rejected_out_of_window);
    EXPECT_EQ(a.check(-0.1), AllocStatus::rejected_out_of_window);
    EXPECT_EQ(a.size(), 1u);
    EXPECT_THROW(ChannelAllocator(0.0, 1.0), DomainError);
}

TEST(ChannelAllocator, GreedyFillMatchesPackingOracle) {
    ChannelAllocator a(100.0, 1.0);
    for (int i = 0; i <= 200; ++i) a.allocate(0.5 * i);
    EXPECT_EQ(a.size(), 101u);
    EXPECT_EQ(a.capacity_bound(), oracle::perfect_packing_capacity(100.0, 1.0));
    for (double s : {0.85, 1.0, 3.3, 7.0}) {
        EXPECT_EQ(ChannelAllocator(100.0, s).capacity_bound(), oracle::perfect_packing_capacity(100.0, s));
        EXPECT_EQ(ChannelAllocator(100.0, s).capacity_bound(), perfect_packing_capacity_formula(100.0, s));
    }
}

TEST(ChannelAllocator, RandomArrivalsNeverExceedBound) {
    Rng rng = make_rng(1, 1);
    for (int rep = 0; rep < 20; ++rep) {
        ChannelAllocator a(100.0, 1.0);
        for (int i = 0; i < 5000; ++i) a.allocate(100.0 * uniform01(rng));
        EXPECT_LE(a.size(), a.capacity_bound());
        // Random sequential adsorption jams well below perfect packing.
        EXPECT_GT(a.size(), 65u);
    }
}

TEST(NodeSearch, FindControllers) {
    SearchConfig cfg;
    cfg.min_shift_mhz = 10.0;
    const ChannelAllocator alloc(100.0, 1.0);
    auto isolated = micro({{18, 18, 18}});
    EXPECT_TRUE(find_controllers(isolated, 1, cfg, alloc).empty());

    auto pair = micro({{12, 10, 10}, {12, 12, 10}});
    const auto c = find_controllers(pair, 1, cfg, alloc);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].id, 2);
    EXPECT_NEAR(c[0].shift_mhz, 75.0, 1e-9);

    auto close = micro({{10.5, 10, 10}});
    EXPECT_TRUE(find_controllers(close, 0, cfg, alloc).empty());
}

TEST(NodeSearch, EmptyEnsembleGivesEmptyGraph) {
    const auto ens = micro({});
    for (Protocol p : {Protocol::line, Protocol::starfish}) {
        SearchConfig cfg;
        cfg.protocol = p;
        const auto g = run_search(ens, cfg, 1);
        EXPECT_TRUE(g.nodes.empty());
        EXPECT_FALSE(g.diagnostic.empty());
        EXPECT_EQ(connectivity_stats(g).n_qubits, 0u);
    }
}

TEST(NodeSearch, CollinearChain) {
    const auto ens = micro({{12, 10, 10}, {14, 10, 10}, {16, 10, 10}});
    SearchConfig cfg;
    cfg.min_shift_mhz = 10.0;
    for (Protocol p : {Protocol::line, Protocol::starfish}) {
        cfg.protocol = p;
        const auto g = run_search(ens, cfg, 3);
        ASSERT_EQ(g.nodes.size(), 3u);
        EXPECT_EQ(g.nodes[0].parent_id, 0);
        EXPECT_EQ(g.nodes[1].parent_id, g.nodes[0].id);
        EXPECT_EQ(g.nodes[2].parent_id, g.nodes[1].id);
        const auto st = connectivity_stats(g);
        EXPECT_EQ(st.degree_histogram.at(1), 2u);
        EXPECT_EQ(st.degree_histogram.at(2), 1u);
        EXPECT_TRUE(check_graph(g, cfg).empty());
    }
}

TEST(NodeSearch, ExcludedIonIsIgnored) {
    const auto ens = micro({{10.5, 10, 10}, {12, 10, 10}});
    SearchConfig cfg;
    cfg.min_shift_mhz = 10.0;
    const auto g = run_search(ens, cfg, 1);
    EXPECT_EQ(ids(g), (std::set<std::int64_t>{2}));
}

TEST(NodeSearch, VertexSetsMatchReachability) {
    Rng rng = make_rng(44, 0);
    SearchConfig cfg;
    cfg.min_shift_mhz = 10.0;
    cfg.min_spacing_ghz = 0.0;
    for (int c = 0; c < 100; ++c) {
        std::vector<Vec3> q;
        const int n = 1 + c % 5;
        for (int i = 0; i < n; ++i) {
            q.push_back({10 + 8 * (uniform01(rng) - 0.5), 10 + 8 * (uniform01(rng) - 0.5), 10 + 8 * (uniform01(rng) - 0.5)});
        }
        const auto ens = micro(q);
        const auto truth = oracle::reachable_qubits(ens, cfg);
        cfg.protocol = Protocol::line;
        EXPECT_EQ(ids(line_search(ens, cfg, c)), truth);
        cfg.protocol = Protocol::starfish;
        EXPECT_EQ(ids(starfish_search(ens, cfg, c)), truth);
    }
}

TEST(NodeSearch, GraphsSatisfyInvariants) {
    SearchConfig cfg;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto ens = random_ensemble(0.05, 40.0, s);
        for (Protocol p : {Protocol::line, Protocol::starfish}) {
            for (CandidateOrder o : {CandidateOrder::scan, CandidateOrder::shift}) {
                cfg.protocol = p;
                cfg.order = o;
                const auto g = run_search(ens, cfg, s);
                EXPECT_TRUE(check_graph(g, cfg).empty()) << to_string(p) << " " << to_string(o);
                EXPECT_GT(g.nodes.size(), 10u);
            }
        }
    }
}

TEST(NodeSearch, NarrowWindowHitsCapacity) {
    SearchConfig cfg;
    cfg.window_ghz = 3.0;
    cfg.min_spacing_ghz = 1.0;
    crystal::HostMaterial host;
    host.addressable_width_ghz = 3.0;
    const auto ens = crystal::assign_frequencies(crystal::place_dopants(host, 0.05, 40.0, 2), host, 2);
    const auto g = run_search(ens, cfg, 2);
    EXPECT_LE(g.nodes.size(), 4u);
    EXPECT_TRUE(check_graph(g, cfg).empty());
}

TEST(NodeSearch, MaxQubitsStopsEarly) {
    SearchConfig cfg;
    cfg.max_qubits = 7;
    const auto g = run_search(random_ensemble(0.05, 40.0, 9), cfg, 9);
    EXPECT_EQ(g.nodes.size(), 7u);
}

TEST(NodeSearch, Deterministic) {
    const auto ens = random_ensemble(0.04, 40.0, 31);
    SearchConfig cfg;
    std::ostringstream a, b;
    write_graph(a, run_search(ens, cfg, 5));
    write_graph(b, run_search(ens, cfg, 5));
    EXPECT_EQ(a.str(), b.str());
}

TEST(NodeSearch, CheckGraphFlagsViolations) {
    const auto ens = micro({{12, 10, 10}, {14, 10, 10}});
    SearchConfig cfg;
    cfg.min_shift_mhz = 10.0;
    auto g = run_search(ens, cfg, 0);
    ASSERT_TRUE(check_graph(g, cfg).empty());
    g.nodes[1].channel_ghz = g.nodes[0].channel_ghz + 0.1;
    EXPECT_FALSE(check_graph(g, cfg).empty());
    g = run_search(ens, cfg, 0);
    g.edges.clear();
    EXPECT_FALSE(check_graph(g, cfg).empty());  // no longer connected to the readout
}

TEST(NodeSearch, ConnectivityStatsTriangle) {
    QubitGraph g;
    g.readout_id = 0;
    for (int i = 1; i <= 3; ++i) g.nodes.push_back({i, {}, 0.0, i - 1, 0});
    g.edges = {{1, 2, 20}, {2, 3, 20}, {1, 3, 20}, {0, 1, 20}};
    EXPECT_DOUBLE_EQ(connectivity_stats(g).mean_degree, 2.0);
    QubitGraph single;
    single.nodes.push_back({1, {}, 0.0, 0, 0});
    EXPECT_DOUBLE_EQ(connectivity_stats(single).mean_degree, 0.0);
}

TEST(NodeSearch, StarfishEarlyNodesAreHubs) {
    SearchConfig cfg;
    double early = 0.0, late = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto d = connectivity_stats(starfish_search(random_ensemble(0.05, 60.0, s), cfg, s)).degree_by_discovery;
        ASSERT_GT(d.size(), 20u);
        for (std::size_t i = 0; i < 5; ++i) early += d[i];
        for (std::size_t i = d.size() - 5; i < d.size(); ++i) late += d[i];
    }
    EXPECT_GT(early, 1.5 * late);
}

TEST(NodeSearch, GraphRoundTrip) {
    const auto g = run_search(random_ensemble(0.05, 30.0, 3), SearchConfig{}, 3);
    std::stringstream buf;
    write_graph(buf, g);
    const auto back = read_graph(buf);
    EXPECT_EQ(back.nodes.size(), g.nodes.size());
    EXPECT_EQ(back.edges.size(), g.edges.size());
    EXPECT_EQ(back.readout_id, g.readout_id);
    std::stringstream again;
    write_graph(again, back);
    std::stringstream first;
    write_graph(first, g);
    EXPECT_EQ(again.str(), first.str());
    std::stringstream junk("node 1 2\n");
    EXPECT_THROW(read_graph(junk), IoError);
}

TEST(NodeSearch, NamesRoundTrip) {
    for (Protocol p : {Protocol::line, Protocol::starfish}) EXPECT_EQ(protocol_from_string(to_string(p)), p);
    for (CandidateOrder o : {CandidateOrder::scan, CandidateOrder::shift}) {
        EXPECT_EQ(candidate_order_from_string(to_string(o)), o);
    }
    EXPECT_THROW(protocol_from_string("spiral"), DomainError);
}

TEST(Sweep, ParallelMatchesReferenceAndThreadCount) {
    SweepSpec spec;
    spec.concentrations = {0.02, 0.05};
    spec.trials = 6;
    spec.seed = 77;
    const int saved = omp_get_max_threads();
    std::string first;
    for (int threads : {1, 2, 8}) {
        omp_set_num_threads(threads);
        std::ostringstream par, ref;
        write_sweep_csv(par, sweep_concentration(spec));
        write_sweep_csv(ref, sweep_concentration_reference(spec));
        EXPECT_EQ(par.str(), ref.str());
        if (first.empty()) first = par.str();
        EXPECT_EQ(par.str(), first);
    }
    omp_set_num_threads(saved);
}

TEST(Sweep, CsvHeaderAndRows) {
    SweepSpec spec;
    spec.concentrations = {0.03};
    spec.trials = 3;
    const auto r = sweep_concentration(spec);
    EXPECT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.trials.size(), 6u);
    std::ostringstream out;
    write_sweep_csv(out, r);
    EXPECT_EQ(out.str().rfind("concentration,protocol,trials,n_qubits_mean,n_qubits_stderr,degree_mean,degree_stderr\n", 0), 0u);
    spec.trials = 0;
    EXPECT_THROW(sweep_concentration(spec), DomainError);
}

TEST(Sweep, WiderHostDoublesCapacity) {
    crystal::HostMaterial wide;
    wide.addressable_width_ghz = 200.0;
    SearchConfig cfg;
    const ChannelAllocator narrow(100.0, cfg.min_spacing_ghz), broad(wide.addressable_width_ghz, cfg.min_spacing_ghz);
    EXPECT_EQ(broad.capacity_bound(), 2 * narrow.capacity_bound());
}
