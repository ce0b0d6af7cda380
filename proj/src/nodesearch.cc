#include "reqc/nodesearch.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "reqc/csv.h"
#include "reqc/spatial_index.h"

namespace reqc::nodesearch {

using crystal::Dopant;
using crystal::DopantEnsemble;
using crystal::Species;

ChannelAllocator::ChannelAllocator(double window_ghz, double min_spacing_ghz)
    : window_(window_ghz), spacing_(min_spacing_ghz) {
    require(window_ghz > 0.0, "ChannelAllocator: window must be > 0");
    require(min_spacing_ghz >= 0.0, "ChannelAllocator: spacing must be >= 0");
}

AllocStatus ChannelAllocator::check(double f) const {
    if (!(f >= 0.0 && f <= window_)) {
        return AllocStatus::rejected_out_of_window;
    }
    const auto hi = occupied_.lower_bound(f);
    if (hi != occupied_.end() && *hi - f < spacing_) {
        return AllocStatus::rejected_spacing;
    }
    if (hi != occupied_.begin() && f - *std::prev(hi) < spacing_) {
        return AllocStatus::rejected_spacing;
    }
    // Zero spacing still forbids two qubits on the same centre.
    if (hi != occupied_.end() && *hi == f) {
        return AllocStatus::rejected_spacing;
    }
    return AllocStatus::accepted;
}

AllocStatus ChannelAllocator::allocate(double f) {
    const AllocStatus s = check(f);
    if (s == AllocStatus::accepted) {
        occupied_.insert(f);
    }
    return s;
}

std::size_t ChannelAllocator::capacity_bound() const {
    if (spacing_ <= 0.0) {
        return static_cast<std::size_t>(-1);
    }
    return static_cast<std::size_t>(std::floor(window_ / spacing_)) + 1;
}

const char* to_string(Protocol p) { return p == Protocol::line ? "line" : "starfish"; }

Protocol protocol_from_string(const std::string& s) {
    if (s == "line") return Protocol::line;
    if (s == "starfish") return Protocol::starfish;
    throw DomainError("unknown protocol '" + s + "' (expected line or starfish)");
}

const char* to_string(CandidateOrder o) { return o == CandidateOrder::scan ? "scan" : "shift"; }

CandidateOrder candidate_order_from_string(const std::string& s) {
    if (s == "scan") return CandidateOrder::scan;
    if (s == "shift") return CandidateOrder::shift;
    throw DomainError("unknown candidate order '" + s + "' (expected scan or shift)");
}

void SearchConfig::validate() const {
    require(min_shift_mhz > 0.0, "search: min_shift must be > 0");
    require(exclusion_radius_nm >= 0.0, "search: exclusion_radius must be >= 0");
    require(window_ghz > 0.0, "search: window must be > 0");
    require(min_spacing_ghz >= 0.0, "search: min_spacing must be >= 0");
    require(dipole.coupling_mhz_nm3 > 0.0, "search: dipole coupling must be > 0");
}

namespace {

bool eligible(const Dopant& d, const Vec3& readout, const SearchConfig& config) {
    return d.species == Species::qubit &&
           !interactions::energy_transfer_excluded(d.position - readout, config.exclusion_radius_nm);
}

// Pairwise |shift| between two positions, zero when they coincide.
double abs_shift(const SearchConfig& config, const Vec3& a, const Vec3& b) {
    const Vec3 d = a - b;
    if (d.norm2() == 0.0) return 0.0;
    return std::abs(interactions::dipole_shift(config.dipole, d));
}

struct Candidate {
    std::size_t index;
    double shift;
};

class Searcher {
public:
    Searcher(const DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed)
        : ens_(ensemble),
          config_(config),
          positions_(ensemble.positions()),
          index_(positions_, ensemble.box_edge_nm, interactions::interaction_radius(config.dipole, config.min_shift_mhz)),
          radius_(interactions::interaction_radius(config.dipole, config.min_shift_mhz)),
          alloc_(config.window_ghz, config.min_spacing_ghz),
          used_(ensemble.dopants.size(), 0),
          rng_(make_rng(seed, 0x5ea4c4ULL)) {
        config.validate();
    }

    QubitGraph run(Protocol protocol) {
        QubitGraph g;
        const std::int64_t ri = ens_.readout_index();
        if (ri < 0) {
            g.diagnostic = "ensemble has no readout ion";
            return g;
        }
        readout_ = static_cast<std::size_t>(ri);
        used_[readout_] = 1;
        g.readout_id = ens_.dopants[readout_].id;
        g.readout_position = ens_.dopants[readout_].position;

        if (protocol == Protocol::line) {
            grow_line(g);
        } else {
            grow_starfish(g);
        }
        if (g.nodes.empty()) {
            g.diagnostic = "no qubit ion can control the readout ion";
        }
        add_edges(g);
        return g;
    }

private:
    bool full(const QubitGraph& g) const { return config_.max_qubits && g.nodes.size() >= *config_.max_qubits; }

    // Channel-valid controllers of `target`, in search order.
    std::vector<Candidate> controllers(std::size_t target) {
        std::vector<Candidate> out;
        const Vec3& tp = positions_[target];
        const Vec3& rp = positions_[readout_];
        index_.for_each_within(tp, radius_, [&](std::size_t j) {
            if (used_[j] || j == target) return;
            const Dopant& d = ens_.dopants[j];
            if (!eligible(d, rp, config_)) return;
            const double s = abs_shift(config_, d.position, tp);
            if (s < config_.min_shift_mhz) return;
            if (!alloc_.can_accept(d.resonance_offset_ghz)) return;
            out.push_back({j, s});
        });
        // The grid visits cells in a fixed order; sort on the dopant index first
        // so ties below never depend on the cell layout.
        std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
        if (config_.order == CandidateOrder::shift) {
            std::shuffle(out.begin(), out.end(), rng_);
            std::stable_sort(out.begin(), out.end(),
                             [](const Candidate& a, const Candidate& b) { return a.shift > b.shift; });
        } else {
            const double w = config_.window_ghz;
            const double start = w * uniform01(rng_);
            auto key = [&](const Candidate& c) {
                const double f = ens_.dopants[c.index].resonance_offset_ghz - start;
                return f < 0.0 ? f + w : f;
            };
            std::stable_sort(out.begin(), out.end(),
                             [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); });
        }
        return out;
    }

    bool try_add(QubitGraph& g, std::size_t index, std::size_t parent) {
        const Dopant& d = ens_.dopants[index];
        if (used_[index] || alloc_.allocate(d.resonance_offset_ghz) != AllocStatus::accepted) {
            return false;
        }
        used_[index] = 1;
        g.nodes.push_back({d.id, d.position, d.resonance_offset_ghz, static_cast<int>(g.nodes.size()),
                           ens_.dopants[parent].id});
        return true;
    }

    void grow_line(QubitGraph& g) {
        // The readout ion sits at the bottom of the stack, so exhausting the
        // whole line returns to it and a new branch can start there.
        std::vector<std::size_t> stack{readout_};
        while (!stack.empty() && !full(g)) {
            const std::size_t top = stack.back();
            bool grown = false;
            for (const Candidate& c : controllers(top)) {
                if (try_add(g, c.index, top)) {
                    stack.push_back(c.index);
                    grown = true;
                    break;
                }
            }
            if (!grown) {
                stack.pop_back();
            }
        }
    }

    void grow_starfish(QubitGraph& g) {
        std::deque<std::size_t> frontier;
        while (!full(g)) {
            if (frontier.empty()) {
                // Seed (or re-seed) from a single ion that controls the readout.
                bool seeded = false;
                for (const Candidate& c : controllers(readout_)) {
                    if (try_add(g, c.index, readout_)) {
                        frontier.push_back(c.index);
                        seeded = true;
                        break;
                    }
                }
                if (!seeded) return;
                continue;
            }
            const std::size_t q = frontier.front();
            frontier.pop_front();
            for (const Candidate& c : controllers(q)) {
                if (full(g)) break;
                if (try_add(g, c.index, q)) {
                    frontier.push_back(c.index);
                }
            }
        }
    }

    void add_edges(QubitGraph& g) const {
        std::vector<std::pair<std::int64_t, Vec3>> members;
        members.reserve(g.nodes.size() + 1);
        members.emplace_back(g.readout_id, g.readout_position);
        for (const auto& n : g.nodes) {
            members.emplace_back(n.id, n.position);
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const double s = abs_shift(config_, members[i].second, members[j].second);
                if (s >= config_.min_shift_mhz) {
                    g.edges.push_back({members[i].first, members[j].first, s});
                }
            }
        }
    }

    const DopantEnsemble& ens_;
    const SearchConfig& config_;
    std::vector<Vec3> positions_;
    SpatialIndex index_;
    double radius_;
    ChannelAllocator alloc_;
    std::vector<char> used_;
    Rng rng_;
    std::size_t readout_ = 0;
};

}  // namespace

std::vector<Controller> find_controllers(const DopantEnsemble& ensemble, std::int64_t target_id,
                                         const SearchConfig& config, const ChannelAllocator& alloc,
                                         const std::set<std::int64_t>& in_graph) {
    config.validate();
    const Dopant* target = nullptr;
    const Dopant* readout = nullptr;
    for (const auto& d : ensemble.dopants) {
        if (d.id == target_id) target = &d;
        if (d.species == Species::readout) readout = &d;
    }
    require(target != nullptr, "find_controllers: unknown target id " + std::to_string(target_id));
    const Vec3 rp = readout ? readout->position : Vec3{kInf, kInf, kInf};

    std::vector<Controller> out;
    for (const auto& d : ensemble.dopants) {
        if (&d == target || in_graph.count(d.id)) continue;
        if (!eligible(d, rp, config)) continue;
        const double s = abs_shift(config, d.position, target->position);
        if (s < config.min_shift_mhz || !alloc.can_accept(d.resonance_offset_ghz)) continue;
        out.push_back({d.id, s});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Controller& a, const Controller& b) { return a.shift_mhz > b.shift_mhz; });
    return out;
}

QubitGraph line_search(const DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed) {
    return Searcher(ensemble, config, seed).run(Protocol::line);
}

QubitGraph starfish_search(const DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed) {
    return Searcher(ensemble, config, seed).run(Protocol::starfish);
}

QubitGraph run_search(const DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed) {
    return Searcher(ensemble, config, seed).run(config.protocol);
}

ConnectivityStats connectivity_stats(const QubitGraph& graph) {
    ConnectivityStats s;
    s.n_qubits = graph.nodes.size();
    if (graph.nodes.empty()) {
        return s;
    }
    std::unordered_map<std::int64_t, std::size_t> slot;
    for (const auto& n : graph.nodes) {
        slot.emplace(n.id, static_cast<std::size_t>(n.discovery_index));
    }
    std::vector<int> degree(graph.nodes.size(), 0);
    std::size_t qubit_edges = 0;
    for (const auto& e : graph.edges) {
        const auto a = slot.find(e.a);
        const auto b = slot.find(e.b);
        if (a == slot.end() || b == slot.end()) continue;
        ++degree[a->second];
        ++degree[b->second];
        ++qubit_edges;
    }
    s.mean_degree = 2.0 * static_cast<double>(qubit_edges) / static_cast<double>(s.n_qubits);
    for (int d : degree) {
        ++s.degree_histogram[d];
    }
    s.degree_by_discovery = std::move(degree);
    return s;
}

std::vector<std::string> check_graph(const QubitGraph& g, const SearchConfig& config) {
    std::vector<std::string> bad;
    const ChannelAllocator bound(config.window_ghz, config.min_spacing_ghz);
    if (g.nodes.size() > bound.capacity_bound()) {
        bad.push_back("qubit count exceeds channel capacity bound");
    }
    std::vector<double> channels;
    for (const auto& n : g.nodes) {
        channels.push_back(n.channel_ghz);
        if (n.channel_ghz < 0.0 || n.channel_ghz > config.window_ghz) {
            bad.push_back("node " + std::to_string(n.id) + " channel outside window");
        }
        if ((n.position - g.readout_position).norm() < config.exclusion_radius_nm) {
            bad.push_back("node " + std::to_string(n.id) + " inside readout exclusion radius");
        }
    }
    std::sort(channels.begin(), channels.end());
    for (std::size_t i = 1; i < channels.size(); ++i) {
        if (channels[i] - channels[i - 1] < config.min_spacing_ghz || channels[i] == channels[i - 1]) {
            bad.push_back("channels closer than minimum spacing");
            break;
        }
    }

    std::unordered_map<std::int64_t, std::size_t> slot;
    slot.emplace(g.readout_id, 0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        slot.emplace(g.nodes[i].id, i + 1);
    }
    std::vector<std::vector<std::size_t>> adj(g.nodes.size() + 1);
    for (const auto& e : g.edges) {
        if (e.shift_mhz < config.min_shift_mhz) {
            bad.push_back("edge below minimum shift");
        }
        const auto a = slot.find(e.a);
        const auto b = slot.find(e.b);
        if (a == slot.end() || b == slot.end()) {
            bad.push_back("edge references unknown node");
            continue;
        }
        adj[a->second].push_back(b->second);
        adj[b->second].push_back(a->second);
    }
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::size_t> todo{0};
    seen[0] = 1;
    while (!todo.empty()) {
        const std::size_t v = todo.back();
        todo.pop_back();
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                todo.push_back(w);
            }
        }
    }
    if (std::count(seen.begin(), seen.end(), 0) > 0) {
        bad.push_back("graph not connected to the readout ion");
    }
    return bad;
}

namespace {

SweepTrial run_trial(const SweepSpec& spec, std::size_t ci, std::int64_t t, Protocol protocol,
                     const DopantEnsemble& ens, std::uint64_t ens_seed) {
    SearchConfig cfg = spec.search;
    cfg.protocol = protocol;
    const QubitGraph g = run_search(ens, cfg, stream_seed(ens_seed, static_cast<std::uint64_t>(protocol) + 1));
    const ConnectivityStats st = connectivity_stats(g);
    return {spec.concentrations[ci], protocol, t, st.n_qubits, st.mean_degree};
}

void run_ensemble(const SweepSpec& spec, std::size_t ci, std::int64_t t, std::vector<SweepTrial>& out) {
    const std::uint64_t ens_seed =
        stream_seed(spec.seed, ci * static_cast<std::uint64_t>(spec.trials) + static_cast<std::uint64_t>(t));
    const DopantEnsemble ens = crystal::assign_frequencies(
        crystal::place_dopants(spec.host, spec.concentrations[ci], spec.box_edge_nm, ens_seed), spec.host, ens_seed);
    const std::size_t base = (ci * static_cast<std::size_t>(spec.trials) + static_cast<std::size_t>(t)) *
                             spec.protocols.size();
    for (std::size_t p = 0; p < spec.protocols.size(); ++p) {
        out[base + p] = run_trial(spec, ci, t, spec.protocols[p], ens, ens_seed);
    }
}

SweepSpec checked(const SweepSpec& spec) {
    require(spec.trials >= 1, "sweep: trials must be >= 1");
    require(!spec.protocols.empty(), "sweep: need at least one protocol");
    spec.host.validate();
    SweepSpec s = spec;
    s.search.window_ghz = spec.host.addressable_width_ghz;
    s.search.validate();
    return s;
}

SweepResult aggregate(const SweepSpec& spec, std::vector<SweepTrial> trials) {
    SweepResult r;
    for (std::size_t ci = 0; ci < spec.concentrations.size(); ++ci) {
        for (Protocol p : spec.protocols) {
            std::vector<double> n, deg;
            for (const auto& t : trials) {
                if (t.concentration == spec.concentrations[ci] && t.protocol == p) {
                    n.push_back(static_cast<double>(t.n_qubits));
                    deg.push_back(t.mean_degree);
                }
            }
            auto mean_se = [](const std::vector<double>& v) {
                const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
                if (v.size() < 2) return std::pair{m, 0.0};
                double ss = 0.0;
                for (double x : v) ss += (x - m) * (x - m);
                return std::pair{m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
            };
            const auto [nm, ns] = mean_se(n);
            const auto [dm, ds] = mean_se(deg);
            r.rows.push_back({spec.concentrations[ci], p, static_cast<std::int64_t>(n.size()), nm, ns, dm, ds});
        }
    }
    r.trials = std::move(trials);
    return r;
}

}  // namespace

SweepResult sweep_concentration_reference(const SweepSpec& input) {
    const SweepSpec spec = checked(input);
    std::vector<SweepTrial> out(spec.concentrations.size() * static_cast<std::size_t>(spec.trials) *
                                spec.protocols.size());
    for (std::size_t ci = 0; ci < spec.concentrations.size(); ++ci) {
        for (std::int64_t t = 0; t < spec.trials; ++t) {
            run_ensemble(spec, ci, t, out);
        }
    }
    return aggregate(spec, std::move(out));
}

SweepResult sweep_concentration(const SweepSpec& input) {
    const SweepSpec spec = checked(input);
    std::vector<SweepTrial> out(spec.concentrations.size() * static_cast<std::size_t>(spec.trials) *
                                spec.protocols.size());
    const auto tasks = static_cast<std::int64_t>(spec.concentrations.size()) * spec.trials;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < tasks; ++k) {
        run_ensemble(spec, static_cast<std::size_t>(k / spec.trials), k % spec.trials, out);
    }
    return aggregate(spec, std::move(out));
}

void write_graph(std::ostream& out, const QubitGraph& g) {
    char buf[256];
    out << "# reqc graph v1\n";
    std::snprintf(buf, sizeof buf, "readout %" PRId64 " %.6f %.6f %.6f\n", g.readout_id, g.readout_position.x,
                  g.readout_position.y, g.readout_position.z);
    out << buf;
    for (const auto& n : g.nodes) {
        std::snprintf(buf, sizeof buf, "node %" PRId64 " %.6f %.6f %.6f %.6f %d\n", n.id, n.position.x,
                      n.position.y, n.position.z, n.channel_ghz, n.discovery_index);
        out << buf;
    }
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof buf, "edge %" PRId64 " %" PRId64 " %.6f\n", e.a, e.b, e.shift_mhz);
        out << buf;
    }
    if (!out) {
        throw IoError("write_graph: stream failure");
    }
}

QubitGraph read_graph(std::istream& in) {
    QubitGraph g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        bool ok = true;
        if (kind == "readout") {
            ok = static_cast<bool>(ls >> g.readout_id >> g.readout_position.x >> g.readout_position.y >>
                                   g.readout_position.z);
        } else if (kind == "node") {
            QubitNode n;
            ok = static_cast<bool>(ls >> n.id >> n.position.x >> n.position.y >> n.position.z >> n.channel_ghz >>
                                   n.discovery_index);
            g.nodes.push_back(n);
        } else if (kind == "edge") {
            Edge e;
            ok = static_cast<bool>(ls >> e.a >> e.b >> e.shift_mhz);
            g.edges.push_back(e);
        } else {
            ok = false;
        }
        if (!ok) {
            throw IoError("read_graph: malformed record '" + line + "'");
        }
    }
    return g;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "concentration,protocol,trials,n_qubits_mean,n_qubits_stderr,degree_mean,degree_stderr\n";
    for (const auto& row : r.rows) {
        out << csv_line({fmt_g6(row.concentration), to_string(row.protocol), std::to_string(row.trials),
                         fmt_g6(row.n_qubits_mean), fmt_g6(row.n_qubits_stderr), fmt_g6(row.degree_mean),
                         fmt_g6(row.degree_stderr)});
    }
    if (!out) {
        throw IoError("write_sweep_csv: stream failure");
    }
}

}  // namespace reqc::nodesearch
