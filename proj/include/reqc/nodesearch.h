#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "reqc/crystal.h"
#include "reqc/interactions.h"

namespace reqc::nodesearch {

enum class AllocStatus { accepted, rejected_spacing, rejected_out_of_window };

/// Spectral channels inside [0, W]: every pair of occupied centres is at
/// least `min_spacing` apart.
class ChannelAllocator {
public:
    explicit ChannelAllocator(double window_ghz = 100.0, double min_spacing_ghz = 1.0);

    AllocStatus check(double freq_ghz) const;
    bool can_accept(double freq_ghz) const { return check(freq_ghz) == AllocStatus::accepted; }
    /// Inserts on acceptance.
    AllocStatus allocate(double freq_ghz);

    std::size_t size() const { return occupied_.size(); }
    const std::set<double>& occupied() const { return occupied_; }
    double window_ghz() const { return window_; }
    double min_spacing_ghz() const { return spacing_; }
    /// floor(W / spacing) + 1.
    std::size_t capacity_bound() const;

private:
    double window_;
    double spacing_;
    std::set<double> occupied_;
};

enum class Protocol { line, starfish };
// scan: candidates in the order a frequency scan from a random start meets them.
// shift: strongest controller first, seeded shuffle among ties.
enum class CandidateOrder { scan, shift };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);
const char* to_string(CandidateOrder o);
CandidateOrder candidate_order_from_string(const std::string& s);

struct SearchConfig {
    double min_shift_mhz = 2.5;
    Protocol protocol = Protocol::starfish;
    interactions::DipoleModel dipole;
    double exclusion_radius_nm = interactions::kDefaultExclusionRadiusNm;
    std::optional<std::size_t> max_qubits;
    double window_ghz = 100.0;
    // The +-850 MHz block around each resonance; random arrivals then land about 1 GHz apart.
    double min_spacing_ghz = 0.85;
    CandidateOrder order = CandidateOrder::scan;

    void validate() const;
};

struct QubitNode {
    std::int64_t id = 0;
    Vec3 position;
    double channel_ghz = 0.0;
    int discovery_index = 0;
    /// Node this qubit was found to control (the readout id for the first qubit).
    std::int64_t parent_id = -1;
};

struct Edge {
    std::int64_t a = 0;
    std::int64_t b = 0;
    double shift_mhz = 0.0;
};

/// Qubits plus every pair (readout included) whose |shift| reaches the search threshold.
struct QubitGraph {
    std::int64_t readout_id = -1;
    Vec3 readout_position;
    std::vector<QubitNode> nodes;
    std::vector<Edge> edges;
    std::string diagnostic;
};

struct Controller {
    std::int64_t id = 0;
    double shift_mhz = 0.0;
};

/// Qubit-species dopants that can switch `target_id`: |shift| >= min_shift,
/// outside the readout exclusion radius, not in `in_graph`, and with a channel
/// the allocator accepts. Sorted by descending |shift|. Brute force over the ensemble.
std::vector<Controller> find_controllers(const crystal::DopantEnsemble& ensemble, std::int64_t target_id,
                                         const SearchConfig& config, const ChannelAllocator& alloc,
                                         const std::set<std::int64_t>& in_graph = {});

/// Depth-first growth: one new controller per visit, backtracking when a qubit is exhausted.
QubitGraph line_search(const crystal::DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed);
/// Breadth-first growth: every controller of a frontier qubit before moving on.
QubitGraph starfish_search(const crystal::DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed);
QubitGraph run_search(const crystal::DopantEnsemble& ensemble, const SearchConfig& config, std::uint64_t seed);

struct ConnectivityStats {
    std::size_t n_qubits = 0;
    double mean_degree = 0.0;
    std::map<int, std::size_t> degree_histogram;
    /// Degree of each qubit, indexed by discovery order.
    std::vector<int> degree_by_discovery;
};

/// Qubit-qubit edges only; the readout ion is not a qubit.
ConnectivityStats connectivity_stats(const QubitGraph& graph);

/// Post-hoc check of every node invariant. Returns human-readable violations.
std::vector<std::string> check_graph(const QubitGraph& graph, const SearchConfig& config);

struct SweepTrial {
    double concentration = 0.0;
    Protocol protocol = Protocol::starfish;
    std::int64_t trial = 0;
    std::size_t n_qubits = 0;
    double mean_degree = 0.0;
};

struct SweepRow {
    double concentration = 0.0;
    Protocol protocol = Protocol::starfish;
    std::int64_t trials = 0;
    double n_qubits_mean = 0.0;
    double n_qubits_stderr = 0.0;
    double degree_mean = 0.0;
    double degree_stderr = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Ordered by (concentration, trial, protocol). Protocols share each ensemble.
    std::vector<SweepTrial> trials;
};

inline constexpr double kDefaultSweepBoxEdgeNm = 60.0;

struct SweepSpec {
    crystal::HostMaterial host;
    std::vector<double> concentrations;
    std::vector<Protocol> protocols{Protocol::line, Protocol::starfish};
    SearchConfig search;
    std::int64_t trials = 50;
    std::uint64_t seed = 0;
    double box_edge_nm = kDefaultSweepBoxEdgeNm;
};

/// One ensemble per (concentration, trial), searched with every protocol.
/// Trials fan out over OpenMP; results do not depend on the thread count.
SweepResult sweep_concentration(const SweepSpec& spec);
SweepResult sweep_concentration_reference(const SweepSpec& spec);

void write_graph(std::ostream& out, const QubitGraph& graph);
QubitGraph read_graph(std::istream& in);
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace reqc::nodesearch
