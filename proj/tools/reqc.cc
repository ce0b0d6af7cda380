// reqc: command-line front end for the rare-earth quantum computing models.
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "reqc/cavity.h"
#include "reqc/config.h"
#include "reqc/crystal.h"
#include "reqc/csv.h"
#include "reqc/gates.h"
#include "reqc/interactions.h"
#include "reqc/network.h"
#include "reqc/nodesearch.h"
#include "reqc/readout.h"
#include "reqc/validation/acceptance.h"

#ifndef REQC_VERSION
#define REQC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace reqc;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kDomain = 3, kIo = 4 };

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> parallelism;
    std::string config_path;
    bool lax = false;
};

// Collects every file a subcommand writes so the manifest can list them.
class Outputs {
public:
    explicit Outputs(const RunConfig& cfg) : cfg_(cfg) {}

    bool wants(const std::string& fmt) const { return cfg_.emit.count(fmt) > 0; }

    void write(const std::string& name, const std::string& content) {
        const fs::path dir(cfg_.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
        const fs::path path = dir / name;
        std::ofstream f(path, std::ios::binary);
        f << content;
        f.close();
        if (!f) throw IoError("cannot write '" + path.string() + "'");
        files_.push_back(path.string());
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    const RunConfig& cfg_;
    std::vector<std::string> files_;
};

json config_echo(const RunConfig& c) {
    const auto& h = c.host;
    const auto& r = c.readout;
    const auto& s = c.search;
    return {
        {"seed", c.master_seed},
        {"trials", c.trials},
        {"parallelism", c.parallelism},
        {"output_dir", c.output_dir},
        {"emit", c.emit},
        {"box_edge_nm", c.box_edge_nm},
        {"host",
         {{"name", h.name},
          {"cation_density", h.cation_density_nm3},
          {"optical_t2", h.optical_t2_s},
          {"hyperfine_spread", h.hyperfine_spread_mhz},
          {"level_spacing", h.level_spacing_mhz},
          {"addressable_width", h.addressable_width_ghz},
          {"qubit_fraction", h.qubit_fraction}}},
        {"readout",
         {{"detection_rate", r.detection_rate},
          {"background_rate", r.background_rate},
          {"shift_over_decay", r.shift_over_decay},
          {"qubit_lifetime_ratio", r.qubit_lifetime_ratio},
          {"dark_leak_fraction", r.dark_leak_fraction},
          {"transfer_error", r.transfer_error},
          {"prior_bright", r.prior_bright},
          {"buffer_cycles", r.buffer_cycles},
          {"buffer_window_ratio", r.buffer_window_ratio}}},
        {"search",
         {{"min_shift_mhz", s.min_shift_mhz},
          {"exclusion_radius_nm", s.exclusion_radius_nm},
          {"min_spacing_ghz", s.min_spacing_ghz},
          {"dipole_coupling", s.dipole.coupling_mhz_nm3},
          {"dipole_mode", s.dipole.mode == interactions::DipoleMode::angular ? "angular" : "isotropic"},
          {"protocol", nodesearch::to_string(s.protocol)},
          {"order", nodesearch::to_string(s.order)}}},
    };
}

// Key/value report: "key: value" lines, or one JSON object.
class Report {
public:
    Report& add(const std::string& key, double v) { return put(key, fmt_g6(v), v); }
    Report& add(const std::string& key, bool v) { return put(key, v ? "true" : "false", v); }
    Report& add(const std::string& key, const std::string& v) { return put(key, v, v); }

    void print(bool as_json) const {
        if (as_json) {
            std::cout << obj_.dump(2) << "\n";
        } else {
            std::cout << text_.str();
        }
    }

private:
    Report& put(const std::string& key, const std::string& text, json value) {
        text_ << key << ": " << text << "\n";
        obj_[key] = std::move(value);
        return *this;
    }
    std::ostringstream text_;
    json obj_ = json::object();
};

std::string lines_to_string(const std::function<void(std::ostream&)>& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

int run_validate(std::optional<int> criterion, std::uint64_t seed, Outputs& out) {
    validation::AcceptanceOptions opts;
    opts.seed = seed;
    opts.only = criterion;
    const auto results = validation::run_acceptance(opts);
    if (results.empty()) throw DomainError("no acceptance criterion " + std::to_string(criterion.value_or(0)));
    bool ok = true;
    json arr = json::array();
    std::ostringstream csv;
    csv << "criterion,name,passed,seconds\n";
    for (const auto& r : results) {
        std::cout << validation::format_result(r) << "\n";
        ok = ok && r.passed;
        arr.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        csv << csv_line({std::to_string(r.id), r.name, r.passed ? "true" : "false", fmt_g6(r.seconds)});
    }
    if (out.wants("csv")) out.write("validate.csv", csv.str());
    if (out.wants("json")) out.write("validate.json", arr.dump(2) + "\n");
    return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rare-earth quantum computing node and readout models"};
    app.set_version_flag("--version", REQC_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--trials", g.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", g.config_path, "YAML run configuration")->check(CLI::ExistingFile);
    app.add_option("--parallelism", g.parallelism, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--lax", g.lax, "Warn instead of failing on unknown config keys");

    // cavity
    double q = 0, v = 0, zeta = 1.0, lifetime = 0, t2_star = kInf;
    auto* cavity_cmd = app.add_subcommand("cavity", "Purcell factor and derived cavity figures");
    cavity_cmd->add_option("--q", q, "Quality factor")->required();
    cavity_cmd->add_option("--v", v, "Mode volume in cubic wavelengths")->required();
    cavity_cmd->add_option("--zeta", zeta, "Branching ratio into the cavity transition");
    cavity_cmd->add_option("--lifetime", lifetime, "Free-space lifetime T1 in seconds");
    cavity_cmd->add_option("--t2-star", t2_star, "Pure dephasing time in seconds");

    // budget
    double source_rate = 0;
    std::vector<double> efficiencies{0.3, 0.7, 0.6};
    auto* budget_cmd = app.add_subcommand("budget", "Detected photon rate through a loss chain");
    budget_cmd->add_option("--source-rate", source_rate, "Emitted photons per second")->required();
    budget_cmd->add_option("--efficiency", efficiencies, "Stage efficiencies in order")->delimiter(',');

    // interactions
    double distance_nm = 2.0, shift_mhz = 10.0;
    bool angular = false;
    auto* inter_cmd = app.add_subcommand("interactions", "Dipole shift and interaction radius");
    inter_cmd->add_option("--distance-nm", distance_nm, "Ion separation in nm");
    inter_cmd->add_option("--shift-mhz", shift_mhz, "Minimum useful shift in MHz");
    inter_cmd->add_flag("--angular", angular, "Use the (1 - 3cos^2) angular factor along z");

    // readout-sim
    std::vector<double> durations_us{0.5, 1, 2, 3, 5, 7, 10, 15, 20};
    bool buffer = false;
    std::optional<int> cycles;
    auto* readout_cmd = app.add_subcommand("readout-sim", "Monte Carlo readout fidelity versus window");
    readout_cmd->add_option("--durations-us", durations_us, "Readout windows in microseconds")->delimiter(',');
    readout_cmd->add_flag("--buffer", buffer, "Also run the buffer-ion protocol");
    readout_cmd->add_option("--cycles", cycles, "Buffer cycles (default from config)")->check(CLI::PositiveNumber);

    // node-search
    double concentration = 0.05;
    std::optional<double> ns_shift, width_ghz, box_nm;
    std::optional<std::string> protocol;
    std::optional<std::string> ensemble_in;
    auto* node_cmd = app.add_subcommand("node-search", "Grow one qubit node around a readout ion");
    node_cmd->add_option("--concentration", concentration, "Dopant fraction of cation sites");
    node_cmd->add_option("--shift-mhz", ns_shift, "Minimum usable dipole shift in MHz");
    node_cmd->add_option("--width-ghz", width_ghz, "Addressable inhomogeneous width in GHz");
    node_cmd->add_option("--box-nm", box_nm, "Simulation box edge in nm");
    node_cmd->add_option("--protocol", protocol, "line or starfish")->check(CLI::IsMember({"line", "starfish"}));
    node_cmd->add_option("--ensemble", ensemble_in, "Read the ensemble from this file")->check(CLI::ExistingFile);

    // sweep
    std::vector<double> concentrations{0.01, 0.02, 0.03, 0.04, 0.05};
    std::optional<double> sw_shift, sw_width;
    auto* sweep_cmd = app.add_subcommand("sweep", "Qubit count and degree versus concentration");
    sweep_cmd->add_option("--concentrations", concentrations, "Dopant fractions")->delimiter(',');
    sweep_cmd->add_option("--shift-mhz", sw_shift, "Minimum usable dipole shift in MHz");
    sweep_cmd->add_option("--width-ghz", sw_width, "Addressable inhomogeneous width in GHz");

    // repeater
    int links = 2;
    double f_link = 0.95, f_bsm = 0.87;
    std::optional<double> target;
    auto* rep_cmd = app.add_subcommand("repeater", "Repeater chain fidelity and Bell threshold");
    rep_cmd->add_option("--links", links, "Number of elementary links")->check(CLI::PositiveNumber);
    rep_cmd->add_option("--f-link", f_link, "Link fidelity");
    rep_cmd->add_option("--f-bsm", f_bsm, "Bell-state measurement fidelity");
    rep_cmd->add_option("--target", target, "Also solve for the BSM fidelity reaching this target");

    // validate
    std::optional<int> criterion;
    auto* val_cmd = app.add_subcommand("validate", "Run the acceptance suite");
    val_cmd->add_option("--criterion", criterion, "Run a single criterion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        std::vector<std::string> warnings;
        RunConfig cfg = g.config_path.empty() ? parse_config("", g.lax) : load_config(g.config_path, g.lax, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        if (g.seed) cfg.master_seed = *g.seed;
        if (g.trials) cfg.trials = *g.trials;
        if (g.out) cfg.output_dir = *g.out;
        if (g.format) cfg.emit = {*g.format};
        if (g.parallelism) cfg.parallelism = *g.parallelism;
        if (cfg.parallelism > 0) omp_set_num_threads(cfg.parallelism);
        const bool as_json = g.format && *g.format == "json";

        Outputs out(cfg);
        int status = kOk;
        const std::string name = app.get_subcommands().front()->get_name();

        if (name == "cavity") {
            cavity::CavityParams cp{.quality_factor = q, .mode_volume = v, .branching_ratio = zeta};
            Report r;
            r.add("ideal_purcell", cavity::ideal_purcell(cp)).add("effective_purcell", cavity::effective_purcell(cp));
            const double fp = cavity::effective_purcell(cp);
            r.add("beta", cavity::beta_factor(fp));
            if (lifetime > 0) {
                const cavity::EmitterParams em{lifetime, t2_star};
                const double rate = cavity::enhanced_rate(fp, em);
                const double t2 = cavity::total_dephasing(em);
                r.add("enhanced_rate_per_s", rate).add("t2_s", t2);
                const double eps = std::min(1.0, cavity::indistinguishability(t2, 1.0 / rate));
                r.add("indistinguishability", eps).add("cooperativity", cavity::cooperativity(eps, fp));
            }
            r.print(as_json);
        } else if (name == "budget") {
            cavity::BudgetChain chain{source_rate, {}};
            for (std::size_t i = 0; i < efficiencies.size(); ++i) {
                chain.stages.push_back({"stage" + std::to_string(i + 1), efficiencies[i]});
            }
            Report().add("detected_rate_per_s", cavity::photon_budget(chain)).print(as_json);
        } else if (name == "interactions") {
            interactions::DipoleModel m;
            if (angular) m.mode = interactions::DipoleMode::angular;
            const Vec3 d{0.0, 0.0, distance_nm};
            Report()
                .add("shift_mhz", interactions::dipole_shift(m, d))
                .add("interaction_radius_nm", interactions::interaction_radius(m, shift_mhz))
                .add("energy_transfer_excluded", interactions::energy_transfer_excluded(d))
                .add("shift_error", gates::shift_to_error(gates::default_shift_error_model(),
                                                          std::abs(interactions::dipole_shift(m, d))))
                .print(as_json);
        } else if (name == "readout-sim") {
            std::vector<double> durations;
            for (double us : durations_us) durations.push_back(us * 1e-6);
            const auto pts = readout::fidelity_curve(cfg.readout, durations, cfg.trials, cfg.master_seed);
            if (out.wants("csv")) {
                out.write("readout_fidelity.csv", lines_to_string([&](std::ostream& s) { readout::write_fidelity_csv(s, pts); }));
            }
            if (out.wants("json")) {
                json arr = json::array();
                for (const auto& p : pts) {
                    arr.push_back({{"duration_us", p.duration_s * 1e6}, {"fidelity", p.fidelity},
                                   {"stderr", p.std_error}, {"trials", p.trials}});
                }
                out.write("readout_fidelity.json", arr.dump(2) + "\n");
            }
            for (const auto& p : pts) {
                std::cout << fmt_g6(p.duration_s * 1e6) << " us: fidelity " << fmt_g6(p.fidelity) << " +- "
                          << fmt_g6(p.std_error) << "\n";
            }
            if (buffer) {
                const int n = cycles.value_or(cfg.readout.buffer_cycles);
                const auto b = readout::buffer_protocol(cfg.readout, n, cfg.trials, cfg.master_seed);
                std::cout << "buffer " << n << " cycles, " << fmt_g6(b.total_duration_s * 1e6)
                          << " us: fidelity " << fmt_g6(b.fidelity) << " +- " << fmt_g6(b.std_error) << "\n";
                if (out.wants("csv")) {
                    out.write("buffer.csv", "cycles,total_duration_us,fidelity,stderr,trials\n" +
                                                csv_line({std::to_string(b.cycles), fmt_g6(b.total_duration_s * 1e6),
                                                          fmt_g6(b.fidelity), fmt_g6(b.std_error),
                                                          std::to_string(b.trials)}));
                }
                if (out.wants("json")) {
                    out.write("buffer.json", json{{"cycles", b.cycles}, {"total_duration_us", b.total_duration_s * 1e6},
                                                  {"fidelity", b.fidelity}, {"stderr", b.std_error},
                                                  {"trials", b.trials}}.dump(2) + "\n");
                }
            }
        } else if (name == "node-search") {
            auto search = cfg.search;
            if (ns_shift) search.min_shift_mhz = *ns_shift;
            if (protocol) search.protocol = nodesearch::protocol_from_string(*protocol);
            auto host = cfg.host;
            if (width_ghz) host.addressable_width_ghz = *width_ghz;
            search.window_ghz = host.addressable_width_ghz;
            crystal::DopantEnsemble ens;
            if (ensemble_in) {
                std::ifstream in(*ensemble_in);
                ens = crystal::read_ensemble(in);
            } else {
                const double edge = box_nm.value_or(cfg.box_edge_nm);
                ens = crystal::assign_frequencies(crystal::place_dopants(host, concentration, edge, cfg.master_seed),
                                                  host, cfg.master_seed);
                out.write("ensemble.txt", lines_to_string([&](std::ostream& s) { crystal::write_ensemble(s, ens); }));
            }
            const auto graph = nodesearch::run_search(ens, search, cfg.master_seed);
            out.write("graph.txt", lines_to_string([&](std::ostream& s) { nodesearch::write_graph(s, graph); }));
            const auto st = nodesearch::connectivity_stats(graph);
            if (out.wants("csv")) {
                std::string csv = "discovery_index,id,channel_ghz,degree\n";
                for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
                    csv += csv_line({std::to_string(i), std::to_string(graph.nodes[i].id),
                                     fmt_g6(graph.nodes[i].channel_ghz), std::to_string(st.degree_by_discovery[i])});
                }
                out.write("node_degrees.csv", csv);
            }
            if (out.wants("json")) {
                json j{{"n_qubits", st.n_qubits}, {"mean_degree", st.mean_degree}, {"degree_by_discovery", st.degree_by_discovery}};
                out.write("node_stats.json", j.dump(2) + "\n");
            }
            Report r;
            r.add("protocol", std::string(nodesearch::to_string(search.protocol)))
                .add("dopants", static_cast<double>(ens.dopants.size()))
                .add("n_qubits", static_cast<double>(st.n_qubits))
                .add("mean_degree", st.mean_degree)
                .add("capacity_bound",
                     static_cast<double>(nodesearch::ChannelAllocator(search.window_ghz, search.min_spacing_ghz).capacity_bound()));
            if (!graph.diagnostic.empty()) r.add("diagnostic", graph.diagnostic);
            r.print(as_json);
        } else if (name == "sweep") {
            nodesearch::SweepSpec spec;
            spec.host = cfg.host;
            if (sw_width) spec.host.addressable_width_ghz = *sw_width;
            spec.concentrations = concentrations;
            spec.search = cfg.search;
            if (sw_shift) spec.search.min_shift_mhz = *sw_shift;
            spec.trials = cfg.trials;
            spec.seed = cfg.master_seed;
            spec.box_edge_nm = cfg.box_edge_nm;
            const auto result = nodesearch::sweep_concentration(spec);
            const std::string csv = lines_to_string([&](std::ostream& s) { nodesearch::write_sweep_csv(s, result); });
            if (out.wants("csv")) out.write("sweep.csv", csv);
            if (out.wants("json")) {
                json arr = json::array();
                for (const auto& r : result.rows) {
                    arr.push_back({{"concentration", r.concentration},
                                   {"protocol", nodesearch::to_string(r.protocol)},
                                   {"trials", r.trials},
                                   {"n_qubits_mean", r.n_qubits_mean},
                                   {"n_qubits_stderr", r.n_qubits_stderr},
                                   {"degree_mean", r.degree_mean},
                                   {"degree_stderr", r.degree_stderr}});
                }
                out.write("sweep.json", arr.dump(2) + "\n");
            }
            std::cout << csv;
        } else if (name == "repeater") {
            const double f = network::chain_fidelity({links, f_link, f_bsm});
            Report r;
            r.add("fidelity", f).add("bell_violation", network::bell_threshold_check(f));
            if (target) {
                const auto req = network::required_bsm_fidelity(links, f_link, *target);
                r.add("required_bsm_fidelity", req.fidelity).add("target_infeasible", req.infeasible);
            }
            r.print(as_json);
        } else if (name == "validate") {
            status = run_validate(criterion, g.seed.value_or(validation::AcceptanceOptions{}.seed), out);
        }

        if (!out.files().empty()) {
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            json manifest{{"tool", "reqc"},
                          {"version", REQC_VERSION},
                          {"subcommand", name},
                          {"master_seed", cfg.master_seed},
                          {"wall_clock_s", wall},
                          {"outputs", out.files()},
                          {"config", config_echo(cfg)}};
            out.write("manifest.json", manifest.dump(2) + "\n");
        }
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomain;
    }
}
