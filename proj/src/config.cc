#include "reqc/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace reqc {

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message
                                  : field + ": " + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <class T>
T as(const YAML::Node& n, const std::string& field) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(field, line_of(n), "type mismatch for value '" + n.Scalar() + "'");
    }
}

using Handler = std::function<void(const YAML::Node&, const std::string&)>;

void apply(const YAML::Node& map, const std::string& prefix, const std::map<std::string, Handler>& handlers,
           bool lax, std::vector<std::string>* warnings) {
    if (!map || map.IsNull()) return;
    if (!map.IsMap()) {
        throw ConfigError(prefix.empty() ? "<root>" : prefix, line_of(map), "expected a mapping");
    }
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        const std::string field = prefix.empty() ? key : prefix + "." + key;
        const auto h = handlers.find(key);
        if (h == handlers.end()) {
            if (!lax) {
                throw ConfigError(field, line_of(kv.first), "unknown key");
            }
            if (warnings) warnings->push_back("line " + std::to_string(line_of(kv.first)) + ": ignoring unknown key " + field);
            continue;
        }
        h->second(kv.second, field);
    }
}

template <class T>
Handler set(T& target) {
    return [&target](const YAML::Node& n, const std::string& f) { target = as<T>(n, f); };
}

}  // namespace

RunConfig parse_config(std::string_view text, bool lax, std::vector<std::string>* warnings) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("<document>", e.mark.line + 1, e.msg);
    }

    RunConfig cfg;
    auto& h = cfg.host;
    auto& r = cfg.readout;
    auto& s = cfg.search;

    const std::map<std::string, Handler> host_keys{
        {"name", set(h.name)},
        {"cation_density", set(h.cation_density_nm3)},
        {"optical_t2", set(h.optical_t2_s)},
        {"hyperfine_spread", set(h.hyperfine_spread_mhz)},
        {"level_spacing", set(h.level_spacing_mhz)},
        {"addressable_width", set(h.addressable_width_ghz)},
        {"qubit_fraction", set(h.qubit_fraction)},
    };
    const std::map<std::string, Handler> readout_keys{
        {"detection_rate", set(r.detection_rate)},
        {"background_rate", set(r.background_rate)},
        {"shift_over_decay", set(r.shift_over_decay)},
        {"qubit_lifetime_ratio", set(r.qubit_lifetime_ratio)},
        {"dark_leak_fraction", set(r.dark_leak_fraction)},
        {"transfer_error", set(r.transfer_error)},
        {"prior_bright", set(r.prior_bright)},
        {"buffer_cycles", set(r.buffer_cycles)},
        {"buffer_window_ratio", set(r.buffer_window_ratio)},
    };
    const std::map<std::string, Handler> search_keys{
        {"min_shift_mhz", set(s.min_shift_mhz)},
        {"exclusion_radius_nm", set(s.exclusion_radius_nm)},
        {"min_spacing_ghz", set(s.min_spacing_ghz)},
        {"dipole_coupling", set(s.dipole.coupling_mhz_nm3)},
        {"protocol",
         [&s](const YAML::Node& n, const std::string& f) {
             try {
                 s.protocol = nodesearch::protocol_from_string(as<std::string>(n, f));
             } catch (const DomainError& e) {
                 throw ConfigError(f, line_of(n), e.what());
             }
         }},
        {"order",
         [&s](const YAML::Node& n, const std::string& f) {
             try {
                 s.order = nodesearch::candidate_order_from_string(as<std::string>(n, f));
             } catch (const DomainError& e) {
                 throw ConfigError(f, line_of(n), e.what());
             }
         }},
        {"dipole_mode",
         [&s](const YAML::Node& n, const std::string& f) {
             const auto v = as<std::string>(n, f);
             if (v == "isotropic") s.dipole.mode = interactions::DipoleMode::isotropic;
             else if (v == "angular") s.dipole.mode = interactions::DipoleMode::angular;
             else throw ConfigError(f, line_of(n), "expected isotropic or angular");
         }},
    };
    const std::map<std::string, Handler> root_keys{
        {"seed", set(cfg.master_seed)},
        {"trials", set(cfg.trials)},
        {"parallelism", set(cfg.parallelism)},
        {"output_dir", set(cfg.output_dir)},
        {"box_edge_nm", set(cfg.box_edge_nm)},
        {"emit",
         [&cfg](const YAML::Node& n, const std::string& f) {
             cfg.emit.clear();
             const auto items = n.IsSequence() ? as<std::vector<std::string>>(n, f)
                                               : std::vector<std::string>{as<std::string>(n, f)};
             for (const auto& v : items) {
                 if (v != "csv" && v != "json") throw ConfigError(f, line_of(n), "expected csv or json, got '" + v + "'");
                 cfg.emit.insert(v);
             }
         }},
        {"host", [&](const YAML::Node& n, const std::string& f) { apply(n, f, host_keys, lax, warnings); }},
        {"readout", [&](const YAML::Node& n, const std::string& f) { apply(n, f, readout_keys, lax, warnings); }},
        {"search", [&](const YAML::Node& n, const std::string& f) { apply(n, f, search_keys, lax, warnings); }},
    };
    apply(root, "", root_keys, lax, warnings);

    if (cfg.trials < 1) throw ConfigError("trials", 0, "must be >= 1");
    if (cfg.parallelism < 0) throw ConfigError("parallelism", 0, "must be >= 0");
    if (cfg.box_edge_nm <= 0.0) throw ConfigError("box_edge_nm", 0, "must be > 0");
    try {
        cfg.host.validate();
        cfg.readout.validate();
        cfg.search.window_ghz = cfg.host.addressable_width_ghz;
        cfg.search.validate();
    } catch (const DomainError& e) {
        throw ConfigError("<values>", 0, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path, bool lax, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), lax, warnings);
}

}  // namespace reqc
