#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reqc/crystal.h"
#include "reqc/nodesearch.h"
#include "reqc/readout.h"

namespace reqc {

/// Malformed configuration: carries the offending field and, when known, the line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, int line, const std::string& message);

    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct RunConfig {
    std::uint64_t master_seed = 0;
    crystal::HostMaterial host;
    std::string output_dir = ".";
    std::set<std::string> emit{"csv"};
    std::int64_t trials = 100;
    // 0 = let OpenMP decide.
    int parallelism = 0;
    readout::ReadoutConfig readout;
    nodesearch::SearchConfig search;
    double box_edge_nm = nodesearch::kDefaultSweepBoxEdgeNm;
};

/// Parses a YAML document. Top-level keys: seed, trials, parallelism,
/// output_dir, emit, box_edge_nm, and the sections host, readout, search.
/// Unknown keys throw unless `lax`, in which case they are appended to `warnings`.
RunConfig parse_config(std::string_view text, bool lax = false, std::vector<std::string>* warnings = nullptr);

RunConfig load_config(const std::string& path, bool lax = false, std::vector<std::string>* warnings = nullptr);

}  // namespace reqc
