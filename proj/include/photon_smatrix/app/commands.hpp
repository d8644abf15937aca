// commands.hpp - dataset generators behind the CLI subcommands.

#pragma once

#include "photon_smatrix/app/config.hpp"

#include <json.hpp>

#include <complex>
#include <string>
#include <vector>

namespace psm::app {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct CommandOutput {
    Table table;
    nlohmann::json metadata;
    // Set for commands whose natural output is a JSON document (crit).
    nlohmann::json document;
};

CommandOutput cmd_single_scan(const RunConfig& cfg, unsigned threads = 1);
CommandOutput cmd_poles(const RunConfig& cfg);
CommandOutput cmd_two_photon_map(const RunConfig& cfg, unsigned threads = 1);
CommandOutput cmd_crit(const RunConfig& cfg);
CommandOutput cmd_crit_map(const RunConfig& cfg, unsigned threads = 1);
CommandOutput cmd_quench_scan(const RunConfig& cfg);

/// %.16e formatting, header row, comma separated, LF endings.
std::string format_csv(const Table& table);
std::string format_number(double v);

/// {"columns": [...], "rows": [[...], ...], "metadata": {...}}
nlohmann::json table_json(const CommandOutput& out);

/// Greedy nearest-neighbour continuation of unordered pole sets. The first
/// set is sorted by real part; ties in distance go to the smaller real part.
std::vector<std::vector<std::complex<double>>> track_poles(
    const std::vector<std::vector<std::complex<double>>>& sweep);

}  // namespace psm::app
