// config.hpp - JSON run configuration for the command-line front end.
//
// All energies are dimensionless multiples of gamma_ref. Unknown keys are
// rejected at every nesting level.

#pragma once

#include "photon_smatrix/core.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace psm::app {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UniformGrid {
    double start = 0;
    double stop = 0;
    int count = 0;

    bool operator==(const UniformGrid&) const = default;
};

/// Either an inclusive uniform range or an explicit list of points.
struct Grid {
    std::variant<UniformGrid, std::vector<double>> spec;

    std::vector<double> points() const;
    bool operator==(const Grid&) const = default;
};

struct ScattererSpec {
    ScattererKind kind = ScattererKind::VAtom;
    std::vector<double> deltas;
    std::vector<double> gammas;
    Chirality chirality = Chirality::NonChiral;

    Scatterer<double> build() const;
    bool operator==(const ScattererSpec&) const = default;
};

struct RunConfig {
    std::optional<ScattererSpec> scatterer;
    double gamma_ref = 1.0;
    std::optional<Grid> k_grid;          // single-scan
    std::optional<Grid> delta_sweep;     // poles: scale factor applied to the level pattern
    std::optional<double> delta_e;       // two-photon-map
    std::optional<Grid> dk_grid;         // two-photon-map
    std::optional<Grid> dp_grid;         // two-photon-map, crit-map
    std::optional<Grid> k2_offset_grid;  // crit-map: k2 - k1
    std::optional<int> root_index;       // crit-map: k1 = roots[root_index]
    std::optional<Grid> gamma1_grid;     // quench-scan
    std::optional<double> gamma2;        // quench-scan
    std::optional<double> delta;         // quench-scan, defaults to gamma2
    std::optional<std::string> output;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ScattererSpec& s);

}  // namespace psm::app
