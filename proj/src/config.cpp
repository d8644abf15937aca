#include "photon_smatrix/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace psm::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
    return v;
}

std::vector<double> number_list(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, key));
    return out;
}

Grid parse_grid(const json& j, const std::string& key) {
    if (j.is_array()) {
        Grid g{number_list(j, key)};
        if (g.points().empty()) throw ConfigError("grid '" + key + "' is empty");
        return g;
    }
    reject_unknown(j, {"start", "stop", "count", "values"}, "grid '" + key + "'");
    if (j.contains("values")) {
        if (j.size() != 1) throw ConfigError("grid '" + key + "': 'values' excludes start/stop/count");
        return parse_grid(j.at("values"), key);
    }
    for (const char* field : {"start", "stop", "count"}) {
        if (!j.contains(field)) throw ConfigError("grid '" + key + "' is missing '" + field + "'");
    }
    if (!j.at("count").is_number_integer()) throw ConfigError("grid '" + key + "': count must be an integer");
    UniformGrid u{number(j.at("start"), key), number(j.at("stop"), key), j.at("count").get<int>()};
    if (u.count < 1) throw ConfigError("grid '" + key + "' is empty");
    if (u.count == 1 && u.start != u.stop) throw ConfigError("grid '" + key + "': count 1 needs start == stop");
    return Grid{u};
}

json grid_json(const Grid& g) {
    if (const auto* u = std::get_if<UniformGrid>(&g.spec)) {
        return json{{"start", u->start}, {"stop", u->stop}, {"count", u->count}};
    }
    return json{{"values", std::get<std::vector<double>>(g.spec)}};
}

ScattererSpec parse_scatterer(const json& j) {
    reject_unknown(j, {"kind", "deltas", "gammas", "chirality"}, "scatterer");
    for (const char* field : {"kind", "deltas", "gammas"}) {
        if (!j.contains(field)) throw ConfigError(std::string("scatterer is missing '") + field + "'");
    }
    ScattererSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "v_atom") {
        s.kind = ScattererKind::VAtom;
    } else if (kind == "two_2ls") {
        s.kind = ScattererKind::Two2LS;
    } else {
        throw ConfigError("scatterer kind must be 'v_atom' or 'two_2ls'");
    }
    s.deltas = number_list(j.at("deltas"), "deltas");
    s.gammas = number_list(j.at("gammas"), "gammas");
    const auto chirality = j.value("chirality", std::string("nonchiral"));
    if (chirality == "nonchiral") {
        s.chirality = Chirality::NonChiral;
    } else if (chirality == "chiral") {
        s.chirality = Chirality::Chiral;
    } else {
        throw ConfigError("chirality must be 'chiral' or 'nonchiral'");
    }
    try {
        validate(s.build());
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid scatterer: ") + e.what());
    }
    return s;
}

}  // namespace

std::vector<double> Grid::points() const {
    if (const auto* values = std::get_if<std::vector<double>>(&spec)) return *values;
    const auto& u = std::get<UniformGrid>(spec);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(u.count, 0)));
    for (int i = 0; i < u.count; ++i) {
        out.push_back(u.count == 1 ? u.start : u.start + (u.stop - u.start) * i / (u.count - 1));
    }
    return out;
}

Scatterer<double> ScattererSpec::build() const { return Scatterer<double>::make(kind, deltas, gammas, chirality); }

RunConfig parse_config(const json& j) {
    try {
        reject_unknown(j,
                       {"scatterer", "gamma_ref", "k_grid", "delta_sweep", "delta_e", "dk_grid", "dp_grid",
                        "k2_offset_grid", "root_index", "gamma1_grid", "gamma2", "delta", "output"},
                       "config");
        RunConfig cfg;
        if (j.contains("scatterer")) cfg.scatterer = parse_scatterer(j.at("scatterer"));
        if (j.contains("gamma_ref")) {
            cfg.gamma_ref = number(j.at("gamma_ref"), "gamma_ref");
            if (!(cfg.gamma_ref > 0)) throw ConfigError("gamma_ref must be positive");
        }
        for (auto [key, slot] : {std::pair{"k_grid", &cfg.k_grid}, std::pair{"delta_sweep", &cfg.delta_sweep},
                                 std::pair{"dk_grid", &cfg.dk_grid}, std::pair{"dp_grid", &cfg.dp_grid},
                                 std::pair{"k2_offset_grid", &cfg.k2_offset_grid},
                                 std::pair{"gamma1_grid", &cfg.gamma1_grid}}) {
            if (j.contains(key)) *slot = parse_grid(j.at(key), key);
        }
        for (auto [key, slot] : {std::pair{"delta_e", &cfg.delta_e}, std::pair{"gamma2", &cfg.gamma2},
                                 std::pair{"delta", &cfg.delta}}) {
            if (j.contains(key)) *slot = number(j.at(key), key);
        }
        if (j.contains("root_index")) {
            if (!j.at("root_index").is_number_integer()) throw ConfigError("root_index must be an integer");
            cfg.root_index = j.at("root_index").get<int>();
        }
        if (j.contains("output")) {
            if (!j.at("output").is_string()) throw ConfigError("output must be a string");
            cfg.output = j.at("output").get<std::string>();
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

json to_json(const ScattererSpec& s) {
    return json{{"kind", std::string(to_string(s.kind))},
                {"deltas", s.deltas},
                {"gammas", s.gammas},
                {"chirality", std::string(to_string(s.chirality))}};
}

json to_json(const RunConfig& cfg) {
    json j{{"gamma_ref", cfg.gamma_ref}};
    if (cfg.scatterer) j["scatterer"] = to_json(*cfg.scatterer);
    for (auto [key, slot] : {std::pair{"k_grid", &cfg.k_grid}, std::pair{"delta_sweep", &cfg.delta_sweep},
                             std::pair{"dk_grid", &cfg.dk_grid}, std::pair{"dp_grid", &cfg.dp_grid},
                             std::pair{"k2_offset_grid", &cfg.k2_offset_grid},
                             std::pair{"gamma1_grid", &cfg.gamma1_grid}}) {
        if (*slot) j[key] = grid_json(**slot);
    }
    for (auto [key, slot] : {std::pair{"delta_e", &cfg.delta_e}, std::pair{"gamma2", &cfg.gamma2},
                             std::pair{"delta", &cfg.delta}}) {
        if (*slot) j[key] = **slot;
    }
    if (cfg.root_index) j["root_index"] = *cfg.root_index;
    if (cfg.output) j["output"] = *cfg.output;
    return j;
}

}  // namespace psm::app
