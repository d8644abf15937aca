#include "photon_smatrix/app/commands.hpp"

#include "photon_smatrix/crit.hpp"
#include "photon_smatrix/parallel.hpp"
#include "photon_smatrix/single_photon.hpp"
#include "photon_smatrix/two_photon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

namespace psm::app {

using nlohmann::json;

namespace {

constexpr const char* kUnits = "energies in units of gamma_ref; absT2 in units of 1/gamma_ref^2";

template <typename T>
const T& require(const std::optional<T>& v, const char* key, const char* command) {
    if (!v) throw ConfigError(std::string(command) + " requires '" + key + "'");
    return *v;
}

json base_metadata(const char* command, const RunConfig& cfg) {
    return json{{"command", command}, {"gamma_ref", cfg.gamma_ref}, {"units", kUnits}, {"config", to_json(cfg)}};
}

Complex<double> observed_t2(const Scatterer<double>& s, const TwoPhotonPoint<double>& pt) {
    return s.chirality == Chirality::NonChiral ? t2_nonchiral(s, pt) : t2_chiral(s, pt);
}

// Shared body of the two map commands. Rows run over y (outer) then x.
Table two_photon_grid(const Scatterer<double>& s, const std::vector<double>& xs, const std::vector<double>& ys,
                      const char* x_name, const auto& point_at, unsigned threads) {
    std::vector<Complex<double>> values(xs.size() * ys.size());
    parallel_for(values.size(), threads, [&](std::size_t idx) {
        values[idx] = observed_t2(s, point_at(xs[idx % xs.size()], ys[idx / xs.size()]));
    });
    Table t{{x_name, "delta_p", "T_re", "T_im", "absT2"}, {}};
    t.rows.reserve(values.size());
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        const auto v = values[idx];
        t.rows.push_back({xs[idx % xs.size()], ys[idx / xs.size()], v.real(), v.imag(), std::norm(v)});
    }
    return t;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string format_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

json table_json(const CommandOutput& out) {
    json rows = json::array();
    for (const auto& row : out.table.rows) {
        json r = json::array();
        for (double v : row) {
            if (std::isfinite(v)) {
                r.push_back(v);
            } else {
                r.push_back(format_number(v));
            }
        }
        rows.push_back(std::move(r));
    }
    return json{{"columns", out.table.columns}, {"rows", std::move(rows)}, {"metadata", out.metadata}};
}

CommandOutput cmd_single_scan(const RunConfig& cfg, unsigned threads) {
    const auto s = require(cfg.scatterer, "scatterer", "single-scan").build();
    const auto ks = require(cfg.k_grid, "k_grid", "single-scan").points();
    std::vector<SingleAmplitudes<double>> amps(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) { amps[i] = single_amplitudes(s, ks[i]); });

    CommandOutput out;
    out.table.columns = {"k", "t_re", "t_im", "abs_t2", "r_re", "r_im", "abs_r2", "alpha"};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& a = amps[i];
        const Complex<double> t = a.t.value_or(a.t_chiral);
        const Complex<double> r = a.r.value_or(Complex<double>(0));
        const double alpha_value = a.alpha.value_or(std::numeric_limits<double>::infinity());
        out.table.rows.push_back({ks[i], t.real(), t.imag(), std::norm(t), r.real(), r.imag(), std::norm(r), alpha_value});
    }
    out.metadata = base_metadata("single-scan", cfg);
    out.metadata["scatterer"] = to_json(*cfg.scatterer);
    return out;
}

std::vector<std::vector<std::complex<double>>> track_poles(
    const std::vector<std::vector<std::complex<double>>>& sweep) {
    std::vector<std::vector<std::complex<double>>> tracks;
    if (sweep.empty()) return tracks;
    auto first = sweep.front();
    std::sort(first.begin(), first.end(), pole_less<double>);
    tracks.push_back(first);
    for (std::size_t step = 1; step < sweep.size(); ++step) {
        const auto& prev = tracks.back();
        const auto& cur = sweep[step];
        // Candidate pairs (distance, real part of candidate, track, candidate).
        std::vector<std::tuple<double, double, std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < prev.size(); ++a) {
            for (std::size_t b = 0; b < cur.size(); ++b) {
                pairs.emplace_back(std::abs(prev[a] - cur[b]), cur[b].real(), a, b);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<std::complex<double>> next(prev.size());
        std::vector<bool> track_done(prev.size(), false), cand_done(cur.size(), false);
        for (const auto& [dist, re, a, b] : pairs) {
            if (track_done[a] || cand_done[b]) continue;
            next[a] = cur[b];
            track_done[a] = cand_done[b] = true;
        }
        tracks.push_back(std::move(next));
    }
    return tracks;
}

CommandOutput cmd_poles(const RunConfig& cfg) {
    const auto base = require(cfg.scatterer, "scatterer", "poles");
    const auto sweep = require(cfg.delta_sweep, "delta_sweep", "poles").points();
    std::vector<std::vector<std::complex<double>>> raw;
    for (double d : sweep) {
        ScattererSpec scaled = base;
        for (auto& delta : scaled.deltas) delta *= d;
        raw.push_back(poles(scaled.build()));
    }
    const auto tracks = track_poles(raw);

    CommandOutput out;
    const std::size_t n = base.deltas.size();
    out.table.columns.push_back("delta_sweep_value");
    for (std::size_t i = 1; i <= n; ++i) out.table.columns.push_back("re_pole_" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i) out.table.columns.push_back("im_pole_" + std::to_string(i));
    for (std::size_t step = 0; step < sweep.size(); ++step) {
        std::vector<double> row{sweep[step]};
        for (const auto& p : tracks[step]) row.push_back(p.real());
        for (const auto& p : tracks[step]) row.push_back(p.imag());
        out.table.rows.push_back(std::move(row));
    }
    out.metadata = base_metadata("poles", cfg);
    out.metadata["scatterer"] = to_json(base);
    out.metadata["delta_pattern"] = base.deltas;
    return out;
}

CommandOutput cmd_two_photon_map(const RunConfig& cfg, unsigned threads) {
    const auto s = require(cfg.scatterer, "scatterer", "two-photon-map").build();
    const double de = require(cfg.delta_e, "delta_e", "two-photon-map");
    const auto dk = require(cfg.dk_grid, "dk_grid", "two-photon-map").points();
    const auto dp = require(cfg.dp_grid, "dp_grid", "two-photon-map").points();
    CommandOutput out;
    out.table = two_photon_grid(
        s, dk, dp, "delta_k",
        [de](double x, double y) { return TwoPhotonPoint<double>::from_detunings(de, x, y); }, threads);
    out.metadata = base_metadata("two-photon-map", cfg);
    out.metadata["scatterer"] = to_json(*cfg.scatterer);
    out.metadata["delta_e"] = de;
    out.metadata["shape"] = {dp.size(), dk.size()};
    return out;
}

CommandOutput cmd_crit(const RunConfig& cfg) {
    const auto s = require(cfg.scatterer, "scatterer", "crit").build();
    const auto set = crit_roots(s);
    CommandOutput out;
    out.table.columns = {"root", "residual"};
    for (std::size_t i = 0; i < set.roots.size(); ++i) out.table.rows.push_back({set.roots[i], set.residuals[i]});
    out.metadata = base_metadata("crit", cfg);
    out.metadata["scatterer"] = to_json(*cfg.scatterer);
    out.document = json{{"roots", set.roots}, {"residuals", set.residuals}};
    return out;
}

CommandOutput cmd_crit_map(const RunConfig& cfg, unsigned threads) {
    const auto s = require(cfg.scatterer, "scatterer", "crit-map").build();
    const auto offsets = require(cfg.k2_offset_grid, "k2_offset_grid", "crit-map").points();
    const auto dp = require(cfg.dp_grid, "dp_grid", "crit-map").points();
    const int index = cfg.root_index.value_or(0);
    const auto set = crit_roots(s);
    if (index < 0 || static_cast<std::size_t>(index) >= set.roots.size()) {
        throw ConfigError("root_index " + std::to_string(index) + " out of range for " +
                          std::to_string(set.roots.size()) + " root(s)");
    }
    const double k1 = set.roots[static_cast<std::size_t>(index)];
    CommandOutput out;
    out.table = two_photon_grid(
        s, offsets, dp, "k2_offset",
        [k1](double off, double y) {
            const double k2 = k1 + off;
            return TwoPhotonPoint<double>{k1, k2, (k1 + k2) / 2 + y};
        },
        threads);
    out.metadata = base_metadata("crit-map", cfg);
    out.metadata["scatterer"] = to_json(*cfg.scatterer);
    out.metadata["roots"] = set.roots;
    out.metadata["k1"] = k1;
    out.metadata["shape"] = {dp.size(), offsets.size()};
    return out;
}

CommandOutput cmd_quench_scan(const RunConfig& cfg) {
    const auto g1 = require(cfg.gamma1_grid, "gamma1_grid", "quench-scan").points();
    const double g2 = require(cfg.gamma2, "gamma2", "quench-scan");
    const double delta = cfg.delta.value_or(g2);
    CommandOutput out;
    out.table.columns = {"gamma1", "absT2_v", "absT2_2ls"};
    for (const auto& row : quench_scan(g1, g2, delta)) {
        out.table.rows.push_back({row.gamma1, row.abs_t2_v, row.abs_t2_2ls});
    }
    out.metadata = base_metadata("quench-scan", cfg);
    out.metadata["gamma2"] = g2;
    out.metadata["delta"] = delta;
    return out;
}

}  // namespace psm::app
