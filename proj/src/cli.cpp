#include "photon_smatrix/app/cli.hpp"

#include "photon_smatrix/app/commands.hpp"
#include "photon_smatrix/app/config.hpp"
#include "photon_smatrix/app/selftest.hpp"
#include "photon_smatrix/core.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

namespace psm::app {

namespace {

unsigned default_threads() {
    const char* env = std::getenv("PHOTON_SMATRIX_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
        throw ConfigError("PHOTON_SMATRIX_THREADS must be a positive integer");
    }
    return static_cast<unsigned>(v);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

// Errors that stem from the user's input rather than the numerics.
bool is_input_error(ErrorCode code) {
    return code == ErrorCode::ValidationError || code == ErrorCode::ChiralityMismatch ||
           code == ErrorCode::KindMismatch;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact one- and two-photon scattering for V-type atoms and collocated two-level systems",
                 "photon_smatrix"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format;
    std::optional<unsigned> threads_flag;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_path, "output file (default: config 'output' or standard output)");
    app.add_option("--threads", threads_flag, "worker threads (default: $PHOTON_SMATRIX_THREADS or 1)")
        ->check(CLI::Range(1u, 4096u));
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    using Runner = std::function<CommandOutput(const RunConfig&, unsigned)>;
    const std::map<std::string, std::pair<std::string, Runner>> commands{
        {"single-scan", {"t, r and alpha over a k grid", cmd_single_scan}},
        {"poles", {"pole tracks over a scaled level pattern", [](const RunConfig& c, unsigned) { return cmd_poles(c); }}},
        {"two-photon-map", {"T over (delta_k, delta_p) at fixed delta_e", cmd_two_photon_map}},
        {"crit", {"transparency roots and residuals", [](const RunConfig& c, unsigned) { return cmd_crit(c); }}},
        {"crit-map", {"T with k1 fixed at a transparency root", cmd_crit_map}},
        {"quench-scan", {"|T|^2 at the transparency point versus gamma1",
                         [](const RunConfig& c, unsigned) { return cmd_quench_scan(c); }}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    std::uint64_t seed = SelftestOptions{}.seed;
    double perturbation = 0;
    selftest->add_option("--seed", seed, "random seed");
    selftest->add_option("--inject-perturbation", perturbation, "testing hook: offset one path by this amount")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : ConfigFailure;
    }

    try {
        if (selftest->parsed()) {
            const auto report = run_selftest({seed, perturbation});
            report.print(out);
            return report.passed() ? Ok : SelftestFailure;
        }

        const unsigned threads = threads_flag ? *threads_flag : default_threads();
        if (config_path.empty()) throw ConfigError("--config is required");
        const RunConfig cfg = load_config(config_path);
        const std::string name = app.get_subcommands().front()->get_name();
        const CommandOutput result = commands.at(name).second(cfg, threads);

        const bool has_document = !result.document.is_null();
        if (format.empty()) format = has_document ? "json" : "csv";
        std::string text;
        if (format == "csv") {
            text = format_csv(result.table);
        } else {
            text = (has_document ? result.document : table_json(result)).dump(2) + '\n';
        }

        const std::string target = !out_path.empty() ? out_path : cfg.output.value_or("");
        if (target.empty()) {
            out << text;
        } else {
            write_file(target, text);
            write_file(target + ".meta.json", result.metadata.dump(2) + '\n');
        }
        return Ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return is_input_error(e.code()) ? ConfigFailure : NumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return NumericalFailure;
    }
}

}  // namespace psm::app
