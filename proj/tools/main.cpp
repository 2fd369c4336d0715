#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gnls/drivers.hpp"
#include "gnls/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"periodic orbits, their Floquet data and bifurcations for the fourth-order GNLS travelling-wave ODE"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<int> k_max;
    std::optional<double> beta2;
    bool quiet = false;
    app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides run.output_dir)");
    app.add_option("--k-max", k_max, "largest resonance order")->check(CLI::PositiveNumber);
    app.add_option("--beta2", beta2, "parameter beta2 (overrides params.beta2)");
    app.add_flag("--quiet", quiet, "no progress output");
    app.fallthrough();

    const std::vector<std::pair<const char*, const char*>> subs = {
        {"equilibria", "equilibria and the spectrum of the origin"},
        {"find-orbit", "correct the configured seed orbit"},
        {"continue", "continue the seed orbit in energy or beta2"},
        {"floquet", "monodromy and multipliers of the seed orbit"},
        {"surface", "energy family with its section intersection chains"},
        {"bif-curve", "curve of a codimension-one bifurcation in (beta2, H)"},
        {"table1", "resonances of the zero-energy family and their bifurcation type"},
    };
    for (const auto& [name, help] : subs) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    gnls::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = gnls::parse_config(config_path);
        cfg.experiment = gnls::experiment_from_string(app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (k_max) cfg.k_max = *k_max;
        if (beta2) {
            cfg.params.beta2 = *beta2;
            cfg.params.validate();
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        std::filesystem::create_directories(cfg.output_dir);
        gnls::EventLog log((std::filesystem::path(cfg.output_dir) / "events.jsonl").string(), !quiet);
        log.emit("start", {{"experiment", std::string(gnls::to_string(cfg.experiment))},
                           {"git_describe", std::string(gnls::build_git_describe())}});
        gnls::ResultRecord rec;
        try {
            rec = gnls::run_experiment(cfg, log);
        } catch (const std::exception& e) {
            rec.config = cfg;
            rec.git_describe = gnls::build_git_describe();
            rec.started = rec.finished = gnls::utc_now();
            rec.rows_total = rec.rows_failed = 1;
            rec.warnings.push_back(e.what());
            log.emit("error", {{"what", std::string(e.what())}});
        }
        gnls::write_results(rec, cfg.output_dir);
        const int rc = gnls::exit_code(rec);
        log.emit("finish", {{"exit_code", (long long)rc}, {"warnings", (long long)rec.warnings.size()}});
        if (!quiet)
            for (const std::string& w : rec.warnings) std::cerr << "warning: " << w << "\n";
        return rc;
    } catch (const gnls::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    }
}
