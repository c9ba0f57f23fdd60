#include "itolp/config.hpp"
#include "itolp/driver_catalog.hpp"
#include "itolp/experiment.hpp"
#include "itolp/format.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>

namespace {

void print_catalog()
{
    for (const auto& e : itolp::driver_catalog()) {
        std::cout << e.id << "\n    " << e.description << '\n';
        for (const auto& p : e.params) {
            std::cout << "    " << p.name << " (default " << itolp::format_double(p.default_value) << ")  "
                      << p.description << '\n';
        }
        std::cout << "    mark=one|identity\n";
    }
}

int run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> paths,
        const std::string& out_dir, bool enforce)
{
    auto cfg = itolp::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (paths) cfg.paths = *paths;
    const auto report = itolp::run_experiment(cfg);
    itolp::write_report(report, out_dir);

    for (const auto& s : report.term_stats()) {
        std::cout << s.term << ": mean " << itolp::format_double(s.mean) << " std_err "
                  << itolp::format_double(s.std_err) << '\n';
    }
    int status = 0;
    for (const auto& a : report.assertions()) {
        std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
        if (!a.passed) {
            std::cerr << "assertion failed: " << a.name << " (" << a.detail << ")\n";
            if (enforce) status = 1;
        }
    }
    std::cout << "wrote " << out_dir << '/' << report.experiment() << ".{csv,json}\n";
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"itolp: Ito formula verification experiments"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::string out_dir = ".";
    bool enforce = true;
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("--seed", seed, "master seed (overrides the config)");
    run_cmd->add_option("--paths", paths, "number of paths (overrides the config)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out-dir", out_dir, "directory for the CSV and JSON reports");
    run_cmd->add_flag("--assert,!--no-assert", enforce, "exit nonzero when an assertion fails (default on)");

    app.add_subcommand("list-drivers", "print the driver catalog");

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("list-drivers")) {
            print_catalog();
            return 0;
        }
        return run(config_path, seed, paths, out_dir, enforce);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
