// fracops: runs the verification experiments from config files.
//
//   fracops run <config> [--output-root DIR]
//   fracops run-all <dir> [--output-root DIR] [--jobs N]
//   fracops list-experiments
//   fracops version
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fracops/errors.hpp"
#include "fracops/experiments/experiments.hpp"

namespace fx = fracops::experiments;

namespace {

int print_report(const fx::ExperimentReport& rep) {
    for (const auto& a : rep.assertions) {
        std::printf("  [%s] %s  value=%s threshold=%s%s%s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(),
                    fx::format_double(a.value).c_str(), fx::format_double(a.threshold).c_str(),
                    a.detail.empty() ? "" : "  ", a.detail.c_str());
    }
    std::printf("%s %s -> %s (%.2f s)\n", rep.passed() ? "PASS" : "FAIL", rep.experiment.c_str(),
                rep.output_dir.string().c_str(), rep.wall_clock_seconds);
    return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional operator verification experiments"};
    app.require_subcommand(1);

    std::string config_path, suite_dir, output_root;
    unsigned jobs = 1;

    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--output-root", output_root, "Output root (default $FRACOPS_OUTPUT_ROOT or ./results)");

    auto* run_all = app.add_subcommand("run-all", "Run every *.cfg in a directory");
    run_all->add_option("dir", suite_dir, "Suite directory")->required();
    run_all->add_option("--output-root", output_root, "Output root (default $FRACOPS_OUTPUT_ROOT or ./results)");
    run_all->add_option("--jobs", jobs, "Configs run in parallel")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-experiments", "List experiment names");
    auto* ver = app.add_subcommand("version", "Print the artifact version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    fx::RunOptions opts;
    if (!output_root.empty()) opts.output_root = output_root;

    try {
        if (*ver) {
            std::printf("fracops %s\n", fx::version().c_str());
            return 0;
        }
        if (*list) {
            for (const auto& e : fx::list_experiments()) std::printf("%-12s %s\n", e.name.c_str(), e.description.c_str());
            return 0;
        }
        if (*run) {
            return print_report(fx::run(fx::ExperimentConfig::load(config_path), opts));
        }
        if (*run_all) {
            const auto summary = fx::run_all(suite_dir, opts, jobs);
            for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            for (const auto& e : summary.entries) {
                const char* tag = e.status == fx::RunStatus::Passed ? "PASS" : e.status == fx::RunStatus::Failed ? "FAIL" : "ERROR";
                std::printf("%-5s %-40s %-12s %7.2f s%s%s\n", tag, e.config.filename().string().c_str(),
                            e.experiment.c_str(), e.seconds, e.message.empty() ? "" : "  ", e.message.c_str());
            }
            std::size_t failed = 0;
            for (const auto& e : summary.entries) failed += e.status != fx::RunStatus::Passed;
            std::printf("%zu/%zu configs passed\n", summary.entries.size() - failed, summary.entries.size());
            std::error_code ec;
            std::filesystem::create_directories(opts.output_root, ec);
            if (std::ofstream out(opts.output_root / "run_all_summary.json"); out) out << summary.to_json().dump(2) << '\n';
            return summary.exit_code();
        }
    } catch (const fracops::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
