#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bubble/commands.hpp"
#include "bubble/config.hpp"
#include "bubble/errors.hpp"
#include "bubble/report.hpp"

using namespace bubble;

int main(int argc, char** argv) {
    CLI::App app{"bubble-lab: bubbling solutions of the prescribed-curvature problem on the disc"};
    std::string sub, config_path, out;
    std::optional<int> jobs;
    app.add_option("subcommand", sub, "subcommand to run")->required()->check(CLI::IsMember(subcommands()));
    app.add_option("--config", config_path, "TOML experiment file")->required();
    app.add_option("--out", out, "output directory (default: run.out_dir)");
    app.add_option("--jobs", jobs, "worker threads (overrides BUBBLE_LAB_JOBS and run.jobs)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    ExperimentConfig c;
    int n_jobs = 1;
    try {
        c = load_config(config_path);
        n_jobs = resolve_jobs(jobs, c);
    } catch (const std::exception& e) {
        RunReport r;
        r.subcommand = sub;
        r.error = error_record(e);
        r.exit_code = 1;
        std::cerr << "bubble-lab: " << e.what() << "\n";
        try {
            write_report(r, out.empty() ? c.out_dir : out);
        } catch (const std::exception& w) {
            std::cerr << "bubble-lab: " << w.what() << "\n";
        }
        return 1;
    }
    try {
        const int rc = run_and_write(sub, c, n_jobs, out.empty() ? c.out_dir : out);
        if (rc != 0) std::cerr << "bubble-lab: " << sub << " finished with exit code " << rc << "\n";
        return rc;
    } catch (const Error& e) {
        std::cerr << "bubble-lab: " << e.what() << "\n";
        return exit_code(e.kind());
    }
}
