#pragma once

#include <string>
#include <vector>

#include "bubble/config.hpp"
#include "bubble/report.hpp"

namespace bubble {

const std::vector<std::string>& subcommands();

// Library errors propagate; failed checks are recorded in the report (exit_code 3).
RunReport run_verify_bubble(const ExperimentConfig& c, int jobs);
RunReport run_verify_appendix(const ExperimentConfig& c, int jobs);
RunReport run_ansatz_residual(const ExperimentConfig& c, int jobs);
RunReport run_solve(const ExperimentConfig& c, int jobs);
RunReport run_scan_xi(const ExperimentConfig& c, int jobs);
RunReport run_energy_study(const ExperimentConfig& c, int jobs);

// Runs one subcommand and writes its report; never throws for library errors.
// "all" runs every other subcommand in order and writes all.json.
int run_and_write(const std::string& name, const ExperimentConfig& c, int jobs, const std::string& out_dir);

// Error record for the JSON report.
nlohmann::ordered_json error_record(const std::exception& e);

}  // namespace bubble
