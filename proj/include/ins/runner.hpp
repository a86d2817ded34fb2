#pragma once

// Run orchestration: scenario runs with diagnostics/patch-tracking artifact
// emission, the epsilon-continuation driver, the inequality verification
// suite, and the report reader. All artifacts are deterministic for a fixed
// config and seed (the manifest's timing field is the one exception).

#include <ostream>
#include <string>
#include <vector>

#include "ins/config.hpp"
#include "ins/diagnostics.hpp"
#include "ins/lagrangian.hpp"
#include "ins/scenario.hpp"

namespace ins::cli {

struct RunResult {
    bool ok = true;
    std::string error;
    int steps = 0;
    double final_time = 0.0;
    double max_mass_drift = 0.0;      // relative
    double max_momentum_drift = 0.0;  // relative to |int rho0 v0| (or absolute if ~0)
    double max_energy_residual = 0.0;
    bool rho_minmax_exact = true;     // min/max of rho bit-equal to initial at every step
    double max_div_v = 0.0;
    std::vector<double> holder_seminorms;
    std::vector<double> holder_seminorms_oracle;
    double max_det_deviation = 0.0;   // |det gradX - 1| on labels, when tracked
    std::vector<std::string> warnings;
    std::vector<diag::DiagnosticsRecord> records;
    // stored states at the slice cadence (slice_every > 0)
    std::vector<solver::FluidState> slices;
    std::vector<double> slice_times;
};

solver::ScenarioFields build_scenario(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg, bool write_outputs = true);

// epsilon-continuation driver; writes epsilon.json under output.dir
solver::ConvergenceReport epsilon_run(const ScenarioConfig& cfg, bool write_outputs = true);

struct SuiteOutcome {
    int violations = 0;       // assertable-lemma failures
    int samples_run = 0;
    bool fitted_stable = true;
    std::string summary;      // one-page text table
};

SuiteOutcome inequality_suite(const IneqSuiteConfig& cfg, bool write_outputs = true);

// read a run directory (manifest + diagnostics.csv) and print a summary;
// returns 0 when the artifacts parse and are self-consistent
int report_dir(const std::string& dir, std::ostream& os);

}  // namespace ins::cli
