// Batch driver: scenario runs, the inequality verification suite, the
// epsilon-continuation study, and report reading. Exit code 0 means every
// assertion in the requested job passed.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ins/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ins::Error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inhomogeneous incompressible Navier-Stokes on the torus"};
    app.require_subcommand(1);

    std::string config_path, out_override, report_path;

    CLI::App* run = app.add_subcommand("run", "run a scenario and emit diagnostics");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_override, "override output directory");

    CLI::App* ineq = app.add_subcommand("ineq", "run the inequality verification suite");
    ineq->add_option("config", config_path, "config file")->required();
    ineq->add_option("--out", out_override, "override output directory");

    CLI::App* eps = app.add_subcommand("epsilon", "run the eps-floor continuation study");
    eps->add_option("config", config_path, "config file")->required();
    eps->add_option("--out", out_override, "override output directory");

    CLI::App* rep = app.add_subcommand("report", "summarize a run directory");
    rep->add_option("dir", report_path, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ins::cli::ScenarioConfig cfg = ins::cli::parse_config(read_file(config_path));
            if (!out_override.empty()) cfg.output.dir = out_override;
            ins::cli::RunResult res = ins::cli::run_scenario(cfg);
            std::cout << (res.ok ? "run ok" : "run FAILED") << ": steps=" << res.steps
                      << " t=" << res.final_time
                      << " energy_residual=" << res.max_energy_residual
                      << " mass_drift=" << res.max_mass_drift << "\n";
            for (const auto& w : res.warnings) std::cout << "  warning: " << w << "\n";
            if (!res.ok) std::cout << "  error: " << res.error << "\n";
            return res.ok ? 0 : 1;
        }
        if (ineq->parsed()) {
            ins::cli::IneqSuiteConfig cfg = ins::cli::parse_ineq_config(read_file(config_path));
            if (!out_override.empty()) cfg.dir = out_override;
            ins::cli::SuiteOutcome out = ins::cli::inequality_suite(cfg);
            std::cout << out.summary;
            std::cout << "samples=" << out.samples_run << " violations=" << out.violations
                      << " fitted_stable=" << (out.fitted_stable ? "yes" : "no") << "\n";
            return (out.violations == 0 && out.fitted_stable) ? 0 : 1;
        }
        if (eps->parsed()) {
            ins::cli::ScenarioConfig cfg = ins::cli::parse_config(read_file(config_path));
            if (!out_override.empty()) cfg.output.dir = out_override;
            ins::solver::ConvergenceReport repda = ins::cli::epsilon_run(cfg);
            bool monotone = true;
            for (std::size_t i = 0; i + 1 < repda.diff_l2h1.size(); ++i)
                monotone = monotone && repda.diff_l2h1[i] > repda.diff_l2h1[i + 1];
            std::cout << "epsilon continuation:";
            for (double d : repda.diff_l2h1) std::cout << " " << d;
            std::cout << "\n  complete=" << (repda.complete ? "yes" : "no")
                      << " monotone=" << (monotone ? "yes" : "no") << "\n";
            for (std::size_t i = 0; i < repda.run_ok.size(); ++i)
                if (!repda.run_ok[i])
                    std::cout << "  eps=" << repda.eps[i] << " failed: " << repda.run_errors[i]
                              << "\n";
            return (repda.complete && monotone) ? 0 : 1;
        }
        if (rep->parsed()) return ins::cli::report_dir(report_path, std::cout);
    } catch (const ins::ConfigError& e) {
        std::cerr << "config error (line " << e.line << "): " << e.what() << "\n";
        return 2;
    } catch (const ins::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
