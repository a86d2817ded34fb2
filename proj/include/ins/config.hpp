#pragma once

// Flat sectioned key-value configs (TOML subset: sections, numbers, strings,
// booleans, numeric arrays, arrays of numeric arrays, # comments). Parsing
// reports precise line numbers; emit/parse round-trips exactly.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ins/solver.hpp"

namespace ins::cli {

struct DiagnosticsOptions {
    std::vector<double> p_list = {1.0, 2.0, 4.0};
    std::vector<std::vector<double>> shift_table = {{4.0, 3.0}, {8.0, 3.0}};
    std::vector<double> s_list = {1.0};
    std::vector<double> alpha_list = {0.1, 0.25, 0.4};
    double fractional_p = 4.0;
};

struct LagrangianOptions {
    bool track_patch = false;
    int markers = 256;
    int oracle_markers = 0;  // 0 = disabled
    double alpha = 0.5;
    bool track_labels = false;
    int label_grid = 64;
};

struct OutputOptions {
    std::string dir = "out";
    int snapshot_every = 0;  // 0 = no snapshots
    int record_every = 1;    // CSV row cadence
    int slice_every = 10;    // in-memory slice cadence for trajectory functionals, 0 = off
};

struct ScenarioConfig {
    std::string scenario = "taylor_green";  // drop | bubble | two_phase | random
    int n = 128;
    double eta1 = 1.0, eta2 = 0.0;
    double disk_cx = 0.5, disk_cy = 0.25, disk_radius = 0.25;
    double v0_amplitude = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> eps_list = {1e-2, 1e-3, 1e-4};  // used by the epsilon verb

    solver::SolverConfig solver;
    DiagnosticsOptions diagnostics;
    LagrangianOptions lagrangian;
    OutputOptions output;

    void validate() const;
};

struct IneqSuiteConfig {
    std::uint64_t seed = 1;
    int count = 1000;
    std::vector<double> n_list = {64.0, 128.0};
    std::vector<double> spectrum_decay = {1.5, 2.0, 3.0};
    double rho_star = 1.0;
    double area_min = 0.05, area_max = 0.5;
    int truncation_cut = 8;
    int refine_count = 200;  // ensemble size for the refinement stability check
    double rhs_scale = 1.0;  // fault injection for harness tests; keep at 1
    std::string dir = "out_ineq";
};

ScenarioConfig parse_config(const std::string& text);
std::string emit_config(const ScenarioConfig& cfg);

IneqSuiteConfig parse_ineq_config(const std::string& text);
std::string emit_ineq_config(const IneqSuiteConfig& cfg);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace ins::cli
