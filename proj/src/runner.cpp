#include "ins/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ins/inequalities.hpp"
#include "ins/norms.hpp"
#include "ins/snapshot.hpp"

namespace ins::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    os << text;
}

json bound_series_json(const std::vector<double>& t, const std::vector<double>& v) {
    json j;
    j["times"] = t;
    j["values"] = v;
    return j;
}

}  // namespace

solver::ScenarioFields build_scenario(const ScenarioConfig& cfg) {
    Grid g{cfg.n, 2};
    const Vec2 c{cfg.disk_cx, cfg.disk_cy};
    if (cfg.scenario == "taylor_green") return solver::make_taylor_green(g, cfg.v0_amplitude);
    if (cfg.scenario == "drop") return solver::make_drop(g, c, cfg.disk_radius, cfg.v0_amplitude);
    if (cfg.scenario == "bubble")
        return solver::make_bubble(g, c, cfg.disk_radius, cfg.v0_amplitude);
    if (cfg.scenario == "two_phase")
        return solver::make_two_phase(g, cfg.eta1, cfg.eta2, c, cfg.disk_radius,
                                      cfg.v0_amplitude);
    if (cfg.scenario == "random")
        return solver::make_random(g, cfg.seed, cfg.solver.rho_star, cfg.v0_amplitude);
    throw ConfigError("unknown scenario '" + cfg.scenario + "'", 0);
}

RunResult run_scenario(const ScenarioConfig& cfg, bool write_outputs) {
    cfg.validate();
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult res;

    const fs::path dir(cfg.output.dir);
    if (write_outputs) {
        fs::create_directories(dir);
        if (cfg.output.snapshot_every > 0) fs::create_directories(dir / "snapshots");
    }

    solver::ScenarioFields sf = build_scenario(cfg);
    solver::FluidState state = solver::initial_state(sf.rho0, sf.v0);
    const double rho_min0 = min_value(state.rho);
    const double rho_max0 = max_value(state.rho);

    const int nsteps = static_cast<int>(std::llround(cfg.solver.T_end / cfg.solver.dt));
    res.records.reserve(nsteps + 1);
    res.records.push_back(diag::conserved_report(state, cfg.diagnostics.p_list));

    // streaming patch tracking
    lagr::FlowIntegrator::Options fopt;
    fopt.track_labels = cfg.lagrangian.track_labels;
    if (fopt.track_labels) fopt.label_grid = Grid{cfg.lagrangian.label_grid, 2};
    lagr::FlowIntegrator flow(fopt);
    int main_markers = -1, oracle_markers = -1;
    std::vector<double> holder_times;
    lagr::BoundaryCurve curve0;
    if (cfg.lagrangian.track_patch) {
        curve0 = lagr::BoundaryCurve::circle({cfg.disk_cx, cfg.disk_cy}, cfg.disk_radius,
                                             cfg.lagrangian.markers);
        main_markers = flow.add_markers(curve0.points);
        res.holder_seminorms.push_back(curve0.c1alpha_seminorm(cfg.lagrangian.alpha));
        holder_times.push_back(0.0);
        if (cfg.lagrangian.oracle_markers > 0) {
            lagr::BoundaryCurve oc = lagr::BoundaryCurve::circle(
                {cfg.disk_cx, cfg.disk_cy}, cfg.disk_radius, cfg.lagrangian.oracle_markers);
            oracle_markers = flow.add_markers(oc.points);
            res.holder_seminorms_oracle.push_back(oc.c1alpha_seminorm(cfg.lagrangian.alpha));
        }
    }

    std::vector<solver::FluidState>& slices = res.slices;
    std::vector<double>& slice_times = res.slice_times;
    if (cfg.output.slice_every > 0) {
        slices.push_back(state);
        slice_times.push_back(0.0);
    }

    std::ofstream boundary_csv;
    if (write_outputs && cfg.lagrangian.track_patch) {
        boundary_csv.open(dir / "boundary.csv");
        boundary_csv << "t,marker,x,y\n";
        for (std::size_t m = 0; m < curve0.points.size(); ++m)
            boundary_csv << "0," << m << ',' << num17(curve0.points[m].x) << ','
                         << num17(curve0.points[m].y) << "\n";
    }

    auto snapshot_state = [&](int k) {
        char name[64];
        std::snprintf(name, sizeof name, "state_%06d", k);
        const fs::path base = dir / "snapshots";
        write_snapshot((base / (std::string(name) + "_rho.bin")).string(), state.rho, "rho",
                       state.t);
        write_snapshot((base / (std::string(name) + "_v.bin")).string(), state.v, "v", state.t);
        write_snapshot((base / (std::string(name) + "_P.bin")).string(), state.P, "P", state.t);
    };
    if (write_outputs && cfg.output.snapshot_every > 0) snapshot_state(0);

    int step_done = 0;
    try {
        for (int k = 1; k <= nsteps; ++k) {
            const VectorField v_prev = state.v;
            solver::StepStats stats;
            state = solver::step(state, cfg.solver, &stats, &res.warnings);
            step_done = k;

            // discrete inf/sup identity, exact by the clipped transport
            if (min_value(state.rho) != rho_min0 || max_value(state.rho) != rho_max0)
                res.rho_minmax_exact = false;

            res.records.push_back(diag::conserved_report(state, cfg.diagnostics.p_list));
            res.max_div_v = std::max(res.max_div_v, res.records.back().div_v_l2);

            if (cfg.lagrangian.track_patch || fopt.track_labels) {
                flow.advance(v_prev, state.v, state.t - cfg.solver.dt, cfg.solver.dt,
                             &res.warnings);
            }
            const bool record_row = (k % std::max(cfg.output.record_every, 1) == 0) || k == nsteps;
            if (cfg.lagrangian.track_patch && record_row) {
                lagr::BoundaryCurve cur;
                cur.points = flow.markers(main_markers);
                if (cur.spacing_ratio() > 20.0)
                    throw ReseedRequired("patch markers need reseeding at t = " +
                                         std::to_string(state.t));
                res.holder_seminorms.push_back(cur.c1alpha_seminorm(cfg.lagrangian.alpha));
                holder_times.push_back(state.t);
                if (write_outputs && boundary_csv.is_open())
                    for (std::size_t m = 0; m < cur.points.size(); ++m)
                        boundary_csv << num17(state.t) << ',' << m << ','
                                     << num17(cur.points[m].x) << ',' << num17(cur.points[m].y)
                                     << "\n";
                if (oracle_markers >= 0 && (k == nsteps || k % (10 * cfg.output.record_every) == 0)) {
                    lagr::BoundaryCurve oc;
                    oc.points = flow.markers(oracle_markers);
                    res.holder_seminorms_oracle.push_back(
                        oc.c1alpha_seminorm(cfg.lagrangian.alpha));
                }
            }
            if (cfg.output.slice_every > 0 && (k % cfg.output.slice_every == 0 || k == nsteps)) {
                slices.push_back(state);
                slice_times.push_back(state.t);
            }
            if (write_outputs && cfg.output.snapshot_every > 0 &&
                (k % cfg.output.snapshot_every == 0 || k == nsteps))
                snapshot_state(k);
        }
    } catch (const Error& e) {
        res.ok = false;
        res.error = e.what();
    }

    diag::accumulate(res.records, cfg.solver.mu);
    res.steps = step_done;
    res.final_time = state.t;
    if (fopt.track_labels) {
        ScalarField det = flow.gradX().det();
        for (std::size_t i = 0; i < det.size(); ++i)
            res.max_det_deviation = std::max(res.max_det_deviation, std::abs(det[i] - 1.0));
    }

    // drifts and discrete energy balance across the whole run
    const auto& r0 = res.records.front();
    std::vector<double> energy_res(res.records.size(), 0.0);
    const double mom0 = std::hypot(r0.total_momentum[0], r0.total_momentum[1]);
    // when the initial momentum is (near) zero, measure the drift against a
    // small fraction of the natural momentum scale M * |v|_inf instead
    const double vmax0 = lp_norm(sf.v0, kInfinity);
    const double mom_scale = std::max(mom0, 0.01 * r0.total_mass * vmax0 + 1e-300);
    for (std::size_t i = 1; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        res.max_mass_drift = std::max(
            res.max_mass_drift, std::abs(r.total_mass - r0.total_mass) / std::abs(r0.total_mass));
        const double dm = std::hypot(r.total_momentum[0] - r0.total_momentum[0],
                                     r.total_momentum[1] - r0.total_momentum[1]);
        res.max_momentum_drift = std::max(res.max_momentum_drift, dm / mom_scale);
        energy_res[i] = std::abs(r.kinetic_energy + r.cumulative_dissipation -
                                 r0.kinetic_energy) /
                        std::max(r0.kinetic_energy, 1e-30);
        res.max_energy_residual = std::max(res.max_energy_residual, energy_res[i]);
    }

    if (write_outputs) {
        // diagnostics CSV
        std::ostringstream csv;
        csv << "t,kinetic_energy,cumulative_dissipation,total_mass,momentum_x,momentum_y,"
               "rho_min,rho_max";
        for (double p : cfg.diagnostics.p_list) csv << ",rho_l" << p;
        csv << ",grad_v_l2,sqrho_vt_l2,hess_v_l2,grad_P_l2,weighted_vt,weighted_grad_vt_cum,"
               "div_v_l2,energy_residual,holder_c1alpha\n";
        std::size_t hrow = 0;
        for (std::size_t i = 0; i < res.records.size(); ++i) {
            const bool row_due = (i % std::max(cfg.output.record_every, 1) == 0) ||
                                 i + 1 == res.records.size();
            if (!row_due) continue;
            const auto& r = res.records[i];
            csv << num17(r.t) << ',' << num17(r.kinetic_energy) << ','
                << num17(r.cumulative_dissipation) << ',' << num17(r.total_mass) << ','
                << num17(r.total_momentum[0]) << ',' << num17(r.total_momentum[1]) << ','
                << num17(r.rho_min) << ',' << num17(r.rho_max);
            for (double p : cfg.diagnostics.p_list) csv << ',' << num17(r.rho_lp.at(p));
            csv << ',' << num17(r.grad_v_l2) << ',' << num17(r.sqrho_vt_l2) << ','
                << num17(r.hess_v_l2) << ',' << num17(r.grad_P_l2) << ',' << num17(r.weighted_vt)
                << ',' << num17(r.weighted_grad_vt_cum) << ',' << num17(r.div_v_l2) << ','
                << num17(energy_res[i]);
            if (cfg.lagrangian.track_patch && hrow < res.holder_seminorms.size()) {
                csv << ',' << num17(res.holder_seminorms[hrow]);
                ++hrow;
            } else {
                csv << ',';
            }
            csv << "\n";
        }
        write_text(dir / "diagnostics.csv", csv.str());
        write_text(dir / "config.toml", emit_config(cfg));

        // trajectory functionals on the stored slices
        if (slices.size() >= 3 && res.ok) {
            std::vector<std::pair<double, double>> table;
            for (const auto& row : cfg.diagnostics.shift_table)
                if (row.size() == 2) table.push_back({row[0], row[1]});
            diag::AprioriReport ap = diag::apriori_functionals(
                slices, cfg.solver.rho_star, table, cfg.diagnostics.s_list);
            json aj;
            aj["times"] = ap.times;
            aj["h1_lhs"] = ap.h1_lhs;
            aj["gronwall_rhs"] = ap.gronwall_rhs;
            aj["fitted_C0"] = ap.fitted_C0;
            aj["sup_weighted_vt"] = ap.sup_weighted_vt;
            aj["int_weighted_grad_vt"] = ap.int_weighted_grad_vt;
            for (const auto& e : ap.shift_norms)
                aj["shift_norms"].push_back({{"p", e.p},
                                             {"r", e.r},
                                             {"sqrt_t_hess_v", e.sqrt_t_hess_v},
                                             {"sqrt_t_grad_P", e.sqrt_t_grad_P},
                                             {"in_lemma_range", e.in_lemma_range}});
            for (const auto& e : ap.grad_inf)
                aj["grad_inf"].push_back(
                    {{"s", e.s}, {"integral", e.integral}, {"beta", e.beta}});
            aj["warnings"] = ap.warnings;
            write_text(dir / "apriori.json", aj.dump(2) + "\n");

            std::vector<VectorField> vslices;
            for (const auto& s : slices) vslices.push_back(s.v);
            json fj = json::array();
            for (double alpha : cfg.diagnostics.alpha_list) {
                auto fr = ineq::fractional_time_norm(slice_times, vslices, alpha,
                                                     cfg.diagnostics.fractional_p);
                fj.push_back({{"alpha", alpha},
                              {"p", cfg.diagnostics.fractional_p},
                              {"norm", fr.norm},
                              {"bound_rhs", fr.bound_rhs},
                              {"seminorm_sq", fr.seminorm_sq},
                              {"l2_sq", fr.l2_sq},
                              {"weighted_zt_sq", fr.weighted_zt_sq},
                              {"c_alpha_T", fr.c_alpha_T},
                              {"holds", fr.norm <= fr.bound_rhs}});
            }
            write_text(dir / "fractional.json", fj.dump(2) + "\n");
        }

        if (cfg.lagrangian.track_patch) {
            json hj = bound_series_json(holder_times, res.holder_seminorms);
            hj["alpha"] = cfg.lagrangian.alpha;
            hj["oracle_seminorms"] = res.holder_seminorms_oracle;
            write_text(dir / "holder.json", hj.dump(2) + "\n");
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        json mj;
        mj["magic"] = "ins-run";
        mj["version"] = kVersion;
        mj["config_hash"] = num17(static_cast<double>(fnv1a_hash(emit_config(cfg))));
        mj["scenario"] = cfg.scenario;
        mj["n"] = cfg.n;
        mj["steps_planned"] = nsteps;
        mj["steps_done"] = res.steps;
        mj["ok"] = res.ok;
        mj["error"] = res.error;
        mj["wall_seconds"] = wall;
        mj["warnings"] = res.warnings;
        mj["max_mass_drift"] = res.max_mass_drift;
        mj["max_momentum_drift"] = res.max_momentum_drift;
        mj["max_energy_residual"] = res.max_energy_residual;
        mj["rho_minmax_exact"] = res.rho_minmax_exact;
        write_text(dir / "manifest.json", mj.dump(2) + "\n");
        if (!res.ok) {
            json failure;
            failure["error"] = res.error;
            failure["steps_done"] = res.steps;
            failure["time"] = res.final_time;
            write_text(dir / "failure.json", failure.dump(2) + "\n");
        }
    }
    return res;
}

solver::ConvergenceReport epsilon_run(const ScenarioConfig& cfg, bool write_outputs) {
    cfg.validate();
    solver::ScenarioFields sf = build_scenario(cfg);
    solver::ConvergenceReport rep = solver::epsilon_continuation(
        sf.rho0, sf.v0, cfg.solver, cfg.eps_list, std::max(cfg.output.slice_every, 1));
    if (write_outputs) {
        fs::create_directories(cfg.output.dir);
        json j;
        j["eps"] = rep.eps;
        j["run_ok"] = rep.run_ok;
        j["run_errors"] = rep.run_errors;
        j["diff_l2h1"] = rep.diff_l2h1;
        j["diff_linf_l2"] = rep.diff_linf_l2;
        j["complete"] = rep.complete;
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < rep.diff_l2h1.size(); ++i)
            monotone = monotone && rep.diff_l2h1[i] > rep.diff_l2h1[i + 1];
        j["monotone_decreasing"] = monotone;
        write_text(fs::path(cfg.output.dir) / "epsilon.json", j.dump(2) + "\n");
    }
    return rep;
}

namespace {

struct LemmaStats {
    std::string name;
    int n = 0;
    int samples = 0;
    int violations = 0;
    int skipped = 0;
    double max_ratio = 0.0;   // fitted constant for fit-and-report lemmas
    std::vector<double> ratios;
};

json lemma_json(const LemmaStats& s) {
    json j;
    j["name"] = s.name;
    j["n"] = s.n;
    j["samples"] = s.samples;
    j["violations"] = s.violations;
    j["skipped"] = s.skipped;
    j["max_ratio"] = s.max_ratio;
    j["ratios"] = s.ratios;
    return j;
}

}  // namespace

SuiteOutcome inequality_suite(const IneqSuiteConfig& cfg, bool write_outputs) {
    SuiteOutcome out;
    const fs::path dir(cfg.dir);
    if (write_outputs) fs::create_directories(dir);

    std::vector<LemmaStats> all;
    json violations_json = json::array();

    auto run_ensemble = [&](int n, int count, std::uint64_t seed_shift) {
        std::vector<LemmaStats> stats(5);
        stats[0] = {"weighted_poincare", n, 0, 0, 0, 0.0, {}};
        stats[1] = {"truncation_linf", n, 0, 0, 0, 0.0, {}};
        stats[2] = {"truncation_tail", n, 0, 0, 0, 0.0, {}};
        stats[3] = {"ladyzhenskaya", n, 0, 0, 0, 0.0, {}};
        stats[4] = {"log_poincare", n, 0, 0, 0, 0.0, {}};
        LemmaStats des{"desjardins_proof_form", n, 0, 0, 0, 0.0, {}};

        const double decays[3] = {cfg.spectrum_decay.size() > 0 ? cfg.spectrum_decay[0] : 2.0,
                                  cfg.spectrum_decay.size() > 1 ? cfg.spectrum_decay[1] : 2.0,
                                  cfg.spectrum_decay.size() > 2 ? cfg.spectrum_decay[2] : 2.0};
        for (int i = 0; i < count; ++i) {
            ineq::FieldEnsemble ens;
            ens.seed = cfg.seed + seed_shift;
            ens.count = count;
            ens.n = n;
            ens.spectrum_decay = decays[i % 3];
            ens.density_model = (i % 2 == 0) ? ineq::DensityModel::patch
                                             : ineq::DensityModel::clipped_random;
            ens.rho_star = cfg.rho_star;
            ens.area_min = cfg.area_min;
            ens.area_max = cfg.area_max;
            ineq::Sample smp = ineq::sample_random_field(ens, i);

            auto wp = ineq::weighted_poincare_check(smp.a, smp.z);
            stats[0].samples++;
            stats[0].ratios.push_back(wp.lhs / wp.rhs);
            stats[0].max_ratio = std::max(stats[0].max_ratio, wp.lhs / wp.rhs);
            if (wp.lhs > wp.rhs * cfg.rhs_scale) {
                stats[0].violations++;
                if (write_outputs && stats[0].violations <= 3) {
                    const std::string base = "violation_poincare_n" + std::to_string(n) + "_s" +
                                             std::to_string(i);
                    write_snapshot((dir / (base + "_a.bin")).string(), smp.a, "a", 0.0);
                    write_snapshot((dir / (base + "_z.bin")).string(), smp.z, "z", 0.0);
                    violations_json.push_back({{"lemma", "weighted_poincare"},
                                               {"n", n},
                                               {"sample", i},
                                               {"lhs", wp.lhs},
                                               {"rhs", wp.rhs}});
                }
            }

            auto tb = ineq::truncation_bounds(smp.z, cfg.truncation_cut);
            stats[1].samples++;
            if (tb.sqrtlog_bound > 0) {
                const double r = tb.linf_low / tb.sqrtlog_bound;
                stats[1].ratios.push_back(r);
                stats[1].max_ratio = std::max(stats[1].max_ratio, r);
                if (tb.linf_low > tb.sqrtlog_bound * cfg.rhs_scale) stats[1].violations++;
            }
            stats[2].samples++;
            if (tb.tail_bound > 0) {
                const double r = tb.tail_hhalf / tb.tail_bound;
                stats[2].ratios.push_back(r);
                stats[2].max_ratio = std::max(stats[2].max_ratio, r);
                if (tb.tail_hhalf > tb.tail_bound * cfg.rhs_scale) stats[2].violations++;
            }

            stats[3].samples++;
            const double lr = ineq::ladyzhenskaya_ratio(smp.z);
            stats[3].ratios.push_back(lr);
            stats[3].max_ratio = std::max(stats[3].max_ratio, lr);

            auto lp = ineq::log_poincare_check(smp.a, smp.z);
            stats[4].samples++;
            if (lp.skipped) {
                stats[4].skipped++;
            } else {
                stats[4].ratios.push_back(lp.ratio);
                stats[4].max_ratio = std::max(stats[4].max_ratio, lp.ratio);
            }

            des.samples++;
            try {
                auto dj = ineq::desjardins_check(smp.a, smp.z, cfg.rho_star);
                des.ratios.push_back(dj.ratio_proof_form);
                des.max_ratio = std::max(des.max_ratio, dj.ratio_proof_form);
            } catch (const VacuumSupport&) {
                des.skipped++;
            } catch (const DegenerateWeight&) {
                des.skipped++;
            }
        }
        stats.push_back(des);
        return stats;
    };

    std::vector<std::vector<LemmaStats>> per_n;
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = static_cast<int>(cfg.n_list[ni]);
        per_n.push_back(run_ensemble(n, cfg.count, 0));
        out.samples_run += cfg.count;
    }

    // refinement stability of fitted constants: same seeds at n and 2n
    struct Stability {
        std::string name;
        double c1 = 0.0, c2 = 0.0;
        bool stable = true;
    };
    std::vector<Stability> stab;
    if (!cfg.n_list.empty() && cfg.refine_count > 0) {
        const int nbase = static_cast<int>(cfg.n_list.front());
        auto s1 = run_ensemble(nbase, cfg.refine_count, 1000);
        auto s2 = run_ensemble(2 * nbase, cfg.refine_count, 1000);
        for (std::size_t k = 0; k < s1.size(); ++k) {
            if (s1[k].name == "weighted_poincare" || s1[k].name.rfind("truncation", 0) == 0)
                continue;  // assertable, not fitted
            Stability st;
            st.name = s1[k].name;
            st.c1 = s1[k].max_ratio;
            st.c2 = s2[k].max_ratio;
            st.stable = st.c1 > 0 && std::abs(st.c2 / st.c1 - 1.0) <= 0.5;
            out.fitted_stable = out.fitted_stable && st.stable;
            stab.push_back(st);
        }
    }

    // the literal headline-form counterexample: constant z, constant rho
    bool counterexample_reproduced = false;
    {
        Grid g{static_cast<int>(cfg.n_list.empty() ? 64 : cfg.n_list.front()), 2};
        ScalarField rho(g, 1.0);
        ScalarField z(g, 1.0);
        auto dj = ineq::desjardins_check(rho, z, cfg.rho_star);
        counterexample_reproduced = dj.counterexample_headline;
    }

    for (auto& sv : per_n)
        for (auto& s : sv) {
            out.violations += s.violations;
            all.push_back(s);
        }

    std::ostringstream table;
    table << "lemma,n,samples,skipped,violations,max_ratio_or_fitted_C\n";
    for (const auto& s : all)
        table << s.name << ',' << s.n << ',' << s.samples << ',' << s.skipped << ','
              << s.violations << ',' << num17(s.max_ratio) << "\n";
    for (const auto& st : stab)
        table << st.name << "_refinement,," << ",," << (st.stable ? "stable" : "UNSTABLE") << ','
              << num17(st.c2 / std::max(st.c1, 1e-300)) << "\n";
    table << "desjardins_headline_counterexample,,,,"
          << (counterexample_reproduced ? "reproduced" : "NOT-REPRODUCED") << ",\n";
    out.summary = table.str();

    if (write_outputs) {
        json j;
        j["version"] = kVersion;
        j["count"] = cfg.count;
        j["violations"] = out.violations;
        j["fitted_stable"] = out.fitted_stable;
        j["headline_counterexample_reproduced"] = counterexample_reproduced;
        for (const auto& s : all) j["lemmas"].push_back(lemma_json(s));
        for (const auto& st : stab)
            j["refinement"].push_back({{"name", st.name},
                                       {"fitted_coarse", st.c1},
                                       {"fitted_fine", st.c2},
                                       {"stable", st.stable}});
        j["violation_samples"] = violations_json;
        write_text(dir / "inequalities.json", j.dump(2) + "\n");
        write_text(dir / "summary.csv", out.summary);
    }
    return out;
}

int report_dir(const std::string& dirstr, std::ostream& os) {
    const fs::path dir(dirstr);
    const fs::path manifest = dir / "manifest.json";
    if (!fs::exists(manifest)) {
        os << "report: no manifest.json under " << dirstr << "\n";
        return 1;
    }
    std::ifstream mf(manifest);
    json mj = json::parse(mf, nullptr, false);
    if (mj.is_discarded() || mj.value("magic", "") != std::string("ins-run")) {
        os << "report: malformed manifest\n";
        return 1;
    }
    os << "run " << mj.value("scenario", "?") << " n=" << mj.value("n", 0)
       << " steps=" << mj.value("steps_done", 0) << "/" << mj.value("steps_planned", 0)
       << (mj.value("ok", false) ? " [ok]" : " [FAILED]") << "\n";
    if (!mj.value("ok", false)) os << "  error: " << mj.value("error", "") << "\n";
    os << "  max mass drift:      " << mj.value("max_mass_drift", 0.0) << "\n";
    os << "  max momentum drift:  " << mj.value("max_momentum_drift", 0.0) << "\n";
    os << "  max energy residual: " << mj.value("max_energy_residual", 0.0) << "\n";
    os << "  rho min/max exact:   " << (mj.value("rho_minmax_exact", false) ? "yes" : "no")
       << "\n";

    const fs::path csvp = dir / "diagnostics.csv";
    if (fs::exists(csvp)) {
        std::ifstream is(csvp);
        std::string line;
        int rows = -1;
        std::string last;
        while (std::getline(is, line))
            if (!line.empty()) {
                ++rows;
                last = line;
            }
        os << "  diagnostics rows:    " << rows << "\n";
        if (rows < 1) {
            os << "report: empty diagnostics.csv\n";
            return 1;
        }
    } else {
        os << "report: missing diagnostics.csv\n";
        return 1;
    }
    for (const char* extra : {"apriori.json", "fractional.json", "holder.json", "epsilon.json"}) {
        if (fs::exists(dir / extra)) os << "  artifact:            " << extra << "\n";
    }
    return mj.value("ok", false) ? 0 : 2;
}

}  // namespace ins::cli
