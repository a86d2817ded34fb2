#pragma once

// Per-slice conserved quantities, trajectory functionals (energy balance,
// time-weighted estimates, shift-of-integrability norms), and the closed-form
// ODE comparison bounds used by the a-priori analysis.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ins/solver.hpp"

namespace ins::diag {

using solver::FluidState;

struct DiagnosticsRecord {
    double t = 0.0;
    double kinetic_energy = 0.0;          // (1/2) int rho |v|^2
    double cumulative_dissipation = 0.0;  // mu int_0^t ||grad v||_2^2
    double total_mass = 0.0;
    std::vector<double> total_momentum;   // int rho v
    double rho_min = 0.0, rho_max = 0.0;
    std::map<double, double> rho_lp;      // ||rho||_p for the configured p list
    double grad_v_l2 = 0.0;
    double sqrho_vt_l2 = 0.0;             // ||sqrt(rho) v_t||_2, 0 at t = 0
    double hess_v_l2 = 0.0;
    double grad_P_l2 = 0.0;
    double weighted_vt = 0.0;             // t ||sqrt(rho) v_t||_2^2
    double weighted_grad_vt_cum = 0.0;    // int_0^t tau ||grad v_tau||_2^2
    double grad_vt_l2 = 0.0;
    double div_v_l2 = 0.0;
    bool has_vt = false;
};

// all per-slice entries; cumulative fields are left at 0 (see accumulate)
DiagnosticsRecord conserved_report(const FluidState& state,
                                   const std::vector<double>& p_list = {1.0, 2.0});

// fills cumulative_dissipation and weighted_grad_vt_cum along a record series
void accumulate(std::vector<DiagnosticsRecord>& recs, double mu);

using Trajectory = std::vector<FluidState>;

// |E(t) + mu int ||grad v||^2 - E(0)| / max(E(0), floor) per slice
std::vector<double> energy_residual(const Trajectory& traj, double mu,
                                    double floor = 1e-30);

struct ShiftNormEntry {
    double p = 2.0, r = 2.0;
    double sqrt_t_hess_v = 0.0;  // || sqrt(t) grad^2 v ||_{L_p(0,T;L_r)}
    double sqrt_t_grad_P = 0.0;
    bool in_lemma_range = true;  // 2 <= p, 2 <= r < 2p/(p-2)
};

struct GradInfEntry {
    double s = 1.0;
    double integral = 0.0;  // int_0^T ||grad v||_inf^s dt
    double beta = 0.0;      // reported exponent (2p-2s-ps)/(2ps) at p = 4
};

struct AprioriReport {
    std::vector<double> times;
    std::vector<double> h1_lhs;        // LHS of the 2D log-Gronwall bound
    std::vector<double> gronwall_rhs;  // (e+X0)^{exp(C0 E0)} - e with fitted C0
    double fitted_C0 = 0.0;
    double sup_weighted_vt = 0.0;          // sup_t t ||sqrt(rho) v_t||^2
    double int_weighted_grad_vt = 0.0;     // int t ||grad v_t||^2
    std::vector<ShiftNormEntry> shift_norms;
    std::vector<GradInfEntry> grad_inf;
    std::vector<std::string> warnings;
};

AprioriReport apriori_functionals(const Trajectory& traj, double rho_star,
                                  const std::vector<std::pair<double, double>>& p_r_table,
                                  const std::vector<double>& s_list);

// fit the smallest C0 with h1_lhs(t) <= (e + X0)^{exp(C0 E0)} - e for all t
double fit_gronwall_c0(const std::vector<double>& h1_lhs, double X0, double E0);

// --- closed-form ODE bounds ---

struct BoundSeries {
    std::vector<double> times;
    std::vector<double> values;
    bool blowup = false;
    double blowup_time = 0.0;
};

// t -> (e + X0)^{exp int_0^t f} - e, trapezoidal integral of f
BoundSeries gronwall_log_bound(double X0, const std::vector<double>& times,
                               const std::vector<double>& f);

// t -> X0 / sqrt(1 - 2 X0^2 int_0^t f) while positive, blowup flagged after
BoundSeries riccati_bound_3d(double X0, const std::vector<double>& times,
                             const std::vector<double>& f);

// RK4 integration of X' = rhs(t, X) with linear interpolation of f samples;
// the independent oracle for the two bounds above
std::vector<double> rk4_ode(double X0, const std::vector<double>& times,
                            const std::vector<double>& f, int substeps,
                            double (*rhs)(double f, double X));

struct ThreeDFormulas {
    double smallness_margin = 0.0;  // c mu^2 - (rho*)^{3/2} e0 g0
    double local_time = 0.0;        // (mu/rho*)^7 c rho* / (e0^2 g0^6)
};
ThreeDFormulas threed_formulas(double rho_star, double mu, double e0, double g0, double c);

}  // namespace ins::diag
