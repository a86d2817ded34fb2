#pragma once

// Time integration of the inhomogeneous incompressible system on the 2D
// torus: density transport by semi-Lagrangian advection with clipped
// interpolation (keeps inf/sup of rho exactly), momentum by a semi-implicit
// variable-density Stokes projection with an eps-floor on the density inside
// the momentum solve only.

#include <optional>
#include <string>
#include <vector>

#include "ins/field.hpp"
#include "ins/spectral.hpp"

namespace ins::solver {

enum class InnerMethod { pcg, richardson };
enum class PivotRule { midpoint, mean, geometric };
// limiter stencil for the transported density: clip to the surrounding 2x2
// corners or to the full 4x4 interpolation stencil (both keep the global
// min/max of rho exact; the wider clip trims less at interfaces)
enum class DensityLimiter { corners, stencil };

struct SolverConfig {
    double mu = 1.0;         // viscosity
    double dt = 1e-3;
    double eps_floor = 0.0;  // density floor inside the momentum solve
    double rho_star = 1.0;   // density upper bound
    int n = 128;
    double inner_tol = 1e-9;
    int inner_maxit = 400;
    double T_end = 0.5;
    InnerMethod inner_method = InnerMethod::pcg;
    PivotRule pivot = PivotRule::geometric;
    DensityLimiter density_limiter = DensityLimiter::corners;
    bool transport_pressure_gradient = true;  // cancel the transport/projection
                                              // splitting bias with the old grad P
    bool dealias = true;
    double cfl_warn = 5.0;  // warn when dt*|v|_inf/h exceeds this

    void validate() const {
        if (dt <= 0.0) throw Error("SolverConfig: dt must be positive");
        if (eps_floor < 0.0 || eps_floor > rho_star)
            throw Error("SolverConfig: need 0 <= eps_floor <= rho_star");
        if (mu <= 0.0) throw Error("SolverConfig: mu must be positive");
    }
};

struct FluidState {
    double t = 0.0;
    ScalarField rho;
    ScalarField P;  // zero mean
    VectorField v;  // divergence-free to solver tolerance
    std::optional<VectorField> vt;  // discrete (v^{n+1}-v^n)/dt, absent at t = 0

    // Back-to-initial-labels transport: rho_ref is the t = 0 density and
    // backmap the displacement of the backward flow map to t = 0, so
    // rho(t, x) = rho_ref(x + backmap(x)). Composing the smooth map instead
    // of remapping the (possibly discontinuous) density keeps the interface
    // one cell sharp for the whole run; states built by hand without these
    // fields fall back to the per-step density remap.
    std::optional<ScalarField> rho_ref;
    std::optional<VectorField> backmap;
};

struct StepStats {
    int inner_iterations = 0;
    double inner_residual = 0.0;
};

// semi-Lagrangian density update; min/max never expand (clipped interpolation
// plus global clamp to [min rho, max rho] of the input)
ScalarField advect_density(const ScalarField& rho, const VectorField& v_half, double dt,
                           double cfl_warn = 5.0,
                           std::vector<std::string>* warnings = nullptr,
                           DensityLimiter limiter = DensityLimiter::corners);

// same transport applied componentwise with unclipped interpolation;
// feet are traced along v_half, values taken from v
VectorField advect_velocity(const VectorField& v, const VectorField& v_half, double dt);

struct MomentumResult {
    VectorField v;  // divergence-free
    ScalarField P;  // zero mean
    StepStats stats;
};

// solves rho~ (v_new - v~)/dt - mu Lap v_new + grad P = 0, div v_new = 0,
// rho~ = max(rho, eps_floor), v~ the advected velocity
MomentumResult momentum_step(const FluidState& state, const SolverConfig& cfg);

FluidState step(const FluidState& state, const SolverConfig& cfg,
                StepStats* stats = nullptr, std::vector<std::string>* warnings = nullptr);

FluidState initial_state(const ScalarField& rho0, const VectorField& v0);

// --- epsilon continuation (Cauchy-sequence diagnostic in the floor) ---

struct ConvergenceReport {
    std::vector<double> eps;
    std::vector<bool> run_ok;
    std::vector<std::string> run_errors;
    // consecutive-pair differences, size max(#successful_pairs, 0)
    std::vector<double> diff_l2h1;      // ||v^{e_i} - v^{e_{i+1}}||_{L2(0,T;H1)}
    std::vector<double> diff_linf_l2;   // ||.||_{Linf(0,T;L2)}
    bool complete = true;
};

ConvergenceReport epsilon_continuation(const ScalarField& rho0, const VectorField& v0,
                                       const SolverConfig& cfg,
                                       const std::vector<double>& eps_list,
                                       int save_every = 10);

}  // namespace ins::solver
