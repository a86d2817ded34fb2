#include "ins/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ins/interp.hpp"
#include "ins/norms.hpp"

namespace ins::solver {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// per-mode data for the 2D half-spectrum, precomputed once per grid
struct Mode {
    double kx, ky;  // signed wavenumbers
    double px, py;  // projector/derivative wavenumbers (zero on Nyquist planes)
    double k2;      // |k|^2 in integer units
    double p2;      // px^2 + py^2
    double w;       // Parseval weight (2 when the conjugate is not stored)
    bool masked;    // beyond the 2/3 dealias cutoff
};

std::vector<Mode> build_modes(const Grid& g) {
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(g.n) * (g.n / 2 + 1));
    const int kmax = g.n / 3;
    const int nh = g.n / 2;
    for_each_mode(g, [&](std::size_t, const int* k, double w) {
        Mode m;
        m.kx = k[0];
        m.ky = k[1];
        m.px = (std::abs(k[0]) == nh) ? 0.0 : m.kx;
        m.py = (std::abs(k[1]) == nh) ? 0.0 : m.ky;
        m.k2 = m.kx * m.kx + m.ky * m.ky;
        m.p2 = m.px * m.px + m.py * m.py;
        m.w = w;
        m.masked = std::abs(k[0]) > kmax || std::abs(k[1]) > kmax;
        modes.push_back(m);
    });
    return modes;
}

struct VSpec {
    Spectrum x, y;
    explicit VSpec(Grid g) : x(g), y(g) {}
    VSpec() = default;
};

VSpec forward_v(const VectorField& v) {
    VSpec s;
    s.x = forward(v[0]);
    s.y = forward(v[1]);
    return s;
}

VectorField inverse_v(const VSpec& s) {
    VectorField v(s.x.grid());
    v[0] = inverse(s.x);
    v[1] = inverse(s.y);
    return v;
}

void project_df(VSpec& s, const std::vector<Mode>& modes) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode& m = modes[i];
        if (m.p2 == 0.0) continue;
        const std::complex<double> kdotv = (m.px * s.x[i] + m.py * s.y[i]) / m.p2;
        s.x[i] -= m.px * kdotv;
        s.y[i] -= m.py * kdotv;
    }
}

void mask_23(VSpec& s, const std::vector<Mode>& modes) {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].masked) {
            s.x[i] = 0.0;
            s.y[i] = 0.0;
        }
}

double dot_vs(const VSpec& a, const VSpec& b, const std::vector<Mode>& modes) {
    double acc = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        acc += modes[i].w * (a.x[i].real() * b.x[i].real() + a.x[i].imag() * b.x[i].imag() +
                             a.y[i].real() * b.y[i].real() + a.y[i].imag() * b.y[i].imag());
    }
    return acc;
}

double norm_vs(const VSpec& a, const std::vector<Mode>& modes) {
    return std::sqrt(dot_vs(a, a, modes));
}

void axpy(VSpec& y, double alpha, const VSpec& x) {
    for (std::size_t i = 0; i < y.x.size(); ++i) {
        y.x[i] += alpha * x.x[i];
        y.y[i] += alpha * x.y[i];
    }
}

// context for the inner variable-coefficient solve, with reusable buffers
struct InnerCtx {
    Grid grid;
    const std::vector<Mode>& modes;
    double rb_dt;            // pivot rho_bar / dt
    double mu;
    ScalarField drho_dt;     // (rho~ - rho_bar)/dt, physical space
    bool dealias;

    mutable VSpec s1;
    mutable VectorField phys;

    InnerCtx(Grid g, const std::vector<Mode>& m, double rbdt, double mu_, bool dealias_)
        : grid(g), modes(m), rb_dt(rbdt), mu(mu_), drho_dt(g), dealias(dealias_),
          s1(g), phys(g) {}

    double diag(std::size_t i) const {
        return rb_dt + mu * kTwoPi * kTwoPi * modes[i].k2;
    }

    // variable-coefficient mass term: mask(F[ drho/dt * F^-1(mask(x)) ])
    void variable_part(const VSpec& xs, VSpec& out) const {
        s1 = xs;
        if (dealias) mask_23(s1, modes);
        inverse_into(s1.x, phys[0]);
        inverse_into(s1.y, phys[1]);
        for (std::size_t i = 0; i < phys.nodes(); ++i) {
            phys[0][i] *= drho_dt[i];
            phys[1][i] *= drho_dt[i];
        }
        forward_into(phys[0], out.x);
        forward_into(phys[1], out.y);
        if (dealias) mask_23(out, modes);
    }

    void apply_unprojected(const VSpec& xs, VSpec& out) const {
        variable_part(xs, out);
        for (std::size_t i = 0; i < out.x.size(); ++i) {
            const double dgl = diag(i);
            out.x[i] += dgl * xs.x[i];
            out.y[i] += dgl * xs.y[i];
        }
    }

    void apply(const VSpec& xs, VSpec& out) const {
        apply_unprojected(xs, out);
        project_df(out, modes);
    }

    void precondition(const VSpec& rs, VSpec& out) const {
        out = rs;
        for (std::size_t i = 0; i < out.x.size(); ++i) {
            const double dgl = diag(i);
            out.x[i] /= dgl;
            out.y[i] /= dgl;
        }
        project_df(out, modes);
    }
};

// x carries the warm start on entry (projected); solves A x = b
StepStats pcg_solve(const InnerCtx& ctx, const VSpec& b, VSpec& x, double tol, int maxit) {
    const auto& modes = ctx.modes;
    const double bnorm = norm_vs(b, modes);
    const double target = tol * std::max(bnorm, 1e-300);

    VSpec r(ctx.grid), z(ctx.grid), p(ctx.grid), Ap(ctx.grid);
    ctx.apply(x, Ap);
    r = b;
    axpy(r, -1.0, Ap);
    StepStats st;
    double rnorm = norm_vs(r, modes);
    if (rnorm <= target) {
        st.inner_residual = bnorm > 0 ? rnorm / bnorm : 0.0;
        return st;
    }
    ctx.precondition(r, z);
    p = z;
    double rz = dot_vs(r, z, modes);
    for (int it = 1; it <= maxit; ++it) {
        ctx.apply(p, Ap);
        const double pAp = dot_vs(p, Ap, modes);
        if (pAp <= 0.0)
            throw Nonconvergence("momentum inner solve: operator lost positivity",
                                 rnorm / bnorm, it);
        const double alpha = rz / pAp;
        axpy(x, alpha, p);
        axpy(r, -alpha, Ap);
        rnorm = norm_vs(r, modes);
        st.inner_iterations = it;
        if (rnorm <= target) {
            st.inner_residual = bnorm > 0 ? rnorm / bnorm : 0.0;
            return st;
        }
        ctx.precondition(r, z);
        const double rz_new = dot_vs(r, z, modes);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            p.x[i] = z.x[i] + beta * p.x[i];
            p.y[i] = z.y[i] + beta * p.y[i];
        }
    }
    throw Nonconvergence("momentum inner solve: PCG exceeded maxit, residual " +
                             std::to_string(rnorm / std::max(bnorm, 1e-300)),
                         rnorm / std::max(bnorm, 1e-300), maxit);
}

// the fixed-point form: v <- S^{-1} P [ b0 - M(v) ]
StepStats richardson_solve(const InnerCtx& ctx, const VSpec& b0, VSpec& x, double tol,
                           int maxit) {
    const auto& modes = ctx.modes;
    VSpec b = b0;
    project_df(b, modes);
    const double bscale = std::max(norm_vs(b, modes), 1e-300);

    ctx.precondition(b, x);
    VSpec rhs(ctx.grid), x_new(ctx.grid);
    double dist_prev = kInfinity;
    int growth = 0;
    StepStats st;
    for (int it = 1; it <= maxit; ++it) {
        ctx.variable_part(x, rhs);
        for (std::size_t i = 0; i < rhs.x.size(); ++i) {
            rhs.x[i] = b0.x[i] - rhs.x[i];
            rhs.y[i] = b0.y[i] - rhs.y[i];
        }
        project_df(rhs, modes);
        ctx.precondition(rhs, x_new);
        double dist2 = 0.0;
        for (std::size_t i = 0; i < x.x.size(); ++i) {
            dist2 += modes[i].w * (std::norm(x_new.x[i] - x.x[i]) + std::norm(x_new.y[i] - x.y[i]));
        }
        const double dist = std::sqrt(dist2);
        x = x_new;
        st.inner_iterations = it;
        st.inner_residual = dist / bscale;
        if (dist <= tol * std::max(norm_vs(x, modes), 1e-300)) return st;
        if (dist > dist_prev) {
            if (++growth >= 2)
                throw Nonconvergence(
                    "momentum inner solve: fixed-point iteration expanding (factor " +
                        std::to_string(dist / dist_prev) + "); density contrast too large "
                        "for the constant-coefficient split",
                    dist / bscale, it);
        } else {
            growth = 0;
        }
        dist_prev = dist;
    }
    throw Nonconvergence("momentum inner solve: fixed point exceeded maxit", st.inner_residual,
                         maxit);
}

struct Feet {
    std::vector<double> x, y;
};

// backward characteristic feet by RK2 (midpoint), Catmull-Rom velocity samples
Feet compute_feet(const VectorField& v, double dt) {
    const Grid& g = v.grid();
    const int n = g.n;
    const double h = g.h();
    Feet feet;
    feet.x.resize(g.size());
    feet.y.resize(g.size());
    Interp2 ivx(v[0]), ivy(v[1]);
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        for (int j = 0; j < n; ++j) {
            const double y = j * h;
            const std::size_t id = static_cast<std::size_t>(i) * n + j;
            const double vx0 = v[0][id];
            const double vy0 = v[1][id];
            const double xm = x - 0.5 * dt * vx0;
            const double ym = y - 0.5 * dt * vy0;
            const double vxm = ivx.catmull_rom(xm, ym);
            const double vym = ivy.catmull_rom(xm, ym);
            feet.x[id] = x - dt * vxm;
            feet.y[id] = y - dt * vym;
        }
    }
    return feet;
}

}  // namespace

ScalarField advect_density(const ScalarField& rho, const VectorField& v_half, double dt,
                           double cfl_warn, std::vector<std::string>* warnings,
                           DensityLimiter limiter) {
    const Grid& g = rho.grid();
    if (g.d != 2) throw Error("advect_density: 2D only");
    if (warnings) {
        const double vmax = lp_norm(v_half, kInfinity);
        const double cfl = dt * vmax / g.h();
        if (cfl > cfl_warn)
            warnings->push_back("advect_density: CFL number " + std::to_string(cfl) +
                                " exceeds " + std::to_string(cfl_warn));
    }
    const Feet feet = compute_feet(v_half, dt);
    const double lo = min_value(rho);
    const double hi = max_value(rho);
    Interp2 ir(rho);
    ScalarField out(g);
    if (limiter == DensityLimiter::corners) {
        for (std::size_t id = 0; id < g.size(); ++id) {
            const double val = ir.catmull_rom_clipped(feet.x[id], feet.y[id]);
            out[id] = std::min(std::max(val, lo), hi);
        }
    } else {
        for (std::size_t id = 0; id < g.size(); ++id) {
            const double val = ir.catmull_rom_clipped16(feet.x[id], feet.y[id]);
            out[id] = std::min(std::max(val, lo), hi);
        }
    }
    return out;
}

VectorField advect_velocity(const VectorField& v, const VectorField& v_half, double dt) {
    const Grid& g = v.grid();
    const Feet feet = compute_feet(v_half, dt);
    VectorField out(g);
    for (int c = 0; c < 2; ++c) {
        Interp2 ic(v[c]);
        for (std::size_t id = 0; id < g.size(); ++id)
            out[c][id] = ic.catmull_rom(feet.x[id], feet.y[id]);
    }
    return out;
}

MomentumResult momentum_step(const FluidState& state, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& g = state.rho.grid();
    if (g.d != 2) throw Error("momentum_step: 2D only");
    static thread_local std::pair<int, std::vector<Mode>> mode_cache{0, {}};
    if (mode_cache.first != g.n) mode_cache = {g.n, build_modes(g)};
    const std::vector<Mode>& modes = mode_cache.second;

    // floored density and pivot split
    ScalarField rho_t = state.rho;
    for (std::size_t i = 0; i < rho_t.size(); ++i)
        rho_t[i] = std::max(rho_t[i], cfg.eps_floor);
    double rho_bar;
    if (cfg.pivot == PivotRule::midpoint)
        rho_bar = 0.5 * (min_value(rho_t) + max_value(rho_t));
    else if (cfg.pivot == PivotRule::geometric)
        rho_bar = std::sqrt(std::max(min_value(rho_t), 1e-12) * std::max(max_value(rho_t), 1e-12));
    else
        rho_bar = mean(rho_t);
    if (rho_bar <= 0.0)
        throw Error("momentum_step: nonpositive pivot (vanishing density and eps_floor = 0)");

    InnerCtx ctx(g, modes, rho_bar / cfg.dt, cfg.mu, cfg.dealias);
    for (std::size_t i = 0; i < rho_t.size(); ++i)
        ctx.drho_dt[i] = (rho_t[i] - rho_bar) / cfg.dt;

    // advected velocity and right-hand side b0 = (rho~/dt) v~ (split form);
    // feet traced along the extrapolated half-time velocity when available
    VectorField v_half = state.v;
    if (state.vt.has_value()) {
        VectorField corr = *state.vt;
        corr *= 0.5 * cfg.dt;
        v_half += corr;
    }
    const VectorField v_adv = advect_velocity(state.v, v_half, cfg.dt);
    VSpec vs = forward_v(v_adv);
    VSpec b0(g);
    ctx.variable_part(vs, b0);
    for (std::size_t i = 0; i < b0.x.size(); ++i) {
        b0.x[i] += ctx.rb_dt * vs.x[i];
        b0.y[i] += ctx.rb_dt * vs.y[i];
    }

    // Transport of the previous pressure gradient along the half path. The
    // projection acts continuously along true trajectories; composing exact
    // transport with a single end-of-step projection leaves an O(dt) bias
    // with constant |grad v|^2 that this explicit source cancels. The new
    // pressure is recovered as increment plus transported gradient, which is
    // the same formula as without the source (it cancels in the residual).
    VSpec b0_solve = b0;
    const double p_scale = cfg.transport_pressure_gradient ? grad_l2(state.P) : 0.0;
    if (p_scale > 0.0) {
        VectorField gp = grad(state.P);
        Interp2 gpx(gp[0]), gpy(gp[1]);
        VectorField src(g);
        const double h = g.h();
        std::size_t id = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j, ++id) {
                const double xm = i * h - 0.5 * cfg.dt * v_half[0][id];
                const double ym = j * h - 0.5 * cfg.dt * v_half[1][id];
                src[0][id] = gpx.catmull_rom(xm, ym);
                src[1][id] = gpy.catmull_rom(xm, ym);
            }
        VSpec ss = forward_v(src);
        ss.x[0] = 0.0;  // momentum-neutral: the continuum source has zero mean
        ss.y[0] = 0.0;
        for (std::size_t k = 0; k < b0_solve.x.size(); ++k) {
            b0_solve.x[k] -= ss.x[k];
            b0_solve.y[k] -= ss.y[k];
        }
    }
    VSpec b = b0_solve;
    project_df(b, modes);

    double drho_max = 0.0;
    for (std::size_t i = 0; i < ctx.drho_dt.size(); ++i)
        drho_max = std::max(drho_max, std::abs(ctx.drho_dt[i]));

    // warm start: the pre-step velocity is O(dt) from the solution; when the
    // density is constant the preconditioned right side is already exact
    VSpec x(g);
    if (drho_max == 0.0) {
        ctx.precondition(b, x);
    } else {
        x = forward_v(state.v);
        project_df(x, modes);
    }
    StepStats st;
    if (cfg.inner_method == InnerMethod::pcg)
        st = pcg_solve(ctx, b, x, cfg.inner_tol, cfg.inner_maxit);
    else
        st = richardson_solve(ctx, b0_solve, x, cfg.inner_tol, cfg.inner_maxit);
    project_df(x, modes);

    // pressure from the unprojected residual: grad P = b0 - A0 v
    VSpec grad_p(g);
    ctx.apply_unprojected(x, grad_p);
    for (std::size_t i = 0; i < grad_p.x.size(); ++i) {
        grad_p.x[i] = b0.x[i] - grad_p.x[i];
        grad_p.y[i] = b0.y[i] - grad_p.y[i];
    }
    Spectrum phat(g);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode& m = modes[i];
        if (m.p2 == 0.0) continue;
        const std::complex<double> divg =
            std::complex<double>(0.0, kTwoPi * m.px) * grad_p.x[i] +
            std::complex<double>(0.0, kTwoPi * m.py) * grad_p.y[i];
        phat[i] = divg / (-kTwoPi * kTwoPi * m.p2);
    }

    MomentumResult out{inverse_v(x), inverse(phat), st};
    return out;
}

FluidState step(const FluidState& state, const SolverConfig& cfg, StepStats* stats,
                std::vector<std::string>* warnings) {
    cfg.validate();
    FluidState next;
    next.t = state.t + cfg.dt;
    VectorField v_half = state.v;
    if (state.vt.has_value()) {
        VectorField corr = *state.vt;
        corr *= 0.5 * cfg.dt;
        v_half += corr;
    }
    if (state.rho_ref.has_value() && state.backmap.has_value()) {
        // compose the smooth backward map, then sample the reference density
        const Grid& g = state.rho.grid();
        if (warnings) {
            const double cfl = cfg.dt * lp_norm(v_half, kInfinity) / g.h();
            if (cfl > cfg.cfl_warn)
                warnings->push_back("advect_density: CFL number " + std::to_string(cfl) +
                                    " exceeds " + std::to_string(cfg.cfl_warn));
        }
        const Feet feet = compute_feet(v_half, cfg.dt);
        VectorField bm(g);
        {
            Interp2 bx((*state.backmap)[0]), by((*state.backmap)[1]);
            const double h = g.h();
            std::size_t id = 0;
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j, ++id) {
                    const double fx = feet.x[id], fy = feet.y[id];
                    bm[0][id] = fx - i * h + bx.catmull_rom(fx, fy);
                    bm[1][id] = fy - j * h + by.catmull_rom(fx, fy);
                }
        }
        const ScalarField& r0 = *state.rho_ref;
        const double lo = min_value(r0);
        const double hi = max_value(r0);
        Interp2 ir(r0);
        next.rho = ScalarField(g);
        {
            const double h = g.h();
            std::size_t id = 0;
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j, ++id) {
                    double val;
                    const double px = i * h + bm[0][id];
                    const double py = j * h + bm[1][id];
                    if (cfg.density_limiter == DensityLimiter::corners)
                        val = ir.catmull_rom_clipped(px, py);
                    else
                        val = ir.catmull_rom_clipped16(px, py);
                    next.rho[id] = std::min(std::max(val, lo), hi);
                }
        }
        next.rho_ref = state.rho_ref;
        next.backmap = std::move(bm);
    } else {
        next.rho = advect_density(state.rho, v_half, cfg.dt, cfg.cfl_warn, warnings,
                                  cfg.density_limiter);
    }
    // transport cannot expand the range, clamp to the admissible band anyway
    for (std::size_t i = 0; i < next.rho.size(); ++i)
        next.rho[i] = std::min(std::max(next.rho[i], 0.0), cfg.rho_star);

    FluidState mid;
    mid.t = state.t;
    mid.rho = next.rho;
    mid.v = state.v;
    mid.P = state.P;
    MomentumResult m = momentum_step(mid, cfg);
    if (stats) *stats = m.stats;

    VectorField vt = m.v;
    vt -= state.v;
    vt *= 1.0 / cfg.dt;
    next.v = std::move(m.v);
    next.P = std::move(m.P);
    next.vt = std::move(vt);
    return next;
}

FluidState initial_state(const ScalarField& rho0, const VectorField& v0) {
    FluidState s;
    s.t = 0.0;
    s.rho = rho0;
    s.v = v0;
    s.P = ScalarField(rho0.grid());
    s.rho_ref = rho0;
    s.backmap = VectorField(rho0.grid());
    return s;
}

ConvergenceReport epsilon_continuation(const ScalarField& rho0, const VectorField& v0,
                                       const SolverConfig& cfg,
                                       const std::vector<double>& eps_list, int save_every) {
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw Error("epsilon_continuation: eps_list must be strictly decreasing");
    for (double e : eps_list)
        if (e <= 0.0) throw Error("epsilon_continuation: eps must be positive");

    ConvergenceReport rep;
    rep.eps = eps_list;
    const int nsteps = static_cast<int>(std::llround(cfg.T_end / cfg.dt));

    std::vector<std::vector<VectorField>> slices(eps_list.size());
    std::vector<double> slice_times;
    for (std::size_t m = 0; m < eps_list.size(); ++m) {
        SolverConfig c = cfg;
        c.eps_floor = eps_list[m];
        ScalarField rho_eps = rho0;
        for (std::size_t i = 0; i < rho_eps.size(); ++i)
            rho_eps[i] = std::max(rho_eps[i], eps_list[m]);
        FluidState s = initial_state(rho_eps, v0);
        bool ok = true;
        std::string err;
        std::vector<VectorField> mine;
        mine.push_back(s.v);
        try {
            for (int k = 1; k <= nsteps; ++k) {
                s = step(s, c);
                if (k % save_every == 0 || k == nsteps) mine.push_back(s.v);
            }
        } catch (const Error& e) {
            ok = false;
            err = e.what();
        }
        rep.run_ok.push_back(ok);
        rep.run_errors.push_back(err);
        if (!ok) rep.complete = false;
        slices[m] = std::move(mine);
        if (m == 0) {
            slice_times.clear();
            slice_times.push_back(0.0);
            for (int k = 1; k <= nsteps; ++k)
                if (k % save_every == 0 || k == nsteps) slice_times.push_back(k * cfg.dt);
        }
    }

    for (std::size_t m = 0; m + 1 < eps_list.size(); ++m) {
        if (!rep.run_ok[m] || !rep.run_ok[m + 1]) continue;
        const auto& a = slices[m];
        const auto& b = slices[m + 1];
        const std::size_t ns = std::min({a.size(), b.size(), slice_times.size()});
        std::vector<double> h1sq(ns);
        double sup = 0.0;
        for (std::size_t k = 0; k < ns; ++k) {
            VectorField d = a[k];
            d -= b[k];
            const double l2 = lp_norm(d, 2.0);
            const double g2 = grad_l2(d);
            h1sq[k] = l2 * l2 + g2 * g2;
            sup = std::max(sup, l2);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < ns; ++k)
            acc += 0.5 * (h1sq[k] + h1sq[k + 1]) * (slice_times[k + 1] - slice_times[k]);
        rep.diff_l2h1.push_back(std::sqrt(acc));
        rep.diff_linf_l2.push_back(sup);
    }
    return rep;
}

}  // namespace ins::solver
