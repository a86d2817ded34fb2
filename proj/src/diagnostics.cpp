#include "ins/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ins/norms.hpp"

namespace ins::diag {

namespace {
const double kE = std::numbers::e;
}

DiagnosticsRecord conserved_report(const FluidState& state, const std::vector<double>& p_list) {
    DiagnosticsRecord r;
    r.t = state.t;
    const ScalarField& rho = state.rho;
    const VectorField& v = state.v;
    const double hv = rho.grid().cell_volume();
    const int d = v.dim();

    double ke = 0.0;
    std::vector<double> mom(d, 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double v2 = 0.0;
        for (int c = 0; c < d; ++c) {
            v2 += v[c][i] * v[c][i];
            mom[c] += rho[i] * v[c][i];
        }
        ke += rho[i] * v2;
    }
    r.kinetic_energy = 0.5 * ke * hv;
    r.total_momentum.resize(d);
    for (int c = 0; c < d; ++c) r.total_momentum[c] = mom[c] * hv;
    r.total_mass = integral(rho);
    r.rho_min = min_value(rho);
    r.rho_max = max_value(rho);
    for (double p : p_list) r.rho_lp[p] = lp_norm(rho, p);

    r.grad_v_l2 = grad_l2(v);
    r.hess_v_l2 = hess_l2(v);
    r.grad_P_l2 = grad_l2(state.P);
    r.div_v_l2 = div_l2(v);

    if (state.vt.has_value()) {
        r.has_vt = true;
        const VectorField& vt = *state.vt;
        double acc = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            double v2 = 0.0;
            for (int c = 0; c < d; ++c) v2 += vt[c][i] * vt[c][i];
            acc += rho[i] * v2;
        }
        r.sqrho_vt_l2 = std::sqrt(acc * hv);
        r.weighted_vt = state.t * acc * hv;
        r.grad_vt_l2 = grad_l2(vt);
    }
    return r;
}

void accumulate(std::vector<DiagnosticsRecord>& recs, double mu) {
    double diss = 0.0, wgvt = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (i > 0) {
            const double dt = recs[i].t - recs[i - 1].t;
            const double g1 = recs[i].grad_v_l2;
            // right-endpoint rule: the dissipation the implicit step removes
            diss += mu * g1 * g1 * dt;
            const double w0 = recs[i - 1].has_vt
                                  ? recs[i - 1].t * recs[i - 1].grad_vt_l2 * recs[i - 1].grad_vt_l2
                                  : 0.0;
            const double w1 =
                recs[i].has_vt ? recs[i].t * recs[i].grad_vt_l2 * recs[i].grad_vt_l2 : 0.0;
            wgvt += 0.5 * (w0 + w1) * dt;
        }
        recs[i].cumulative_dissipation = diss;
        recs[i].weighted_grad_vt_cum = wgvt;
    }
}

std::vector<double> energy_residual(const Trajectory& traj, double mu, double floor) {
    if (traj.size() < 2) throw Error("energy_residual: need at least 2 slices");
    std::vector<double> out(traj.size());
    auto energy = [](const FluidState& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            double v2 = 0.0;
            for (int c = 0; c < s.v.dim(); ++c) v2 += s.v[c][i] * s.v[c][i];
            acc += s.rho[i] * v2;
        }
        return 0.5 * acc * s.rho.grid().cell_volume();
    };
    const double e0 = energy(traj.front());
    const double denom = std::max(e0, floor);
    double diss = 0.0;
    out[0] = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double g = grad_l2(traj[i].v);
        // right-endpoint rule: the dissipation the implicit step removes
        diss += mu * g * g * (traj[i].t - traj[i - 1].t);
        out[i] = std::abs(energy(traj[i]) + diss - e0) / denom;
    }
    return out;
}

namespace {

// pointwise Frobenius magnitude of the Hessian of all components
ScalarField hessian_magnitude(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField acc(g);
    for (int c = 0; c < v.dim(); ++c) {
        VectorField g1 = grad(v[c]);
        for (int a = 0; a < v.dim(); ++a) {
            VectorField g2 = grad(g1[a]);
            for (int b = 0; b < v.dim(); ++b)
                for (std::size_t i = 0; i < acc.size(); ++i)
                    acc[i] += g2[b][i] * g2[b][i];
        }
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::sqrt(acc[i]);
    return acc;
}

ScalarField gradient_magnitude(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField acc(g);
    for (int c = 0; c < v.dim(); ++c) {
        VectorField g1 = grad(v[c]);
        for (int a = 0; a < v.dim(); ++a)
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g1[a][i] * g1[a][i];
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::sqrt(acc[i]);
    return acc;
}

double bochner_time_norm(const std::vector<double>& times, const std::vector<double>& vals,
                         double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : vals) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        acc += 0.5 * (std::pow(vals[i], p) + std::pow(vals[i + 1], p)) * (times[i + 1] - times[i]);
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double fit_gronwall_c0(const std::vector<double>& h1_lhs, double X0, double E0) {
    if (E0 <= 0.0) return 0.0;
    double c0 = 0.0;
    const double base = std::log(kE + X0);
    for (double lhs : h1_lhs) {
        if (lhs <= X0) continue;
        const double ratio = std::log(kE + lhs) / base;
        if (ratio > 1.0) c0 = std::max(c0, std::log(ratio) / E0);
    }
    return c0;
}

AprioriReport apriori_functionals(const Trajectory& traj, double rho_star,
                                  const std::vector<std::pair<double, double>>& p_r_table,
                                  const std::vector<double>& s_list) {
    if (traj.empty()) throw Error("apriori_functionals: empty trajectory");
    AprioriReport rep;
    const std::size_t ns = traj.size();
    rep.times.resize(ns);

    std::vector<double> sq_vt(ns, 0.0), hess2(ns), gradP2(ns), grad2(ns), grad_vt2(ns, 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
        const FluidState& s = traj[i];
        rep.times[i] = s.t;
        grad2[i] = grad_l2(s.v);
        grad2[i] *= grad2[i];
        const double h2 = hess_l2(s.v);
        hess2[i] = h2 * h2;
        const double gp = grad_l2(s.P);
        gradP2[i] = gp * gp;
        if (s.vt.has_value()) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s.rho.size(); ++j) {
                double v2 = 0.0;
                for (int c = 0; c < s.v.dim(); ++c) v2 += (*s.vt)[c][j] * (*s.vt)[c][j];
                acc += s.rho[j] * v2;
            }
            sq_vt[i] = acc * s.rho.grid().cell_volume();
            const double gvt = grad_l2(*s.vt);
            grad_vt2[i] = gvt * gvt;
        }
    }

    // LHS of the H1 bound: ||grad v||^2 + (1/2) int (||sqrt(rho) v_t||^2
    //                       + (1/rho*)(||grad^2 v||^2 + ||grad P||^2))
    rep.h1_lhs.resize(ns);
    double integ = 0.0;
    auto integrand = [&](std::size_t i) {
        return sq_vt[i] + (hess2[i] + gradP2[i]) / rho_star;
    };
    rep.h1_lhs[0] = grad2[0];
    for (std::size_t i = 1; i < ns; ++i) {
        integ += 0.25 * (integrand(i - 1) + integrand(i)) * (rep.times[i] - rep.times[i - 1]);
        rep.h1_lhs[i] = grad2[i] + integ;
    }

    const double X0 = grad2[0];
    double E0 = 0.0;
    {
        const FluidState& s0 = traj.front();
        for (std::size_t j = 0; j < s0.rho.size(); ++j) {
            double v2 = 0.0;
            for (int c = 0; c < s0.v.dim(); ++c) v2 += s0.v[c][j] * s0.v[c][j];
            E0 += s0.rho[j] * v2;
        }
        E0 *= s0.rho.grid().cell_volume();
    }
    rep.fitted_C0 = fit_gronwall_c0(rep.h1_lhs, X0, E0);
    const double rhs = std::pow(kE + X0, std::exp(rep.fitted_C0 * E0)) - kE;
    rep.gronwall_rhs.assign(ns, rhs);

    // time-weighted quantities
    for (std::size_t i = 0; i < ns; ++i)
        rep.sup_weighted_vt = std::max(rep.sup_weighted_vt, rep.times[i] * sq_vt[i]);
    for (std::size_t i = 1; i < ns; ++i)
        rep.int_weighted_grad_vt += 0.5 *
                                    (rep.times[i - 1] * grad_vt2[i - 1] + rep.times[i] * grad_vt2[i]) *
                                    (rep.times[i] - rep.times[i - 1]);

    // shift-of-integrability table
    std::vector<std::vector<double>> hess_lr(p_r_table.size(), std::vector<double>(ns));
    std::vector<std::vector<double>> gradP_lr(p_r_table.size(), std::vector<double>(ns));
    std::vector<double> gradv_inf(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const FluidState& s = traj[i];
        const ScalarField hm = hessian_magnitude(s.v);
        const VectorField gp = grad(s.P);
        const ScalarField gm = gradient_magnitude(s.v);
        gradv_inf[i] = max_value(gm);
        const double w = std::sqrt(std::max(rep.times[i], 0.0));
        for (std::size_t e = 0; e < p_r_table.size(); ++e) {
            hess_lr[e][i] = w * lp_norm(hm, p_r_table[e].second);
            gradP_lr[e][i] = w * lp_norm(gp, p_r_table[e].second);
        }
    }
    for (std::size_t e = 0; e < p_r_table.size(); ++e) {
        ShiftNormEntry ent;
        ent.p = p_r_table[e].first;
        ent.r = p_r_table[e].second;
        const double pstar = (ent.p > 2.0) ? 2.0 * ent.p / (ent.p - 2.0) : kInfinity;
        ent.in_lemma_range = ent.p >= 2.0 && ent.r >= 2.0 && ent.r < pstar;
        if (!ent.in_lemma_range)
            rep.warnings.push_back("shift norm (p=" + std::to_string(ent.p) +
                                   ", r=" + std::to_string(ent.r) +
                                   ") outside the lemma range; computed anyway");
        ent.sqrt_t_hess_v = bochner_time_norm(rep.times, hess_lr[e], ent.p);
        ent.sqrt_t_grad_P = bochner_time_norm(rep.times, gradP_lr[e], ent.p);
        rep.shift_norms.push_back(ent);
    }
    for (double s : s_list) {
        GradInfEntry ge;
        ge.s = s;
        std::vector<double> pw(ns);
        for (std::size_t i = 0; i < ns; ++i) pw[i] = std::pow(gradv_inf[i], s);
        for (std::size_t i = 1; i < ns; ++i)
            ge.integral += 0.5 * (pw[i - 1] + pw[i]) * (rep.times[i] - rep.times[i - 1]);
        double p = 4.0;
        if (s >= 4.0 / 3.0 && s < 2.0) p = std::max(4.0, 2.0 * std::ceil(2.0 * s / (2.0 - s)));
        ge.beta = (2.0 * p - 2.0 * s - p * s) / (2.0 * p * s);
        rep.grad_inf.push_back(ge);
    }
    return rep;
}

BoundSeries gronwall_log_bound(double X0, const std::vector<double>& times,
                               const std::vector<double>& f) {
    if (X0 < 0.0) throw Error("gronwall_log_bound: X0 must be >= 0");
    if (times.size() != f.size()) throw Error("gronwall_log_bound: size mismatch");
    for (double v : f)
        if (v < 0.0) throw Error("gronwall_log_bound: f must be nonnegative");
    BoundSeries out;
    out.times = times;
    out.values.resize(times.size());
    double F = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) F += 0.5 * (f[i - 1] + f[i]) * (times[i] - times[i - 1]);
        out.values[i] = std::pow(kE + X0, std::exp(F)) - kE;
    }
    return out;
}

BoundSeries riccati_bound_3d(double X0, const std::vector<double>& times,
                             const std::vector<double>& f) {
    if (X0 < 0.0) throw Error("riccati_bound_3d: X0 must be >= 0");
    if (times.size() != f.size()) throw Error("riccati_bound_3d: size mismatch");
    for (double v : f)
        if (v < 0.0) throw Error("riccati_bound_3d: f must be nonnegative");
    BoundSeries out;
    out.times = times;
    out.values.resize(times.size(), kInfinity);
    double F = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) F += 0.5 * (f[i - 1] + f[i]) * (times[i] - times[i - 1]);
        const double denom = 1.0 - 2.0 * X0 * X0 * F;
        if (denom > 0.0) {
            out.values[i] = X0 / std::sqrt(denom);
        } else if (!out.blowup) {
            out.blowup = true;
            // linear interpolation of int f to the crossing 2 X0^2 F = 1
            if (i > 0) {
                const double Fprev = F - 0.5 * (f[i - 1] + f[i]) * (times[i] - times[i - 1]);
                const double target = 1.0 / (2.0 * X0 * X0);
                const double frac = (target - Fprev) / std::max(F - Fprev, 1e-300);
                out.blowup_time = times[i - 1] + frac * (times[i] - times[i - 1]);
            } else {
                out.blowup_time = times[0];
            }
        }
    }
    return out;
}

std::vector<double> rk4_ode(double X0, const std::vector<double>& times,
                            const std::vector<double>& f, int substeps,
                            double (*rhs)(double f, double X)) {
    std::vector<double> out(times.size());
    out[0] = X0;
    auto f_at = [&](double t) {
        // linear interpolation of the samples
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return f.front();
        if (it == times.end()) return f.back();
        const std::size_t j = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
        return (1.0 - w) * f[j - 1] + w * f[j];
    };
    double X = X0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = (times[i] - times[i - 1]) / substeps;
        double t = times[i - 1];
        for (int s = 0; s < substeps; ++s) {
            const double k1 = rhs(f_at(t), X);
            const double k2 = rhs(f_at(t + 0.5 * dt), X + 0.5 * dt * k1);
            const double k3 = rhs(f_at(t + 0.5 * dt), X + 0.5 * dt * k2);
            const double k4 = rhs(f_at(t + dt), X + dt * k3);
            X += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
            if (!std::isfinite(X)) break;
        }
        out[i] = X;
        if (!std::isfinite(X)) {
            for (std::size_t j = i; j < times.size(); ++j) out[j] = kInfinity;
            break;
        }
    }
    return out;
}

ThreeDFormulas threed_formulas(double rho_star, double mu, double e0, double g0, double c) {
    if (rho_star <= 0.0 || mu <= 0.0 || c <= 0.0)
        throw Error("threed_formulas: rho_star, mu, c must be positive");
    if (e0 < 0.0 || g0 < 0.0) throw Error("threed_formulas: e0, g0 must be >= 0");
    ThreeDFormulas out;
    out.smallness_margin = c * mu * mu - std::pow(rho_star, 1.5) * e0 * g0;
    if (e0 == 0.0 || g0 == 0.0)
        out.local_time = kInfinity;
    else
        out.local_time = std::pow(mu / rho_star, 7.0) * c * rho_star /
                         (e0 * e0 * std::pow(g0, 6.0));
    return out;
}

}  // namespace ins::diag
