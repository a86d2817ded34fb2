#include "ins/twisted.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/spectral.hpp"

namespace ins::twisted {

namespace {

double l2_diff(const VectorField& a, const VectorField& b) {
    VectorField d = a;
    d -= b;
    return lp_norm(d, 2.0);
}

// pointwise operator norm of Id - A, max over nodes
double id_minus_A_norm(const Matrix2Field& A) {
    double m = 0.0;
    for (std::size_t id = 0; id < A.nodes(); ++id)
        m = std::max(m, matrix2_op_norm(1.0 - A(0, 0)[id], -A(0, 1)[id], -A(1, 0)[id],
                                        1.0 - A(1, 1)[id]));
    return m;
}

}  // namespace

TwistedProblem TwistedProblem::build(std::vector<double> times, std::vector<Matrix2Field> A,
                                     std::vector<VectorField> R, double tol) {
    if (A.empty() || A.size() != R.size() || A.size() != times.size())
        throw Error("TwistedProblem: inconsistent series lengths");
    TwistedProblem p;
    p.times = std::move(times);
    p.A = std::move(A);
    p.R = std::move(R);
    p.tol = tol;

    for (const auto& At : p.A) {
        p.id_minus_A_inf = std::max(p.id_minus_A_inf, id_minus_A_norm(At));
        ScalarField det = At.det();
        for (std::size_t i = 0; i < det.size(); ++i)
            p.max_det_deviation = std::max(p.max_det_deviation, std::abs(det[i] - 1.0));
    }
    // || A_t ||_{L2(0,T;L6)} by midpoint finite differences
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < p.A.size(); ++k) {
        const double dt = p.times[k + 1] - p.times[k];
        if (dt <= 0.0) throw Error("TwistedProblem: times must increase");
        ScalarField mag(p.A[k].grid());
        for (std::size_t id = 0; id < mag.size(); ++id) {
            const double a = (p.A[k + 1](0, 0)[id] - p.A[k](0, 0)[id]) / dt;
            const double b = (p.A[k + 1](0, 1)[id] - p.A[k](0, 1)[id]) / dt;
            const double c = (p.A[k + 1](1, 0)[id] - p.A[k](1, 0)[id]) / dt;
            const double d = (p.A[k + 1](1, 1)[id] - p.A[k](1, 1)[id]) / dt;
            mag[id] = matrix2_op_norm(a, b, c, d);
        }
        const double l6 = lp_norm(mag, 6.0);
        acc += l6 * l6 * dt;
    }
    p.At_l2l6 = std::sqrt(acc);
    return p;
}

TwistedProblem TwistedProblem::from_flowmap(const lagr::FlowMap& fm, std::vector<VectorField> R,
                                            double tol) {
    std::vector<double> times;
    std::vector<Matrix2Field> A;
    for (const auto& smp : fm.samples) {
        times.push_back(smp.t);
        A.push_back(smp.A);
    }
    return build(std::move(times), std::move(A), std::move(R), tol);
}

VectorField apply_phi(const Matrix2Field& A, const VectorField& R, const VectorField& v) {
    // m = (Id - A) v + R; Phi = gradient part of the Helmholtz split of m
    VectorField m(v.grid());
    for (std::size_t id = 0; id < v.nodes(); ++id) {
        m[0][id] = (1.0 - A(0, 0)[id]) * v[0][id] - A(0, 1)[id] * v[1][id] + R[0][id];
        m[1][id] = -A(1, 0)[id] * v[0][id] + (1.0 - A(1, 1)[id]) * v[1][id] + R[1][id];
    }
    return leray_project(m).gradient_part;
}

TwistedSolution solve_twisted(const TwistedProblem& p, int maxit, bool throw_on_divergence) {
    TwistedSolution sol;
    sol.w.reserve(p.A.size());
    for (std::size_t k = 0; k < p.A.size(); ++k) {
        const Matrix2Field& A = p.A[k];
        const VectorField& R = p.R[k];
        const ScalarField g = divergence(R);
        const double gnorm = lp_norm(g, 2.0);

        VectorField v(R.grid());
        SliceOutcome oc;
        double dist_prev = kInfinity, dist_prev2 = kInfinity;
        double dist_target = p.tol;
        int applications = 0;
        const double residual_bound = 10.0 * p.tol * gnorm;
        for (int it = 1; it <= maxit; ++it) {
            VectorField v_new = apply_phi(A, R, v);
            ++applications;
            const double dist = l2_diff(v_new, v);
            v = std::move(v_new);
            if (dist <= dist_target) {
                // successive iterates have settled; accept only once the
                // residual (measured by the independent product form) does too
                oc.residual = lp_norm(lagr::div_of_Az(A, v) - g, 2.0);
                if (gnorm == 0.0 || oc.residual <= residual_bound) {
                    oc.converged = true;
                    break;
                }
                dist_target = std::max(dist_target * 0.1, 1e-300);
            }
            if (dist > dist_prev && dist_prev > dist_prev2) {
                oc.diverged = true;
                oc.expansion = dist / dist_prev;
                break;
            }
            dist_prev2 = dist_prev;
            dist_prev = dist;
        }
        oc.iterations = std::max(applications - 1, 0);
        if (!oc.converged) {
            sol.all_converged = false;
            if (throw_on_divergence) {
                if (oc.diverged)
                    throw IterationDiverged(
                        "solve_twisted: iterate growth over 2 consecutive steps (factor " +
                            std::to_string(oc.expansion) + "), smallness condition violated",
                        oc.expansion, oc.iterations);
                throw Nonconvergence("solve_twisted: exceeded maxit", dist_prev, maxit);
            }
        }
        sol.outcomes.push_back(oc);
        sol.w.push_back(std::move(v));
    }
    return sol;
}

namespace {

// Bochner pieces of the X_T norm over a uniform slice grid
double x_norm(const std::vector<double>& times, const std::vector<VectorField>& v) {
    const std::size_t ns = v.size();
    std::vector<double> l2(ns), h1(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        l2[i] = lp_norm(v[i], 2.0);
        h1[i] = grad_l2(v[i]);
    }
    auto bochner = [&](const std::vector<double>& vals, double q) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < ns; ++i)
            acc += 0.5 * (std::pow(vals[i], q) + std::pow(vals[i + 1], q)) *
                   (times[i + 1] - times[i]);
        return std::pow(acc, 1.0 / q);
    };
    double out = bochner(l2, 4.0) + bochner(h1, 2.0);
    if (ns >= 2) {
        std::vector<double> vt(ns - 1);
        std::vector<double> tm(ns - 1);
        for (std::size_t i = 0; i + 1 < ns; ++i) {
            VectorField d = v[i + 1];
            d -= v[i];
            d *= 1.0 / (times[i + 1] - times[i]);
            vt[i] = lp_norm(d, 1.5);
            tm[i] = 0.5 * (times[i] + times[i + 1]);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < ns; ++i)
            acc += std::pow(vt[i], 4.0 / 3.0) * (times[i + 1] - times[i]);
        out += std::pow(acc, 3.0 / 4.0);
    }
    return out;
}

}  // namespace

double contraction_estimate(const TwistedProblem& p, int samples, std::uint64_t seed) {
    if (samples < 2) throw Error("contraction_estimate: need >= 2 samples");
    const Grid g = p.A.front().grid();
    const std::size_t ns = p.A.size();
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<VectorField> v1, v2, p1, p2;
        for (std::size_t k = 0; k < ns; ++k) {
            VectorField a(g), b(g);
            for (int c = 0; c < 2; ++c) {
                a[c] = random_spectral_field(g, 2.0, mix_seed(seed, 4 * (s * ns + k) + c));
                b[c] = random_spectral_field(g, 2.0, mix_seed(seed, 4 * (s * ns + k) + 2 + c));
            }
            v1.push_back(std::move(a));
            v2.push_back(std::move(b));
        }
        for (std::size_t k = 0; k < ns; ++k) {
            p1.push_back(apply_phi(p.A[k], p.R[k], v1[k]));
            p2.push_back(apply_phi(p.A[k], p.R[k], v2[k]));
        }
        std::vector<VectorField> dv, dp;
        for (std::size_t k = 0; k < ns; ++k) {
            VectorField d = v2[k];
            d -= v1[k];
            dv.push_back(std::move(d));
            VectorField e = p2[k];
            e -= p1[k];
            dp.push_back(std::move(e));
        }
        const double denom = x_norm(p.times, dv);
        if (denom <= 0.0) continue;
        best = std::max(best, x_norm(p.times, dp) / denom);
    }
    return best;
}

std::string convergence_log_json(const TwistedProblem& p, const TwistedSolution& sol) {
    nlohmann::json j;
    j["id_minus_A_inf"] = p.id_minus_A_inf;
    j["At_l2l6"] = p.At_l2l6;
    j["max_det_deviation"] = p.max_det_deviation;
    j["tol"] = p.tol;
    j["all_converged"] = sol.all_converged;
    for (std::size_t k = 0; k < sol.outcomes.size(); ++k) {
        const SliceOutcome& oc = sol.outcomes[k];
        j["slices"].push_back({{"t", p.times[k]},
                               {"iterations", oc.iterations},
                               {"converged", oc.converged},
                               {"diverged", oc.diverged},
                               {"residual", oc.residual},
                               {"expansion", oc.expansion}});
    }
    return j.dump(2) + "\n";
}

}  // namespace ins::twisted
