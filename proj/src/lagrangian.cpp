#include "ins/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ins/errors.hpp"
#include "ins/norms.hpp"

namespace ins::lagr {

VectorField VelocityTrajectory::at(double t) const {
    if (times.empty()) throw Error("VelocityTrajectory: empty");
    if (t <= times.front()) return v.front();
    if (t >= times.back()) return v.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    VectorField out = v[j - 1];
    out *= (1.0 - w);
    VectorField hi = v[j];
    hi *= w;
    out += hi;
    return out;
}

namespace {

struct Mat2 {
    double a[2][2];
};

// velocity Jacobian fields (spectral), evaluated by interpolation along paths
struct Jacobian {
    std::array<std::array<ScalarField, 2>, 2> J;
    explicit Jacobian(const VectorField& v) {
        for (int c = 0; c < 2; ++c) {
            VectorField g = grad(v[c]);
            J[c][0] = std::move(g[0]);
            J[c][1] = std::move(g[1]);
        }
    }
};

struct JacInterp {
    std::array<std::array<Interp2, 2>, 2> ip;
    explicit JacInterp(const Jacobian& jac)
        : ip{{{Interp2(jac.J[0][0]), Interp2(jac.J[0][1])},
              {Interp2(jac.J[1][0]), Interp2(jac.J[1][1])}}} {}
    Mat2 at(double x, double y) const {
        Mat2 m;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m.a[i][j] = ip[i][j].catmull_rom(x, y);
        return m;
    }
};

inline Mat2 blend(const Mat2& A, const Mat2& B, double w) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.a[i][j] = (1.0 - w) * A.a[i][j] + w * B.a[i][j];
    return out;
}

inline Mat2 matmul(const Mat2& A, const Mat2& B) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.a[i][j] = A.a[i][0] * B.a[0][j] + A.a[i][1] * B.a[1][j];
    return out;
}

struct VelInterp {
    Interp2 x, y;
    explicit VelInterp(const VectorField& v) : x(v[0]), y(v[1]) {}
    Vec2 at(double px, double py) const { return {x.catmull_rom(px, py), y.catmull_rom(px, py)}; }
};

// one RK4 step of dx/dt = v(t, x); v is blended linearly between the v0 and
// v1 slices, with the step spanning blend weights [w0, w1] (a full slice
// interval is (0,1), a half step (0,1/2) or (1/2,1)); optionally advances the
// deformation gradient alongside
Vec2 rk4_point(const VelInterp& v0, const VelInterp& v1, Vec2 p, double dt, double w0, double w1,
               Mat2* G, const JacInterp* J0, const JacInterp* J1) {
    auto vel = [&](double s, Vec2 q) {
        const double w = w0 + s * (w1 - w0);
        const Vec2 a = v0.at(q.x, q.y);
        const Vec2 b = v1.at(q.x, q.y);
        return Vec2{(1.0 - w) * a.x + w * b.x, (1.0 - w) * a.y + w * b.y};
    };
    const Vec2 k1 = vel(0.0, p);
    const Vec2 k2 = vel(0.5, p + k1 * (0.5 * dt));
    const Vec2 k3 = vel(0.5, p + k2 * (0.5 * dt));
    const Vec2 k4 = vel(1.0, p + k3 * dt);
    if (G) {
        auto jac = [&](double s, Vec2 q) {
            return blend(J0->at(q.x, q.y), J1->at(q.x, q.y), w0 + s * (w1 - w0));
        };
        const Mat2 L1 = matmul(jac(0.0, p), *G);
        Mat2 G2 = *G;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) G2.a[i][j] += 0.5 * dt * L1.a[i][j];
        const Mat2 L2 = matmul(jac(0.5, p + k1 * (0.5 * dt)), G2);
        Mat2 G3 = *G;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) G3.a[i][j] += 0.5 * dt * L2.a[i][j];
        const Mat2 L3 = matmul(jac(0.5, p + k2 * (0.5 * dt)), G3);
        Mat2 G4 = *G;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) G4.a[i][j] += dt * L3.a[i][j];
        const Mat2 L4 = matmul(jac(1.0, p + k3 * dt), G4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                G->a[i][j] += dt / 6.0 *
                              (L1.a[i][j] + 2.0 * L2.a[i][j] + 2.0 * L3.a[i][j] + L4.a[i][j]);
    }
    return p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

}  // namespace

FlowIntegrator::FlowIntegrator(Options opt) : opt_(opt) {
    if (opt_.track_labels) {
        opt_.label_grid.validate();
        const Grid& g = opt_.label_grid;
        label_pos_.resize(g.size());
        const double h = g.h();
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                label_pos_[static_cast<std::size_t>(i) * g.n + j] = {i * h, j * h};
        disp_ = VectorField(g);
        gradX_ = Matrix2Field::identity(g);
    }
}

int FlowIntegrator::add_markers(std::vector<Vec2> pts) {
    marker_sets_.push_back(std::move(pts));
    return static_cast<int>(marker_sets_.size()) - 1;
}

void FlowIntegrator::advance(const VectorField& v_begin, const VectorField& v_end, double t0,
                             double dt, std::vector<std::string>* warnings) {
    (void)t0;
    const VelInterp vi0(v_begin), vi1(v_end);

    for (auto& set : marker_sets_) {
        for (auto& p : set) {
            const Vec2 full = rk4_point(vi0, vi1, p, dt, 0.0, 1.0, nullptr, nullptr, nullptr);
            if (opt_.accuracy_check) {
                // step-halving estimator: one full step against two half steps
                const Vec2 h1 = rk4_point(vi0, vi1, p, 0.5 * dt, 0.0, 0.5, nullptr, nullptr, nullptr);
                const Vec2 h2 = rk4_point(vi0, vi1, h1, 0.5 * dt, 0.5, 1.0, nullptr, nullptr, nullptr);
                if ((full - h2).norm() > opt_.accuracy_tol && warnings)
                    warnings->push_back("flow marker accuracy estimate " +
                                        std::to_string((full - h2).norm()) + " exceeds tol");
            }
            p = full;
        }
    }

    if (opt_.track_labels) {
        const Jacobian jac0(v_begin), jac1(v_end);
        const JacInterp ji0(jac0), ji1(jac1);
        const Grid& g = opt_.label_grid;
        double max_grad_u = 0.0;
        for (std::size_t id = 0; id < label_pos_.size(); ++id) {
            Mat2 G{{{gradX_(0, 0)[id], gradX_(0, 1)[id]}, {gradX_(1, 0)[id], gradX_(1, 1)[id]}}};
            label_pos_[id] = rk4_point(vi0, vi1, label_pos_[id], dt, 0.0, 1.0, &G, &ji0, &ji1);
            gradX_(0, 0)[id] = G.a[0][0];
            gradX_(0, 1)[id] = G.a[0][1];
            gradX_(1, 0)[id] = G.a[1][0];
            gradX_(1, 1)[id] = G.a[1][1];
            // grad_y u = (grad v o X) gradX at the end of the step
            const Mat2 Ju = matmul(ji1.at(label_pos_[id].x, label_pos_[id].y), G);
            max_grad_u = std::max(
                max_grad_u, matrix2_op_norm(Ju.a[0][0], Ju.a[0][1], Ju.a[1][0], Ju.a[1][1]));
        }
        const double h = g.h();
        std::size_t id = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j, ++id) {
                disp_[0][id] = label_pos_[id].x - i * h;
                disp_[1][id] = label_pos_[id].y - j * h;
            }
        if (prev_grad_u_inf_ < 0.0) {
            // first step: approximate the initial value with the end value
            int_grad_u_inf_ += dt * max_grad_u;
        } else {
            int_grad_u_inf_ += 0.5 * dt * (prev_grad_u_inf_ + max_grad_u);
        }
        prev_grad_u_inf_ = max_grad_u;
    }
    t_ += dt;
}

FlowSample FlowIntegrator::label_sample() const {
    if (!opt_.track_labels) throw Error("FlowIntegrator: labels not tracked");
    FlowSample s{t_, disp_, gradX_, Matrix2Field(opt_.label_grid), int_grad_u_inf_};
    s.A = deformation_inverse(gradX_, 0).A_direct;
    return s;
}

FlowMap integrate_flow(const VelocityTrajectory& traj, Grid labels, int substeps,
                       int sample_every, std::vector<std::string>* warnings) {
    if (traj.times.size() < 1) throw Error("integrate_flow: empty trajectory");
    FlowIntegrator::Options opt;
    opt.track_labels = true;
    opt.label_grid = labels;
    FlowIntegrator fi(opt);
    FlowMap out;
    out.labels = labels;
    out.samples.push_back(fi.label_sample());
    out.samples.back().t = traj.t_begin();

    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        const double t0 = traj.times[i];
        const double t1 = traj.times[i + 1];
        const double dt = (t1 - t0) / substeps;
        for (int s = 0; s < substeps; ++s) {
            // velocity slices bounding this substep, linear in time
            const double ta = t0 + s * dt;
            const double tb = ta + dt;
            const VectorField va = (substeps == 1) ? traj.v[i] : traj.at(ta);
            const VectorField vb = (substeps == 1) ? traj.v[i + 1] : traj.at(tb);
            fi.advance(va, vb, ta, dt, warnings);
        }
        if ((i + 1) % static_cast<std::size_t>(sample_every) == 0 || i + 2 == traj.times.size()) {
            FlowSample smp = fi.label_sample();
            smp.t = t1;
            out.samples.push_back(std::move(smp));
        }
    }
    return out;
}

DeformationInverse deformation_inverse(const Matrix2Field& gradX, int terms) {
    if (terms < 0) throw Error("deformation_inverse: terms must be >= 0");
    const Grid& g = gradX.grid();
    DeformationInverse out{Matrix2Field(g), Matrix2Field(g), 0.0};
    for (std::size_t id = 0; id < gradX.nodes(); ++id) {
        const double a = gradX(0, 0)[id], b = gradX(0, 1)[id];
        const double c = gradX(1, 0)[id], d = gradX(1, 1)[id];
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-8)
            throw SingularMap("deformation_inverse: |det grad X| < 1e-8 at a node");
        out.A_direct(0, 0)[id] = d / det;
        out.A_direct(0, 1)[id] = -b / det;
        out.A_direct(1, 0)[id] = -c / det;
        out.A_direct(1, 1)[id] = a / det;

        // Neumann series sum_{k<=K} (-1)^k B^k with B = gradX - Id
        const double B[2][2] = {{a - 1.0, b}, {c, d - 1.0}};
        double term[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
        double acc[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
        for (int k = 1; k <= terms; ++k) {
            double next[2][2];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    next[i][j] = -(term[i][0] * B[0][j] + term[i][1] * B[1][j]);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    term[i][j] = next[i][j];
                    acc[i][j] += next[i][j];
                }
        }
        double err = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                out.A_neumann(i, j)[id] = acc[i][j];
                err = std::max(err, std::abs(acc[i][j] - out.A_direct(i, j)[id]));
            }
        out.series_error = std::max(out.series_error, err);
    }
    return out;
}

VectorField lagrangian_grad(const Matrix2Field& A, const ScalarField& z) {
    VectorField gz = grad(z);
    VectorField out(z.grid());
    for (std::size_t id = 0; id < out.nodes(); ++id) {
        out[0][id] = A(0, 0)[id] * gz[0][id] + A(1, 0)[id] * gz[1][id];
        out[1][id] = A(0, 1)[id] * gz[0][id] + A(1, 1)[id] * gz[1][id];
    }
    return out;
}

ScalarField twisted_divergence(const Matrix2Field& A, const VectorField& z) {
    ScalarField out(z.grid());
    for (int j = 0; j < 2; ++j) {
        VectorField gzj = grad(z[j]);
        for (std::size_t id = 0; id < out.size(); ++id)
            out[id] += A(0, j)[id] * gzj[0][id] + A(1, j)[id] * gzj[1][id];
    }
    return out;
}

ScalarField div_of_Az(const Matrix2Field& A, const VectorField& z) {
    VectorField Az(z.grid());
    for (std::size_t id = 0; id < z.nodes(); ++id) {
        Az[0][id] = A(0, 0)[id] * z[0][id] + A(0, 1)[id] * z[1][id];
        Az[1][id] = A(1, 0)[id] * z[0][id] + A(1, 1)[id] * z[1][id];
    }
    return divergence(Az);
}

ScalarField pullback(const ScalarField& f, const VectorField& displacement) {
    const Grid& g = displacement.grid();
    ScalarField out(g);
    Interp2 fi(f);
    const double h = g.h();
    std::size_t id = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j, ++id)
            out[id] = fi.catmull_rom(i * h + displacement[0][id], j * h + displacement[1][id]);
    return out;
}

VectorField pullback(const VectorField& f, const VectorField& displacement) {
    VectorField out(displacement.grid());
    for (int c = 0; c < f.dim(); ++c) out[c] = pullback(f[c], displacement);
    return out;
}

BoundaryCurve BoundaryCurve::circle(Vec2 center, double radius, int markers) {
    BoundaryCurve c;
    c.points.resize(markers);
    for (int i = 0; i < markers; ++i) {
        const double th = 2.0 * std::numbers::pi * i / markers;
        c.points[i] = {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
    }
    return c;
}

double BoundaryCurve::length() const {
    double L = 0.0;
    const std::size_t m = points.size();
    const std::size_t segs = closed ? m : m - 1;
    for (std::size_t i = 0; i < segs; ++i) L += (points[(i + 1) % m] - points[i]).norm();
    return L;
}

double BoundaryCurve::spacing_ratio() const {
    double lo = kInfinity, hi = 0.0;
    const std::size_t m = points.size();
    const std::size_t segs = closed ? m : m - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        const double d = (points[(i + 1) % m] - points[i]).norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return lo > 0.0 ? hi / lo : kInfinity;
}

std::vector<Vec2> BoundaryCurve::tangents() const {
    const std::size_t m = points.size();
    std::vector<Vec2> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 d;
        if (closed) {
            d = points[(i + 1) % m] - points[(i + m - 1) % m];
        } else if (i == 0) {
            d = points[1] - points[0];
        } else if (i + 1 == m) {
            d = points[m - 1] - points[m - 2];
        } else {
            d = points[i + 1] - points[i - 1];
        }
        const double n = d.norm();
        out[i] = n > 0.0 ? Vec2{d.x / n, d.y / n} : Vec2{0.0, 0.0};
    }
    return out;
}

double BoundaryCurve::c1alpha_seminorm(double alpha, double cutoff_factor) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("c1alpha_seminorm: alpha in (0,1)");
    const std::size_t m = points.size();
    if (m < 4) throw Error("c1alpha_seminorm: too few markers");
    const std::vector<Vec2> tau = tangents();
    std::vector<double> s(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        s[i + 1] = s[i] + (points[(i + 1) % m] - points[i]).norm();
    const double L = closed ? s[m] : s[m - 1];
    const double cutoff = cutoff_factor * L / static_cast<double>(m);
    double sup = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double d = s[j] - s[i];
            if (closed) d = std::min(d, L - d);
            if (d < cutoff) continue;
            const double dtau = (tau[j] - tau[i]).norm();
            sup = std::max(sup, dtau / std::pow(d, alpha));
        }
    return sup;
}

PatchSeries patch_holder(const VelocityTrajectory& traj, const BoundaryCurve& boundary0,
                         double alpha, int substeps, int sample_every,
                         std::vector<std::string>* warnings) {
    if (boundary0.spacing_ratio() > 20.0)
        throw ReseedRequired("patch_holder: marker spacing ratio exceeds 20, reseed required");
    FlowIntegrator::Options opt;
    FlowIntegrator fi(opt);
    const int handle = fi.add_markers(boundary0.points);

    PatchSeries out;
    out.times.push_back(traj.t_begin());
    out.curves.push_back(boundary0);
    out.seminorms.push_back(boundary0.c1alpha_seminorm(alpha));

    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        const double t0 = traj.times[i];
        const double t1 = traj.times[i + 1];
        const double dt = (t1 - t0) / substeps;
        for (int s = 0; s < substeps; ++s) {
            const double ta = t0 + s * dt;
            const VectorField va = (substeps == 1) ? traj.v[i] : traj.at(ta);
            const VectorField vb = (substeps == 1) ? traj.v[i + 1] : traj.at(ta + dt);
            fi.advance(va, vb, ta, dt, warnings);
        }
        if ((i + 1) % static_cast<std::size_t>(sample_every) == 0 || i + 2 == traj.times.size()) {
            BoundaryCurve c;
            c.points = fi.markers(handle);
            if (c.spacing_ratio() > 20.0)
                throw ReseedRequired("patch_holder: marker spacing ratio exceeds 20 at t = " +
                                     std::to_string(t1));
            out.times.push_back(t1);
            out.seminorms.push_back(c.c1alpha_seminorm(alpha));
            out.curves.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace ins::lagr
