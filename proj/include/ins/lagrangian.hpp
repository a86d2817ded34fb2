#pragma once

// Flow-map integration on label grids and marker sets, deformation gradients
// with their Neumann-series inverses, Lagrangian differential operators, and
// the density-patch boundary tracking with its C^{1,alpha} estimator.

#include <string>
#include <vector>

#include "ins/field.hpp"
#include "ins/interp.hpp"
#include "ins/spectral.hpp"

namespace ins::lagr {

// time-ordered velocity slices, linearly interpolated in time
struct VelocityTrajectory {
    std::vector<double> times;
    std::vector<VectorField> v;

    void push(double t, VectorField field) {
        times.push_back(t);
        v.push_back(std::move(field));
    }
    VectorField at(double t) const;
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }
};

struct FlowSample {
    double t = 0.0;
    VectorField displacement;  // X - y on the label grid (periodic in y)
    Matrix2Field gradX;
    Matrix2Field A;               // (grad X)^{-1}, exact nodal inverse
    double int_grad_u_inf = 0.0;  // int_0^t || grad_y u ||_inf
};

struct FlowMap {
    Grid labels;
    std::vector<FlowSample> samples;
};

class FlowIntegrator {
public:
    struct Options {
        bool track_labels = false;
        Grid label_grid{};
        bool accuracy_check = false;   // step-halving estimator on markers
        double accuracy_tol = 1e-8;
    };

    explicit FlowIntegrator(Options opt);

    int add_markers(std::vector<Vec2> pts);
    const std::vector<Vec2>& markers(int handle) const { return marker_sets_[handle]; }

    // RK4 from t0 to t0+dt, velocity linear in time between the two slices
    void advance(const VectorField& v_begin, const VectorField& v_end, double t0, double dt,
                 std::vector<std::string>* warnings = nullptr);

    double time() const { return t_; }
    bool has_labels() const { return opt_.track_labels; }
    const VectorField& displacement() const { return disp_; }
    const Matrix2Field& gradX() const { return gradX_; }
    double int_grad_u_inf() const { return int_grad_u_inf_; }
    FlowSample label_sample() const;

private:
    Options opt_;
    double t_ = 0.0;
    std::vector<std::vector<Vec2>> marker_sets_;
    std::vector<Vec2> label_pos_;  // unwrapped label positions
    VectorField disp_;
    Matrix2Field gradX_;
    double int_grad_u_inf_ = 0.0;
    double prev_grad_u_inf_ = -1.0;
};

// integrate d X/dt = v(t, X), X(0) = y on a label grid, sampling every
// `sample_every` trajectory intervals; substeps subdivide each interval
FlowMap integrate_flow(const VelocityTrajectory& traj, Grid labels, int substeps = 1,
                       int sample_every = 1, std::vector<std::string>* warnings = nullptr);

struct DeformationInverse {
    Matrix2Field A_direct;
    Matrix2Field A_neumann;
    double series_error = 0.0;  // max node, max entry difference
};

// A = (grad X)^{-1} exactly and as the K-term alternating Neumann series in
// (grad X - Id); SingularMap if |det grad X| < 1e-8 anywhere
DeformationInverse deformation_inverse(const Matrix2Field& gradX, int terms);

// transformed operators for the coordinate change with matrix A:
//   grad_u z = A^T grad z (scalar z)
//   div_u  z = sum_ij A_ij d_i z_j (vector z)
//   div(Az)  = divergence of the nodal product A z
VectorField lagrangian_grad(const Matrix2Field& A, const ScalarField& z);
ScalarField twisted_divergence(const Matrix2Field& A, const VectorField& z);
ScalarField div_of_Az(const Matrix2Field& A, const VectorField& z);

// compose a field with X = y + displacement (Catmull-Rom)
ScalarField pullback(const ScalarField& f, const VectorField& displacement);
VectorField pullback(const VectorField& f, const VectorField& displacement);

struct BoundaryCurve {
    std::vector<Vec2> points;  // polyline, unwrapped
    bool closed = true;

    static BoundaryCurve circle(Vec2 center, double radius, int markers);
    std::size_t size() const { return points.size(); }
    double length() const;
    double spacing_ratio() const;  // max/min neighbor spacing
    std::vector<Vec2> tangents() const;  // arc-length central differences
    // sup over marker pairs of |tau(s) - tau(s')| / dist(s,s')^alpha with a
    // minimum separation of cutoff_factor * mean spacing
    double c1alpha_seminorm(double alpha, double cutoff_factor = 2.0) const;
};

struct PatchSeries {
    std::vector<double> times;
    std::vector<BoundaryCurve> curves;
    std::vector<double> seminorms;
};

PatchSeries patch_holder(const VelocityTrajectory& traj, const BoundaryCurve& boundary0,
                         double alpha, int substeps = 1, int sample_every = 1,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace ins::lagr
