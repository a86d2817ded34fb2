#pragma once

// Nodal quadrature norms: sums times h^d, exact for trigonometric
// polynomials below Nyquist; p = infinity is the nodal max.

#include <algorithm>
#include <cmath>
#include <limits>

#include "ins/field.hpp"

namespace ins {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double lp_norm(const ScalarField& f, double p) {
    if (p < 1.0) throw Error("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
        return m;
    }
    const double hv = f.grid().cell_volume();
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * f[i];
    } else if (p == 1.0) {
        for (std::size_t i = 0; i < f.size(); ++i) acc += std::abs(f[i]);
    } else if (p == 4.0) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            double s = f[i] * f[i];
            acc += s * s;
        }
    } else {
        for (std::size_t i = 0; i < f.size(); ++i) acc += std::pow(std::abs(f[i]), p);
    }
    return std::pow(acc * hv, 1.0 / p);
}

// pointwise Euclidean magnitude, then L_p
inline double lp_norm(const VectorField& v, double p) {
    if (p < 1.0) throw Error("lp_norm: p must be >= 1");
    const int d = v.dim();
    auto mag2 = [&](std::size_t i) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += v[a][i] * v[a][i];
        return s;
    };
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.nodes(); ++i) m = std::max(m, mag2(i));
        return std::sqrt(m);
    }
    const double hv = v.grid().cell_volume();
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < v.nodes(); ++i) acc += mag2(i);
    } else {
        for (std::size_t i = 0; i < v.nodes(); ++i) acc += std::pow(mag2(i), 0.5 * p);
    }
    return std::pow(acc * hv, 1.0 / p);
}

inline double integral(const ScalarField& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i];
    return acc * f.grid().cell_volume();
}

inline double inner_l2(const ScalarField& a, const ScalarField& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc * a.grid().cell_volume();
}

inline double inner_l2(const VectorField& a, const VectorField& b) {
    double acc = 0.0;
    for (int c = 0; c < a.dim(); ++c) acc += inner_l2(a[c], b[c]);
    return acc;
}

inline double min_value(const ScalarField& f) {
    double m = f[0];
    for (std::size_t i = 1; i < f.size(); ++i) m = std::min(m, f[i]);
    return m;
}

inline double max_value(const ScalarField& f) {
    double m = f[0];
    for (std::size_t i = 1; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
}

}  // namespace ins
