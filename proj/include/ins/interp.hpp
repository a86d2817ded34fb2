#pragma once

// Periodic interpolation on the unit torus (2D). Catmull-Rom for smooth
// fields; the clipped variant limits the result to the range of the four
// surrounding nodes, which is what keeps transported densities inside
// [min, max] of the previous step.

#include <cmath>

#include "ins/field.hpp"

namespace ins {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

namespace detail {

inline void cr_weights(double s, double w[4]) {
    const double s2 = s * s, s3 = s2 * s;
    w[0] = -0.5 * s + s2 - 0.5 * s3;
    w[1] = 1.0 - 2.5 * s2 + 1.5 * s3;
    w[2] = 0.5 * s + 2.0 * s2 - 1.5 * s3;
    w[3] = -0.5 * s2 + 0.5 * s3;
}

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

}  // namespace detail

class Interp2 {
public:
    explicit Interp2(const ScalarField& f) : f_(f), n_(f.grid().n) {
        if (f.grid().d != 2) throw Error("Interp2: 2D grids only");
    }

    double bilinear(double x, double y) const {
        int i0, j0;
        double sx, sy;
        locate(x, y, i0, j0, sx, sy);
        const int i1 = detail::wrap(i0 + 1, n_), j1 = detail::wrap(j0 + 1, n_);
        return (1 - sx) * (1 - sy) * f_.at(i0, j0) + sx * (1 - sy) * f_.at(i1, j0) +
               (1 - sx) * sy * f_.at(i0, j1) + sx * sy * f_.at(i1, j1);
    }

    double catmull_rom(double x, double y) const {
        int i0, j0;
        double sx, sy;
        locate(x, y, i0, j0, sx, sy);
        return cr_eval(i0, j0, sx, sy);
    }

    // Catmull-Rom clipped to the bilinear stencil corner range
    double catmull_rom_clipped(double x, double y) const {
        int i0, j0;
        double sx, sy;
        locate(x, y, i0, j0, sx, sy);
        const double val = cr_eval(i0, j0, sx, sy);
        const int i1 = detail::wrap(i0 + 1, n_), j1 = detail::wrap(j0 + 1, n_);
        double lo = f_.at(i0, j0), hi = lo;
        const double c1 = f_.at(i1, j0), c2 = f_.at(i0, j1), c3 = f_.at(i1, j1);
        lo = std::min(std::min(lo, c1), std::min(c2, c3));
        hi = std::max(std::max(hi, c1), std::max(c2, c3));
        return std::min(std::max(val, lo), hi);
    }

    // Catmull-Rom clipped to the full 4x4 stencil range (looser limiter,
    // still inside the global field range)
    double catmull_rom_clipped16(double x, double y) const {
        int i0, j0;
        double sx, sy;
        locate(x, y, i0, j0, sx, sy);
        double lo = kBig, hi = -kBig;
        double wx[4], wy[4];
        detail::cr_weights(sx, wx);
        detail::cr_weights(sy, wy);
        double out = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int i = detail::wrap(i0 - 1 + a, n_);
            double row = 0.0;
            for (int b = 0; b < 4; ++b) {
                const int j = detail::wrap(j0 - 1 + b, n_);
                const double fv = f_.at(i, j);
                lo = std::min(lo, fv);
                hi = std::max(hi, fv);
                row += wy[b] * fv;
            }
            out += wx[a] * row;
        }
        return std::min(std::max(out, lo), hi);
    }

    static constexpr double kBig = 1e300;

private:
    void locate(double x, double y, int& i0, int& j0, double& sx, double& sy) const {
        const double gx = (x - std::floor(x)) * n_;
        const double gy = (y - std::floor(y)) * n_;
        i0 = static_cast<int>(gx);
        j0 = static_cast<int>(gy);
        sx = gx - i0;
        sy = gy - j0;
        if (i0 >= n_) { i0 = 0; sx = 0.0; }
        if (j0 >= n_) { j0 = 0; sy = 0.0; }
    }

    double cr_eval(int i0, int j0, double sx, double sy) const {
        double wx[4], wy[4];
        detail::cr_weights(sx, wx);
        detail::cr_weights(sy, wy);
        double out = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int i = detail::wrap(i0 - 1 + a, n_);
            double row = 0.0;
            for (int b = 0; b < 4; ++b) {
                const int j = detail::wrap(j0 - 1 + b, n_);
                row += wy[b] * f_.at(i, j);
            }
            out += wx[a] * row;
        }
        return out;
    }

    const ScalarField& f_;
    int n_;
};

inline Vec2 interp_vector(const VectorField& v, double x, double y) {
    Interp2 ix(v[0]), iy(v[1]);
    return {ix.catmull_rom(x, y), iy.catmull_rom(x, y)};
}

}  // namespace ins
