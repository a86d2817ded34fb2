#pragma once

// Periodic grid sample containers for the unit torus [0,1)^d.
// Layout is x-major: 2D index = ix*n + iy, 3D index = (ix*n + iy)*n + iz,
// matching the row-major convention FFTW expects.

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "ins/errors.hpp"

namespace ins {

struct Grid {
    int n = 0;  // points per dimension, power of two, >= 8
    int d = 2;  // 2 for the simulation; 2 or 3 for pure-field operations

    double h() const { return 1.0 / n; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }
    double cell_volume() const { return std::pow(h(), d); }

    bool operator==(const Grid& o) const { return n == o.n && d == o.d; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

    static bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

    void validate() const {
        if (d != 2 && d != 3) throw Error("Grid: dimension must be 2 or 3");
        if (n < 8 || !power_of_two(n)) throw Error("Grid: n must be a power of two >= 8");
    }
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(Grid g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {
        grid_.validate();
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    double& at(int ix, int iy) {
        return v_[static_cast<std::size_t>(ix) * grid_.n + iy];
    }
    double at(int ix, int iy) const {
        return v_[static_cast<std::size_t>(ix) * grid_.n + iy];
    }
    double& at(int ix, int iy, int iz) {
        return v_[(static_cast<std::size_t>(ix) * grid_.n + iy) * grid_.n + iz];
    }
    double at(int ix, int iy, int iz) const {
        return v_[(static_cast<std::size_t>(ix) * grid_.n + iy) * grid_.n + iz];
    }

    // evaluate f at every node: f(x, y) in 2D, f(x, y, z) in 3D
    template <class F>
    static ScalarField sample(Grid g, F&& f) {
        ScalarField out(g);
        const double h = g.h();
        if constexpr (std::is_invocable_v<F, double, double>) {
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) out.at(i, j) = f(i * h, j * h);
        } else {
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j)
                    for (int k = 0; k < g.n; ++k) out.at(i, j, k) = f(i * h, j * h, k * h);
        }
        return out;
    }

    ScalarField& operator+=(const ScalarField& o) {
        assert(grid_ == o.grid_);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        assert(grid_ == o.grid_);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    ScalarField& operator*=(double c) {
        for (auto& x : v_) x *= c;
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double c, ScalarField a) { return a *= c; }

private:
    Grid grid_;
    std::vector<double> v_;
};

inline double mean(const ScalarField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
    return s / static_cast<double>(f.size());
}

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
    assert(a.grid() == b.grid());
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(Grid g, double fill = 0.0) {
        comps_.reserve(g.d);
        for (int c = 0; c < g.d; ++c) comps_.emplace_back(g, fill);
    }
    explicit VectorField(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
        for (const auto& c : comps_)
            if (c.grid() != comps_.front().grid()) throw Error("VectorField: mixed grids");
    }

    const Grid& grid() const { return comps_.front().grid(); }
    int dim() const { return static_cast<int>(comps_.size()); }
    std::size_t nodes() const { return comps_.front().size(); }

    ScalarField& operator[](int c) { return comps_[c]; }
    const ScalarField& operator[](int c) const { return comps_[c]; }

    VectorField& operator+=(const VectorField& o) {
        for (int c = 0; c < dim(); ++c) comps_[c] += o.comps_[c];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int c = 0; c < dim(); ++c) comps_[c] -= o.comps_[c];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (auto& c : comps_) c *= s;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

private:
    std::vector<ScalarField> comps_;
};

// 2x2 matrix field on a shared grid (deformation gradients, coordinate changes)
class Matrix2Field {
public:
    Matrix2Field() = default;
    explicit Matrix2Field(Grid g) {
        if (g.d != 2) throw Error("Matrix2Field: 2D grids only");
        for (auto& row : m_)
            for (auto& e : row) e = ScalarField(g);
    }

    static Matrix2Field identity(Grid g) {
        Matrix2Field A(g);
        for (std::size_t i = 0; i < A.m_[0][0].size(); ++i) {
            A.m_[0][0][i] = 1.0;
            A.m_[1][1][i] = 1.0;
        }
        return A;
    }

    const Grid& grid() const { return m_[0][0].grid(); }
    std::size_t nodes() const { return m_[0][0].size(); }

    ScalarField& operator()(int i, int j) { return m_[i][j]; }
    const ScalarField& operator()(int i, int j) const { return m_[i][j]; }

    ScalarField det() const {
        ScalarField out(grid());
        for (std::size_t i = 0; i < nodes(); ++i)
            out[i] = m_[0][0][i] * m_[1][1][i] - m_[0][1][i] * m_[1][0][i];
        return out;
    }

    // pointwise spectral norm (largest singular value)
    double max_op_norm() const;

private:
    std::array<std::array<ScalarField, 2>, 2> m_{};
};

inline double matrix2_op_norm(double a, double b, double c, double d) {
    // singular values of [[a,b],[c,d]]: sigma^2 = (q + sqrt(q^2 - 4 det^2))/2
    const double q = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    double disc = q * q - 4.0 * det * det;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (q + std::sqrt(disc)));
}

inline double Matrix2Field::max_op_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < nodes(); ++i)
        m = std::max(m, matrix2_op_norm(m_[0][0][i], m_[0][1][i], m_[1][0][i], m_[1][1][i]));
    return m;
}

}  // namespace ins
