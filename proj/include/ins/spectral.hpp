#pragma once

// Spectral calculus on the unit torus under the convention
//   f(x) = sum_k fhat_k e^{2 pi i k.x},
// so Parseval reads ||f||_2^2 = sum_k |fhat_k|^2 and the appendix weights
// (2 pi |k|) are literal. Real data is held in half-spectra (r2c layout,
// last dimension 0..n/2). First derivatives zero the Nyquist planes; the
// homogeneous H^s sums follow the same convention so that hs_seminorm(f,1)
// equals ||grad f||_2 to round-off for every field.

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "ins/field.hpp"

namespace ins {

class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(Grid g)
        : grid_(g), c_(g.d == 2 ? static_cast<std::size_t>(g.n) * (g.n / 2 + 1)
                                : static_cast<std::size_t>(g.n) * g.n * (g.n / 2 + 1)) {}

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return c_.size(); }
    std::complex<double>* data() { return c_.data(); }
    const std::complex<double>* data() const { return c_.data(); }
    std::complex<double>& operator[](std::size_t i) { return c_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return c_[i]; }

private:
    Grid grid_;
    std::vector<std::complex<double>> c_;
};

// forward transform, coefficients normalized by n^-d
Spectrum forward(const ScalarField& f);
// inverse transform of normalized coefficients (exact round trip)
ScalarField inverse(const Spectrum& s);

// allocation-free variants for hot loops (out must carry the right grid)
void forward_into(const ScalarField& f, Spectrum& out);
void inverse_into(const Spectrum& s, ScalarField& out);

// visit every stored mode: fn(index, k[3] signed wavenumbers, weight)
// weight = 2 for modes whose conjugate partner is not stored, else 1,
// so sum_k |fhat|^2 == weighted sum over stored modes.
void for_each_mode(const Grid& g,
                   const std::function<void(std::size_t, const int*, double)>& fn);

// --- differential operators (exact Fourier symbols) ---

VectorField grad(const ScalarField& f);
ScalarField divergence(const VectorField& v);
// 2D: scalar vorticity dx v_y - dy v_x. 3D: vector curl.
ScalarField curl2d(const VectorField& v);
VectorField curl3d(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
// requires zero-mean input (MeanViolation otherwise); zero-mean output
ScalarField inv_laplacian(const ScalarField& f);
VectorField inv_laplacian(const VectorField& v);

// Helmholtz/Leray: v = v_df + grad_p, div v_df = 0, projection idempotent.
struct LerayParts {
    VectorField divergence_free;
    VectorField gradient_part;
};
LerayParts leray_project(const VectorField& v);

// 2/3-rule: zero modes with |k_alpha| > floor(n/3) in any dimension
void dealias_23(Spectrum& s);
ScalarField dealias_23(const ScalarField& f);
VectorField dealias_23(const VectorField& v);

// f = mean + low (1 <= |k| <= ncut) + high (|k| > ncut), both zero-mean
struct TruncationParts {
    double mean = 0.0;
    ScalarField low;
    ScalarField high;
};
TruncationParts fourier_truncate(const ScalarField& f, int ncut);

// (sum_{k != 0} (2 pi |k|)^{2s} |fhat_k|^2)^{1/2}, Nyquist planes excluded
double hs_seminorm(const ScalarField& f, double s);

// fast spectral norms (agree with lp_norm of the derivative fields)
double grad_l2(const ScalarField& f);
double grad_l2(const VectorField& v);
double hess_l2(const ScalarField& f);   // ||grad^2 f||_2 = |||k|^2-weighted spectrum||
double hess_l2(const VectorField& v);
double div_l2(const VectorField& v);

// sum of |fhat_k|^2 over k != 0 plus the squared mean (Parseval helper)
double spectral_l2_sq(const ScalarField& f);

}  // namespace ins
