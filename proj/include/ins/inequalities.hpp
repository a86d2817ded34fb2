#pragma once

// Verification harness for the torus inequalities: the weighted Poincare
// family, the log-interpolation inequality proved by Fourier truncation,
// Ladyzhenskaya ratios, and the fractional time-regularity estimate with its
// explicit constant. Constant-explicit bounds are assertable; "there exists
// C" bounds are fit-and-report.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ins/field.hpp"
#include "ins/random_field.hpp"

namespace ins::ineq {

enum class DensityModel { constant, patch, clipped_random };

struct FieldEnsemble {
    std::uint64_t seed = 1;
    int count = 1000;
    int n = 64;
    double spectrum_decay = 2.0;
    DensityModel density_model = DensityModel::patch;
    double M = 1.0;          // target mean for constant / clipped models
    double rho_star = 1.0;
    double area_min = 0.05;  // patch areas as fraction of the torus
    double area_max = 0.5;
};

struct Sample {
    ScalarField a;  // density-like weight, 0 <= a <= rho_star
    ScalarField z;  // H^1 test function, zero mean
};

// deterministic in (ensemble.seed, index)
Sample sample_random_field(const FieldEnsemble& e, int index);

// ||z||_2 <= (1/M)|int a z| + (1 + ||M-a||_2/M) ||grad z||_2  (constant-explicit)
struct PoincareResult {
    double lhs = 0.0, rhs = 0.0, M = 0.0;
};
PoincareResult weighted_poincare_check(const ScalarField& a, const ScalarField& z);

// ||z||_2 - (1/M)|int a z| vs log^{1/2}(e + ||a-M||_2/M) ||grad z||_2
struct LogPoincareResult {
    double lhs = 0.0, rhs_without_C = 0.0, ratio = 0.0;
    bool skipped = false;  // lhs <= 0 or degenerate rhs
    double M = 0.0;
};
LogPoincareResult log_poincare_check(const ScalarField& a, const ScalarField& z);

// ||z||_4^2 / (||z||_2 ||grad z||_2), d = 2, z nonconstant
double ladyzhenskaya_ratio(const ScalarField& z);

struct DesjardinsResult {
    double lhs = 0.0;        // (int rho z^4)^{1/2}
    double rhs_core = 0.0;   // headline-form right side without constant
    double mean_term = 0.0;  // ||sqrt(rho) z||_2 |mean z| (proof form)
    double ratio_proof_form = 0.0;  // lhs / (rhs_core + mean_term)
    bool counterexample_headline = false;  // lhs > 0 while rhs_core == 0
};
DesjardinsResult desjardins_check(const ScalarField& rho, const ScalarField& z,
                                  double rho_star);

// low/high split bounds; both are exact Cauchy-Schwarz consequences under the
// fixed Fourier convention, so they are assertable sample by sample
struct TruncationBounds {
    double linf_low = 0.0;       // || z~_n ||_inf
    double sqrtlog_bound = 0.0;  // (sum_{1<=|k|<=n} (2pi|k|)^{-2})^{1/2} ||grad z||_2
    double tail_hhalf = 0.0;     // || z~ - z~_n ||_{H^{1/2}}
    double tail_bound = 0.0;     // (2 pi n)^{-1/2} ||grad z||_2
};
TruncationBounds truncation_bounds(const ScalarField& z, int ncut);

// --- fractional time regularity ---

// the explicit constant from the finite-difference proof in its Fubini form
//   (1/(1-2a)) int_0^T int_t^T ((s-t)^{2a-1} - T^{2a-1}) ds/s dt,
// computed by quadrature; C(1/4, 1) = 6 exactly
double fractional_c_alpha(double alpha, double T);
// the underlying triple integral int h^{2a-2} int_0^{T-h} int_t^{t+h} ds/s;
// a lower bound of the Fubini form (which relaxes (T-t)^{2a-1} to T^{2a-1})
double fractional_c_alpha_exact(double alpha, double T);

struct FractionalNormResult {
    double norm = 0.0;       // sqrt(L2 part + seminorm^2)
    double bound_rhs = 0.0;  // sqrt(L2 part + C ||sqrt(t) z_t||^2)
    double seminorm_sq = 0.0;
    double l2_sq = 0.0;
    double weighted_zt_sq = 0.0;
    double c_alpha_T = 0.0;
};

FractionalNormResult fractional_time_norm(const std::vector<double>& times,
                                          const std::vector<ScalarField>& z, double alpha,
                                          double p);
FractionalNormResult fractional_time_norm(const std::vector<double>& times,
                                          const std::vector<VectorField>& z, double alpha,
                                          double p);

// Gauss-Legendre on dyadically refined panels toward the left endpoint;
// handles integrable endpoint singularities
double dyadic_gauss(const std::function<double(double)>& f, double a, double b,
                    int levels = 200);

}  // namespace ins::ineq
