#pragma once

// Fixed-point solver for the twisted divergence equation div(A w) = g with
// g = div R, iterating Phi(v) = grad inv_lap div((Id - A) v + R - mean).
// Time is a parameter: slices are solved independently; the A_t smallness
// quantity only enters the reported problem data.

#include <cstdint>
#include <vector>

#include "ins/field.hpp"
#include "ins/lagrangian.hpp"

namespace ins::twisted {

struct TwistedProblem {
    std::vector<double> times;
    std::vector<Matrix2Field> A;   // det A = 1 within tolerance
    std::vector<VectorField> R;    // g = div R
    double tol = 1e-10;            // successive-iterate L2 distance

    // smallness quantities of the contraction lemma
    double id_minus_A_inf = 0.0;   // sup_t max-node operator norm of Id - A
    double At_l2l6 = 0.0;          // ||A_t||_{L2(0,T;L6)}, finite differences
    double max_det_deviation = 0.0;

    static TwistedProblem build(std::vector<double> times, std::vector<Matrix2Field> A,
                                std::vector<VectorField> R, double tol = 1e-10);
    static TwistedProblem from_flowmap(const lagr::FlowMap& fm, std::vector<VectorField> R,
                                       double tol = 1e-10);
};

struct SliceOutcome {
    int iterations = 0;      // corrective iterations beyond the first application
    bool converged = false;
    bool diverged = false;
    double residual = 0.0;   // ||div(A w) - g||_2 via the independent product form
    double expansion = 0.0;  // measured growth factor when diverged
};

struct TwistedSolution {
    std::vector<VectorField> w;
    std::vector<SliceOutcome> outcomes;
    bool all_converged = true;
};

// throw_on_divergence: raise IterationDiverged / Nonconvergence at the first
// failing slice instead of recording the outcome
TwistedSolution solve_twisted(const TwistedProblem& p, int maxit,
                              bool throw_on_divergence = true);

// max over random field pairs of ||Phi(v2) - Phi(v1)||_X / ||v2 - v1||_X,
// the X norm combining L4(L2), L2(H1) and the L_{4/3}(L_{3/2}) time
// derivative piece
double contraction_estimate(const TwistedProblem& p, int samples, std::uint64_t seed = 7);

// single application of Phi for one slice
VectorField apply_phi(const Matrix2Field& A, const VectorField& R, const VectorField& v);

// per-slice convergence log (iterations, residuals, smallness data) as JSON
std::string convergence_log_json(const TwistedProblem& p, const TwistedSolution& sol);

}  // namespace ins::twisted
