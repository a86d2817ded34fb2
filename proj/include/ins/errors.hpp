#pragma once

#include <stdexcept>
#include <string>

namespace ins {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// inv_laplacian applied to a field with nonzero mean
struct MeanViolation : Error {
    using Error::Error;
};

// iterative solve exceeded maxit
struct Nonconvergence : Error {
    double residual = 0.0;
    int iterations = 0;
    Nonconvergence(const std::string& what, double res, int it)
        : Error(what), residual(res), iterations(it) {}
};

// iterative solve expanding over consecutive steps (smallness condition violated)
struct IterationDiverged : Error {
    double expansion = 0.0;
    int iterations = 0;
    IterationDiverged(const std::string& what, double factor, int it)
        : Error(what), expansion(factor), iterations(it) {}
};

// deformation gradient with |det| below threshold
struct SingularMap : Error {
    using Error::Error;
};

// weighted Poincare with M = integral of the weight = 0
struct DegenerateWeight : Error {
    using Error::Error;
};

// Desjardins check with z supported in the vacuum set of rho
struct VacuumSupport : Error {
    using Error::Error;
};

// marker spacing ratio too large for the Holder estimator
struct ReseedRequired : Error {
    using Error::Error;
};

struct ConfigError : Error {
    int line = 0;
    ConfigError(const std::string& what, int line_no) : Error(what), line(line_no) {}
};

}  // namespace ins
