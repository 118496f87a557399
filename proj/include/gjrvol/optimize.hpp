#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace gjrvol::opt {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    double f_tolerance = 1e-8;   // max f(worst) - f(best) at convergence
    double x_tolerance = 1e-6;   // max inf-norm distance of a vertex from the best
    std::size_t max_iterations = 20000;
    std::size_t max_restarts = 4;  // fresh simplex around the incumbent after convergence
    bool record_trace = false;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> trace;  // incumbent best f after each iteration
};

/// Derivative-free simplex minimization (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). The objective may return +inf to reject a
/// point; the start must be finite. `steps` gives the initial edge length
/// per coordinate.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const std::vector<double>& steps,
                             const NelderMeadOptions& options = {});

/// Central-difference Hessian with per-coordinate steps h_i:
///   H_ii = (f(x+h_i) - 2 f(x) + f(x-h_i)) / h_i^2
///   H_ij = (f(++) - f(+-) - f(-+) + f(--)) / (4 h_i h_j)
Eigen::MatrixXd numerical_hessian(const Objective& f, const std::vector<double>& x, const std::vector<double>& steps);

struct CovarianceResult {
    Eigen::MatrixXd covariance;
    bool repaired = false;  // eigenvalues were clipped to make the Hessian positive definite
};

/// Inverse of a symmetric Hessian. Non-positive eigenvalues are clipped to a
/// small positive fraction of the largest one (nearest positive-definite
/// matrix in the Frobenius sense up to that floor). Throws
/// Error(SingularHessian) for non-finite input or no positive eigenvalue.
CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian);

}  // namespace gjrvol::opt
