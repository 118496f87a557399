#pragma once

#include "gjrvol/gjr.hpp"
#include "gjrvol/skst.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gjrvol::mle {

enum class DistKind { Normal, StudentT, Skst };

std::string_view to_string(DistKind kind);
/// "normal", "t" (or "student-t"), "skst". Throws Error(InvalidInput).
DistKind parse_dist_kind(std::string_view name);

/// Dimension-determining choices of a model.
struct ModelSpec {
    gjr::MeanKind mean = gjr::MeanKind::AR1;
    std::size_t p = 1;
    std::size_t q = 1;
    DistKind dist = DistKind::Skst;

    /// Throws Error(OrderMismatch) for q == 0.
    void validate() const;
};

/// Innovation shape: xi is used only by Skst, nu by StudentT and Skst.
struct DistParams {
    DistKind kind = DistKind::Skst;
    double xi = 1.0;
    double nu = 8.0;
};

/// Mean, variance and distribution parameters of one model.
struct FullParameterVector {
    gjr::MeanSpec mean;
    gjr::GjrParams variance;
    DistParams dist;

    [[nodiscard]] ModelSpec spec() const;
};

/// Parameter names in packing order: mu, [phi], [theta], omega, alpha_j,
/// beta_i, gamma_j, [log_xi], [nu].
std::vector<std::string> parameter_names(const ModelSpec& spec);

/// Flattens to the packing order above (xi enters as log xi).
std::vector<double> pack(const FullParameterVector& theta);
FullParameterVector unpack(const ModelSpec& spec, std::span<const double> values);

/// Pr(z < 0) for the innovation distribution; 0.5 unless skewed.
double negative_shock_probability(const DistParams& dist);

struct LikelihoodEval {
    double value = 0.0;  // negative log-likelihood, +inf if infeasible
    bool feasible = true;
    std::optional<std::size_t> failed_at;  // first non-positive sigma^2
};

/// -log L of the mean + GJR + innovation model. For SKST:
///   L = C - 0.5 sum_t { log sigma_t^2 + (1 + nu) log[1 + (s z_t + m)^2/(nu - 2) xi^(-2 I_t)] }
///   C = T { lnG((nu+1)/2) - lnG(nu/2) - 0.5 log(pi (nu - 2)) + log(2/(xi + 1/xi)) + log s }
/// with I_t = +1 if z_t >= -m/s, else -1. Student-t is the xi = 1 case;
/// Normal is the Gaussian likelihood. Infeasible inputs (non-positive
/// variance, invalid shape or mean) give +inf rather than throwing.
LikelihoodEval evaluate_likelihood(const FullParameterVector& theta, std::span<const double> returns,
                                   gjr::VarianceInit::Kind init = gjr::VarianceInit::Kind::SampleVariance);
double negative_log_likelihood(const FullParameterVector& theta, std::span<const double> returns,
                               gjr::VarianceInit::Kind init = gjr::VarianceInit::Kind::SampleVariance);

/// Per-coordinate scale used to make parameters unit-free: sd(r) for mu,
/// var(r) for omega, 1 otherwise.
std::vector<double> parameter_scales(const ModelSpec& spec, std::span<const double> returns);

/// Maps the regime-admissible parameter set to unconstrained coordinates:
/// log for strictly positive quantities, atanh for |phi|, |theta| < 1,
/// log(nu - 2) for nu, and (alpha, alpha + gamma) pairs where the regime
/// bounds alpha + gamma from below. Remaining coordinates are scaled
/// identities and are policed by regime_check.
class ParameterTransform {
public:
    ParameterTransform(const ModelSpec& spec, gjr::RegimeKind regime, std::vector<double> scales);

    [[nodiscard]] std::vector<double> to_unconstrained(std::span<const double> natural) const;
    [[nodiscard]] std::vector<double> to_natural(std::span<const double> free) const;
    [[nodiscard]] std::size_t size() const noexcept { return kinds_.size(); }

private:
    enum class Kind { Scaled, Log, NegLog, Atanh, NuShift, PairLog };

    std::vector<Kind> kinds_;
    std::vector<double> scales_;
    std::vector<std::size_t> partner_;  // alpha index for PairLog gamma coordinates
};

enum class BoundaryPolicy {
    Report,  // boundary coordinates keep their unconstrained-Hessian standard errors
    Omit,    // boundary coordinates are held fixed and get no standard error
};

struct StdErrorResult {
    Eigen::MatrixXd covariance;  // natural coordinates; rows of omitted coordinates are zero
    std::vector<std::optional<double>> std_errors;
    bool repaired = false;
};

/// Central-difference Hessian of the negative log-likelihood with step
/// h_i = max(1e-5, 1e-4 |theta_i|) on the scaled coordinates theta_i / scale_i,
/// inverted to a covariance and mapped back to natural units. Coordinates
/// flagged in `boundary` are dropped under BoundaryPolicy::Omit.
/// Throws Error(SingularHessian).
StdErrorResult hessian_std_errors(const FullParameterVector& theta_hat, std::span<const double> returns,
                                  gjr::VarianceInit::Kind init, const std::vector<bool>& boundary = {},
                                  BoundaryPolicy policy = BoundaryPolicy::Report);

struct FitOptions {
    double tolerance = 1e-8;
    double x_tolerance = 1e-6;
    std::size_t max_iterations = 20000;
    std::size_t multistart = 5;
    gjr::VarianceInit::Kind init = gjr::VarianceInit::Kind::SampleVariance;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    BoundaryPolicy boundary_policy = BoundaryPolicy::Report;
    bool record_trace = false;
};

struct ParameterEstimate {
    std::string name;
    double estimate = 0.0;
    std::optional<double> std_error;
    std::optional<double> t_stat;
    bool significant = false;  // |t| > 1.96
    bool at_boundary = false;
};

struct FitResult {
    FullParameterVector estimates;
    std::vector<ParameterEstimate> parameters;
    double log_likelihood = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t n_obs = 0;
    gjr::ConstraintRegime regime;
    gjr::VarianceInit::Kind init_rule = gjr::VarianceInit::Kind::SampleVariance;
    std::optional<Eigen::MatrixXd> covariance;
    bool hessian_repaired = false;
    std::vector<std::string> warnings;
    std::vector<double> trace;  // incumbent negative log-likelihood per iteration (winning start)

    [[nodiscard]] const ParameterEstimate& parameter(std::string_view name) const;
};

/// Starting point: alpha = 0.05, beta = 0.9, gamma = 0.05 projected into the
/// regime, omega matched to the sample variance.
FullParameterVector heuristic_start(const ModelSpec& spec, const gjr::ConstraintRegime& regime,
                                    std::span<const double> returns);

/// Maximum-likelihood fit under a constraint regime with a multistart
/// Nelder-Mead search on transformed coordinates. Throws
/// Error(NoAdmissibleStart) when no start is feasible and Error(TooShort)
/// below 10 observations. A singular Hessian leaves standard errors empty.
FitResult fit(std::span<const double> returns, const ModelSpec& spec, const gjr::ConstraintRegime& regime,
              const FitOptions& options = {});

}  // namespace gjrvol::mle
