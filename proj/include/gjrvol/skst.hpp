#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace gjrvol {

/// Random engine used across the library. Callers own the state; identical
/// seeds give identical streams.
using Rng = std::mt19937_64;

}  // namespace gjrvol

namespace gjrvol::skst {

/// Shape of the standardized skewed Student-t.
///
/// `xi` > 0 is the Fernandez-Steel skewness (xi^2 is the ratio of the mass
/// above the mode to the mass below it; xi = 1 is symmetric), `nu` > 2 the
/// degrees of freedom. `nu` is real-valued.
struct SkstParams {
    double xi = 1.0;
    double nu = 8.0;

    /// Throws Error(InvalidParams) unless xi > 0, nu > 2 and both finite.
    void validate() const;
};

/// Mean `m` and standard deviation `s` of the unstandardized two-piece
/// density. The standardized variable is z = (x - m) / s.
struct StandardizationConstants {
    double m = 0.0;
    double s = 1.0;
};

StandardizationConstants standardization_constants(const SkstParams& params);

/// Log density of the unit-variance Student-t with `nu` > 2 degrees of freedom.
double student_t_log_density(double x, double nu);
/// CDF of the unit-variance Student-t.
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

double log_density(double z, const SkstParams& params);
double density(double z, const SkstParams& params);
double cdf(double z, const SkstParams& params);
/// Inverse of cdf for p in (0, 1).
double quantile(double p, const SkstParams& params);

/// Location of the mode in standardized coordinates (-m/s); the density
/// switches branch there.
double branch_point(const SkstParams& params);

/// Draws standardized SKST variates with the two-piece construction: with
/// probability xi^2/(1+xi^2) take xi*|T|, otherwise -|T|/xi, where T is a
/// unit-variance Student-t, then standardize.
class Sampler {
public:
    explicit Sampler(const SkstParams& params);

    double operator()(Rng& rng);

    [[nodiscard]] const SkstParams& params() const noexcept { return params_; }
    [[nodiscard]] const StandardizationConstants& constants() const noexcept { return consts_; }

private:
    SkstParams params_;
    StandardizationConstants consts_;
    double upper_prob_;
    double t_scale_;
    std::student_t_distribution<double> student_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::vector<double> sample(Rng& rng, const SkstParams& params, std::size_t n);

}  // namespace gjrvol::skst
