#include "gjrvol/skst.hpp"

#include "gjrvol/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>

namespace gjrvol::skst {

namespace {

// E|T| for the unit-variance Student-t.
double abs_first_moment(double nu) {
    return std::exp(std::lgamma(0.5 * (nu - 1.0)) - std::lgamma(0.5 * nu)) * std::sqrt(nu - 2.0) /
           std::sqrt(std::numbers::pi);
}

// Converts a unit-variance t coordinate to the classical t coordinate.
double to_classical(double x, double nu) { return x * std::sqrt(nu / (nu - 2.0)); }

}  // namespace

void SkstParams::validate() const {
    if (!std::isfinite(xi) || !std::isfinite(nu) || xi <= 0.0 || nu <= 2.0) {
        throw Error(ErrorCode::InvalidParams, "SKST requires xi > 0 and nu > 2");
    }
}

StandardizationConstants standardization_constants(const SkstParams& params) {
    params.validate();
    if (params.xi == 1.0) return {0.0, 1.0};
    const double xi = params.xi;
    const double m = abs_first_moment(params.nu) * (xi - 1.0 / xi);
    const double s2 = xi * xi + 1.0 / (xi * xi) - 1.0 - m * m;
    return {m, std::sqrt(s2)};
}

double student_t_log_density(double x, double nu) {
    if (!(nu > 2.0)) throw Error(ErrorCode::InvalidParams, "Student-t requires nu > 2");
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(std::numbers::pi * (nu - 2.0)) -
           0.5 * (nu + 1.0) * std::log1p(x * x / (nu - 2.0));
}

double student_t_cdf(double x, double nu) {
    if (!(nu > 2.0)) throw Error(ErrorCode::InvalidParams, "Student-t requires nu > 2");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const boost::math::students_t_distribution<double> dist(nu);
    const double c = to_classical(x, nu);
    return c < 0 ? boost::math::cdf(dist, c) : 1.0 - boost::math::cdf(boost::math::complement(dist, c));
}

double student_t_quantile(double p, double nu) {
    const boost::math::students_t_distribution<double> dist(nu);
    return boost::math::quantile(dist, p) * std::sqrt((nu - 2.0) / nu);
}

double branch_point(const SkstParams& params) {
    const auto c = standardization_constants(params);
    return -c.m / c.s;
}

double log_density(double z, const SkstParams& params) {
    const auto [m, s] = standardization_constants(params);
    const double xi = params.xi;
    const double x = s * z + m;
    const double arg = (z < -m / s) ? xi * x : x / xi;
    return std::log(2.0 / (xi + 1.0 / xi)) + std::log(s) + student_t_log_density(arg, params.nu);
}

double density(double z, const SkstParams& params) { return std::exp(log_density(z, params)); }

double cdf(double z, const SkstParams& params) {
    const auto [m, s] = standardization_constants(params);
    if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
    const double xi = params.xi;
    const double xi2 = xi * xi;
    const double x = s * z + m;
    if (x < 0.0) return 2.0 / (1.0 + xi2) * student_t_cdf(xi * x, params.nu);
    const double upper_tail = 1.0 - student_t_cdf(x / xi, params.nu);
    return 1.0 - 2.0 * xi2 / (1.0 + xi2) * upper_tail;
}

double quantile(double p, const SkstParams& params) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidInput, "quantile requires p in (0, 1)");
    const auto [m, s] = standardization_constants(params);
    const double xi = params.xi;
    const double xi2 = xi * xi;
    const double lower_mass = 1.0 / (1.0 + xi2);
    double x = 0.0;
    if (p < lower_mass) {
        x = student_t_quantile(0.5 * p * (1.0 + xi2), params.nu) / xi;
    } else {
        x = xi * student_t_quantile(0.5 + 0.5 * (p - lower_mass) * (1.0 + xi2) / xi2, params.nu);
    }
    return (x - m) / s;
}

Sampler::Sampler(const SkstParams& params)
    : params_(params),
      consts_(standardization_constants(params)),
      upper_prob_(params.xi * params.xi / (1.0 + params.xi * params.xi)),
      t_scale_(std::sqrt((params.nu - 2.0) / params.nu)),
      student_(params.nu) {}

double Sampler::operator()(Rng& rng) {
    const double t = std::abs(student_(rng)) * t_scale_;
    const double x = uniform_(rng) < upper_prob_ ? params_.xi * t : -t / params_.xi;
    return (x - consts_.m) / consts_.s;
}

std::vector<double> sample(Rng& rng, const SkstParams& params, std::size_t n) {
    Sampler draw(params);
    std::vector<double> out(n);
    for (auto& v : out) v = draw(rng);
    return out;
}

}  // namespace gjrvol::skst
