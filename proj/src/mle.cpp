#include "gjrvol/mle.hpp"

#include "gjrvol/errors.hpp"
#include "gjrvol/montecarlo.hpp"
#include "gjrvol/optimize.hpp"
#include "gjrvol/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gjrvol::mle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Upper wall for nu during optimization; beyond it the likelihood is flat
// to rounding and lgamma differences lose digits.
constexpr double kMaxNu = 500.0;

std::size_t mean_dim(gjr::MeanKind kind) {
    switch (kind) {
        case gjr::MeanKind::Constant: return 1;
        case gjr::MeanKind::AR1: return 2;
        case gjr::MeanKind::ARMA11: return 3;
    }
    return 0;
}

std::size_t dist_dim(DistKind kind) {
    switch (kind) {
        case DistKind::Normal: return 0;
        case DistKind::StudentT: return 1;
        case DistKind::Skst: return 2;
    }
    return 0;
}

double sample_mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_var(std::span<const double> x) {
    const double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size());
}

bool shape_valid(const DistParams& d) {
    switch (d.kind) {
        case DistKind::Normal: return true;
        case DistKind::StudentT: return std::isfinite(d.nu) && d.nu > 2.0;
        case DistKind::Skst: return std::isfinite(d.nu) && d.nu > 2.0 && std::isfinite(d.xi) && d.xi > 0.0;
    }
    return false;
}

bool mean_valid(const gjr::MeanSpec& m) {
    try {
        m.validate();
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

std::string_view to_string(DistKind kind) {
    switch (kind) {
        case DistKind::Normal: return "normal";
        case DistKind::StudentT: return "t";
        case DistKind::Skst: return "skst";
    }
    return "?";
}

DistKind parse_dist_kind(std::string_view name) {
    if (name == "normal" || name == "gaussian") return DistKind::Normal;
    if (name == "t" || name == "student-t" || name == "student_t") return DistKind::StudentT;
    if (name == "skst" || name == "skewed-t") return DistKind::Skst;
    throw Error(ErrorCode::InvalidInput, "unknown distribution '" + std::string(name) + "' (normal, t, skst)");
}

void ModelSpec::validate() const {
    if (q == 0) throw Error(ErrorCode::OrderMismatch, "GJR requires q >= 1");
}

ModelSpec FullParameterVector::spec() const { return {mean.kind, variance.p(), variance.q(), dist.kind}; }

std::vector<std::string> parameter_names(const ModelSpec& spec) {
    std::vector<std::string> names{"mu"};
    if (spec.mean != gjr::MeanKind::Constant) names.emplace_back("phi");
    if (spec.mean == gjr::MeanKind::ARMA11) names.emplace_back("theta");
    names.emplace_back("omega");
    for (std::size_t j = 1; j <= spec.q; ++j) names.push_back("alpha_" + std::to_string(j));
    for (std::size_t i = 1; i <= spec.p; ++i) names.push_back("beta_" + std::to_string(i));
    for (std::size_t j = 1; j <= spec.q; ++j) names.push_back("gamma_" + std::to_string(j));
    if (spec.dist == DistKind::Skst) names.emplace_back("log_xi");
    if (spec.dist != DistKind::Normal) names.emplace_back("nu");
    return names;
}

std::vector<double> pack(const FullParameterVector& theta) {
    const auto spec = theta.spec();
    std::vector<double> v{theta.mean.mu};
    if (spec.mean != gjr::MeanKind::Constant) v.push_back(theta.mean.phi);
    if (spec.mean == gjr::MeanKind::ARMA11) v.push_back(theta.mean.theta);
    v.push_back(theta.variance.omega);
    v.insert(v.end(), theta.variance.alpha.begin(), theta.variance.alpha.end());
    v.insert(v.end(), theta.variance.beta.begin(), theta.variance.beta.end());
    v.insert(v.end(), theta.variance.gamma.begin(), theta.variance.gamma.end());
    if (spec.dist == DistKind::Skst) v.push_back(std::log(theta.dist.xi));
    if (spec.dist != DistKind::Normal) v.push_back(theta.dist.nu);
    return v;
}

FullParameterVector unpack(const ModelSpec& spec, std::span<const double> values) {
    const std::size_t expected = mean_dim(spec.mean) + 1 + 2 * spec.q + spec.p + dist_dim(spec.dist);
    if (values.size() != expected) throw Error(ErrorCode::InvalidInput, "parameter vector has the wrong dimension");
    FullParameterVector out;
    std::size_t k = 0;
    out.mean.kind = spec.mean;
    out.mean.mu = values[k++];
    if (spec.mean != gjr::MeanKind::Constant) out.mean.phi = values[k++];
    if (spec.mean == gjr::MeanKind::ARMA11) out.mean.theta = values[k++];
    out.variance.omega = values[k++];
    out.variance.alpha.assign(values.begin() + k, values.begin() + k + spec.q);
    k += spec.q;
    out.variance.beta.assign(values.begin() + k, values.begin() + k + spec.p);
    k += spec.p;
    out.variance.gamma.assign(values.begin() + k, values.begin() + k + spec.q);
    k += spec.q;
    out.dist.kind = spec.dist;
    out.dist.xi = 1.0;
    out.dist.nu = 0.0;
    if (spec.dist == DistKind::Skst) out.dist.xi = std::exp(values[k++]);
    if (spec.dist != DistKind::Normal) out.dist.nu = values[k++];
    return out;
}

double negative_shock_probability(const DistParams& dist) {
    if (dist.kind != DistKind::Skst || dist.xi == 1.0 || !shape_valid(dist)) return 0.5;
    return skst::cdf(0.0, {dist.xi, dist.nu});
}

LikelihoodEval evaluate_likelihood(const FullParameterVector& theta, std::span<const double> returns,
                                   gjr::VarianceInit::Kind init) {
    LikelihoodEval out;
    auto infeasible = [&] {
        out.value = kInf;
        out.feasible = false;
        return out;
    };
    if (returns.empty()) throw Error(ErrorCode::InvalidInput, "empty return series");
    if (!shape_valid(theta.dist) || !mean_valid(theta.mean)) return infeasible();

    const auto eps = gjr::filter_residuals(returns, theta.mean);
    gjr::VarianceFilterResult var;
    try {
        gjr::VarianceInit rule;
        rule.kind = init;
        rule.negative_share = negative_shock_probability(theta.dist);
        var = gjr::filter_variances(eps, theta.variance, rule);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidInit || e.code() == ErrorCode::InvalidParams) return infeasible();
        throw;
    }
    if (var.failed_at) {
        out.failed_at = var.failed_at;
        return infeasible();
    }

    const double T = static_cast<double>(returns.size());
    double loglik = 0.0;
    if (theta.dist.kind == DistKind::Normal) {
        double acc = 0.0;
        for (std::size_t t = 0; t < eps.size(); ++t) {
            acc += std::log(var.sigma2[t]) + eps[t] * eps[t] / var.sigma2[t];
        }
        loglik = -0.5 * (T * std::log(2.0 * std::numbers::pi) + acc);
    } else {
        const double nu = theta.dist.nu;
        const double xi = theta.dist.kind == DistKind::Skst ? theta.dist.xi : 1.0;
        const auto [m, s] = skst::standardization_constants({xi, nu});
        const double branch = -m / s;
        const double inv_xi2 = 1.0 / (xi * xi);
        const double xi2 = xi * xi;
        const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(std::numbers::pi * (nu - 2.0)) + std::log(2.0 / (xi + 1.0 / xi)) +
                         std::log(s);
        double acc = 0.0;
        for (std::size_t t = 0; t < eps.size(); ++t) {
            const double z = eps[t] / std::sqrt(var.sigma2[t]);
            const double x = s * z + m;
            const double w = z >= branch ? inv_xi2 : xi2;  // xi^(-2 I_t)
            acc += std::log(var.sigma2[t]) + (1.0 + nu) * std::log1p(x * x / (nu - 2.0) * w);
        }
        loglik = T * c - 0.5 * acc;
    }
    if (!std::isfinite(loglik)) return infeasible();
    out.value = -loglik;
    return out;
}

double negative_log_likelihood(const FullParameterVector& theta, std::span<const double> returns,
                               gjr::VarianceInit::Kind init) {
    return evaluate_likelihood(theta, returns, init).value;
}

std::vector<double> parameter_scales(const ModelSpec& spec, std::span<const double> returns) {
    const auto names = parameter_names(spec);
    double var = returns.empty() ? 1.0 : sample_var(returns);
    if (!(var > 0.0) || !std::isfinite(var)) var = 1.0;
    std::vector<double> scales(names.size(), 1.0);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "mu") scales[i] = std::sqrt(var);
        if (names[i] == "omega") scales[i] = var;
    }
    return scales;
}

// ---------------------------------------------------------------------------

ParameterTransform::ParameterTransform(const ModelSpec& spec, gjr::RegimeKind regime, std::vector<double> scales)
    : scales_(std::move(scales)) {
    using gjr::RegimeKind;
    const auto names = parameter_names(spec);
    if (scales_.size() != names.size()) throw Error(ErrorCode::InvalidInput, "scale vector has the wrong dimension");
    kinds_.resize(names.size(), Kind::Scaled);
    partner_.resize(names.size(), 0);

    std::size_t k = 0;
    kinds_[k++] = Kind::Scaled;  // mu
    if (spec.mean != gjr::MeanKind::Constant) kinds_[k++] = Kind::Atanh;
    if (spec.mean == gjr::MeanKind::ARMA11) kinds_[k++] = Kind::Atanh;
    kinds_[k++] = Kind::Log;  // omega
    const std::size_t alpha0 = k;
    for (std::size_t j = 0; j < spec.q; ++j, ++k) {
        switch (regime) {
            case RegimeKind::NonNegative:
            case RegimeKind::Asymmetry:
            case RegimeKind::AsymmetryRelaxed: kinds_[k] = Kind::Log; break;
            case RegimeKind::Leverage: kinds_[k] = j == 0 ? Kind::NegLog : Kind::Scaled; break;
            case RegimeKind::NelsonCaoRelaxed: kinds_[k] = j == 0 ? Kind::Log : Kind::Scaled; break;
        }
    }
    for (std::size_t i = 0; i < spec.p; ++i, ++k) {
        kinds_[k] = (regime == RegimeKind::NelsonCaoRelaxed && i > 0) ? Kind::Scaled : Kind::Log;
    }
    for (std::size_t j = 0; j < spec.q; ++j, ++k) {
        switch (regime) {
            case RegimeKind::NonNegative:
            case RegimeKind::Asymmetry: kinds_[k] = Kind::Log; break;
            case RegimeKind::AsymmetryRelaxed:
            case RegimeKind::Leverage: kinds_[k] = Kind::PairLog; break;
            case RegimeKind::NelsonCaoRelaxed: kinds_[k] = j == 0 ? Kind::PairLog : Kind::Scaled; break;
        }
        partner_[k] = alpha0 + j;
    }
    if (spec.dist == DistKind::Skst) kinds_[k++] = Kind::Scaled;
    if (spec.dist != DistKind::Normal) kinds_[k++] = Kind::NuShift;
}

std::vector<double> ParameterTransform::to_unconstrained(std::span<const double> natural) const {
    if (natural.size() != kinds_.size()) throw Error(ErrorCode::InvalidInput, "parameter vector has the wrong dimension");
    std::vector<double> u(natural.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = natural[i];
        switch (kinds_[i]) {
            case Kind::Scaled: u[i] = x / scales_[i]; break;
            case Kind::Log: u[i] = std::log(x); break;
            case Kind::NegLog: u[i] = std::log(-x); break;
            case Kind::Atanh: u[i] = std::atanh(x); break;
            case Kind::NuShift: u[i] = std::log(x - 2.0); break;
            case Kind::PairLog: u[i] = std::log(natural[partner_[i]] + x); break;
        }
    }
    return u;
}

std::vector<double> ParameterTransform::to_natural(std::span<const double> free) const {
    if (free.size() != kinds_.size()) throw Error(ErrorCode::InvalidInput, "parameter vector has the wrong dimension");
    std::vector<double> x(free.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = free[i];
        switch (kinds_[i]) {
            case Kind::Scaled: x[i] = u * scales_[i]; break;
            case Kind::Log: x[i] = std::exp(u); break;
            case Kind::NegLog: x[i] = -std::exp(u); break;
            case Kind::Atanh: x[i] = std::tanh(u); break;
            case Kind::NuShift: x[i] = 2.0 + std::exp(u); break;
            case Kind::PairLog: break;
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (kinds_[i] == Kind::PairLog) x[i] = std::exp(free[i]) - x[partner_[i]];
    }
    return x;
}

// ---------------------------------------------------------------------------

StdErrorResult hessian_std_errors(const FullParameterVector& theta_hat, std::span<const double> returns,
                                  gjr::VarianceInit::Kind init, const std::vector<bool>& boundary,
                                  BoundaryPolicy policy) {
    const auto spec = theta_hat.spec();
    const auto natural = pack(theta_hat);
    const auto scales = parameter_scales(spec, returns);
    const std::size_t n = natural.size();

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
        const bool on_boundary = i < boundary.size() && boundary[i];
        if (!(policy == BoundaryPolicy::Omit && on_boundary)) active.push_back(i);
    }

    StdErrorResult out;
    out.std_errors.assign(n, std::nullopt);
    out.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (active.empty()) return out;

    std::vector<double> x(active.size()), steps(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
        x[a] = natural[active[a]] / scales[active[a]];
        steps[a] = std::max(1e-5, 1e-4 * std::abs(x[a]));
    }
    const opt::Objective f = [&](const std::vector<double>& y) {
        auto v = natural;
        for (std::size_t a = 0; a < active.size(); ++a) v[active[a]] = y[a] * scales[active[a]];
        return negative_log_likelihood(unpack(spec, v), returns, init);
    };
    const auto h = opt::numerical_hessian(f, x, steps);
    const auto cov = opt::covariance_from_hessian(h);
    out.repaired = cov.repaired;
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = 0; b < active.size(); ++b) {
            const auto i = static_cast<Eigen::Index>(active[a]);
            const auto j = static_cast<Eigen::Index>(active[b]);
            out.covariance(i, j) = cov.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                                   scales[active[a]] * scales[active[b]];
        }
        const double v = out.covariance(static_cast<Eigen::Index>(active[a]), static_cast<Eigen::Index>(active[a]));
        out.std_errors[active[a]] = std::sqrt(std::max(v, 0.0));
    }
    return out;
}

// ---------------------------------------------------------------------------

const ParameterEstimate& FitResult::parameter(std::string_view name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw Error(ErrorCode::InvalidInput, "no parameter named '" + std::string(name) + "'");
}

FullParameterVector heuristic_start(const ModelSpec& spec, const gjr::ConstraintRegime& regime,
                                    std::span<const double> returns) {
    using gjr::RegimeKind;
    FullParameterVector th;
    const double mean = sample_mean(returns);
    const double var = sample_var(returns);
    th.mean.kind = spec.mean;
    th.mean.mu = mean;
    if (spec.mean != gjr::MeanKind::Constant && returns.size() > 2) {
        double num = 0.0;
        for (std::size_t t = 1; t < returns.size(); ++t) num += (returns[t] - mean) * (returns[t - 1] - mean);
        const double rho = var > 0.0 ? num / (var * static_cast<double>(returns.size())) : 0.0;
        th.mean.phi = std::clamp(rho, -0.5, 0.5);
    }

    auto& v = th.variance;
    v.alpha.assign(spec.q, 0.01);
    v.gamma.assign(spec.q, 0.01);
    v.alpha[0] = 0.05;
    v.gamma[0] = 0.05;
    if (regime.kind == RegimeKind::Leverage) {
        v.alpha[0] = -0.02;
        v.gamma[0] = 0.12;
    }
    if (spec.p == 1) v.beta = {0.9};
    if (spec.p >= 2) {
        v.beta.assign(spec.p, 0.01);
        v.beta[0] = 0.9 - 0.01 * static_cast<double>(spec.p - 1);
    }
    const double persistence = std::accumulate(v.alpha.begin(), v.alpha.end(), 0.0) +
                               std::accumulate(v.beta.begin(), v.beta.end(), 0.0) +
                               0.5 * std::accumulate(v.gamma.begin(), v.gamma.end(), 0.0);
    v.omega = (var > 0.0 ? var : 1e-4) * std::max(1.0 - persistence, 0.02);

    th.dist.kind = spec.dist;
    th.dist.xi = 1.0;
    th.dist.nu = spec.dist == DistKind::Normal ? 0.0 : 8.0;
    return th;
}

FitResult fit(std::span<const double> returns, const ModelSpec& spec, const gjr::ConstraintRegime& regime,
              const FitOptions& options) {
    spec.validate();
    if (returns.size() < 10) throw Error(ErrorCode::TooShort, "fit needs at least 10 observations");

    FitResult result;
    result.regime = regime;
    result.init_rule = options.init;
    result.n_obs = returns.size();
    if (returns.size() < 100) result.warnings.emplace_back("fewer than 100 observations");

    const auto names = parameter_names(spec);
    const auto scales = parameter_scales(spec, returns);
    const ParameterTransform transform(spec, regime.kind, scales);

    auto admissible = [&](const FullParameterVector& th) {
        if (th.dist.kind != DistKind::Normal && th.dist.nu > kMaxNu) return false;
        try {
            return gjr::regime_check(th.variance, regime).passed;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InvalidParams) return false;
            throw;
        }
    };
    const opt::Objective objective = [&](const std::vector<double>& u) {
        const auto th = unpack(spec, transform.to_natural(u));
        if (!admissible(th)) return kInf;
        return negative_log_likelihood(th, returns, options.init);
    };

    // Validates regime/order compatibility up front (throws OrderMismatch).
    const auto start = heuristic_start(spec, regime, returns);
    (void)gjr::regime_check(start.variance, regime);

    std::vector<std::vector<double>> starts;
    const auto u0 = transform.to_unconstrained(pack(start));
    const bool u0_finite = std::all_of(u0.begin(), u0.end(), [](double x) { return std::isfinite(x); });
    if (u0_finite && std::isfinite(objective(u0))) starts.push_back(u0);
    const std::size_t n_starts = std::max<std::size_t>(options.multistart, 1);
    for (std::size_t k = 1; k < n_starts && u0_finite; ++k) {
        Rng rng(mc::split_seed(options.seed, 0x5eed, k));
        std::normal_distribution<double> jitter(0.0, 0.5);
        for (int attempt = 0; attempt < 20; ++attempt) {
            auto u = u0;
            for (auto& x : u) x += jitter(rng);
            if (std::isfinite(objective(u))) {
                starts.push_back(std::move(u));
                break;
            }
        }
    }
    if (starts.empty()) throw Error(ErrorCode::NoAdmissibleStart, "no multistart point satisfies the regime");

    opt::NelderMeadOptions nm;
    nm.f_tolerance = options.tolerance;
    nm.x_tolerance = options.x_tolerance;
    nm.max_iterations = options.max_iterations;
    nm.record_trace = options.record_trace;
    const std::vector<double> steps(transform.size(), 0.1);

    std::vector<opt::NelderMeadResult> runs(starts.size());
    parallel_for(starts.size(), std::max(options.threads, 1u),
                 [&](std::size_t k) { runs[k] = opt::nelder_mead(objective, starts[k], steps, nm); });
    std::size_t best = 0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        if (runs[k].f < runs[best].f) best = k;
    }
    const auto& win = runs[best];

    const auto natural = transform.to_natural(win.x);
    result.estimates = unpack(spec, natural);
    result.log_likelihood = -win.f;
    result.converged = win.converged;
    result.iterations = win.iterations;
    result.trace = win.trace;

    if (spec.dist != DistKind::Normal && result.estimates.dist.nu < 5.0) {
        result.warnings.emplace_back("nu < 5: the fourth moment of the innovations does not exist");
    }

    // A coordinate is on the boundary when the Hessian stencil leaves the
    // admissible set in its direction.
    std::vector<bool> boundary(natural.size(), false);
    for (std::size_t i = 0; i < natural.size(); ++i) {
        const double h = scales[i] * std::max(1e-5, 1e-4 * std::abs(natural[i] / scales[i]));
        for (double sign : {-1.0, 1.0}) {
            auto v = natural;
            v[i] += sign * h;
            const auto th = unpack(spec, v);
            if (!admissible(th) || !shape_valid(th.dist) || !mean_valid(th.mean)) boundary[i] = true;
        }
    }

    std::vector<std::optional<double>> se(natural.size());
    try {
        auto errs = hessian_std_errors(result.estimates, returns, options.init, boundary, options.boundary_policy);
        se = std::move(errs.std_errors);
        result.covariance = std::move(errs.covariance);
        result.hessian_repaired = errs.repaired;
        if (errs.repaired) result.warnings.emplace_back("Hessian was not positive definite and was repaired");
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularHessian) throw;
        result.warnings.emplace_back(std::string("standard errors unavailable: ") + e.what());
    }

    for (std::size_t i = 0; i < natural.size(); ++i) {
        ParameterEstimate p;
        p.name = names[i];
        p.estimate = natural[i];
        p.std_error = se[i];
        p.at_boundary = boundary[i];
        if (se[i] && *se[i] > 0.0) {
            p.t_stat = natural[i] / *se[i];
            p.significant = std::abs(*p.t_stat) > 1.96;
        }
        result.parameters.push_back(std::move(p));
    }
    return result;
}

}  // namespace gjrvol::mle
