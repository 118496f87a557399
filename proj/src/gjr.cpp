#include "gjrvol/gjr.hpp"

#include "gjrvol/errors.hpp"
#include "gjrvol/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace gjrvol::gjr {

namespace {

std::string normalize_name(std::string_view name) {
    std::string out(name);
    for (auto& c : out) {
        if (c == '_') c = '-';
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double sum(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

// Unicode subscript for lag j, or nothing when the order is 1.
std::string lag(std::size_t j, std::size_t order) {
    if (order <= 1) return "";
    static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
    if (j < 10) return digits[j];
    return "_" + std::to_string(j);
}

// Collects violated inequalities; strictness is encoded by the method.
class Checker {
public:
    void gt(std::string name, double lhs, double bound) { check(lhs > bound, std::move(name), lhs, bound); }
    void ge(std::string name, double lhs, double bound) { check(lhs >= bound, std::move(name), lhs, bound); }
    void lt(std::string name, double lhs, double bound) { check(lhs < bound, std::move(name), lhs, bound); }

    void merge(const ConstraintReport& other, const std::string& prefix = {}) {
        for (const auto& v : other.violations) report_.violations.push_back({prefix + v.name, v.lhs, v.bound});
        report_.passed = report_.violations.empty();
    }

    ConstraintReport take() {
        report_.passed = report_.violations.empty();
        return std::move(report_);
    }

private:
    void check(bool ok, std::string name, double lhs, double bound) {
        if (!ok) report_.violations.push_back({std::move(name), lhs, bound});
        report_.passed = report_.violations.empty();
    }

    ConstraintReport report_;
};

// alpha + gamma, evaluated exactly as the variance recursion does.
double negative_shock_coef(double alpha, double gamma) { return alpha + gamma; }

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(MeanKind kind) {
    switch (kind) {
        case MeanKind::Constant: return "constant";
        case MeanKind::AR1: return "ar1";
        case MeanKind::ARMA11: return "arma11";
    }
    return "?";
}

MeanKind parse_mean_kind(std::string_view name) {
    const auto n = normalize_name(name);
    if (n == "constant") return MeanKind::Constant;
    if (n == "ar1") return MeanKind::AR1;
    if (n == "arma11") return MeanKind::ARMA11;
    throw Error(ErrorCode::InvalidInput, "unknown mean variant '" + std::string(name) + "' (constant, ar1, arma11)");
}

void MeanSpec::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(phi) || !std::isfinite(theta)) {
        throw Error(ErrorCode::InvalidMeanSpec, "mean coefficients must be finite");
    }
    if (kind == MeanKind::Constant && (phi != 0.0 || theta != 0.0)) {
        throw Error(ErrorCode::InvalidMeanSpec, "constant mean carries no phi/theta");
    }
    if (kind == MeanKind::AR1 && theta != 0.0) throw Error(ErrorCode::InvalidMeanSpec, "AR(1) mean carries no theta");
    if (std::abs(phi) >= 1.0) throw Error(ErrorCode::InvalidMeanSpec, "|phi| must be < 1");
    if (std::abs(theta) >= 1.0) throw Error(ErrorCode::InvalidMeanSpec, "|theta| must be < 1");
}

std::vector<double> filter_residuals(std::span<const double> returns, const MeanSpec& mean) {
    mean.validate();
    if (returns.empty()) throw Error(ErrorCode::InvalidInput, "empty return series");
    std::vector<double> eps(returns.size());
    double r_prev = 0.0;
    double e_prev = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double e = returns[t] - mean.mu - mean.phi * r_prev - mean.theta * e_prev;
        eps[t] = e;
        r_prev = returns[t];
        e_prev = e;
    }
    return eps;
}

// ---------------------------------------------------------------------------

void GjrParams::validate() const {
    if (alpha.empty()) throw Error(ErrorCode::OrderMismatch, "GJR requires q >= 1");
    if (gamma.size() != alpha.size()) throw Error(ErrorCode::OrderMismatch, "alpha and gamma need the same length");
    if (!std::isfinite(omega) || !all_finite(alpha) || !all_finite(beta) || !all_finite(gamma)) {
        throw Error(ErrorCode::InvalidParams, "GJR parameters must be finite");
    }
}

std::string_view to_string(VarianceInit::Kind kind) {
    switch (kind) {
        case VarianceInit::Kind::SampleVariance: return "sample_variance";
        case VarianceInit::Kind::Unconditional: return "unconditional";
        case VarianceInit::Kind::Fixed: return "fixed";
    }
    return "?";
}

VarianceInit::Kind parse_init_kind(std::string_view name) {
    const auto n = normalize_name(name);
    if (n == "sample-variance" || n == "sample") return VarianceInit::Kind::SampleVariance;
    if (n == "unconditional") return VarianceInit::Kind::Unconditional;
    throw Error(ErrorCode::InvalidInput, "unknown init rule '" + std::string(name) + "' (sample_variance, unconditional)");
}

std::optional<double> unconditional_variance(const GjrParams& params, double kappa) {
    const double denom = 1.0 - sum(params.alpha) - sum(params.beta) - kappa * sum(params.gamma);
    if (!(denom > 0.0)) return std::nullopt;
    return params.omega / denom;
}

double presample_variance(std::span<const double> residuals, const GjrParams& params, const VarianceInit& init) {
    double value = 0.0;
    switch (init.kind) {
        case VarianceInit::Kind::SampleVariance: {
            if (residuals.empty()) throw Error(ErrorCode::InvalidInit, "sample variance of an empty series");
            double ss = 0.0;
            for (double e : residuals) ss += e * e;
            value = ss / static_cast<double>(residuals.size());
            break;
        }
        case VarianceInit::Kind::Unconditional: {
            const auto v = unconditional_variance(params, init.negative_share);
            if (!v) throw Error(ErrorCode::InvalidInit, "unconditional variance denominator is not positive");
            value = *v;
            break;
        }
        case VarianceInit::Kind::Fixed:
            value = init.sigma2;
            if (init.presample_eps.size() > params.q()) {
                throw Error(ErrorCode::InvalidInit, "more presample residuals than ARCH lags");
            }
            break;
    }
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw Error(ErrorCode::InvalidInit, "presample variance must be finite and positive");
    }
    return value;
}

VarianceRecursion::VarianceRecursion(const GjrParams& params, double presample_sigma2, double kappa,
                                     std::span<const double> presample_eps)
    : params_(params),
      sigma2_(params.p(), presample_sigma2),
      eps2_(params.q(), presample_sigma2),
      neg_(params.q(), kappa) {
    for (std::size_t j = 0; j < presample_eps.size() && j < eps2_.size(); ++j) {
        eps2_[j] = presample_eps[j] * presample_eps[j];
        neg_[j] = presample_eps[j] < 0.0 ? 1.0 : 0.0;
    }
}

double VarianceRecursion::next() const noexcept {
    double s = params_.omega;
    for (std::size_t i = 0; i < sigma2_.size(); ++i) s += params_.beta[i] * sigma2_[i];
    for (std::size_t j = 0; j < eps2_.size(); ++j) {
        const double a = params_.alpha[j];
        const double g = params_.gamma[j];
        double coef = a;
        if (neg_[j] == 1.0) {
            coef = negative_shock_coef(a, g);
        } else if (neg_[j] != 0.0) {
            coef = a + neg_[j] * g;
        }
        s += coef * eps2_[j];
    }
    return s;
}

void VarianceRecursion::push(double sigma2, double eps) noexcept {
    if (!sigma2_.empty()) {
        std::copy_backward(sigma2_.begin(), sigma2_.end() - 1, sigma2_.end());
        sigma2_.front() = sigma2;
    }
    std::copy_backward(eps2_.begin(), eps2_.end() - 1, eps2_.end());
    std::copy_backward(neg_.begin(), neg_.end() - 1, neg_.end());
    eps2_.front() = eps * eps;
    // strict indicator: a zero residual counts as non-negative
    neg_.front() = eps < 0.0 ? 1.0 : 0.0;
}

VarianceFilterResult filter_variances(std::span<const double> residuals, const GjrParams& params,
                                      const VarianceInit& init) {
    params.validate();
    if (residuals.empty()) throw Error(ErrorCode::InvalidInput, "empty residual series");
    const double s0 = presample_variance(residuals, params, init);
    VarianceRecursion rec(params, s0, init.negative_share, init.presample_eps);

    VarianceFilterResult out;
    out.sigma2.reserve(residuals.size());
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        const double s = rec.next();
        if (!(s > 0.0)) {
            out.failed_at = t;
            out.failed_value = s;
            return out;
        }
        out.sigma2.push_back(s);
        rec.push(s, residuals[t]);
    }
    return out;
}

std::vector<double> conditional_variances(std::span<const double> residuals, const GjrParams& params,
                                          const VarianceInit& init) {
    auto res = filter_variances(residuals, params, init);
    if (res.failed_at) throw NonPositiveVarianceError(*res.failed_at, res.failed_value);
    return std::move(res.sigma2);
}

// ---------------------------------------------------------------------------

std::string_view to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::NonNegative: return "nonnegative";
        case RegimeKind::Asymmetry: return "asymmetry";
        case RegimeKind::AsymmetryRelaxed: return "asymmetry-relaxed";
        case RegimeKind::Leverage: return "leverage";
        case RegimeKind::NelsonCaoRelaxed: return "nelson-cao";
    }
    return "?";
}

std::vector<std::string> regime_names() {
    return {"nonnegative", "asymmetry", "asymmetry-relaxed", "leverage", "nelson-cao"};
}

RegimeKind parse_regime_kind(std::string_view name) {
    const auto n = normalize_name(name);
    if (n == "nonnegative" || n == "non-negative") return RegimeKind::NonNegative;
    if (n == "asymmetry") return RegimeKind::Asymmetry;
    if (n == "asymmetry-relaxed") return RegimeKind::AsymmetryRelaxed;
    if (n == "leverage") return RegimeKind::Leverage;
    if (n == "nelson-cao" || n == "nelson-cao-relaxed") return RegimeKind::NelsonCaoRelaxed;
    std::string valid;
    for (const auto& r : regime_names()) valid += (valid.empty() ? "" : ", ") + r;
    throw Error(ErrorCode::InvalidInput, "unknown regime '" + std::string(name) + "' (valid: " + valid + ")");
}

std::string to_string(const MomentRequirement& req) {
    switch (req.kind) {
        case MomentKind::SecondMoment: return "second";
        case MomentKind::FourthMomentNormal: return "fourth-normal";
        case MomentKind::FourthMomentStudentT: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "fourth-t(%g)", req.nu);
            return buf;
        }
    }
    return "?";
}

bool ConstraintReport::violates(std::string_view name) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.name == name; });
}

ConstraintReport regime_check(const GjrParams& params, const ConstraintRegime& regime) {
    params.validate();
    const std::size_t p = params.p();
    const std::size_t q = params.q();
    Checker c;

    auto check_beta_nonneg = [&] {
        for (std::size_t i = 0; i < p; ++i) c.ge("β" + lag(i + 1, p) + " ≥ 0", params.beta[i], 0.0);
    };

    switch (regime.kind) {
        case RegimeKind::NonNegative:
        case RegimeKind::Asymmetry:
            c.gt("ω > 0", params.omega, 0.0);
            for (std::size_t j = 0; j < q; ++j) c.ge("α" + lag(j + 1, q) + " ≥ 0", params.alpha[j], 0.0);
            check_beta_nonneg();
            for (std::size_t j = 0; j < q; ++j) c.ge("γ" + lag(j + 1, q) + " ≥ 0", params.gamma[j], 0.0);
            if (regime.kind == RegimeKind::Asymmetry) c.gt("γ" + lag(1, q) + " > 0", params.gamma[0], 0.0);
            break;
        case RegimeKind::AsymmetryRelaxed:
            c.gt("ω > 0", params.omega, 0.0);
            for (std::size_t j = 0; j < q; ++j) c.gt("α" + lag(j + 1, q) + " > 0", params.alpha[j], 0.0);
            check_beta_nonneg();
            for (std::size_t j = 0; j < q; ++j) {
                const auto s = lag(j + 1, q);
                c.gt("α" + s + " + γ" + s + " > 0", negative_shock_coef(params.alpha[j], params.gamma[j]), 0.0);
            }
            break;
        case RegimeKind::Leverage:
            c.gt("ω > 0", params.omega, 0.0);
            c.lt("α" + lag(1, q) + " < 0", params.alpha[0], 0.0);
            for (std::size_t j = 0; j < q; ++j) {
                const auto s = lag(j + 1, q);
                c.gt("α" + s + " + γ" + s + " > 0", negative_shock_coef(params.alpha[j], params.gamma[j]), 0.0);
            }
            check_beta_nonneg();
            break;
        case RegimeKind::NelsonCaoRelaxed: {
            const bool has_gamma = std::any_of(params.gamma.begin(), params.gamma.end(), [](double g) { return g != 0.0; });
            // Each shock enters every future variance through one coefficient
            // set, chosen by its own sign, so both sets must qualify.
            auto run = [&](const std::vector<double>& a, const std::string& prefix) {
                if (p == 1 && q == 1) {
                    Checker sub;
                    sub.ge("ω ≥ 0", params.omega, 0.0);
                    sub.ge("β ≥ 0", params.beta[0], 0.0);
                    sub.ge("a₁ ≥ 0", a[0], 0.0);
                    c.merge(sub.take(), prefix);
                } else if (p == 1 && q == 2) {
                    c.merge(nelson_cao_garch12(params.omega, a[0], a[1], params.beta[0]), prefix);
                } else if (p == 2 && q == 1) {
                    c.merge(nelson_cao_garch21(params.omega, a[0], params.beta[0], params.beta[1]), prefix);
                } else if (p == 0 && q == 1) {
                    Checker sub;
                    sub.ge("ω ≥ 0", params.omega, 0.0);
                    sub.ge("a₁ ≥ 0", a[0], 0.0);
                    c.merge(sub.take(), prefix);
                } else {
                    throw Error(ErrorCode::OrderMismatch,
                                "Nelson-Cao conditions are available for GJR(1,1), (1,2) and (2,1) only");
                }
            };
            run(params.alpha, "");
            if (has_gamma) {
                std::vector<double> neg(q);
                for (std::size_t j = 0; j < q; ++j) neg[j] = negative_shock_coef(params.alpha[j], params.gamma[j]);
                run(neg, "[ε<0] ");
            }
            break;
        }
    }

    for (const auto& req : regime.moments) {
        if (req.kind == MomentKind::SecondMoment) {
            const double lhs = sum(params.beta) + sum(params.alpha) + 0.5 * sum(params.gamma);
            c.lt("β + α + γ/2 < 1", lhs, 1.0);
            continue;
        }
        if (p != 1 || q != 1) throw Error(ErrorCode::OrderMismatch, "fourth-moment conditions require GJR(1,1)");
        if (req.kind == MomentKind::FourthMomentNormal) {
            const auto mm = moment_margins(params, {InnovationKind::Normal, 0.0});
            c.lt("fourth moment (normal) < 1", 1.0 - mm.fourth_margin, 1.0);
        } else {
            const auto mm = moment_margins(params, {InnovationKind::StudentT, req.nu});
            c.lt("fourth moment (Student-t) < 1", 1.0 - mm.fourth_margin, 1.0);
        }
    }
    return c.take();
}

MomentMargins moment_margins(const GjrParams& params, const MomentDist& dist) {
    params.validate();
    if (params.p() != 1 || params.q() != 1) {
        throw Error(ErrorCode::UnsupportedOrder, "moment margins are defined for GJR(1,1) only");
    }
    const double a = params.alpha[0];
    const double b = params.beta[0];
    const double g = params.gamma[0];
    MomentMargins mm;
    mm.second_margin = 1.0 - (b + a + g / 2.0);
    if (dist.kind == InnovationKind::Normal) {
        mm.fourth_margin = 1.0 - (b * b + 2.0 * b * a + 3.0 * a * a + b * g + 3.0 * a * g + 3.0 * g * g / 2.0);
    } else {
        if (!(dist.nu >= 5.0)) throw Error(ErrorCode::NuTooSmall, "Student-t fourth moment needs nu >= 5");
        const double s = 3.0 * (dist.nu - 2.0) / (dist.nu - 4.0);
        mm.fourth_margin = 1.0 - (b * b + 2.0 * b * a + s * a * a + b * g + (2.0 * a * g + g * g) * s / 2.0);
    }
    return mm;
}

ConstraintReport nelson_cao_garch12(double omega, double a1, double a2, double beta1) {
    if (!std::isfinite(omega) || !std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(beta1)) {
        throw Error(ErrorCode::InvalidInput, "Nelson-Cao inputs must be finite");
    }
    Checker c;
    c.ge("ω ≥ 0", omega, 0.0);
    c.ge("β ≥ 0", beta1, 0.0);
    c.lt("β < 1", beta1, 1.0);
    c.ge("a₁ ≥ 0", a1, 0.0);
    c.ge("βa₁ + a₂ ≥ 0", beta1 * a1 + a2, 0.0);
    return c.take();
}

ConstraintReport nelson_cao_garch21(double omega, double a1, double beta1, double beta2) {
    if (!std::isfinite(omega) || !std::isfinite(a1) || !std::isfinite(beta1) || !std::isfinite(beta2)) {
        throw Error(ErrorCode::InvalidInput, "Nelson-Cao inputs must be finite");
    }
    Checker c;
    c.ge("ω ≥ 0", omega, 0.0);
    c.ge("a₁ ≥ 0", a1, 0.0);
    c.ge("β₁ ≥ 0", beta1, 0.0);
    c.lt("β₁ + β₂ < 1", beta1 + beta2, 1.0);
    c.ge("β₁² + 4β₂ ≥ 0", beta1 * beta1 + 4.0 * beta2, 0.0);
    return c.take();
}

// ---------------------------------------------------------------------------

std::size_t GridRange::count() const {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) return 0;
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double GridRange::at(std::size_t k) const {
    const double v = lo + static_cast<double>(k) * step;
    return std::round(v * 1e12) / 1e12;
}

std::string_view to_string(RegionMoment moment) {
    switch (moment) {
        case RegionMoment::None: return "none";
        case RegionMoment::SecondNormal: return "normal";
        case RegionMoment::FourthNormal: return "fourth-normal";
        case RegionMoment::FourthStudentT: return "student-t";
    }
    return "?";
}

RegionMoment parse_region_moment(std::string_view name) {
    const auto n = normalize_name(name);
    if (n == "none") return RegionMoment::None;
    if (n == "normal" || n == "second") return RegionMoment::SecondNormal;
    if (n == "fourth-normal") return RegionMoment::FourthNormal;
    if (n == "student-t" || n == "t" || n == "fourth-t") return RegionMoment::FourthStudentT;
    throw Error(ErrorCode::InvalidInput,
                "unknown moment constraint '" + std::string(name) + "' (none, normal, fourth-normal, student-t)");
}

bool region_admissible(double a, double b, double g, const RegionConstraints& k) {
    if (k.positivity && !(a > 0.0 && b > 0.0)) return false;
    if (k.pairing && !(a + g > 0.0)) return false;
    switch (k.moment) {
        case RegionMoment::None: return true;
        case RegionMoment::SecondNormal: return b + a + g / 2.0 < 1.0;
        case RegionMoment::FourthNormal:
            return b * b + 2.0 * b * a + 3.0 * a * a + b * g + 3.0 * a * g + 3.0 * g * g / 2.0 < 1.0;
        case RegionMoment::FourthStudentT: {
            const double s = 3.0 * (k.nu - 2.0) / (k.nu - 4.0);
            return b * b + 2.0 * b * a + s * a * a + b * g + (2.0 * a * g + g * g) * s / 2.0 < 1.0;
        }
    }
    return false;
}

RegionTable::RegionTable(RegionGrid grid, std::vector<std::uint8_t> flags)
    : grid_(grid), flags_(std::move(flags)) {
    admissible_ = static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

RegionRow RegionTable::row(std::size_t index) const {
    const std::size_t nb = grid_.beta.count();
    const std::size_t ng = grid_.gamma.count();
    const std::size_t ia = index / (nb * ng);
    const std::size_t ib = (index / ng) % nb;
    const std::size_t ig = index % ng;
    return {grid_.alpha.at(ia), grid_.beta.at(ib), grid_.gamma.at(ig), flags_[index] != 0};
}

void RegionTable::write_csv(std::ostream& out, bool admissible_only) const {
    out << "alpha,beta,gamma,admissible\n";
    char buf[128];
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (admissible_only && !flags_[i]) continue;
        const auto r = row(i);
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%d\n", r.alpha, r.beta, r.gamma, r.admissible ? 1 : 0);
        out << buf;
    }
}

RegionTable admissible_region_scan(const RegionGrid& grid, const RegionConstraints& constraints, unsigned threads) {
    const std::size_t na = grid.alpha.count();
    const std::size_t nb = grid.beta.count();
    const std::size_t ng = grid.gamma.count();
    if (na == 0 || nb == 0 || ng == 0) throw Error(ErrorCode::EmptyGrid, "grid ranges need step > 0 and hi >= lo");
    if (constraints.moment == RegionMoment::FourthStudentT && !(constraints.nu >= 5.0)) {
        throw Error(ErrorCode::NuTooSmall, "Student-t fourth moment needs nu >= 5");
    }

    std::vector<std::uint8_t> flags(na * nb * ng, 0);
    parallel_for(na, threads, [&](std::size_t ia) {
        const double a = grid.alpha.at(ia);
        for (std::size_t ib = 0; ib < nb; ++ib) {
            const double b = grid.beta.at(ib);
            for (std::size_t ig = 0; ig < ng; ++ig) {
                const double g = grid.gamma.at(ig);
                flags[(ia * nb + ib) * ng + ig] = region_admissible(a, b, g, constraints) ? 1 : 0;
            }
        }
    });
    return RegionTable(grid, std::move(flags));
}

}  // namespace gjrvol::gjr
