#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gjrvol::gjr {

// ---------------------------------------------------------------------------
// Mean equation
// ---------------------------------------------------------------------------

enum class MeanKind { Constant, AR1, ARMA11 };

std::string_view to_string(MeanKind kind);
MeanKind parse_mean_kind(std::string_view name);

/// r_t = mu + phi r_{t-1} + theta eps_{t-1} + eps_t. Coefficients that the
/// variant does not carry stay at zero.
struct MeanSpec {
    MeanKind kind = MeanKind::Constant;
    double mu = 0.0;
    double phi = 0.0;
    double theta = 0.0;

    static MeanSpec constant(double mu) { return {MeanKind::Constant, mu, 0.0, 0.0}; }
    static MeanSpec ar1(double mu, double phi) { return {MeanKind::AR1, mu, phi, 0.0}; }
    static MeanSpec arma11(double mu, double phi, double theta) { return {MeanKind::ARMA11, mu, phi, theta}; }

    /// Throws Error(InvalidMeanSpec) on non-finite values, |phi| >= 1 or |theta| >= 1.
    void validate() const;
};

/// Mean-equation residuals with presample r_0 = eps_0 = 0. Output has the
/// same length as the input.
std::vector<double> filter_residuals(std::span<const double> returns, const MeanSpec& mean);

// ---------------------------------------------------------------------------
// Variance equation
// ---------------------------------------------------------------------------

/// GJR(p, q): sigma^2_t = omega + sum_i beta_i sigma^2_{t-i}
///                      + sum_j (alpha_j + gamma_j 1[eps_{t-j} < 0]) eps^2_{t-j}.
struct GjrParams {
    double omega = 0.0;
    std::vector<double> beta;   // p entries
    std::vector<double> alpha;  // q entries
    std::vector<double> gamma;  // q entries

    [[nodiscard]] std::size_t p() const noexcept { return beta.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return alpha.size(); }

    static GjrParams gjr11(double omega, double alpha, double beta, double gamma) {
        return {omega, {beta}, {alpha}, {gamma}};
    }

    /// Throws Error(OrderMismatch) if q == 0 or gamma/alpha sizes differ,
    /// Error(InvalidParams) on non-finite entries.
    void validate() const;
};

/// Presample rule for the variance recursion.
///
/// SampleVariance uses mean(eps^2) of the residual series; Unconditional
/// uses omega / (1 - sum alpha - sum beta - kappa sum gamma). Presample
/// eps^2 take the same value as presample sigma^2 and enter the asymmetric
/// term with weight kappa = Pr(z < 0). Fixed supplies sigma^2 directly and,
/// optionally, signed presample residuals (most recent first).
struct VarianceInit {
    enum class Kind { SampleVariance, Unconditional, Fixed };

    Kind kind = Kind::SampleVariance;
    double negative_share = 0.5;
    double sigma2 = 0.0;
    std::vector<double> presample_eps;

    static VarianceInit sample_variance(double kappa = 0.5) { return {Kind::SampleVariance, kappa, 0.0, {}}; }
    static VarianceInit unconditional(double kappa = 0.5) { return {Kind::Unconditional, kappa, 0.0, {}}; }
    static VarianceInit fixed(double sigma2, std::vector<double> presample_eps = {}, double kappa = 0.5) {
        return {Kind::Fixed, kappa, sigma2, std::move(presample_eps)};
    }
};

std::string_view to_string(VarianceInit::Kind kind);
VarianceInit::Kind parse_init_kind(std::string_view name);

/// omega / (1 - sum alpha - sum beta - kappa sum gamma), or nullopt when the
/// denominator is not positive.
std::optional<double> unconditional_variance(const GjrParams& params, double kappa);

/// Presample sigma^2 for the given rule. Throws Error(InvalidInit).
double presample_variance(std::span<const double> residuals, const GjrParams& params, const VarianceInit& init);

/// Incremental GJR recursion shared by the filter and the path simulator.
class VarianceRecursion {
public:
    VarianceRecursion(const GjrParams& params, double presample_sigma2, double kappa,
                      std::span<const double> presample_eps = {});

    /// sigma^2 for the next step given the stored history.
    [[nodiscard]] double next() const noexcept;
    /// Appends an accepted step (sigma^2_t, eps_t) to the history.
    void push(double sigma2, double eps) noexcept;

private:
    GjrParams params_;
    std::vector<double> sigma2_;   // sigma2_[i] = sigma^2_{t-1-i}
    std::vector<double> eps2_;     // eps2_[j] = eps^2_{t-1-j}
    std::vector<double> neg_;      // 1 for a negative shock, 0 otherwise, kappa in presample
};

struct VarianceFilterResult {
    std::vector<double> sigma2;
    std::optional<std::size_t> failed_at;  // index of the first sigma^2 <= 0
    double failed_value = 0.0;
};

/// Non-throwing variance filter: stops at the first non-positive sigma^2.
VarianceFilterResult filter_variances(std::span<const double> residuals, const GjrParams& params,
                                      const VarianceInit& init);

/// Conditional variances, one per residual. Throws NonPositiveVarianceError
/// on the first sigma^2_t <= 0 and Error(InvalidInit) for a bad presample.
std::vector<double> conditional_variances(std::span<const double> residuals, const GjrParams& params,
                                          const VarianceInit& init = {});

// ---------------------------------------------------------------------------
// Constraint regimes
// ---------------------------------------------------------------------------

enum class RegimeKind { NonNegative, Asymmetry, AsymmetryRelaxed, Leverage, NelsonCaoRelaxed };

std::string_view to_string(RegimeKind kind);
/// Accepts "nonnegative", "asymmetry", "asymmetry-relaxed", "leverage",
/// "nelson-cao" (underscores also accepted). Throws Error(InvalidInput).
RegimeKind parse_regime_kind(std::string_view name);
std::vector<std::string> regime_names();

enum class MomentKind { SecondMoment, FourthMomentNormal, FourthMomentStudentT };

struct MomentRequirement {
    MomentKind kind = MomentKind::SecondMoment;
    double nu = 0.0;  // FourthMomentStudentT only
};

std::string to_string(const MomentRequirement& req);

struct ConstraintRegime {
    RegimeKind kind = RegimeKind::NonNegative;
    std::vector<MomentRequirement> moments;
};

struct Violation {
    std::string name;
    double lhs = 0.0;
    double bound = 0.0;
};

struct ConstraintReport {
    bool passed = true;
    std::vector<Violation> violations;

    [[nodiscard]] bool violates(std::string_view name) const;
};

/// Evaluates every inequality of the regime and each moment requirement.
///
/// NonNegative: omega > 0, alpha_j >= 0, beta_i >= 0, gamma_j >= 0.
/// Asymmetry: NonNegative and gamma_1 > 0.
/// AsymmetryRelaxed: omega > 0, alpha_j > 0, beta_i >= 0, alpha_j + gamma_j > 0.
/// Leverage: omega > 0, alpha_1 < 0, alpha_j + gamma_j > 0, beta_i >= 0
///   (alpha_j for j >= 2 only needs the pairing).
/// NelsonCaoRelaxed: the GARCH(1,2) or GARCH(2,1) conditions applied to the
///   positive-shock coefficients alpha_j and the negative-shock
///   coefficients alpha_j + gamma_j; (1,1) reduces to non-negativity.
///
/// Throws Error(OrderMismatch) for malformed orders, NelsonCaoRelaxed
/// outside (1,1), (1,2), (2,1), and fourth-moment requirements outside (1,1).
ConstraintReport regime_check(const GjrParams& params, const ConstraintRegime& regime);

enum class InnovationKind { Normal, StudentT };

struct MomentDist {
    InnovationKind kind = InnovationKind::Normal;
    double nu = 0.0;
};

struct MomentMargins {
    double second_margin = 0.0;
    double fourth_margin = 0.0;
};

/// 1 minus the left-hand side of the GJR(1,1) second- and fourth-moment
/// conditions; a positive margin means the moment exists. The Student-t
/// fourth moment uses s = 3(nu - 2)/(nu - 4) and requires nu >= 5.
MomentMargins moment_margins(const GjrParams& params, const MomentDist& dist);

/// GARCH(1,2): omega >= 0, 0 <= beta < 1, a1 >= 0, beta a1 + a2 >= 0.
ConstraintReport nelson_cao_garch12(double omega, double a1, double a2, double beta1);
/// GARCH(2,1): omega >= 0, a1 >= 0, beta1 >= 0, beta1 + beta2 < 1, beta1^2 + 4 beta2 >= 0.
ConstraintReport nelson_cao_garch21(double omega, double a1, double beta1, double beta2);

// ---------------------------------------------------------------------------
// Admissible region scan over GJR(1,1) (alpha, beta, gamma)
// ---------------------------------------------------------------------------

/// Inclusive grid lo, lo + step, ..., <= hi. Points are snapped to 1e-12 so
/// decimal steps hit exact boundaries such as alpha + gamma = 0.
struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] double at(std::size_t k) const;
};

struct RegionGrid {
    GridRange alpha{0.005, 0.5, 0.005};
    GridRange beta{0.005, 0.995, 0.005};
    GridRange gamma{-0.5, 0.5, 0.005};
};

enum class RegionMoment { None, SecondNormal, FourthNormal, FourthStudentT };

std::string_view to_string(RegionMoment moment);
RegionMoment parse_region_moment(std::string_view name);

struct RegionConstraints {
    bool positivity = true;  // alpha > 0 and beta > 0
    bool pairing = true;     // alpha + gamma > 0
    RegionMoment moment = RegionMoment::SecondNormal;
    double nu = 7.0;         // FourthStudentT only
};

bool region_admissible(double alpha, double beta, double gamma, const RegionConstraints& constraints);

struct RegionRow {
    double alpha;
    double beta;
    double gamma;
    bool admissible;
};

/// Flags for every grid point in (alpha, beta, gamma) lexicographic order.
class RegionTable {
public:
    RegionTable(RegionGrid grid, std::vector<std::uint8_t> flags);

    [[nodiscard]] std::size_t size() const noexcept { return flags_.size(); }
    [[nodiscard]] RegionRow row(std::size_t index) const;
    [[nodiscard]] std::size_t admissible_count() const noexcept { return admissible_; }
    [[nodiscard]] const RegionGrid& grid() const noexcept { return grid_; }

    /// CSV with header "alpha,beta,gamma,admissible" (admissible as 0/1).
    void write_csv(std::ostream& out, bool admissible_only = false) const;

private:
    RegionGrid grid_;
    std::vector<std::uint8_t> flags_;
    std::size_t admissible_ = 0;
};

/// Throws Error(EmptyGrid) for non-positive steps or hi < lo. `threads` = 0
/// picks the default worker count; the table does not depend on it.
RegionTable admissible_region_scan(const RegionGrid& grid, const RegionConstraints& constraints,
                                   unsigned threads = 0);

}  // namespace gjrvol::gjr
