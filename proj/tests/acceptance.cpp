// Acceptance suite: one PASS/FAIL line per criterion. Run without
// arguments for all criteria or with a criterion number for one.

#include "gjrvol/errors.hpp"
#include "gjrvol/gjr.hpp"
#include "gjrvol/mle.hpp"
#include "gjrvol/montecarlo.hpp"
#include "gjrvol/skst.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gjrvol;

namespace {

// Tolerances and limits, fixed here so the criteria cannot drift.
constexpr double kDensityTol = 1e-6;
constexpr double kStudentTol = 1e-10;
constexpr double kLikelihoodTol = 1e-8;
constexpr double kArithmeticTol = 1e-12;
constexpr std::uint64_t kMasterSeed = 42;
constexpr std::size_t kPaths = 100;
const std::vector<std::size_t> kTGrid{100, 500, 1000, 5000, 20000};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [failed]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1 -----------------------------------------------------------------------
Outcome skst_correctness() {
    Outcome o;
    double worst_mass = 0, worst_mean = 0, worst_var = 0;
    for (double xi : {0.5, 1.0, 2.0}) {
        for (double nu : {5.0, 8.0, 30.0}) {
            const skst::SkstParams p{xi, nu};
            const double bp = skst::branch_point(p);
            auto f = [&](double z) { return skst::density(z, p); };
            const double mass = oracle::integrate_line(f, {bp});
            const double mean = oracle::integrate_line([&](double z) { return z * f(z); }, {bp});
            const double var = oracle::integrate_line([&](double z) { return z * z * f(z); }, {bp}) - mean * mean;
            worst_mass = std::max(worst_mass, std::abs(mass - 1));
            worst_mean = std::max(worst_mean, std::abs(mean));
            worst_var = std::max(worst_var, std::abs(var - 1));
        }
    }
    double worst_t = 0;
    for (double nu : {5.0, 8.0, 30.0}) {
        for (double z = -10; z <= 10; z += 0.05) {
            worst_t = std::max(worst_t, std::abs(skst::density(z, {1.0, nu}) - oracle::unit_t_pdf(z, nu)));
        }
    }
    o.require(worst_mass <= kDensityTol, "max |mass-1| " + fmt("%.2e", worst_mass));
    o.require(worst_mean <= kDensityTol, "max |mean| " + fmt("%.2e", worst_mean));
    o.require(worst_var <= kDensityTol, "max |var-1| " + fmt("%.2e", worst_var));
    o.require(worst_t <= kStudentTol, "xi=1 vs Student-t " + fmt("%.2e", worst_t));
    return o;
}

// 2 -----------------------------------------------------------------------
Outcome likelihood_identity() {
    Outcome o;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int rep = 0; rep < 10; ++rep) {
        mle::FullParameterVector th;
        th.mean = gjr::MeanSpec::ar1(0.001 * (u(rng) - 0.5), 0.2 * (u(rng) - 0.5));
        th.variance = gjr::GjrParams::gjr11(1e-6 + 1e-5 * u(rng), 0.02 + 0.1 * u(rng), 0.5 + 0.4 * u(rng),
                                            0.1 * u(rng) - 0.02);
        th.dist = {mle::DistKind::Skst, std::exp(u(rng) - 0.5), 2.5 + 20 * u(rng)};
        skst::Sampler draw({th.dist.xi, th.dist.nu});
        std::vector<double> r(100);
        for (auto& v : r) v = 0.01 * draw(rng);

        const double closed = mle::negative_log_likelihood(th, r);
        const auto eps = gjr::filter_residuals(r, th.mean);
        const double kappa = mle::negative_shock_probability(th.dist);
        const auto s2 = gjr::conditional_variances(eps, th.variance, gjr::VarianceInit::sample_variance(kappa));
        double pointwise = 0;
        for (std::size_t t = 0; t < r.size(); ++t) {
            pointwise -= skst::log_density(eps[t] / std::sqrt(s2[t]), {th.dist.xi, th.dist.nu}) - 0.5 * std::log(s2[t]);
        }
        worst = std::max(worst, std::abs(closed - pointwise));
    }
    o.require(worst <= kLikelihoodTol, "max |closed form - pointwise| " + fmt("%.2e", worst));
    return o;
}

// 3 -----------------------------------------------------------------------
Outcome leverage_blowup() {
    Outcome o;
    const auto eq11 = mc::preset("eq11");
    const auto at1000 = mc::survival_study(eq11, kPaths, {1000}, kMasterSeed, 0).rows[0].survivors;
    o.require(at1000 < 50, "SR(1000) = " + std::to_string(at1000) + " (< 50)");
    const auto grid = mc::survival_study(eq11, kPaths, kTGrid, kMasterSeed, 0);
    bool decreasing = true;
    std::string series;
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
        series += (i ? "," : "") + std::to_string(grid.rows[i].survivors);
        if (i > 0 && grid.rows[i].survivors > grid.rows[i - 1].survivors) decreasing = false;
    }
    o.require(decreasing, "SR over grid {" + series + "} weakly decreasing");
    const auto last = grid.rows.back().survivors;
    o.require(last <= 5, "SR(20000) = " + std::to_string(last) + " (<= 5)");
    return o;
}

// 4 -----------------------------------------------------------------------
Outcome alternative_blowup() {
    Outcome o;
    for (const char* name : {"eq12", "eq13", "eq14"}) {
        const auto sr = mc::survival_study(mc::preset(name), kPaths, {1000}, kMasterSeed, 0).rows[0].survivors;
        o.require(sr < 50, std::string(name) + " SR(1000) = " + std::to_string(sr) + " (< 50)");
    }
    return o;
}

// 5 -----------------------------------------------------------------------
Outcome asymmetry_safety() {
    Outcome o;
    const auto rep = mc::survival_study(mc::preset("gold"), kPaths, kTGrid, kMasterSeed, 0);
    std::string series;
    bool all = true;
    for (const auto& row : rep.rows) {
        series += (series.empty() ? "" : ",") + std::to_string(row.survivors);
        all &= row.survivors == kPaths;
    }
    o.require(all, "SR over grid {" + series + "} all 100");
    return o;
}

// 6 -----------------------------------------------------------------------
Outcome positivity_closure() {
    Outcome o;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::student_t_distribution<double> shock(3.0);
    std::size_t draws = 0, failures = 0, relaxed = 0;
    while (draws < 1000) {
        const bool use_relaxed = draws % 2 == 1;
        const double alpha = use_relaxed ? 0.3 * u(rng) : 0.3 * u(rng) * (u(rng) < 0.9);
        const double gamma = use_relaxed ? 0.6 * u(rng) - alpha : 0.3 * u(rng) * (u(rng) < 0.9);
        const auto p = gjr::GjrParams::gjr11(1e-7 + 1e-4 * u(rng), alpha, 0.99 * u(rng), gamma);
        const gjr::ConstraintRegime regime{use_relaxed ? gjr::RegimeKind::AsymmetryRelaxed : gjr::RegimeKind::NonNegative,
                                           {}};
        if (!gjr::regime_check(p, regime).passed) continue;
        ++draws;
        relaxed += use_relaxed && gamma < 0;
        std::vector<double> eps(1000);
        const double scale = std::pow(10.0, -4 + 3 * u(rng));
        for (auto& e : eps) e = scale * shock(rng);
        try {
            (void)gjr::conditional_variances(eps, p);
        } catch (const NonPositiveVarianceError&) {
            ++failures;
        }
    }
    o.require(failures == 0, std::to_string(failures) + " NonPositiveVariance in 1000 draws (" +
                                 std::to_string(relaxed) + " with gamma < 0)");
    return o;
}

// 7 -----------------------------------------------------------------------
Outcome round_trip() {
    Outcome o;
    const auto truth = mc::preset("gold");
    const auto path = mc::simulate_path(truth, 10000, kMasterSeed);
    if (path.died_at) {
        o.require(false, "simulated path died");
        return o;
    }
    const mle::ModelSpec spec{gjr::MeanKind::AR1, 1, 1, mle::DistKind::Skst};
    const mle::FullParameterVector true_theta{truth.mean, truth.variance, {mle::DistKind::Skst, truth.dist.xi, truth.dist.nu}};
    const auto true_values = mle::pack(true_theta);

    const auto relaxed = mle::fit(path.returns, spec, {gjr::RegimeKind::AsymmetryRelaxed, {}});
    double worst = 0;
    std::string worst_name;
    bool all_se = true;
    for (std::size_t i = 0; i < relaxed.parameters.size(); ++i) {
        const auto& p = relaxed.parameters[i];
        if (!p.std_error || !(*p.std_error > 0)) {
            all_se = false;
            continue;
        }
        const double dev = std::abs(p.estimate - true_values[i]) / *p.std_error;
        if (dev > worst) {
            worst = dev;
            worst_name = p.name;
        }
    }
    o.require(all_se, "all std errors reported");
    o.require(worst <= 3.0, "max |est - truth| / se = " + fmt("%.2f", worst) + " (" + worst_name + ")");
    const double g_relaxed = relaxed.parameter("gamma_1").estimate;
    o.require(g_relaxed < 0, "relaxed gamma = " + fmt("%.4g", g_relaxed));

    const auto asym = mle::fit(path.returns, spec, {gjr::RegimeKind::Asymmetry, {}});
    const auto& g = asym.parameter("gamma_1");
    o.require(g.estimate <= 1e-4, "asymmetry gamma = " + fmt("%.3g", g.estimate));
    o.require(g.t_stat && std::abs(*g.t_stat) < 0.1, "asymmetry |t| = " + fmt("%.3g", g.t_stat ? std::abs(*g.t_stat) : NAN));
    return o;
}

// 8 -----------------------------------------------------------------------
Outcome constraint_arithmetic() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    std::size_t flag_mismatch = 0;
    auto close = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    auto expect = [&](const gjr::ConstraintReport& rep, const std::vector<std::pair<std::string, std::pair<double, bool>>>& conds) {
        // conds: name -> (lhs, holds)
        bool all = true;
        for (const auto& [name, c] : conds) {
            all &= c.second;
            bool reported = false;
            for (const auto& v : rep.violations) {
                if (v.name == name) {
                    reported = true;
                    close(v.lhs, c.first);
                }
            }
            if (reported == c.second) ++flag_mismatch;
        }
        if (rep.passed != all) ++flag_mismatch;
    };
    for (int k = 0; k < 10000; ++k) {
        const double a = 0.3 * u(rng), b = 0.5 + 0.5 * u(rng), g = 0.4 * u(rng), w = 1e-5 * u(rng);
        const double nu = 5.0 + 30.0 * (u(rng) + 1);
        const auto p = gjr::GjrParams::gjr11(std::abs(w), a, b, g);

        const auto normal = gjr::moment_margins(p, {});
        close(normal.second_margin, 1 - (b + a + g / 2));
        close(normal.fourth_margin, 1 - (b * b + 2 * b * a + 3 * a * a + b * g + 3 * a * g + 1.5 * g * g));
        const auto t = gjr::moment_margins(p, {gjr::InnovationKind::StudentT, nu});
        const double s = 3 * (nu - 2) / (nu - 4);
        close(t.second_margin, 1 - (b + a + g / 2));
        close(t.fourth_margin, 1 - (b * b + 2 * b * a + s * a * a + b * g + (2 * a * g + g * g) * s / 2));

        const double a2 = 0.2 * u(rng), b2 = 0.3 * u(rng), w2 = 1e-6 * u(rng);
        expect(gjr::nelson_cao_garch12(w2, a, a2, b),
               {{"ω ≥ 0", {w2, w2 >= 0}},
                {"β ≥ 0", {b, b >= 0}},
                {"β < 1", {b, b < 1}},
                {"a₁ ≥ 0", {a, a >= 0}},
                {"βa₁ + a₂ ≥ 0", {b * a + a2, b * a + a2 >= 0}}});
        expect(gjr::nelson_cao_garch21(w2, a, b, b2),
               {{"ω ≥ 0", {w2, w2 >= 0}},
                {"a₁ ≥ 0", {a, a >= 0}},
                {"β₁ ≥ 0", {b, b >= 0}},
                {"β₁ + β₂ < 1", {b + b2, b + b2 < 1}},
                {"β₁² + 4β₂ ≥ 0", {b * b + 4 * b2, b * b + 4 * b2 >= 0}}});
    }
    o.require(worst <= kArithmeticTol, "max deviation " + fmt("%.2e", worst));
    o.require(flag_mismatch == 0, std::to_string(flag_mismatch) + " pass/fail disagreements");
    return o;
}

// 9 -----------------------------------------------------------------------
Outcome region_scan() {
    Outcome o;
    const gjr::RegionGrid grid{};
    gjr::RegionConstraints second{};
    const auto t5a = gjr::admissible_region_scan(grid, second, 0);
    bool negative_gamma = false;
    for (std::size_t i = 0; i < t5a.size() && !negative_gamma; ++i) {
        const auto row = t5a.row(i);
        negative_gamma = row.admissible && row.gamma < 0;
    }
    o.require(negative_gamma, "admissible points with gamma < 0 present");
    gjr::RegionConstraints fourth{};
    fourth.moment = gjr::RegionMoment::FourthStudentT;
    fourth.nu = 7.0;
    const auto t6 = gjr::admissible_region_scan(grid, fourth, 0);
    const double base = static_cast<double>(t5a.admissible_count());
    const double change = (static_cast<double>(t6.admissible_count()) - base) / base;
    o.require(std::abs(change) < 0.10, "count " + std::to_string(t5a.admissible_count()) + " -> " +
                                           std::to_string(t6.admissible_count()) + " (" +
                                           fmt("%+.1f%%", 100 * change) + ", |change| < 10%)");
    return o;
}

// 10 ----------------------------------------------------------------------
Outcome cli_determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "gjrvol_acceptance";
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"eq11", "100,500,1000,5000,20000"}, {"eq12", "1000"}, {"eq13", "1000"},
        {"eq14", "1000"},                    {"gold", "100,500,1000,5000,20000"}};
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    for (const auto& [preset, grid] : runs) {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k) {
            const auto file = dir / (preset + "_" + std::to_string(k) + ".csv");
            fs::remove(file);
            const std::string cmd = std::string(GJRVOL_CLI_PATH) + " survival --preset " + preset + " --paths 100 --tgrid " +
                                    grid + " --seed 42 --threads " + (k == 0 ? "1" : "4") + " --output " + file.string();
            const int rc = std::system(cmd.c_str());
            if (rc != 0) o.require(false, preset + " exit status " + std::to_string(rc));
            outputs[k] = slurp(file);
        }
        o.require(!outputs[0].empty() && outputs[0] == outputs[1], preset + " byte-identical");
    }
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "SKST correctness", 10, skst_correctness},
        {2, "likelihood identity", 5, likelihood_identity},
        {3, "leverage blow-up (eq11)", 60, leverage_blowup},
        {4, "alternative-specification blow-up (eq12-14)", 60, alternative_blowup},
        {5, "asymmetry safety (gold)", 60, asymmetry_safety},
        {6, "positivity closure", 30, positivity_closure},
        {7, "round-trip estimation", 600, round_trip},
        {8, "constraint arithmetic oracle", 5, constraint_arithmetic},
        {9, "region scan", 30, region_scan},
        {10, "CLI determinism", 120, cli_determinism},
    };
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // criterion 10 has no stated limit; 120 s is a sanity bound
        out.require(secs < c.limit_seconds, fmt("%.2f s", secs) + fmt(" (limit %.0f s)", c.limit_seconds));
        std::printf("%s criterion %d: %s | %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str());
        std::fflush(stdout);
        failed += !out.pass;
    }
    return failed == 0 ? 0 : 1;
}
