#include "gjrvol/errors.hpp"
#include "gjrvol/montecarlo.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace gjrvol;
using namespace gjrvol::mc;

TEST_CASE("presets carry the published coefficients") {
    const auto eq11 = preset("eq11");
    CHECK(eq11.variance.omega == 1.9651e-6);
    CHECK(eq11.variance.alpha[0] == -0.045001);
    CHECK(eq11.variance.beta[0] == 0.923580);
    CHECK(eq11.variance.gamma[0] == 0.213252);
    CHECK(std::log(eq11.dist.xi) == doctest::Approx(-0.1656).epsilon(1e-15));
    CHECK(eq11.dist.nu == 7.43802);
    CHECK(eq11.mean.phi == -0.065107);
    CHECK(preset("eq13").variance.p() == 2);
    CHECK(preset("eq14").variance.q() == 2);
    CHECK(preset("gold").variance.gamma[0] == -0.047);
    for (const auto& n : preset_names()) CHECK_NOTHROW(preset(n).validate());
    CHECK_THROWS_AS(preset("eq99"), Error);
}

TEST_CASE("constant-variance preset") {
    ModelPreset p{"flat", gjr::MeanSpec::constant(0.0), gjr::GjrParams::gjr11(3e-5, 0, 0, 0), {0.9, 6.0}};
    const auto path = simulate_path(p, 500, 1);
    CHECK_FALSE(path.died_at);
    for (double s : path.variances) CHECK(s == 3e-5);
}

TEST_CASE("path follows the model equations") {
    const auto p = preset("eq12");
    const std::uint64_t seed = 77;
    const auto path = simulate_path(p, 300, seed);
    REQUIRE_FALSE(path.died_at);
    Rng rng(seed);
    skst::Sampler draw(p.dist);
    const double kappa = skst::cdf(0.0, p.dist);
    gjr::VarianceRecursion rec(p.variance, *gjr::unconditional_variance(p.variance, kappa), kappa);
    double r_prev = p.mean.mu / (1 - p.mean.phi), e_prev = 0.0;
    for (std::size_t t = 0; t < path.returns.size(); ++t) {
        const double s = rec.next();
        const double e = std::sqrt(s) * draw(rng);
        const double r = p.mean.mu + p.mean.phi * r_prev + p.mean.theta * e_prev + e;
        CHECK(path.variances[t] == s);
        CHECK(path.returns[t] == r);
        rec.push(s, e);
        r_prev = r;
        e_prev = e;
    }
}

TEST_CASE("determinism and prefix consistency") {
    const auto p = preset("eq11");
    const auto a = simulate_path(p, 2000, 5);
    const auto b = simulate_path(p, 2000, 5);
    CHECK(a.returns == b.returns);
    CHECK(a.died_at == b.died_at);
    const auto shorter = simulate_path(p, 700, 5);
    for (std::size_t t = 0; t < shorter.returns.size(); ++t) CHECK(shorter.returns[t] == a.returns[t]);
    if (!shorter.died_at) {
        CHECK(shorter.returns.size() == 700);
    }
}

TEST_CASE("death truncates the path") {
    const auto p = preset("eq14");
    std::size_t deaths = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto path = simulate_path(p, 2000, s);
        for (double v : path.variances) CHECK(v > 0.0);
        if (path.died_at) {
            ++deaths;
            CHECK(path.returns.size() == *path.died_at - 1);
            CHECK(path.death_value <= 0.0);
        }
    }
    CHECK(deaths > 0);
}

TEST_CASE("burn-in") {
    const auto p = preset("gold");
    const auto full = simulate_path(p, 150, 9);
    const auto burned = simulate_path(p, 100, 9, {50});
    REQUIRE(burned.returns.size() == 100);
    for (std::size_t t = 0; t < 100; ++t) CHECK(burned.returns[t] == full.returns[t + 50]);
}

TEST_CASE("path csv") {
    const auto path = simulate_path(preset("gold"), 3, 2);
    std::ostringstream out;
    write_path_csv(out, path);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,r,sigma2");
    std::getline(in, line);
    CHECK(line.rfind("1,", 0) == 0);
    double r = 0, s = 0;
    std::sscanf(line.c_str(), "1,%lf,%lf", &r, &s);
    CHECK(r == path.returns[0]);
    CHECK(s == path.variances[0]);
}

TEST_CASE("seed splitting") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t T : {100u, 500u, 1000u}) {
        for (std::uint64_t i = 0; i < 100; ++i) seen.insert(split_seed(42, T, i));
    }
    CHECK(seen.size() == 300);
    CHECK(split_seed(42, 100, 0) != split_seed(43, 100, 0));
}

TEST_CASE("survival study") {
    const auto p = preset("eq11");
    const std::vector<std::size_t> grid{100, 1000};
    const auto one = survival_study(p, 40, grid, 42, 1);
    const auto many = survival_study(p, 40, grid, 42, 4);
    std::ostringstream a, b;
    one.write_csv(a);
    many.write_csv(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("T,n_paths,SR\n", 0) == 0);
    for (const auto& row : one.rows) {
        CHECK(row.survivors <= row.n_paths);
        CHECK(row.survivors + row.death_times.size() == row.n_paths);
        for (auto d : row.death_times) CHECK(d <= row.T);
    }
    CHECK_THROWS_AS(survival_study(p, 0, grid, 1, 1), Error);
    CHECK_THROWS_AS(survival_study(p, 5, {}, 1, 1), Error);
    CHECK_THROWS_AS(survival_study(p, 5, {0}, 1, 1), Error);
}

TEST_CASE("positivity closure for admissible presets") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const double alpha = 0.01 + 0.05 * u(rng);
        const double beta = 0.5 + 0.35 * u(rng);
        // NonNegative on even draws, negative gamma above -alpha on odd draws
        const double gamma = k % 2 ? -alpha * u(rng) : 0.1 * u(rng);
        ModelPreset p{"random", gjr::MeanSpec::ar1(0.0003, -0.05), gjr::GjrParams::gjr11(1e-6, alpha, beta, gamma),
                      {std::exp(0.4 * (u(rng) - 0.5)), 4.0 + 10 * u(rng)}};
        const auto rep = survival_study(p, 10, {2000}, k, 1);
        CHECK(rep.rows[0].survivors == 10);
    }
}

TEST_CASE("more negative alpha does not help survival") {
    // alpha + gamma held fixed
    auto base = preset("eq11");
    auto worse = base;
    worse.variance.alpha[0] -= 0.02;
    worse.variance.gamma[0] += 0.02;
    const auto a = survival_study(base, 200, {1000}, 8, 1).rows[0].survivors;
    const auto b = survival_study(worse, 200, {1000}, 8, 1).rows[0].survivors;
    CHECK(b <= a);
}
