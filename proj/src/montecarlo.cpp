#include "gjrvol/montecarlo.hpp"

#include "gjrvol/errors.hpp"
#include "gjrvol/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace gjrvol::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void ModelPreset::validate() const {
    try {
        mean.validate();
        variance.validate();
        dist.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidPreset, "preset '" + name + "': " + e.what());
    }
}

ModelPreset preset(std::string_view name) {
    using gjr::GjrParams;
    using gjr::MeanSpec;
    if (name == "eq11") {
        return {"eq11", MeanSpec::ar1(0.000296, -0.065107),
                GjrParams::gjr11(0.019651e-4, -0.045001, 0.923580, 0.213252), {std::exp(-0.1656), 7.43802}};
    }
    if (name == "eq12") {
        return {"eq12", MeanSpec::arma11(0.000378, 0.460538, -0.533473),
                GjrParams::gjr11(0.018770e-4, -0.039250, 0.924087, 0.197914), {std::exp(-0.174414), 7.545299}};
    }
    if (name == "eq13") {
        return {"eq13", MeanSpec::arma11(0.000379, 0.458079, -0.531676),
                GjrParams{0.018099e-4, {0.971335, -0.044824}, {-0.036587}, {0.188975}},
                {std::exp(-0.174029), 7.547291}};
    }
    if (name == "eq14") {
        return {"eq14", MeanSpec::arma11(0.000409, 0.508983, -0.588970),
                GjrParams{0.024810e-4, {0.898783}, {-0.079038, 0.058260}, {0.124897, 0.074442}},
                {std::exp(-0.175171), 8.253047}};
    }
    if (name == "gold") {
        return {"gold", MeanSpec::ar1(0.0004, -0.04), GjrParams::gjr11(1.4e-6, 0.08, 0.9333, -0.047),
                {std::exp(-0.005), 5.22}};
    }
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::InvalidPreset, "unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
}

std::vector<std::string> preset_names() { return {"eq11", "eq12", "eq13", "eq14", "gold"}; }

SimPath simulate_path(const ModelPreset& preset, std::size_t T, std::uint64_t seed, const SimOptions& options) {
    preset.validate();
    if (T == 0) throw Error(ErrorCode::InvalidInput, "path length must be >= 1");

    const double kappa = skst::cdf(0.0, preset.dist);
    SimPath path;
    path.seed = seed;
    double s0 = 0.0;
    if (const auto uncond = gjr::unconditional_variance(preset.variance, kappa)) {
        s0 = *uncond;
    } else {
        const double denom = 1.0 - std::accumulate(preset.variance.beta.begin(), preset.variance.beta.end(), 0.0);
        if (!(denom > 0.0) || !(preset.variance.omega > 0.0)) {
            throw Error(ErrorCode::InvalidPreset, "preset '" + preset.name + "' has no usable presample variance");
        }
        s0 = preset.variance.omega / denom;
        path.init_fallback = true;
    }

    gjr::VarianceRecursion rec(preset.variance, s0, kappa);
    Rng rng(seed);
    skst::Sampler draw(preset.dist);
    const auto& m = preset.mean;
    double r_prev = m.mu / (1.0 - m.phi);
    double e_prev = 0.0;

    path.returns.reserve(T);
    path.variances.reserve(T);
    const std::size_t total = options.burn_in + T;
    for (std::size_t step = 0; step < total; ++step) {
        const double s = rec.next();
        if (!(s > 0.0)) {
            path.died_at = step < options.burn_in ? 0 : step - options.burn_in + 1;
            path.death_value = s;
            break;
        }
        const double e = std::sqrt(s) * draw(rng);
        const double r = m.mu + m.phi * r_prev + m.theta * e_prev + e;
        rec.push(s, e);
        r_prev = r;
        e_prev = e;
        if (step >= options.burn_in) {
            path.returns.push_back(r);
            path.variances.push_back(s);
        }
    }
    return path;
}

void write_path_csv(std::ostream& out, const SimPath& path) {
    out << "t,r,sigma2\n";
    char buf[96];
    for (std::size_t i = 0; i < path.returns.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, path.returns[i], path.variances[i]);
        out << buf;
    }
}

std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t horizon, std::uint64_t path_index) {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ horizon) ^ path_index);
}

void SurvivalReport::write_csv(std::ostream& out) const {
    out << "T,n_paths,SR\n";
    for (const auto& r : rows) out << r.T << ',' << r.n_paths << ',' << r.survivors << '\n';
}

SurvivalReport survival_study(const ModelPreset& preset, std::size_t n_paths, const std::vector<std::size_t>& t_grid,
                              std::uint64_t master_seed, unsigned threads, const SimOptions& options) {
    if (n_paths == 0) throw Error(ErrorCode::InvalidInput, "n_paths must be >= 1");
    if (t_grid.empty()) throw Error(ErrorCode::InvalidInput, "T grid is empty");
    if (std::find(t_grid.begin(), t_grid.end(), std::size_t{0}) != t_grid.end()) {
        throw Error(ErrorCode::InvalidInput, "path lengths must be >= 1");
    }
    preset.validate();

    SurvivalReport report;
    for (const std::size_t T : t_grid) {
        std::vector<std::optional<std::size_t>> deaths(n_paths);
        parallel_for(n_paths, threads, [&](std::size_t i) {
            deaths[i] = simulate_path(preset, T, split_seed(master_seed, T, i), options).died_at;
        });
        SurvivalRow row;
        row.T = T;
        row.n_paths = n_paths;
        for (const auto& d : deaths) {
            if (d) {
                row.death_times.push_back(*d);
            } else {
                ++row.survivors;
            }
        }
        std::sort(row.death_times.begin(), row.death_times.end());
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace gjrvol::mc
