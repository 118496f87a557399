#pragma once

#include "gjrvol/gjr.hpp"
#include "gjrvol/skst.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gjrvol::mc {

/// Full data-generating process: mean equation, GJR variance, SKST shocks.
/// omega is stored in absolute units.
struct ModelPreset {
    std::string name;
    gjr::MeanSpec mean;
    gjr::GjrParams variance;
    skst::SkstParams dist;

    /// Throws Error(InvalidPreset) when any component is invalid.
    void validate() const;
};

/// Built-in presets:
///   eq11   AR(1)-GJR(1,1), SP500 leverage fit
///   eq12   ARMA(1,1)-GJR(1,1)
///   eq13   ARMA(1,1)-GJR(2,1)
///   eq14   ARMA(1,1)-GJR(1,2)
///   gold   AR(1)-GJR(1,1), asymmetry fit with negative gamma
/// Throws Error(InvalidPreset) for unknown names.
ModelPreset preset(std::string_view name);
std::vector<std::string> preset_names();

struct SimOptions {
    std::size_t burn_in = 0;
};

struct SimPath {
    std::vector<double> returns;
    std::vector<double> variances;
    /// 1-based step at which sigma^2 <= 0 occurred (counted from the first
    /// recorded step; 0 means death during burn-in). Series stop before it.
    std::optional<std::size_t> died_at;
    double death_value = 0.0;
    std::uint64_t seed = 0;
    /// Set when the unconditional presample was unavailable and
    /// omega / (1 - sum beta) was used instead.
    bool init_fallback = false;
};

/// Simulates T steps from the unconditional presample variance. Paths are
/// prefix-consistent: the same seed with a shorter T gives a prefix.
SimPath simulate_path(const ModelPreset& preset, std::size_t T, std::uint64_t seed, const SimOptions& options = {});

/// CSV "t,r,sigma2", one row per recorded step.
void write_path_csv(std::ostream& out, const SimPath& path);

/// Per-path seed from (master seed, horizon, path index) via splitmix64.
std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t horizon, std::uint64_t path_index);

struct SurvivalRow {
    std::size_t T = 0;
    std::size_t n_paths = 0;
    std::size_t survivors = 0;           // SR
    std::vector<std::size_t> death_times;  // sorted
};

struct SurvivalReport {
    std::vector<SurvivalRow> rows;

    /// CSV "T,n_paths,SR".
    void write_csv(std::ostream& out) const;
};

/// For each horizon T runs n_paths independent paths and counts survivors.
/// Throws Error(InvalidInput) for n_paths == 0, an empty grid, or T == 0.
/// The report does not depend on `threads`.
SurvivalReport survival_study(const ModelPreset& preset, std::size_t n_paths, const std::vector<std::size_t>& t_grid,
                              std::uint64_t master_seed, unsigned threads = 0, const SimOptions& options = {});

}  // namespace gjrvol::mc
