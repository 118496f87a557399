#pragma once

#include "gjrvol/gjr.hpp"
#include "gjrvol/market_data.hpp"
#include "gjrvol/mle.hpp"

#include <json.hpp>

#include <string>

namespace gjrvol::serial {

using Json = nlohmann::ordered_json;

/// {"n", "mean", "std_dev", "skewness", "excess_kurtosis", "jarque_bera",
///  "ljung_box_lags": [{"lag", "statistic", "p_value"}], ...}
Json to_json(const data::StatsSummary& stats);

/// Regime, checked parameters, pass flag and violations.
Json to_json(const gjr::ConstraintReport& report, const gjr::GjrParams& params, const gjr::ConstraintRegime& regime);

Json to_json(const gjr::ConstraintRegime& regime);
Json to_json(const gjr::GjrParams& params);

/// Estimates keyed by parameter name ("mu", "phi", "theta", "omega",
/// "alpha_j", "beta_i", "gamma_j", "log_xi", "nu") plus "xi", with standard
/// errors, t-statistics and fit diagnostics.
Json to_json(const mle::FitResult& fit);

/// Reads GJR coefficients from {"omega", "alpha_1", ..., "beta_1", ...,
/// "gamma_1", ...}, optionally nested under "estimates" (the fit output).
/// Array forms {"alpha": [...], "beta": [...], "gamma": [...]} are also
/// accepted. Throws Error(InvalidInput).
gjr::GjrParams gjr_params_from_json(const nlohmann::json& doc);

/// Parameter | Estimate | Std. error | t-stat table with a '*' at 5%.
std::string format_fit_table(const mle::FitResult& fit);

}  // namespace gjrvol::serial
