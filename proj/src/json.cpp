#include "gjrvol/json.hpp"

#include "gjrvol/errors.hpp"

#include <cmath>
#include <cstdio>

namespace gjrvol::serial {

namespace {

Json ljung_box_json(const std::vector<data::LjungBoxRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows) out.push_back({{"lag", r.lag}, {"statistic", r.statistic}, {"p_value", r.p_value}});
    return out;
}

std::string format_optional(const std::optional<double>& v, const char* fmt) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, *v);
    return buf;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<double> read_coefficients(const nlohmann::json& doc, const std::string& prefix) {
    std::vector<double> out;
    if (doc.contains(prefix)) {
        const auto& arr = doc.at(prefix);
        if (!arr.is_array()) throw Error(ErrorCode::InvalidInput, "'" + prefix + "' must be an array");
        for (const auto& v : arr) out.push_back(v.get<double>());
        return out;
    }
    for (std::size_t j = 1;; ++j) {
        const auto key = prefix + "_" + std::to_string(j);
        if (!doc.contains(key)) break;
        out.push_back(doc.at(key).get<double>());
    }
    return out;
}

}  // namespace

Json to_json(const data::StatsSummary& stats) {
    Json out;
    out["n"] = stats.n;
    out["mean"] = stats.mean;
    out["std_dev"] = stats.std_dev;
    out["skewness"] = stats.skewness;
    out["excess_kurtosis"] = stats.excess_kurtosis;
    out["jarque_bera"] = stats.jarque_bera;
    out["ljung_box_lags"] = ljung_box_json(stats.ljung_box_lags);
    out["ljung_box_squared_lags"] = ljung_box_json(stats.ljung_box_squared_lags);
    out["degenerate"] = stats.degenerate;
    return out;
}

Json to_json(const gjr::ConstraintRegime& regime) {
    Json moments = Json::array();
    for (const auto& m : regime.moments) moments.push_back(gjr::to_string(m));
    return {{"name", std::string(gjr::to_string(regime.kind))}, {"moments", moments}};
}

Json to_json(const gjr::GjrParams& params) {
    Json out;
    out["omega"] = params.omega;
    for (std::size_t j = 0; j < params.alpha.size(); ++j) out["alpha_" + std::to_string(j + 1)] = params.alpha[j];
    for (std::size_t i = 0; i < params.beta.size(); ++i) out["beta_" + std::to_string(i + 1)] = params.beta[i];
    for (std::size_t j = 0; j < params.gamma.size(); ++j) out["gamma_" + std::to_string(j + 1)] = params.gamma[j];
    return out;
}

Json to_json(const gjr::ConstraintReport& report, const gjr::GjrParams& params, const gjr::ConstraintRegime& regime) {
    Json violations = Json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"constraint", v.name}, {"lhs", v.lhs}, {"bound", v.bound}});
    }
    Json out;
    out["regime"] = to_json(regime);
    out["params"] = to_json(params);
    out["passed"] = report.passed;
    out["violations"] = violations;
    return out;
}

Json to_json(const mle::FitResult& fit) {
    const auto spec = fit.estimates.spec();
    Json out;
    out["spec"] = {{"mean", std::string(gjr::to_string(spec.mean))},
                   {"p", spec.p},
                   {"q", spec.q},
                   {"dist", std::string(mle::to_string(spec.dist))}};
    out["regime"] = to_json(fit.regime);
    out["init_rule"] = std::string(gjr::to_string(fit.init_rule));
    out["n_obs"] = fit.n_obs;
    out["log_likelihood"] = fit.log_likelihood;
    out["converged"] = fit.converged;
    out["iterations"] = fit.iterations;

    Json estimates;
    Json std_errors;
    Json t_stats;
    Json params = Json::array();
    for (const auto& p : fit.parameters) {
        estimates[p.name] = p.estimate;
        std_errors[p.name] = optional_json(p.std_error);
        t_stats[p.name] = optional_json(p.t_stat);
        params.push_back({{"name", p.name},
                          {"estimate", p.estimate},
                          {"std_error", optional_json(p.std_error)},
                          {"t_stat", optional_json(p.t_stat)},
                          {"significant", p.significant},
                          {"at_boundary", p.at_boundary}});
    }
    if (spec.dist == mle::DistKind::Skst) estimates["xi"] = fit.estimates.dist.xi;
    out["estimates"] = estimates;
    out["std_errors"] = std_errors;
    out["t_stats"] = t_stats;
    out["parameters"] = params;

    if (fit.covariance) {
        Json cov = Json::array();
        for (Eigen::Index i = 0; i < fit.covariance->rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < fit.covariance->cols(); ++j) row.push_back((*fit.covariance)(i, j));
            cov.push_back(row);
        }
        out["covariance"] = cov;
    } else {
        out["covariance"] = nullptr;
    }
    out["hessian_repaired"] = fit.hessian_repaired;
    out["warnings"] = fit.warnings;
    return out;
}

gjr::GjrParams gjr_params_from_json(const nlohmann::json& doc) {
    try {
        const auto& src = doc.contains("estimates") ? doc.at("estimates") : doc;
        if (!src.is_object() || !src.contains("omega")) {
            throw Error(ErrorCode::InvalidInput, "parameter document needs an \"omega\" entry");
        }
        gjr::GjrParams p;
        p.omega = src.at("omega").get<double>();
        p.alpha = read_coefficients(src, "alpha");
        p.beta = read_coefficients(src, "beta");
        p.gamma = read_coefficients(src, "gamma");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad parameter document: ") + e.what());
    }
}

std::string format_fit_table(const mle::FitResult& fit) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %15s %15s %10s\n", "Parameter", "Estimate", "Std. error", "t-stat");
    out += buf;
    auto line = [&](const std::string& name, double est, const std::optional<double>& se,
                    const std::optional<double>& t, bool star) {
        std::snprintf(buf, sizeof buf, "%-10s %15.6g %15s %10s%s\n", name.c_str(), est,
                      format_optional(se, "%.6g").c_str(), format_optional(t, "%.4f").c_str(), star ? " *" : "");
        out += buf;
    };
    for (const auto& p : fit.parameters) {
        line(p.name, p.estimate, p.std_error, p.t_stat, p.significant);
        if (p.name == "log_xi") {
            // delta method: se(xi) = xi * se(log xi); the t-stat keeps the log-scale test
            const double xi = std::exp(p.estimate);
            std::optional<double> se;
            if (p.std_error) se = xi * *p.std_error;
            line("xi", xi, se, std::nullopt, false);
        }
    }
    std::snprintf(buf, sizeof buf, "log-likelihood %.6f   n = %zu   %s\n", fit.log_likelihood, fit.n_obs,
                  fit.converged ? "converged" : "not converged");
    out += buf;
    out += "* significant at the 5% level (|t| > 1.96)\n";
    return out;
}

}  // namespace gjrvol::serial
