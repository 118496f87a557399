#include "gjrvol/errors.hpp"
#include "gjrvol/gjr.hpp"
#include "gjrvol/json.hpp"
#include "gjrvol/market_data.hpp"
#include "gjrvol/mle.hpp"
#include "gjrvol/montecarlo.hpp"
#include "gjrvol/skst.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace gjrvol;

namespace {

// Results travel as plain dicts built from the same JSON the CLI writes.
py::object to_python(const serial::Json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

gjr::GjrParams make_params(double omega, std::vector<double> alpha, std::vector<double> beta,
                           std::vector<double> gamma) {
    return {omega, std::move(beta), std::move(alpha), std::move(gamma)};
}

gjr::ConstraintRegime make_regime(const std::string& name, const std::vector<std::string>& moments, double nu) {
    gjr::ConstraintRegime regime{gjr::parse_regime_kind(name), {}};
    for (const auto& m : moments) {
        if (m == "second") {
            regime.moments.push_back({gjr::MomentKind::SecondMoment, 0.0});
        } else if (m == "fourth-normal") {
            regime.moments.push_back({gjr::MomentKind::FourthMomentNormal, 0.0});
        } else if (m == "fourth-student-t") {
            regime.moments.push_back({gjr::MomentKind::FourthMomentStudentT, nu});
        } else {
            throw Error(ErrorCode::InvalidInput, "unknown moment requirement '" + m + "'");
        }
    }
    return regime;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GJR-GARCH estimation under skewed Student-t innovations";

    static py::exception<Error> error_type(m, "GjrvolError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type.ptr())(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.def("presets", &mc::preset_names);
    m.def("regimes", &gjr::regime_names);

    m.def("load_returns", [](const std::string& path, const std::string& date_column, const std::string& close_column) {
              const auto returns = data::to_log_returns(data::load_close_prices_file(path, {date_column, close_column, ','}));
              return returns.values();
          },
          py::arg("path"), py::arg("date_column") = "Date", py::arg("close_column") = "Close",
          "Log returns from a close-price CSV.");

    m.def("describe", [](const std::vector<double>& returns, const std::vector<std::size_t>& lags) {
              return to_python(serial::to_json(data::descriptive_stats(returns, lags)));
          },
          py::arg("returns"), py::arg("lags") = data::kDefaultLjungBoxLags);

    m.def("skst_pdf", [](double z, double xi, double nu) { return skst::density(z, {xi, nu}); },
          py::arg("z"), py::arg("xi"), py::arg("nu"));
    m.def("skst_cdf", [](double z, double xi, double nu) { return skst::cdf(z, {xi, nu}); },
          py::arg("z"), py::arg("xi"), py::arg("nu"));
    m.def("skst_quantile", [](double p, double xi, double nu) { return skst::quantile(p, {xi, nu}); },
          py::arg("p"), py::arg("xi"), py::arg("nu"));
    m.def("skst_sample", [](std::size_t n, double xi, double nu, std::uint64_t seed) {
              Rng rng(seed);
              return skst::sample(rng, {xi, nu}, n);
          },
          py::arg("n"), py::arg("xi"), py::arg("nu"), py::arg("seed") = 0);

    m.def("regime_check",
          [](double omega, std::vector<double> alpha, std::vector<double> beta, std::vector<double> gamma,
             const std::string& regime, const std::vector<std::string>& moments, double nu) {
              const auto params = make_params(omega, std::move(alpha), std::move(beta), std::move(gamma));
              const auto r = make_regime(regime, moments, nu);
              return to_python(serial::to_json(gjr::regime_check(params, r), params, r));
          },
          py::arg("omega"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("regime") = "nonnegative",
          py::arg("moments") = std::vector<std::string>{}, py::arg("nu") = 0.0);

    m.def("conditional_variances",
          [](const std::vector<double>& residuals, double omega, std::vector<double> alpha, std::vector<double> beta,
             std::vector<double> gamma) {
              const auto params = make_params(omega, std::move(alpha), std::move(beta), std::move(gamma));
              return gjr::conditional_variances(residuals, params, gjr::VarianceInit{});
          },
          py::arg("residuals"), py::arg("omega"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"));

    m.def("simulate", [](const std::string& preset, std::size_t T, std::uint64_t seed, std::size_t burn_in) {
              const auto path = mc::simulate_path(mc::preset(preset), T, seed, {burn_in});
              py::dict out;
              out["returns"] = path.returns;
              out["variances"] = path.variances;
              out["died_at"] = path.died_at ? py::cast(*path.died_at) : py::none();
              out["init_fallback"] = path.init_fallback;
              return out;
          },
          py::arg("preset"), py::arg("T"), py::arg("seed") = 42, py::arg("burn_in") = 0);

    m.def("survival",
          [](const std::string& preset, std::size_t n_paths, const std::vector<std::size_t>& tgrid, std::uint64_t seed,
             unsigned threads) {
              const auto report = mc::survival_study(mc::preset(preset), n_paths, tgrid, seed, threads);
              py::list rows;
              for (const auto& r : report.rows) {
                  py::dict row;
                  row["T"] = r.T;
                  row["n_paths"] = r.n_paths;
                  row["SR"] = r.survivors;
                  row["death_times"] = r.death_times;
                  rows.append(row);
              }
              return rows;
          },
          py::arg("preset"), py::arg("n_paths") = 100,
          py::arg("tgrid") = std::vector<std::size_t>{100, 500, 1000, 5000, 20000}, py::arg("seed") = 42,
          py::arg("threads") = 0);

    m.def("region_count",
          [](const std::string& moment, double nu, bool pairing, unsigned threads) {
              gjr::RegionConstraints c;
              c.moment = gjr::parse_region_moment(moment);
              c.nu = nu;
              c.pairing = pairing;
              return gjr::admissible_region_scan(gjr::RegionGrid{}, c, threads).admissible_count();
          },
          py::arg("moment") = "normal", py::arg("nu") = 7.0, py::arg("pairing") = true, py::arg("threads") = 0,
          "Admissible points of the default (alpha, beta, gamma) grid.");

    m.def("fit",
          [](const std::vector<double>& returns, const std::string& mean, std::size_t p, std::size_t q,
             const std::string& dist, const std::string& regime, std::size_t multistart, std::uint64_t seed,
             unsigned threads) {
              const mle::ModelSpec spec{gjr::parse_mean_kind(mean), p, q, mle::parse_dist_kind(dist)};
              mle::FitOptions options;
              options.multistart = multistart;
              options.seed = seed;
              options.threads = threads;
              mle::FitResult result;
              {
                  py::gil_scoped_release release;
                  result = mle::fit(returns, spec, {gjr::parse_regime_kind(regime), {}}, options);
              }
              return to_python(serial::to_json(result));
          },
          py::arg("returns"), py::arg("mean") = "ar1", py::arg("p") = 1, py::arg("q") = 1, py::arg("dist") = "skst",
          py::arg("regime") = "nonnegative", py::arg("multistart") = 5, py::arg("seed") = 0, py::arg("threads") = 1,
          "Maximum-likelihood fit; returns the same dict as `gjrvol fit` writes.");
}
