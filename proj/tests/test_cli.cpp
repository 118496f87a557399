#include "gjrvol/cli.hpp"
#include "gjrvol/errors.hpp"
#include "gjrvol/json.hpp"
#include "gjrvol/montecarlo.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gjrvol;
using namespace gjrvol::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gjrvol");
    std::ostringstream out, err;
    const int code = main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "gjrvol_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_prices(const fs::path& p, std::size_t n) {
    const auto path = mc::simulate_path(mc::preset("gold"), n, 3);
    std::ofstream out(p);
    out << "Date,Close\n";
    double px = 100.0;
    for (std::size_t i = 0; i < path.returns.size(); ++i) {
        px *= std::exp(path.returns[i]);
        const auto d = std::chrono::sys_days(std::chrono::year{2001} / 1 / 1) + std::chrono::days{i};
        out << data::format_iso_date(d) << ',' << (i == 5 ? std::string() : std::to_string(px)) << '\n';
    }
}

}  // namespace

TEST_CASE("parse_args happy paths") {
    const auto input = scratch("sp500.csv");
    write_prices(input, 50);
    const auto fit = parse_args({"gjrvol", "fit", "--input", input.string(), "--mean", "ar1", "--dist", "skst",
                                 "--regime", "leverage"});
    CHECK(fit.command == Command::Fit);
    CHECK(fit.spec.mean == gjr::MeanKind::AR1);
    CHECK(fit.spec.dist == mle::DistKind::Skst);
    CHECK(fit.regime.kind == gjr::RegimeKind::Leverage);

    const auto surv =
        parse_args({"gjrvol", "survival", "--preset", "eq11", "--paths", "100", "--tgrid", "100,500,1000", "--seed", "42"});
    CHECK(surv.command == Command::Survival);
    CHECK(surv.preset == "eq11");
    CHECK(surv.paths == 100);
    CHECK(surv.tgrid == std::vector<std::size_t>{100, 500, 1000});
    CHECK(surv.seed == 42);

    const auto chk = parse_args({"gjrvol", "check", "--omega", "1.9651e-6", "--alpha", "-0.045001", "--beta",
                                 "0.92358", "--gamma", "0.213252"});
    REQUIRE(chk.params);
    CHECK(chk.params->alpha[0] == -0.045001);
}

TEST_CASE("usage errors") {
    try {
        parse_args({"gjrvol", "fit", "--regime", "bogus"});
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        for (const auto& name : gjr::regime_names()) CHECK(msg.find(name) != std::string::npos);
    }
    CHECK(invoke({"fit", "--regime", "bogus"}).code == 2);
    CHECK(invoke({"survival"}).code == 2);
    CHECK(invoke({"survival", "--preset", "eq99"}).code == 2);
    CHECK(invoke({"survival", "--preset", "eq11", "--bogus-flag"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"check", "--omega", "1e-6"}).code == 2);
    const auto r = invoke({"region", "--moment", "student-t", "--nu", "3"});
    CHECK(r.code == 2);
    CHECK(r.err.find('\n') == r.err.size() - 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("check reports the leverage violation") {
    const auto r = invoke({"check", "--omega", "0.019651e-4", "--alpha", "-0.045001", "--beta", "0.923580", "--gamma",
                           "0.213252", "--regime", "asymmetry"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["passed"] == false);
    bool found = false;
    for (const auto& v : doc["violations"]) found |= v["constraint"] == "α ≥ 0";
    CHECK(found);

    const auto preset = invoke({"check", "--preset", "eq11", "--regime", "leverage"});
    CHECK(nlohmann::json::parse(preset.out)["passed"] == true);
}

TEST_CASE("survival defaults and determinism") {
    const auto a = scratch("sr_a.csv"), b = scratch("sr_b.csv");
    REQUIRE(invoke({"survival", "--preset", "eq11", "--paths", "30", "--output", a.string()}).code == 0);
    REQUIRE(invoke({"survival", "--preset", "eq11", "--paths", "30", "--output", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    std::istringstream in(slurp(a));
    std::string line;
    std::getline(in, line);
    CHECK(line == "T,n_paths,SR");
    std::vector<std::size_t> ts;
    while (std::getline(in, line)) ts.push_back(std::stoul(line.substr(0, line.find(','))));
    CHECK(ts == std::vector<std::size_t>{100, 500, 1000, 5000, 20000});
}

TEST_CASE("region output") {
    const auto r = invoke({"region", "--moment", "normal", "--alpha-grid", "0.01:0.1:0.01", "--beta-grid",
                           "0.5:0.95:0.05", "--gamma-grid", "-0.1:0.1:0.01", "--admissible-only"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,beta,gamma,admissible");
    bool negative = false;
    while (std::getline(in, line)) {
        double a, b, g;
        int adm;
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &a, &b, &g, &adm);
        CHECK(adm == 1);
        negative |= g < 0;
    }
    CHECK(negative);
}

TEST_CASE("describe and fit through files") {
    const auto input = scratch("prices.csv");
    write_prices(input, 400);
    const auto stats = invoke({"describe", "--input", input.string()});
    REQUIRE(stats.code == 0);
    const auto doc = nlohmann::json::parse(stats.out);
    for (const char* key : {"n", "mean", "std_dev", "skewness", "excess_kurtosis", "jarque_bera", "ljung_box_lags"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["n"] == 399);

    const auto out = scratch("fit.json");
    const auto fit = invoke({"fit", "--input", input.string(), "--regime", "asymmetry-relaxed", "--multistart", "1",
                             "--output", out.string()});
    REQUIRE(fit.code == 0);
    CHECK(fit.out.find("log_xi") != std::string::npos);
    CHECK(fit.out.find("xi ") != std::string::npos);
    const auto result = nlohmann::json::parse(slurp(out));
    for (const char* key : {"mu", "phi", "omega", "alpha_1", "beta_1", "gamma_1", "log_xi", "xi", "nu"}) {
        CHECK(result["estimates"].contains(key));
    }
    CHECK(result["regime"]["name"] == "asymmetry-relaxed");

    // the fit output feeds back into check
    const auto chk = invoke({"check", "--params", out.string(), "--regime", "asymmetry-relaxed"});
    CHECK(chk.code == 0);
    CHECK(nlohmann::json::parse(chk.out)["passed"] == true);
}

TEST_CASE("computational failures exit 1 and leave no file") {
    const auto input = scratch("tiny.csv");
    {
        std::ofstream f(input);
        f << "Date,Close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,100\n";
    }
    const auto out = scratch("tiny_fit.json");
    fs::remove(out);
    const auto r = invoke({"fit", "--input", input.string(), "--output", out.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("TooShort") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(out));
    for (const auto& entry : fs::directory_iterator(out.parent_path())) {
        CHECK(entry.path().filename().string().find("tiny_fit.json.tmp") == std::string::npos);
    }
}

TEST_CASE("config file supplies defaults and flags override") {
    const auto cfg = scratch("run.toml");
    {
        std::ofstream f(cfg);
        f << "preset = \"eq12\"\npaths = 7\ntgrid = [100, 200]\nseed = 5\n";
    }
    const auto a = parse_args({"gjrvol", "survival", "--config", cfg.string()});
    CHECK(a.preset == "eq12");
    CHECK(a.paths == 7);
    CHECK(a.tgrid == std::vector<std::size_t>{100, 200});
    CHECK(a.seed == 5);
    const auto b = parse_args({"gjrvol", "survival", "--config", cfg.string(), "--paths", "9"});
    CHECK(b.paths == 9);
    CHECK(b.preset == "eq12");
}

TEST_CASE("atomic writes replace the target") {
    const auto p = scratch("atomic.txt");
    write_atomically(p.string(), "first");
    write_atomically(p.string(), "second");
    CHECK(slurp(p) == "second");
}

TEST_CASE("parameter documents") {
    const auto flat = nlohmann::json::parse(R"({"omega": 1e-6, "alpha_1": 0.05, "beta_1": 0.9, "gamma_1": 0.02})");
    const auto p = serial::gjr_params_from_json(flat);
    CHECK(p.alpha == std::vector<double>{0.05});
    CHECK(p.beta == std::vector<double>{0.9});
    const auto arrays =
        nlohmann::json::parse(R"({"omega": 1e-6, "alpha": [0.05, 0.01], "beta": [0.9], "gamma": [0.02, 0]})");
    CHECK(serial::gjr_params_from_json(arrays).q() == 2);
    CHECK_THROWS_AS(serial::gjr_params_from_json(nlohmann::json::parse(R"({"alpha_1": 0.1})")), Error);
}
