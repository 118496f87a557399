#include "gjrvol/cli.hpp"

#include "gjrvol/errors.hpp"
#include "gjrvol/json.hpp"
#include "gjrvol/market_data.hpp"
#include "gjrvol/montecarlo.hpp"
#include "gjrvol/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace gjrvol::cli {

namespace {

using Writer = std::function<void(std::ostream&)>;

std::string joined(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

/// Text forms collected by CLI11 before validation.
struct RawArgs {
    std::string mean = "ar1";
    std::string dist = "skst";
    std::string regime = "nonnegative";
    std::string moment;
    std::string init = "sample_variance";
    std::string boundary = "report";
    std::string delimiter = ",";
    std::string alpha_grid;
    std::string beta_grid;
    std::string gamma_grid;
    double nu = 7.0;
    std::optional<double> omega;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
};

gjr::GridRange parse_range(const std::string& text, const char* flag) {
    gjr::GridRange r;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step, &tail) != 3) {
        throw UsageError(std::string(flag) + " expects lo:hi:step, got '" + text + "'");
    }
    return r;
}

std::optional<gjr::MomentRequirement> moment_requirement(gjr::RegionMoment m, double nu) {
    switch (m) {
        case gjr::RegionMoment::None: return std::nullopt;
        case gjr::RegionMoment::SecondNormal: return gjr::MomentRequirement{gjr::MomentKind::SecondMoment, 0.0};
        case gjr::RegionMoment::FourthNormal: return gjr::MomentRequirement{gjr::MomentKind::FourthMomentNormal, 0.0};
        case gjr::RegionMoment::FourthStudentT:
            return gjr::MomentRequirement{gjr::MomentKind::FourthMomentStudentT, nu};
    }
    return std::nullopt;
}

void add_input_options(CLI::App* sub, RunConfig& cfg, RawArgs& raw, bool required) {
    auto* in = sub->add_option("--input,-i", cfg.input, "CSV file with a date and close column")
                   ->check(CLI::ExistingFile);
    if (required) in->required();
    sub->add_option("--date-column", cfg.date_column, "date column name")->capture_default_str();
    sub->add_option("--close-column", cfg.close_column, "close price column name")->capture_default_str();
    sub->add_option("--returns-column", cfg.returns_column,
                    "read returns from this column instead of computing them from prices");
    sub->add_option("--delimiter", raw.delimiter, "field separator")->capture_default_str();
}

void add_output_option(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--output,-o", cfg.output, "output file (standard output when absent)");
}

void add_regime_options(CLI::App* sub, RawArgs& raw) {
    const CLI::Validator known_regime(
        [](std::string& value) -> std::string {
            try {
                (void)gjr::parse_regime_kind(value);
                return {};
            } catch (const Error&) {
                return "invalid regime '" + value + "' (valid regimes: " + joined(gjr::regime_names()) + ")";
            }
        },
        "REGIME");
    sub->add_option("--regime", raw.regime, "constraint regime: " + joined(gjr::regime_names()))
        ->check(known_regime)
        ->capture_default_str();
    sub->add_option("--moment", raw.moment, "moment requirement: none, normal, fourth-normal, student-t");
    sub->add_option("--nu", raw.nu, "degrees of freedom for --moment student-t")->capture_default_str();
}

void add_preset_option(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--preset", cfg.preset, "model preset: " + joined(mc::preset_names()))->required();
}

void add_threads_option(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--threads", cfg.threads, "worker threads (default from GJRVOL_THREADS)");
}

void validate(RunConfig& cfg, const RawArgs& raw) {
    try {
        cfg.regime.kind = gjr::parse_regime_kind(raw.regime);
    } catch (const Error& e) {
        throw UsageError("invalid --regime '" + raw.regime + "' (valid regimes: " + joined(gjr::regime_names()) +
                         ")");
    }
    try {
        cfg.spec.mean = gjr::parse_mean_kind(raw.mean);
        cfg.spec.dist = mle::parse_dist_kind(raw.dist);
        cfg.init = gjr::parse_init_kind(raw.init);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (raw.boundary == "report") {
        cfg.fit.boundary_policy = mle::BoundaryPolicy::Report;
    } else if (raw.boundary == "omit") {
        cfg.fit.boundary_policy = mle::BoundaryPolicy::Omit;
    } else {
        throw UsageError("invalid --boundary '" + raw.boundary + "' (report, omit)");
    }
    if (raw.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
    cfg.delimiter = raw.delimiter[0];
    if (cfg.spec.q == 0) throw UsageError("--q must be >= 1");

    const std::string moment_default = cfg.command == Command::Region ? "normal" : "none";
    gjr::RegionMoment moment{};
    try {
        moment = gjr::parse_region_moment(raw.moment.empty() ? moment_default : raw.moment);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (moment == gjr::RegionMoment::FourthStudentT && !(raw.nu > 4.0)) {
        throw UsageError("--nu must exceed 4 for the Student-t fourth moment");
    }
    cfg.region.moment = moment;
    cfg.region.nu = raw.nu;
    if (auto req = moment_requirement(moment, raw.nu)) cfg.regime.moments.push_back(*req);

    if (!raw.alpha_grid.empty()) cfg.grid.alpha = parse_range(raw.alpha_grid, "--alpha-grid");
    if (!raw.beta_grid.empty()) cfg.grid.beta = parse_range(raw.beta_grid, "--beta-grid");
    if (!raw.gamma_grid.empty()) cfg.grid.gamma = parse_range(raw.gamma_grid, "--gamma-grid");

    if (cfg.command == Command::Check) {
        const bool by_flags = raw.omega.has_value();
        const int sources = int(by_flags) + int(!cfg.params_path.empty()) + int(!cfg.preset.empty());
        if (sources != 1) throw UsageError("check needs exactly one of --omega/--alpha/..., --params or --preset");
        if (by_flags) {
            if (raw.alpha.empty()) throw UsageError("--alpha is required with --omega");
            gjr::GjrParams p;
            p.omega = *raw.omega;
            p.alpha = raw.alpha;
            p.beta = raw.beta;
            p.gamma = raw.gamma.empty() ? std::vector<double>(raw.alpha.size(), 0.0) : raw.gamma;
            if (p.gamma.size() != p.alpha.size()) throw UsageError("--gamma needs as many entries as --alpha");
            cfg.params = p;
        }
    }
    if (!cfg.preset.empty()) {
        const auto names = mc::preset_names();
        if (std::find(names.begin(), names.end(), cfg.preset) == names.end()) {
            throw UsageError("unknown --preset '" + cfg.preset + "' (valid: " + joined(names) + ")");
        }
    }
    if (cfg.command == Command::Survival) {
        if (cfg.paths == 0) throw UsageError("--paths must be >= 1");
        if (cfg.tgrid.empty()) throw UsageError("--tgrid must not be empty");
        for (auto t : cfg.tgrid) {
            if (t == 0) throw UsageError("--tgrid entries must be >= 1");
        }
    }
    if (cfg.command == Command::Simulate && cfg.length == 0) throw UsageError("--T must be >= 1");
    if (cfg.command == Command::Describe) {
        for (auto lag : cfg.lb_lags) {
            if (lag == 0) throw UsageError("--lags entries must be >= 1");
        }
    }
    cfg.fit.init = cfg.init;
    cfg.fit.seed = cfg.seed;
    cfg.fit.threads = cfg.threads;
}

std::vector<double> read_returns_column(const RunConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + cfg.input + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "'" + cfg.input + "' is empty");
    auto split = [&](const std::string& text) {
        std::vector<std::string> cells;
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, cfg.delimiter)) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            cells.push_back(cell);
        }
        return cells;
    };
    const auto header = split(line);
    const auto it = std::find(header.begin(), header.end(), cfg.returns_column);
    if (it == header.end()) {
        throw Error(ErrorCode::InvalidInput, "column '" + cfg.returns_column + "' not found in '" + cfg.input + "'");
    }
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        double v = 0.0;
        std::size_t used = 0;
        try {
            if (col >= cells.size()) throw std::invalid_argument("missing cell");
            v = std::stod(cells[col], &used);
        } catch (const std::exception&) {
            throw MalformedRowError(row, "non-numeric return");
        }
        if (used != cells[col].size() || !std::isfinite(v)) throw MalformedRowError(row, "non-numeric return");
        values.push_back(v);
    }
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "no returns in '" + cfg.input + "'");
    return values;
}

std::vector<double> load_returns(const RunConfig& cfg) {
    if (!cfg.returns_column.empty()) return read_returns_column(cfg);
    data::CsvFormat fmt{cfg.date_column, cfg.close_column, cfg.delimiter};
    return data::to_log_returns(data::load_close_prices_file(cfg.input, fmt)).values();
}

void emit(const std::string& path, std::ostream& out, const Writer& writer) {
    if (path.empty()) {
        writer(out);
        out.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    try {
        {
            std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
            if (!file) throw Error(ErrorCode::InvalidInput, "cannot write '" + tmp.string() + "'");
            writer(file);
            file.flush();
            if (!file) throw Error(ErrorCode::InvalidInput, "write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void emit_json(const std::string& path, std::ostream& out, const serial::Json& doc) {
    emit(path, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

/// CLI11 reads --config only on the root app, so subcommand config files are
/// expanded here: each key becomes a flag placed ahead of the user's flags,
/// and keys whose option was given explicitly are dropped.
std::vector<std::string> merge_config_file(CLI::App& app, const std::vector<std::string>& args) {
    auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return app.get_subcommand_no_throw(a) != nullptr;
    });
    if (sub_it == args.end()) return args;
    CLI::App* sub = app.get_subcommand(*sub_it);

    std::string path;
    for (auto it = sub_it + 1; it != args.end(); ++it) {
        if (*it == "--config" && it + 1 != args.end()) path = *(it + 1);
        if (it->rfind("--config=", 0) == 0) path = it->substr(9);
    }
    if (path.empty()) return args;
    if (!std::filesystem::is_regular_file(path)) throw CLI::FileError::Missing(path);

    std::vector<const CLI::Option*> explicit_opts;
    for (auto it = sub_it + 1; it != args.end(); ++it) {
        if (it->rfind("--", 0) != 0) continue;
        const std::string flag = it->substr(0, it->find('='));
        if (const auto* opt = sub->get_option_no_throw(flag)) explicit_opts.push_back(opt);
    }

    std::vector<std::string> injected;
    for (const auto& item : CLI::ConfigTOML().from_file(path)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == sub->get_name())) {
            if (item.parents.size() == 1 && app.get_subcommand_no_throw(item.parents.front()) != nullptr) continue;
            throw CLI::ConfigError::Extras(item.fullname());
        }
        std::string flag = "--" + item.name;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        const auto* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || flag == "--config") throw CLI::ConfigError::Extras(item.fullname());
        if (std::find(explicit_opts.begin(), explicit_opts.end(), opt) != explicit_opts.end()) continue;
        if (opt->get_expected_max() == 0) {
            const bool on = item.inputs.size() == 1 && (item.inputs.front() == "true" || item.inputs.front() == "1");
            if (on) injected.push_back(flag);
            continue;
        }
        injected.push_back(flag);
        injected.insert(injected.end(), item.inputs.begin(), item.inputs.end());
    }

    std::vector<std::string> out(args.begin(), sub_it + 1);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), sub_it + 1, args.end());
    return out;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
    std::ostringstream unused;
    emit(path, unused, [&](std::ostream& os) { os << content; });
}

RunConfig parse_args(const std::vector<std::string>& argv) {
    RunConfig cfg;
    RawArgs raw;
    cfg.threads = default_thread_count();

    CLI::App app{"GJR-GARCH estimation, constraint checks and Monte Carlo survival studies", "gjrvol"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string config_path;
    auto config_for = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML file with default flag values")->check(CLI::ExistingFile);
    };

    auto* describe = app.add_subcommand("describe", "descriptive statistics of log returns (JSON)");
    config_for(describe);
    add_input_options(describe, cfg, raw, true);
    add_output_option(describe, cfg);
    describe->add_option("--lags", cfg.lb_lags, "Ljung-Box lags")->delimiter(',')->capture_default_str();

    auto* fit = app.add_subcommand("fit", "maximum-likelihood fit (JSON plus a parameter table)");
    config_for(fit);
    add_input_options(fit, cfg, raw, true);
    add_output_option(fit, cfg);
    fit->add_option("--table", cfg.table_path, "write the parameter table to this file");
    fit->add_option("--mean", raw.mean, "mean equation: constant, ar1, arma11")->capture_default_str();
    fit->add_option("--p", cfg.spec.p, "GARCH order p")->capture_default_str();
    fit->add_option("--q", cfg.spec.q, "ARCH order q")->capture_default_str();
    fit->add_option("--dist", raw.dist, "innovations: normal, t, skst")->capture_default_str();
    add_regime_options(fit, raw);
    fit->add_option("--init", raw.init, "presample variance: sample_variance, unconditional")
        ->capture_default_str();
    fit->add_option("--tolerance", cfg.fit.tolerance, "likelihood improvement tolerance")->capture_default_str();
    fit->add_option("--max-iter", cfg.fit.max_iterations, "simplex iteration cap")->capture_default_str();
    fit->add_option("--multistart", cfg.fit.multistart, "number of starting points")->capture_default_str();
    fit->add_option("--boundary", raw.boundary, "boundary std errors: report, omit")->capture_default_str();
    fit->add_option("--seed", cfg.seed, "multistart seed")->capture_default_str();
    add_threads_option(fit, cfg);

    auto* check = app.add_subcommand("check", "constraint report for a GJR parameter vector (JSON)");
    config_for(check);
    add_output_option(check, cfg);
    add_regime_options(check, raw);
    check->add_option("--omega", raw.omega, "omega");
    check->add_option("--alpha", raw.alpha, "alpha_1,...,alpha_q")->delimiter(',');
    check->add_option("--beta", raw.beta, "beta_1,...,beta_p")->delimiter(',');
    check->add_option("--gamma", raw.gamma, "gamma_1,...,gamma_q")->delimiter(',');
    check->add_option("--params", cfg.params_path, "JSON file with the parameters (a fit output works)")
        ->check(CLI::ExistingFile);
    check->add_option("--preset", cfg.preset, "take the variance parameters of a preset");

    auto* simulate = app.add_subcommand("simulate", "simulate one path of a preset (CSV)");
    config_for(simulate);
    add_output_option(simulate, cfg);
    add_preset_option(simulate, cfg);
    simulate->add_option("--T,--length", cfg.length, "path length")->capture_default_str();
    simulate->add_option("--burn-in", cfg.burn_in, "discarded leading steps")->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "random seed")->capture_default_str();

    auto* survival = app.add_subcommand("survival", "count paths whose variance stays positive (CSV)");
    config_for(survival);
    add_output_option(survival, cfg);
    add_preset_option(survival, cfg);
    survival->add_option("--paths", cfg.paths, "paths per horizon")->capture_default_str();
    survival->add_option("--tgrid", cfg.tgrid, "horizons")->delimiter(',')->capture_default_str();
    survival->add_option("--burn-in", cfg.burn_in, "discarded leading steps")->capture_default_str();
    survival->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    add_threads_option(survival, cfg);

    auto* region = app.add_subcommand("region", "grid scan of the admissible (alpha, beta, gamma) set (CSV)");
    config_for(region);
    add_output_option(region, cfg);
    region->add_option("--moment", raw.moment, "moment condition: none, normal, fourth-normal, student-t")
        ->default_str("normal");
    region->add_option("--nu", raw.nu, "degrees of freedom for --moment student-t")->capture_default_str();
    region->add_option("--alpha-grid", raw.alpha_grid, "lo:hi:step")->default_str("0.005:0.5:0.005");
    region->add_option("--beta-grid", raw.beta_grid, "lo:hi:step")->default_str("0.005:0.995:0.005");
    region->add_option("--gamma-grid", raw.gamma_grid, "lo:hi:step")->default_str("-0.5:0.5:0.005");
    region->add_flag("--admissible-only", cfg.admissible_only, "emit admissible rows only");
    add_threads_option(region, cfg);

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    try {
        args = merge_config_file(app, args);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const auto* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "describe") cfg.command = Command::Describe;
    if (name == "fit") cfg.command = Command::Fit;
    if (name == "check") cfg.command = Command::Check;
    if (name == "simulate") cfg.command = Command::Simulate;
    if (name == "survival") cfg.command = Command::Survival;
    if (name == "region") cfg.command = Command::Region;
    validate(cfg, raw);
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out) {
    switch (cfg.command) {
        case Command::Describe: {
            const auto stats = data::descriptive_stats(load_returns(cfg), cfg.lb_lags);
            emit_json(cfg.output, out, serial::to_json(stats));
            break;
        }
        case Command::Fit: {
            const auto returns = load_returns(cfg);
            const auto result = mle::fit(returns, cfg.spec, cfg.regime, cfg.fit);
            const auto table = serial::format_fit_table(result);
            emit_json(cfg.output, out, serial::to_json(result));
            if (!cfg.table_path.empty()) {
                emit(cfg.table_path, out, [&](std::ostream& os) { os << table; });
            } else if (!cfg.output.empty()) {
                out << table;
            }
            break;
        }
        case Command::Check: {
            gjr::GjrParams params;
            if (cfg.params) {
                params = *cfg.params;
            } else if (!cfg.params_path.empty()) {
                std::ifstream in(cfg.params_path);
                nlohmann::json doc;
                try {
                    in >> doc;
                } catch (const nlohmann::json::exception& e) {
                    throw Error(ErrorCode::InvalidInput, "cannot parse '" + cfg.params_path + "': " + e.what());
                }
                params = serial::gjr_params_from_json(doc);
            } else {
                params = mc::preset(cfg.preset).variance;
            }
            const auto report = gjr::regime_check(params, cfg.regime);
            emit_json(cfg.output, out, serial::to_json(report, params, cfg.regime));
            break;
        }
        case Command::Simulate: {
            const auto path =
                mc::simulate_path(mc::preset(cfg.preset), cfg.length, cfg.seed, mc::SimOptions{cfg.burn_in});
            emit(cfg.output, out, [&](std::ostream& os) { mc::write_path_csv(os, path); });
            break;
        }
        case Command::Survival: {
            const auto report = mc::survival_study(mc::preset(cfg.preset), cfg.paths, cfg.tgrid, cfg.seed,
                                                   cfg.threads, mc::SimOptions{cfg.burn_in});
            emit(cfg.output, out, [&](std::ostream& os) { report.write_csv(os); });
            break;
        }
        case Command::Region: {
            const auto table = gjr::admissible_region_scan(cfg.grid, cfg.region, cfg.threads);
            emit(cfg.output, out, [&](std::ostream& os) { table.write_csv(os, cfg.admissible_only); });
            break;
        }
    }
    return 0;
}

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_args(argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return 0;
    } catch (const UsageError& e) {
        err << "gjrvol: usage error: " << e.what() << "\n";
        return 2;
    }
    try {
        return run(cfg, out);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "gjrvol: error: " << msg << "\n";
        return 1;
    }
}

}  // namespace gjrvol::cli
