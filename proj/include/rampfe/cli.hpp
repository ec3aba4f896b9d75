#pragma once

#include <rampfe/config.hpp>
#include <rampfe/figures.hpp>
#include <rampfe/io.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/*! \file cli.hpp
    \brief Command-line front end: calibrate, simulate, pfe, backtest, figures.

    Exit codes: 0 success, 1 domain or validation error, 2 usage error.
    Failures print a JSON error report on stderr; success prints a JSON
    summary listing the artifacts written.
*/

namespace rampfe::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain = 1;
inline constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Command {
    std::string subcommand;
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> quantile;
    std::optional<std::size_t> threads;
    std::vector<std::string> overrides;
    std::vector<std::string> measures;
};

//! Config file (or defaults), then --set overrides, then dedicated flags.
inline RunConfig resolve_config(const Command& cmd) {
    RunConfig base = cmd.config ? load_config(*cmd.config) : RunConfig{};
    json doc = to_json(base);
    try {
        for (const auto& o : cmd.overrides)
            apply_override(doc, o);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (cmd.seed)
        doc["simulation"]["seed"] = *cmd.seed;
    if (cmd.quantile)
        doc["simulation"]["q"] = *cmd.quantile;
    if (cmd.threads)
        doc["simulation"]["threads"] = *cmd.threads;
    if (cmd.out)
        doc["output"]["dir"] = *cmd.out;
    return parse_config(doc, base.base_dir);
}

inline PriceOfRiskResult calibrate_profile(const RunConfig& cfg, std::size_t i) {
    const auto& a = cfg.appetite.at(i);
    std::optional<ReturnSample> sample;
    if (a.sample)
        sample.emplace(csv::read_column(cfg.resolve(*a.sample)));
    return calibrate(a.profile, a.method, a.options(), sample ? &*sample : nullptr);
}

//! The bank's m_b: the A measure's own (literal or calibrated), else the first profile's, else 0.
inline double bank_m_b(const RunConfig& cfg) {
    for (const auto& m : cfg.measures)
        if (const auto* a = std::get_if<RiskAppetite>(&m.spec))
            return m.m_b_from_appetite ? calibrate_profile(cfg, *m.m_b_from_appetite).m_b : a->m_b;
    return cfg.appetite.empty() ? 0.0 : calibrate_profile(cfg, 0).m_b;
}

inline std::vector<MeasureSpec> selected_measures(const RunConfig& cfg, const std::vector<std::string>& codes,
                                                  double m_b) {
    std::vector<MeasureSpec> out;
    for (const auto& m : cfg.measures) {
        const std::string code(measure_code(m.spec));
        if (!codes.empty() && std::find(codes.begin(), codes.end(), code) == codes.end())
            continue;
        MeasureSpec spec = m.spec;
        if (auto* a = std::get_if<RiskAppetite>(&spec); a && m.m_b_from_appetite)
            a->m_b = m_b;
        out.push_back(spec);
    }
    for (const auto& c : codes)
        if (std::none_of(out.begin(), out.end(), [&](const MeasureSpec& s) { return measure_code(s) == c; }))
            throw ValidationError({"measures." + c + ": requested with --measure but not configured"});
    return out;
}

inline std::filesystem::path artifact(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

//! Runs one subcommand; returns the list of artifacts written.
inline std::vector<std::string> execute(const Command& cmd, const RunConfig& cfg) {
    std::vector<std::string> written;
    auto write_text = [&](const std::string& name, const std::string& text) {
        const auto p = artifact(cfg, name);
        csv::write_file(p, text);
        written.push_back(p.generic_string());
    };
    auto write_doc = [&](const std::string& name, const json& doc) { write_text(name, doc.dump(2) + "\n"); };

    if (cmd.subcommand == "calibrate") {
        std::vector<io::CalibrationRecord> records;
        for (std::size_t i = 0; i < cfg.appetite.size(); ++i)
            records.push_back({cfg.appetite[i].name, cfg.appetite[i].profile, cfg.appetite[i].gamma,
                               calibrate_profile(cfg, i)});
        write_text("calibration.csv", io::calibration_csv(records));
        write_doc("calibration.json", io::calibration_json(records));
    } else if (cmd.subcommand == "simulate") {
        const double m_b = bank_m_b(cfg);
        for (const auto& spec : selected_measures(cfg, cmd.measures, m_b)) {
            const auto paths =
                simulate_paths(cfg.model, spec, cfg.grid, cfg.simulation.n_paths, cfg.simulation.seed,
                               cfg.simulation.threads);
            write_text("paths_" + std::string(measure_code(spec)) + ".csv", io::paths_csv(paths));
        }
    } else if (cmd.subcommand == "pfe") {
        ProfileOptions opt;
        opt.m_b = bank_m_b(cfg);
        opt.sigma = cfg.simulation.appetite_sigma;
        opt.compounding = cfg.simulation.compounding;
        opt.threads = cfg.simulation.threads;
        std::vector<ExposureProfile> profiles;
        for (const auto& spec : selected_measures(cfg, cmd.measures, *opt.m_b))
            profiles.push_back(pfe_profile(cfg.model, spec, cfg.portfolio, cfg.grid, cfg.simulation.q,
                                           cfg.simulation.n_paths, cfg.simulation.seed, opt));
        write_text("pfe.csv", io::profiles_csv(profiles));
        write_doc("pfe.json", io::profiles_json(profiles, cfg.simulation.seed));
    } else if (cmd.subcommand == "backtest") {
        if (!cfg.backtest)
            throw ValidationError({"backtest: section required by the backtest subcommand"});
        const auto& b = *cfg.backtest;
        HistoricalSeries series{csv::read_column(cfg.resolve(b.series)), b.period_length};
        const auto interval = estimate_interval(series, b.riskless_rate, b.confidence);
        const double m_b = b.m_b ? *b.m_b : bank_m_b(cfg);
        write_doc("backtest.json",
                  io::backtest_json(series, b.riskless_rate, interval, m_b, consistency_check(m_b, interval)));
    } else if (cmd.subcommand == "figures") {
        for (const auto& t : emit_figure_tables(cfg.figures))
            write_text(t.id + ".csv", t.to_csv());
    } else {
        throw UsageError("unknown subcommand '" + cmd.subcommand + "'");
    }
    return written;
}

inline json error_report(std::string_view kind, int code, const std::string& message,
                         const std::vector<std::string>& issues = {}) {
    json j = {{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
    if (!issues.empty())
        j["issues"] = issues;
    return j;
}

inline int run(const Command& cmd, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = resolve_config(cmd);
        const auto written = execute(cmd, cfg);
        out << json{{"status", "ok"}, {"command", cmd.subcommand}, {"artifacts", written}}.dump() << "\n";
        return exit_ok;
    } catch (const UsageError& e) {
        err << error_report("UsageError", exit_usage, e.what()).dump() << "\n";
        return exit_usage;
    } catch (const ValidationError& e) {
        err << error_report(to_string(e.kind()), exit_domain, e.what(), e.issues()).dump() << "\n";
        return exit_domain;
    } catch (const Error& e) {
        err << error_report(to_string(e.kind()), exit_domain, e.what()).dump() << "\n";
        return exit_domain;
    } catch (const std::exception& e) {
        err << error_report("InternalError", exit_domain, e.what()).dump() << "\n";
        return exit_domain;
    }
}

inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Potential future exposure under the risk appetite measure", "rampfe"};
    app.require_subcommand(1, 1);
    Command cmd;

    auto add_common = [&](CLI::App* sub, bool monte_carlo) {
        sub->add_option("--config", cmd.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", cmd.out, "output directory");
        sub->add_option("--set", cmd.overrides, "override a config field, key.path=value")->take_all();
        if (monte_carlo) {
            sub->add_option("--seed", cmd.seed, "Monte Carlo seed");
            sub->add_option("--quantile", cmd.quantile, "PFE quantile q");
            sub->add_option("--threads", cmd.threads, "worker threads (0 = hardware)");
            sub->add_option("--measure", cmd.measures, "measure to run (repeatable)")
                ->check(CLI::IsMember({"P", "Q", "A"}))
                ->take_all();
        } else {
            sub->add_option("--seed", cmd.seed, "accepted for uniformity; has no effect");
            sub->add_option("--quantile", cmd.quantile, "accepted for uniformity; has no effect");
        }
    };
    add_common(app.add_subcommand("calibrate", "implied volatility and price of risk per appetite profile"), false);
    add_common(app.add_subcommand("simulate", "simulate and write factor paths per measure"), true);
    add_common(app.add_subcommand("pfe", "exposure profiles (pfe, es, discounted_pfe, pfe_A) per measure"), true);
    add_common(app.add_subcommand("backtest", "price-of-risk interval from a historical series"), false);
    add_common(app.add_subcommand("figures", "figure tables fig3, fig4, fig5"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << error_report("UsageError", exit_usage, e.what()).dump() << "\n";
        return exit_usage;
    }
    cmd.subcommand = app.get_subcommands().front()->get_name();
    return run(cmd, out, err);
}

} // namespace rampfe::cli
