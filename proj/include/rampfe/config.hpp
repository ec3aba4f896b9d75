#pragma once

#include <rampfe/appetite.hpp>
#include <rampfe/backtest.hpp>
#include <rampfe/engine.hpp>
#include <rampfe/errors.hpp>
#include <rampfe/figures.hpp>
#include <rampfe/models.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/*! \file config.hpp
    \brief Run configuration: a single JSON document, parsed into typed
    specs and validated as a whole so every problem is reported at once.

    Every section is optional; omitted fields take the defaults of the
    corresponding C++ types. to_json() writes the fully expanded document.
*/

namespace rampfe {

using json = nlohmann::ordered_json;

class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<std::string> issues)
    : Error(ErrorKind::ValidationError, join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

  private:
    static std::string join(const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs)
            s += (s.empty() ? "" : "; ") + x;
        return s;
    }
    std::vector<std::string> issues_;
};

struct AppetiteConfig {
    std::string name = "unit";
    BusinessUnitProfile profile;
    CalibrationMethod method = CalibrationMethod::Normal;
    double gamma = -1.0;
    RootChoice root = RootChoice::Lower;
    DispersionConvention dispersion = DispersionConvention::Sample;
    std::optional<std::string> sample; //!< CSV of returns, required for Empirical

    CalibrationOptions options() const { return {gamma, root, dispersion}; }
    bool operator==(const AppetiteConfig&) const = default;
};

struct MeasureEntry {
    MeasureSpec spec;
    //! For the A measure: take m_b from this appetite profile's calibration.
    std::optional<std::size_t> m_b_from_appetite;
    bool operator==(const MeasureEntry&) const = default;
};

struct SimulationConfig {
    double q = 0.95;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    Compounding compounding = Compounding::Continuous;
    std::optional<double> appetite_sigma;
    bool operator==(const SimulationConfig&) const = default;
};

struct BacktestConfig {
    std::string series;
    double period_length = 1.0;
    double confidence = 0.95;
    double riskless_rate = 0.0;
    std::optional<double> m_b; //!< defaults to the first appetite profile's calibration
    bool operator==(const BacktestConfig&) const = default;
};

struct RunConfig {
    ModelSpec model{{LognormalAsset{}}, {}, 0.02};
    std::vector<MeasureEntry> measures{{Historical{0.08}, {}}, {RiskNeutral{}, {}}, {RiskAppetite{}, 0}};
    TimeGrid grid{{0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}, 8};
    Portfolio portfolio{{ForwardOnAsset{"S", 1.0, 5.0, 1.0}}};
    SimulationConfig simulation;
    std::vector<AppetiteConfig> appetite{AppetiteConfig{}};
    std::optional<BacktestConfig> backtest;
    FigureParams figures;
    std::string output_dir = "out";
    std::filesystem::path base_dir; //!< directory relative file references resolve against

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

class Reader {
  public:
    std::vector<std::string> issues;

    void issue(const std::string& where, const std::string& what) { issues.push_back(where + ": " + what); }

    const json* child(const json& obj, std::string_view key) const {
        if (!obj.is_object())
            return nullptr;
        const auto it = obj.find(std::string(key));
        return it == obj.end() || it->is_null() ? nullptr : &*it;
    }

    double number(const json& obj, std::string_view key, const std::string& path, double fallback) {
        const json* v = child(obj, key);
        if (!v)
            return fallback;
        if (!v->is_number()) {
            issue(path + "." + std::string(key), "expected a number");
            return fallback;
        }
        return v->get<double>();
    }

    std::optional<double> optional_number(const json& obj, std::string_view key, const std::string& path) {
        if (!child(obj, key))
            return std::nullopt;
        return number(obj, key, path, 0.0);
    }

    std::uint64_t unsigned_integer(const json& obj, std::string_view key, const std::string& path,
                                   std::uint64_t fallback) {
        const json* v = child(obj, key);
        if (!v)
            return fallback;
        if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
            issue(path + "." + std::string(key), "expected a non-negative integer");
            return fallback;
        }
        return v->get<std::uint64_t>();
    }

    std::string string(const json& obj, std::string_view key, const std::string& path, std::string fallback) {
        const json* v = child(obj, key);
        if (!v)
            return fallback;
        if (!v->is_string()) {
            issue(path + "." + std::string(key), "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    std::vector<double> numbers(const json& obj, std::string_view key, const std::string& path,
                                std::vector<double> fallback) {
        const json* v = child(obj, key);
        if (!v)
            return fallback;
        if (!v->is_array()) {
            issue(path + "." + std::string(key), "expected an array of numbers");
            return fallback;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) {
                issue(path + "." + std::string(key) + "[" + std::to_string(i) + "]", "expected a number");
                continue;
            }
            out.push_back((*v)[i].get<double>());
        }
        return out;
    }

    const json& section(const json& root, std::string_view key, const std::string& path, json::value_t type) {
        static const json empty_object = json::object();
        static const json empty_array = json::array();
        const json* v = child(root, key);
        const json& fallback = type == json::value_t::array ? empty_array : empty_object;
        if (!v)
            return fallback;
        if (v->type() != type) {
            issue(path.empty() ? std::string(key) : path + "." + std::string(key),
                  type == json::value_t::array ? "expected an array" : "expected an object");
            return fallback;
        }
        return *v;
    }

    template <class F>
    void check(const std::string& where, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            std::string msg = e.what();
            if (const auto pos = msg.find(": "); pos != std::string::npos)
                msg = msg.substr(pos + 2);
            issue(where, msg);
        }
    }
};

inline std::optional<CalibrationMethod> parse_method(std::string_view s) {
    if (s == "Normal")
        return CalibrationMethod::Normal;
    if (s == "ShiftedLognormal")
        return CalibrationMethod::ShiftedLognormal;
    if (s == "Empirical")
        return CalibrationMethod::Empirical;
    return std::nullopt;
}

inline std::string_view compounding_name(Compounding c) {
    switch (c) {
    case Compounding::Continuous: return "continuous";
    case Compounding::Simple: return "simple";
    case Compounding::Annual: return "annual";
    }
    return "continuous";
}

} // namespace detail

/*! Parses and validates a configuration document. Throws ValidationError
    listing every problem found.
*/
inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = {}) {
    detail::Reader rd;
    RunConfig cfg;
    cfg.base_dir = base_dir;
    if (!root.is_object())
        throw ValidationError({"config: top level must be an object"});

    // model
    if (rd.child(root, "model")) {
        const json& m = rd.section(root, "model", "", json::value_t::object);
        cfg.model.flat_rate = rd.number(m, "flat_rate", "model", cfg.model.flat_rate);
        if (const json* fs = rd.child(m, "factors")) {
            cfg.model.factors.clear();
            if (!fs->is_array())
                rd.issue("model.factors", "expected an array");
            for (std::size_t i = 0; fs->is_array() && i < fs->size(); ++i) {
                const json& f = (*fs)[i];
                const std::string path = "model.factors[" + std::to_string(i) + "]";
                const std::string type = rd.string(f, "type", path, "lognormal_asset");
                if (type == "lognormal_asset") {
                    LognormalAsset a;
                    a.name = rd.string(f, "name", path, a.name);
                    a.s0 = rd.number(f, "s0", path, a.s0);
                    a.sigma = rd.number(f, "sigma", path, a.sigma);
                    cfg.model.factors.emplace_back(a);
                } else if (type == "mean_reverting_rate") {
                    MeanRevertingRate r;
                    r.name = rd.string(f, "name", path, r.name);
                    r.r0 = rd.number(f, "r0", path, r.r0);
                    r.kappa = rd.number(f, "kappa", path, r.kappa);
                    r.theta = rd.number(f, "theta", path, r.theta);
                    r.sigma_r = rd.number(f, "sigma_r", path, r.sigma_r);
                    cfg.model.factors.emplace_back(r);
                } else {
                    rd.issue(path + ".type", "unknown factor type '" + type + "'");
                }
            }
        }
        if (const json* c = rd.child(m, "correlation")) {
            if (!c->is_array()) {
                rd.issue("model.correlation", "expected a matrix");
            } else {
                for (std::size_t i = 0; i < c->size(); ++i) {
                    const std::string path = "model.correlation[" + std::to_string(i) + "]";
                    std::vector<double> row;
                    if (!(*c)[i].is_array())
                        rd.issue(path, "expected an array of numbers");
                    for (const auto& x : (*c)[i].is_array() ? (*c)[i] : json::array()) {
                        if (x.is_number())
                            row.push_back(x.get<double>());
                        else
                            rd.issue(path, "expected a number");
                    }
                    cfg.model.correlation.push_back(row);
                }
            }
        }
    }

    // grid
    {
        const json& g = rd.section(root, "grid", "", json::value_t::object);
        cfg.grid.dates = rd.numbers(g, "dates", "grid", cfg.grid.dates);
        cfg.grid.substeps = static_cast<int>(rd.unsigned_integer(g, "substeps", "grid", 8));
    }

    // portfolio
    if (const json* ps = rd.child(root, "portfolio")) {
        cfg.portfolio.positions.clear();
        if (!ps->is_array())
            rd.issue("portfolio", "expected an array of positions");
        for (std::size_t i = 0; ps->is_array() && i < ps->size(); ++i) {
            const json& p = (*ps)[i];
            const std::string path = "portfolio[" + std::to_string(i) + "]";
            const std::string type = rd.string(p, "type", path, "");
            if (type == "forward") {
                ForwardOnAsset f;
                f.asset = rd.string(p, "asset", path, f.asset);
                f.strike = rd.number(p, "strike", path, f.strike);
                f.maturity = rd.number(p, "maturity", path, f.maturity);
                f.notional = rd.number(p, "notional", path, f.notional);
                cfg.portfolio.positions.emplace_back(f);
            } else if (type == "zcb") {
                ZeroCouponBondHolding z;
                z.maturity = rd.number(p, "maturity", path, z.maturity);
                z.notional = rd.number(p, "notional", path, z.notional);
                cfg.portfolio.positions.emplace_back(z);
            } else if (type == "linear") {
                LinearCombination lin;
                const json& w = rd.section(p, "weights", path, json::value_t::object);
                for (const auto& [name, value] : w.items()) {
                    if (!value.is_number())
                        rd.issue(path + ".weights." + name, "expected a number");
                    else
                        lin.weights.emplace_back(name, value.get<double>());
                }
                cfg.portfolio.positions.emplace_back(lin);
            } else {
                rd.issue(path + ".type", "expected one of forward, zcb, linear");
            }
        }
    }

    // simulation
    {
        const json& s = rd.section(root, "simulation", "", json::value_t::object);
        auto& sim = cfg.simulation;
        sim.q = rd.number(s, "q", "simulation", sim.q);
        sim.n_paths = rd.unsigned_integer(s, "n_paths", "simulation", sim.n_paths);
        sim.seed = rd.unsigned_integer(s, "seed", "simulation", sim.seed);
        sim.threads = rd.unsigned_integer(s, "threads", "simulation", sim.threads);
        const auto comp = rd.string(s, "compounding", "simulation", "continuous");
        if (comp == "continuous")
            sim.compounding = Compounding::Continuous;
        else if (comp == "simple")
            sim.compounding = Compounding::Simple;
        else if (comp == "annual")
            sim.compounding = Compounding::Annual;
        else
            rd.issue("simulation.compounding", "expected continuous, simple or annual");
        sim.appetite_sigma = rd.optional_number(s, "appetite_sigma", "simulation");
        if (!(sim.q > 0.0 && sim.q < 1.0))
            rd.issue("simulation.q", "must lie in (0, 1)");
        if (sim.n_paths < 2)
            rd.issue("simulation.n_paths", "must be >= 2");
        if (sim.appetite_sigma && *sim.appetite_sigma < 0.0)
            rd.issue("simulation.appetite_sigma", "must be >= 0");
    }

    // appetite profiles
    if (const json* ap = rd.child(root, "appetite")) {
        cfg.appetite.clear();
        if (!ap->is_array())
            rd.issue("appetite", "expected an array of business-unit profiles");
        for (std::size_t i = 0; ap->is_array() && i < ap->size(); ++i) {
            const json& a = (*ap)[i];
            const std::string path = "appetite[" + std::to_string(i) + "]";
            AppetiteConfig ac;
            ac.name = rd.string(a, "name", path, "unit" + std::to_string(i));
            ac.profile.mu_required = rd.number(a, "mu_required", path, ac.profile.mu_required);
            ac.profile.limit_multiple = rd.number(a, "L", path, ac.profile.limit_multiple);
            ac.profile.quantile = rd.number(a, "q", path, ac.profile.quantile);
            ac.profile.riskless_rate = rd.number(a, "r", path, ac.profile.riskless_rate);
            const auto method = rd.string(a, "method", path, "Normal");
            if (const auto m = detail::parse_method(method))
                ac.method = *m;
            else
                rd.issue(path + ".method", "expected Normal, ShiftedLognormal or Empirical");
            ac.gamma = rd.number(a, "gamma", path, ac.gamma);
            const auto root_choice = rd.string(a, "root", path, "lower");
            if (root_choice == "upper")
                ac.root = RootChoice::Upper;
            else if (root_choice != "lower")
                rd.issue(path + ".root", "expected lower or upper");
            const auto disp = rd.string(a, "dispersion", path, "sample");
            if (disp == "population")
                ac.dispersion = DispersionConvention::Population;
            else if (disp != "sample")
                rd.issue(path + ".dispersion", "expected sample or population");
            if (rd.child(a, "sample"))
                ac.sample = rd.string(a, "sample", path, "");
            cfg.appetite.push_back(ac);
        }
    }
    for (std::size_t i = 0; i < cfg.appetite.size(); ++i) {
        const auto& ac = cfg.appetite[i];
        const std::string path = "appetite[" + std::to_string(i) + "]";
        const auto& p = ac.profile;
        if (!(p.quantile > 0.0 && p.quantile < 1.0))
            rd.issue(path + ".q", "must lie in (0, 1)");
        if (!(p.limit_multiple > 0.0))
            rd.issue(path + ".L", "must be > 0");
        if (ac.method == CalibrationMethod::Empirical) {
            if (!ac.sample)
                rd.issue(path + ".sample", "Empirical method needs a return sample file");
            else if (!std::filesystem::exists(cfg.resolve(*ac.sample)))
                rd.issue(path + ".sample", "file not found: " + cfg.resolve(*ac.sample).string());
        } else if (ac.sample && !std::filesystem::exists(cfg.resolve(*ac.sample))) {
            rd.issue(path + ".sample", "file not found: " + cfg.resolve(*ac.sample).string());
        }
    }

    // measures
    if (const json* ms = rd.child(root, "measures")) {
        cfg.measures.clear();
        if (!ms->is_object())
            rd.issue("measures", "expected an object keyed by P, Q, A");
        static const json no_measures = json::object();
        const json& measure_obj = ms->is_object() ? *ms : no_measures;
        for (const auto& [code, body] : measure_obj.items()) {
            const std::string path = "measures." + code;
            if (code == "P") {
                cfg.measures.push_back({MeasureSpec{Historical{rd.number(body, "drift", path, 0.08)}}, {}});
            } else if (code == "Q") {
                RiskNeutral q;
                const auto kind = rd.string(body, "numeraire", path, "bank_account");
                if (kind == "t_forward") {
                    q.numeraire.kind = NumeraireKind::TForwardBond;
                    q.numeraire.maturity =
                        rd.number(body, "maturity", path, cfg.grid.dates.empty() ? 0.0 : cfg.grid.dates.back());
                } else if (kind != "bank_account") {
                    rd.issue(path + ".numeraire", "expected bank_account or t_forward");
                }
                cfg.measures.push_back({MeasureSpec{q}, {}});
            } else if (code == "A") {
                RiskAppetite a;
                a.riskless_rate = rd.optional_number(body, "riskless_rate", path);
                std::optional<std::size_t> from;
                const json* mb = rd.child(body, "m_b");
                if (mb && mb->is_number()) {
                    a.m_b = mb->get<double>();
                } else if (!mb || (mb->is_string() && mb->get<std::string>() == "calibrated")) {
                    from = rd.unsigned_integer(body, "appetite", path, 0);
                } else {
                    rd.issue(path + ".m_b", "expected a number or \"calibrated\"");
                }
                if (from && *from >= cfg.appetite.size())
                    rd.issue(path + ".appetite", "no appetite profile #" + std::to_string(*from) + " to calibrate m_b from");
                cfg.measures.push_back({MeasureSpec{a}, from});
            } else {
                rd.issue(path, "unknown measure (expected P, Q or A)");
            }
        }
    } else if (cfg.appetite.empty()) {
        cfg.measures.back().m_b_from_appetite.reset();
    }

    // backtest
    if (const json* bt = rd.child(root, "backtest")) {
        BacktestConfig b;
        b.series = rd.string(*bt, "series", "backtest", "");
        b.period_length = rd.number(*bt, "period_length", "backtest", b.period_length);
        b.confidence = rd.number(*bt, "confidence", "backtest", b.confidence);
        b.riskless_rate = rd.number(*bt, "riskless_rate", "backtest", b.riskless_rate);
        b.m_b = rd.optional_number(*bt, "m_b", "backtest");
        if (b.series.empty())
            rd.issue("backtest.series", "missing historical series file");
        else if (!std::filesystem::exists(cfg.resolve(b.series)))
            rd.issue("backtest.series", "file not found: " + cfg.resolve(b.series).string());
        if (!(b.period_length > 0.0))
            rd.issue("backtest.period_length", "must be > 0");
        if (!(b.confidence > 0.0 && b.confidence < 1.0))
            rd.issue("backtest.confidence", "must lie in (0, 1)");
        cfg.backtest = b;
    }

    // figures
    {
        const json& f = rd.section(root, "figures", "", json::value_t::object);
        auto& fp = cfg.figures;
        fp.mu_required = rd.number(f, "mu_required", "figures", fp.mu_required);
        fp.r = rd.number(f, "r", "figures", fp.r);
        fp.q = rd.number(f, "q", "figures", fp.q);
        fp.q_levels = rd.numbers(f, "q_levels", "figures", fp.q_levels);
        fp.limit_min = rd.number(f, "L_min", "figures", fp.limit_min);
        fp.limit_max = rd.number(f, "L_max", "figures", fp.limit_max);
        fp.limit_step = rd.number(f, "L_step", "figures", fp.limit_step);
        fp.gamma = rd.number(f, "gamma", "figures", fp.gamma);
        if (!(fp.q > 0.0 && fp.q < 1.0))
            rd.issue("figures.q", "must lie in (0, 1)");
        for (double q : fp.q_levels)
            if (!(q > 0.0 && q < 1.0))
                rd.issue("figures.q_levels", "levels must lie in (0, 1)");
        if (!(fp.limit_step > 0.0) || fp.limit_max < fp.limit_min)
            rd.issue("figures", "L grid needs L_step > 0 and L_max >= L_min");
    }

    {
        const json& o = rd.section(root, "output", "", json::value_t::object);
        cfg.output_dir = rd.string(o, "dir", "output", cfg.output_dir);
    }

    // cross-field domain checks
    rd.check("model", [&] { cfg.model.validate(); });
    rd.check("grid", [&] { cfg.grid.validate(); });
    if (!cfg.model.factors.empty())
        rd.check("portfolio", [&] { cfg.portfolio.validate(cfg.model); });
    for (const auto& m : cfg.measures) {
        if (const auto* q = std::get_if<RiskNeutral>(&m.spec);
            q && q->numeraire.kind == NumeraireKind::TForwardBond && !cfg.grid.dates.empty() &&
            q->numeraire.maturity < cfg.grid.dates.back())
            rd.issue("measures.Q.maturity", "T-forward maturity must be >= the last stopping date");
    }

    if (!rd.issues.empty())
        throw ValidationError(rd.issues);
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    RAMPFE_REQUIRE(f.good(), ErrorKind::IoError, "cannot read config " + path.string());
    json root;
    try {
        root = json::parse(f, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
    return parse_config(root, path.parent_path());
}

//! Fully expanded document; parse_config(to_json(c)) == c.
inline json to_json(const RunConfig& cfg) {
    json root;
    json model;
    model["flat_rate"] = cfg.model.flat_rate;
    json factors = json::array();
    for (const auto& f : cfg.model.factors) {
        json jf;
        if (const auto* a = std::get_if<LognormalAsset>(&f)) {
            jf["type"] = "lognormal_asset";
            jf["name"] = a->name;
            jf["s0"] = a->s0;
            jf["sigma"] = a->sigma;
        } else {
            const auto& r = std::get<MeanRevertingRate>(f);
            jf["type"] = "mean_reverting_rate";
            jf["name"] = r.name;
            jf["r0"] = r.r0;
            jf["kappa"] = r.kappa;
            jf["theta"] = r.theta;
            jf["sigma_r"] = r.sigma_r;
        }
        factors.push_back(jf);
    }
    model["factors"] = factors;
    model["correlation"] = cfg.model.correlation;
    root["model"] = model;

    json measures = json::object();
    for (const auto& m : cfg.measures) {
        json jm = json::object();
        if (const auto* p = std::get_if<Historical>(&m.spec)) {
            jm["drift"] = p->drift;
        } else if (const auto* q = std::get_if<RiskNeutral>(&m.spec)) {
            if (q->numeraire.kind == NumeraireKind::TForwardBond) {
                jm["numeraire"] = "t_forward";
                jm["maturity"] = q->numeraire.maturity;
            } else {
                jm["numeraire"] = "bank_account";
            }
        } else {
            const auto& a = std::get<RiskAppetite>(m.spec);
            if (m.m_b_from_appetite) {
                jm["m_b"] = "calibrated";
                jm["appetite"] = *m.m_b_from_appetite;
            } else {
                jm["m_b"] = a.m_b;
            }
            jm["riskless_rate"] = a.riskless_rate ? json(*a.riskless_rate) : json(nullptr);
        }
        measures[std::string(measure_code(m.spec))] = jm;
    }
    root["measures"] = measures;

    root["grid"] = {{"dates", cfg.grid.dates}, {"substeps", cfg.grid.substeps}};

    json portfolio = json::array();
    for (const auto& pos : cfg.portfolio.positions) {
        json jp;
        if (const auto* f = std::get_if<ForwardOnAsset>(&pos)) {
            jp = {{"type", "forward"}, {"asset", f->asset}, {"strike", f->strike}, {"maturity", f->maturity},
                  {"notional", f->notional}};
        } else if (const auto* z = std::get_if<ZeroCouponBondHolding>(&pos)) {
            jp = {{"type", "zcb"}, {"maturity", z->maturity}, {"notional", z->notional}};
        } else {
            json w = json::object();
            for (const auto& [name, v] : std::get<LinearCombination>(pos).weights)
                w[name] = v;
            jp = {{"type", "linear"}, {"weights", w}};
        }
        portfolio.push_back(jp);
    }
    root["portfolio"] = portfolio;

    const auto& sim = cfg.simulation;
    root["simulation"] = {{"q", sim.q},
                          {"n_paths", sim.n_paths},
                          {"seed", sim.seed},
                          {"threads", sim.threads},
                          {"compounding", detail::compounding_name(sim.compounding)},
                          {"appetite_sigma", sim.appetite_sigma ? json(*sim.appetite_sigma) : json(nullptr)}};

    json appetite = json::array();
    for (const auto& a : cfg.appetite) {
        appetite.push_back({{"name", a.name},
                            {"mu_required", a.profile.mu_required},
                            {"L", a.profile.limit_multiple},
                            {"q", a.profile.quantile},
                            {"r", a.profile.riskless_rate},
                            {"method", to_string(a.method)},
                            {"gamma", a.gamma},
                            {"root", a.root == RootChoice::Lower ? "lower" : "upper"},
                            {"dispersion", a.dispersion == DispersionConvention::Sample ? "sample" : "population"},
                            {"sample", a.sample ? json(*a.sample) : json(nullptr)}});
    }
    root["appetite"] = appetite;

    if (cfg.backtest) {
        const auto& b = *cfg.backtest;
        root["backtest"] = {{"series", b.series},
                            {"period_length", b.period_length},
                            {"confidence", b.confidence},
                            {"riskless_rate", b.riskless_rate},
                            {"m_b", b.m_b ? json(*b.m_b) : json(nullptr)}};
    }

    const auto& fp = cfg.figures;
    root["figures"] = {{"mu_required", fp.mu_required}, {"r", fp.r},           {"q", fp.q},
                       {"q_levels", fp.q_levels},       {"L_min", fp.limit_min}, {"L_max", fp.limit_max},
                       {"L_step", fp.limit_step},       {"gamma", fp.gamma}};
    root["output"] = {{"dir", cfg.output_dir}};
    return root;
}

/*! Applies "a.b.0.c=value" to a document. The path must already exist;
    value is read as JSON when it parses, otherwise as a string.
*/
inline void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    RAMPFE_REQUIRE(eq != std::string_view::npos && eq > 0, ErrorKind::InvalidArgument,
                   "override '" + std::string(assignment) + "' is not key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
        } else if (node->is_array() && !part.empty() &&
                   part.find_first_not_of("0123456789") == std::string::npos && std::stoul(part) < node->size()) {
            node = &(*node)[std::stoul(part)];
        } else {
            throw Error(ErrorKind::InvalidArgument, "override key '" + key + "' does not name a config field");
        }
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    json value = json::parse(raw, nullptr, false);
    *node = value.is_discarded() ? json(raw) : value;
}

} // namespace rampfe
