#include "oracles.hpp"
#include "scratch.hpp"

#include <rampfe/config.hpp>
#include <rampfe/figures.hpp>
#include <rampfe/io.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

using namespace rampfe;
using testing_util::configs_dir;

namespace {
bool mentions(const ValidationError& e, const std::string& field) {
    return std::any_of(e.issues().begin(), e.issues().end(),
                       [&](const std::string& s) { return s.rfind(field, 0) == 0; });
}

ValidationError expect_invalid(const json& doc, const std::filesystem::path& base = {}) {
    try {
        parse_config(doc, base);
    } catch (const ValidationError& e) {
        return e;
    }
    ADD_FAILURE() << "config was accepted";
    return ValidationError({});
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < s.size()) {
        const auto nl = s.find('\n', start);
        out.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}
} // namespace

TEST(Config, EmptyDocumentTakesDefaults) {
    const auto cfg = parse_config(json::object());
    EXPECT_EQ(cfg.simulation.q, 0.95);
    EXPECT_EQ(cfg.measures.size(), 3u);
    EXPECT_EQ(cfg.model.factors.size(), 1u);
    EXPECT_EQ(cfg.portfolio.positions.size(), 1u);
    EXPECT_FALSE(cfg.backtest.has_value());
}

TEST(Config, LoadsStochasticRateExample) {
    const auto cfg = load_config(configs_dir / "stochastic_rates.json");
    ASSERT_EQ(cfg.model.factors.size(), 2u);
    EXPECT_TRUE(cfg.model.stochastic_rates());
    EXPECT_EQ(cfg.model.correlation_between(0, 1), 0.3);
    ASSERT_EQ(cfg.measures.size(), 3u);
    const auto& q = std::get<RiskNeutral>(cfg.measures[1].spec);
    EXPECT_EQ(q.numeraire.kind, NumeraireKind::TForwardBond);
    EXPECT_EQ(q.numeraire.maturity, 5.0);
    EXPECT_EQ(cfg.measures[2].m_b_from_appetite, std::optional<std::size_t>(0));
    ASSERT_EQ(cfg.appetite.size(), 3u);
    EXPECT_EQ(cfg.appetite[2].method, CalibrationMethod::Empirical);
    ASSERT_TRUE(cfg.backtest.has_value());
    EXPECT_TRUE(std::filesystem::exists(cfg.resolve(cfg.backtest->series)));
}

TEST(Config, RoundTripIsFieldwiseEqual) {
    for (const char* name : {"stochastic_rates.json", "flat_rate.json"}) {
        const auto cfg = load_config(configs_dir / name);
        const auto doc = to_json(cfg);
        const auto again = parse_config(doc, cfg.base_dir);
        EXPECT_EQ(again, cfg) << name;
        EXPECT_EQ(to_json(again).dump(), doc.dump()) << name;
    }
    const auto defaults = parse_config(json::object());
    EXPECT_EQ(parse_config(to_json(defaults)), defaults);
}

TEST(Config, QuantileOutOfRangeNamesField) {
    const auto e = expect_invalid({{"simulation", {{"q", 1.5}}}});
    EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
    EXPECT_TRUE(mentions(e, "simulation.q"));
}

TEST(Config, ReportsEveryProblem) {
    const json doc = {{"simulation", {{"q", 1.5}, {"n_paths", 1}}},
                      {"appetite", {{{"L", -1.0}, {"q", 0.0}}}},
                      {"grid", {{"dates", {1.0, 0.5}}}}};
    const auto e = expect_invalid(doc);
    EXPECT_TRUE(mentions(e, "simulation.q"));
    EXPECT_TRUE(mentions(e, "simulation.n_paths"));
    EXPECT_TRUE(mentions(e, "appetite[0].L"));
    EXPECT_TRUE(mentions(e, "appetite[0].q"));
    EXPECT_TRUE(mentions(e, "grid"));
}

TEST(Config, EmpiricalNeedsExistingSample) {
    const json missing = {{"appetite", {{{"method", "Empirical"}, {"sample", "no_such_file.csv"}}}}};
    EXPECT_TRUE(mentions(expect_invalid(missing, configs_dir), "appetite[0].sample"));
    const json absent = {{"appetite", {{{"method", "Empirical"}}}}};
    EXPECT_TRUE(mentions(expect_invalid(absent), "appetite[0].sample"));
    const json ok = {{"appetite", {{{"method", "Empirical"}, {"sample", "sample5.csv"}}}}};
    EXPECT_NO_THROW(parse_config(ok, configs_dir));
}

TEST(Config, TypeAndEnumErrors) {
    const json doc = {{"simulation", {{"n_paths", "many"}, {"compounding", "monthly"}}},
                      {"appetite", {{{"method", "Student"}}}},
                      {"measures", {{"X", json::object()}}},
                      {"portfolio", {{{"type", "swap"}}}}};
    const auto e = expect_invalid(doc);
    EXPECT_TRUE(mentions(e, "simulation.n_paths"));
    EXPECT_TRUE(mentions(e, "simulation.compounding"));
    EXPECT_TRUE(mentions(e, "appetite[0].method"));
    EXPECT_TRUE(mentions(e, "measures.X"));
    EXPECT_TRUE(mentions(e, "portfolio[0].type"));
}

TEST(Config, CrossFieldChecks) {
    EXPECT_TRUE(mentions(expect_invalid({{"portfolio", {{{"type", "forward"}, {"asset", "FX"}}}}}), "portfolio"));
    EXPECT_TRUE(mentions(expect_invalid({{"measures", {{"Q", {{"numeraire", "t_forward"}, {"maturity", 1.0}}}}}}),
                         "measures.Q.maturity"));
    EXPECT_TRUE(mentions(expect_invalid({{"measures", {{"A", {{"m_b", "calibrated"}, {"appetite", 4}}}}}}),
                         "measures.A.appetite"));
    const json bad_corr = {{"model",
                            {{"factors", {{{"type", "lognormal_asset"}}, {{"type", "mean_reverting_rate"}}}},
                             {"correlation", {{1.0, 1.5}, {1.5, 1.0}}}}}};
    EXPECT_TRUE(mentions(expect_invalid(bad_corr), "model"));
}

TEST(Config, MalformedFileIsParseError) {
    const auto dir = testing_util::scratch_dir();
    testing_util::spit(dir / "bad.json", "{\"simulation\": {\"q\": 0.9,,}}");
    try {
        load_config(dir / "bad.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
    try {
        load_config(dir / "absent.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
}

TEST(Config, CommentsAreAllowed) {
    const auto dir = testing_util::scratch_dir();
    testing_util::spit(dir / "c.json", "{\n  // tighter tail\n  \"simulation\": {\"q\": 0.99}\n}\n");
    EXPECT_EQ(load_config(dir / "c.json").simulation.q, 0.99);
}

TEST(Overrides, NestedArrayAndString) {
    json doc = to_json(load_config(configs_dir / "stochastic_rates.json"));
    apply_override(doc, "simulation.n_paths=500");
    apply_override(doc, "appetite.1.L=7.5");
    apply_override(doc, "appetite.0.method=ShiftedLognormal");
    apply_override(doc, "grid.dates=[1,2]");
    apply_override(doc, "portfolio.0.maturity=2");
    const auto cfg = parse_config(doc, configs_dir);
    EXPECT_EQ(cfg.simulation.n_paths, 500u);
    EXPECT_EQ(cfg.appetite[1].profile.limit_multiple, 7.5);
    EXPECT_EQ(cfg.appetite[0].method, CalibrationMethod::ShiftedLognormal);
    EXPECT_EQ(cfg.grid.dates, (std::vector<double>{1.0, 2.0}));
}

TEST(Overrides, UnknownKeyOrSyntaxRejected) {
    json doc = to_json(parse_config(json::object()));
    for (const char* bad : {"simulation.nonsense=1", "appetite.9.L=2", "simulation.q", "=3", "grid.dates.x=1"}) {
        try {
            apply_override(doc, bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument) << bad;
        }
    }
}

TEST(Writers, ProfileCsvColumnsAndRows) {
    ExposureProfile p;
    p.q = 0.95;
    p.n_paths = 100;
    p.measure = "Q";
    p.points = {{0.5, 0.25, 0.3, 0.2, 0.21, 0.0}, {1.0, 0.125, 0.5, 0.1, 0.11, 0.0}};
    const auto ls = lines(io::profiles_csv({p, p}));
    ASSERT_EQ(ls.size(), 5u);
    EXPECT_EQ(ls[0], "date,pfe,es,discounted_pfe,pfe_A,n_paths,q,measure");
    EXPECT_EQ(ls[1], "0.5,0.25,0.3,0.2,0.21,100,0.95,Q");
    EXPECT_EQ(ls[2], "1,0.125,0.5,0.1,0.11,100,0.95,Q");
    const auto s = io::profiles_csv({p});
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_EQ(s.back(), '\n');
}

TEST(Writers, ShortestRoundTripNumbers) {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345678.9, -0.0875}) {
        const auto s = csv::format(x);
        EXPECT_EQ(csv::parse_double(s, "x"), x);
    }
    EXPECT_EQ(csv::format(1e21), "1e+21");
}

TEST(Writers, CalibrationColumns) {
    const BusinessUnitProfile p{0.1, 5.0, 0.95, 0.02};
    io::CalibrationRecord rec{"u", p, -1.0, calibrate(p, CalibrationMethod::ShiftedLognormal)};
    const auto ls = lines(io::calibration_csv({rec}));
    EXPECT_EQ(ls[0], "method,mu_required,L,q,r,gamma,sigma_implied,m_b");
    EXPECT_EQ(ls[1].rfind("ShiftedLognormal,0.1,5,0.95,0.02,-1,", 0), 0u);
    const auto j = io::calibration_json({rec});
    EXPECT_TRUE(j["calibrations"][0].contains("aux"));
    EXPECT_NEAR(j["calibrations"][0]["aux"]["sigma_sln"].get<double>(), 0.20081983320295538, 1e-14);
}

TEST(Writers, ReadColumnByNameOrLast) {
    const auto x = csv::read_column(configs_dir / "sample5.csv");
    EXPECT_EQ(x, (std::vector<double>{-0.2, 0.0, 0.1, 0.2, 0.4}));
    const auto dir = testing_util::scratch_dir();
    testing_util::spit(dir / "r.csv", "d,ret\r\n1,0.5\r\n2,x\r\n");
    try {
        csv::read_column(dir / "r.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
}

TEST(Figures, DefaultGrid) {
    const auto g = FigureParams{}.limit_grid();
    ASSERT_EQ(g.size(), 23u);
    EXPECT_EQ(g.front(), 1.5);
    EXPECT_EQ(g.back(), 12.5);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()) && std::adjacent_find(g.begin(), g.end()) == g.end());
}

TEST(Figures, Fig3IsLinearThroughUnitLimit) {
    const auto t = emit_figure_tables({})[0];
    ASSERT_EQ(t.id, "fig3");
    const auto& a = t.rows.front();
    const double slope = a.values[0] / (a.limit - 1.0);
    for (const auto& r : t.rows) {
        EXPECT_NEAR(r.values[0], slope * (r.limit - 1.0), 1e-12);
        EXPECT_NEAR(r.values[0], oracle::normal_implied_vol(0.1, r.limit, 0.95), 1e-12);
    }
}

TEST(Figures, Fig4OrderingAndMonotonicity) {
    const auto t = emit_figure_tables({})[1];
    ASSERT_EQ(t.value_columns, (std::vector<std::string>{"m_b_q0.95", "m_b_q0.99"}));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double l = t.rows[i].limit;
        const double s95 = oracle::normal_implied_vol(0.1, l, 0.95), s99 = oracle::normal_implied_vol(0.1, l, 0.99);
        EXPECT_NEAR(t.rows[i].values[0], (0.1 - 0.02) / s95, 1e-12 * t.rows[i].values[0]);
        EXPECT_NEAR(t.rows[i].values[1], (0.1 - 0.02) / s99, 1e-12 * t.rows[i].values[1]);
        // the tighter quantile implies a smaller volatility for the same limit, hence a higher price of risk
        EXPECT_GT(t.rows[i].values[1], t.rows[i].values[0]);
        if (i > 0) {
            EXPECT_LT(t.rows[i].values[0], t.rows[i - 1].values[0]);
            EXPECT_LT(t.rows[i].values[1], t.rows[i - 1].values[1]);
        }
    }
}

TEST(Figures, Fig5HeadlineRelativeDifference) {
    const auto t = emit_figure_tables({})[2];
    const auto& last = t.rows.back();
    EXPECT_EQ(last.limit, 12.5);
    EXPECT_NEAR(last.values[2], 0.150736, 1e-6);
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        EXPECT_GT(t.rows[i].values[2], t.rows[i - 1].values[2]);
    const auto header = lines(t.to_csv())[0];
    EXPECT_EQ(header, "L,m_b_normal,m_b_sln,rel_diff,mu_required,r,q,gamma,status");
}

TEST(Figures, FailedRowIsMarkedAndRunContinues) {
    FigureParams fp;
    fp.limit_min = 0.5;
    fp.limit_max = 1.5;
    const auto t = emit_figure_tables(fp)[0];
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[1].status, "DegenerateLimit");
    EXPECT_EQ(t.rows[2].status, "ok");
    EXPECT_EQ(lines(t.to_csv())[2], "1,,0.1,0.95,DegenerateLimit");
}
