#pragma once

#include <rampfe/appetite.hpp>
#include <rampfe/backtest.hpp>
#include <rampfe/config.hpp>
#include <rampfe/csv.hpp>
#include <rampfe/engine.hpp>
#include <rampfe/simulation.hpp>

#include <string>
#include <vector>

/*! \file io.hpp
    \brief Result serialization: CSV tables and JSON documents with fixed
    column and key order.
*/

namespace rampfe::io {

inline constexpr const char* profile_columns[] = {"date", "pfe", "es", "discounted_pfe", "pfe_A", "n_paths", "q",
                                                  "measure"};

//! One row per (measure, date); profiles are stacked in the order given.
inline std::string profiles_csv(const std::vector<ExposureProfile>& profiles) {
    csv::Writer w({std::begin(profile_columns), std::end(profile_columns)});
    for (const auto& prof : profiles)
        for (const auto& pt : prof.points)
            w.row({csv::format(pt.date), csv::format(pt.pfe), csv::format(pt.es), csv::format(pt.discounted_pfe),
                   csv::format(pt.pfe_A), csv::format(prof.n_paths), csv::format(prof.q), prof.measure});
    return w.str();
}

inline json profile_json(const ExposureProfile& prof) {
    json points = json::array();
    for (const auto& pt : prof.points)
        points.push_back({{"date", pt.date},
                          {"pfe", pt.pfe},
                          {"es", pt.es},
                          {"discounted_pfe", pt.discounted_pfe},
                          {"pfe_A", pt.pfe_A},
                          {"mu_A", pt.mu_A}});
    return {{"measure", prof.measure}, {"q", prof.q}, {"n_paths", prof.n_paths}, {"m_b", prof.m_b}, {"points", points}};
}

inline json profiles_json(const std::vector<ExposureProfile>& profiles, std::uint64_t seed) {
    json arr = json::array();
    for (const auto& p : profiles)
        arr.push_back(profile_json(p));
    return {{"seed", seed}, {"profiles", arr}};
}

struct CalibrationRecord {
    std::string name;
    BusinessUnitProfile profile;
    double gamma = -1.0;
    PriceOfRiskResult result;
};

inline std::string calibration_csv(const std::vector<CalibrationRecord>& records) {
    csv::Writer w({"method", "mu_required", "L", "q", "r", "gamma", "sigma_implied", "m_b"});
    for (const auto& c : records) {
        const bool sln = c.result.method == CalibrationMethod::ShiftedLognormal;
        w.row({std::string(to_string(c.result.method)), csv::format(c.profile.mu_required),
               csv::format(c.profile.limit_multiple), csv::format(c.profile.quantile),
               csv::format(c.profile.riskless_rate), sln ? csv::format(c.gamma) : std::string(),
               csv::format(c.result.sigma_implied), csv::format(c.result.m_b)});
    }
    return w.str();
}

inline json calibration_json(const std::vector<CalibrationRecord>& records) {
    json arr = json::array();
    for (const auto& c : records) {
        json j = {{"name", c.name},
                  {"method", to_string(c.result.method)},
                  {"mu_required", c.profile.mu_required},
                  {"L", c.profile.limit_multiple},
                  {"q", c.profile.quantile},
                  {"r", c.profile.riskless_rate},
                  {"gamma", c.result.method == CalibrationMethod::ShiftedLognormal ? json(c.gamma) : json(nullptr)},
                  {"sigma_implied", c.result.sigma_implied},
                  {"m_b", c.result.m_b}};
        if (const auto* s = std::get_if<SlnAux>(&c.result.aux))
            j["aux"] = {{"sigma_sln", s->sigma_sln}, {"mu_sln", s->mu_sln}, {"gamma", s->gamma}};
        else if (const auto* e = std::get_if<EmpiricalAux>(&c.result.aux))
            j["aux"] = {{"h", e->h}, {"g", e->g}, {"n_q", e->n_q}};
        arr.push_back(j);
    }
    return {{"calibrations", arr}};
}

//! Long format: one row per (path, date) with every factor and the numeraire.
inline std::string paths_csv(const PathMatrix& paths) {
    std::vector<std::string> header{"path", "date"};
    for (const auto& f : paths.model.factors)
        header.emplace_back(factor_name(f));
    header.emplace_back("numeraire");
    csv::Writer w(header);
    std::vector<std::string> cells(header.size());
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        for (std::size_t k = 0; k < paths.dates.size(); ++k) {
            cells[0] = csv::format(p);
            cells[1] = csv::format(paths.dates[k]);
            for (std::size_t f = 0; f < paths.n_factors; ++f)
                cells[2 + f] = csv::format(paths.value(p, k, f));
            cells.back() = csv::format(paths.numeraire_at(p, k));
            w.row(cells);
        }
    }
    return w.str();
}

inline json backtest_json(const HistoricalSeries& series, double r, const PriceOfRiskInterval& interval, double m_b,
                          Consistency verdict) {
    return {{"n", series.returns.size()},
            {"period_length", series.period_length},
            {"riskless_rate", r},
            {"confidence", interval.confidence},
            {"point_estimate", interval.point_estimate},
            {"lower", interval.lower},
            {"upper", interval.upper},
            {"m_b", m_b},
            {"verdict", to_string(verdict)}};
}

inline void write_json(const std::filesystem::path& path, const json& doc) { csv::write_file(path, doc.dump(2) + "\n"); }

} // namespace rampfe::io
