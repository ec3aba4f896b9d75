#pragma once

#include <rampfe/appetite.hpp>
#include <rampfe/csv.hpp>
#include <rampfe/errors.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace rampfe {

struct FigureParams {
    double mu_required = 0.10;
    double r = 0.02;
    double q = 0.95;                         //!< quantile for fig3 and fig5
    std::vector<double> q_levels{0.95, 0.99}; //!< one fig4 curve per level
    double limit_min = 1.5;
    double limit_max = 12.5;
    double limit_step = 0.5;
    double gamma = -1.0;

    //! L_i = limit_min + i * limit_step, i = 0 .. round((max - min) / step).
    std::vector<double> limit_grid() const {
        RAMPFE_REQUIRE(limit_step > 0.0 && limit_max >= limit_min, ErrorKind::DomainError, "invalid L grid");
        const auto n = static_cast<std::size_t>(std::llround((limit_max - limit_min) / limit_step));
        std::vector<double> out;
        for (std::size_t i = 0; i <= n; ++i)
            out.push_back(limit_min + static_cast<double>(i) * limit_step);
        return out;
    }

    bool operator==(const FigureParams&) const = default;
};

struct FigureRow {
    double limit = 0.0;
    std::vector<double> values; //!< empty when status != "ok"
    std::string status = "ok";
};

struct FigureTable {
    std::string id;
    std::vector<std::string> value_columns;
    std::vector<std::pair<std::string, double>> parameters; //!< repeated on every row
    std::vector<FigureRow> rows;

    std::string to_csv() const {
        std::vector<std::string> header{"L"};
        header.insert(header.end(), value_columns.begin(), value_columns.end());
        for (const auto& [name, _] : parameters)
            header.push_back(name);
        header.push_back("status");
        csv::Writer w(header);
        for (const auto& row : rows) {
            std::vector<std::string> cells{csv::format(row.limit)};
            for (std::size_t i = 0; i < value_columns.size(); ++i)
                cells.push_back(row.status == "ok" ? csv::format(row.values[i]) : "");
            for (const auto& [_, v] : parameters)
                cells.push_back(csv::format(v));
            cells.push_back(row.status);
            w.row(cells);
        }
        return w.str();
    }
};

namespace detail {
template <class F>
FigureRow figure_row(double limit, F&& compute) {
    FigureRow row;
    row.limit = limit;
    try {
        row.values = compute();
    } catch (const Error& e) {
        row.values.clear();
        row.status = std::string(to_string(e.kind()));
    }
    return row;
}

inline std::string level_label(double q) { return "m_b_q" + csv::format(q); }
} // namespace detail

/*! fig3: Normal implied volatility against L.
    fig4: Normal price of risk against L, one column per quantile level.
    fig5: Normal vs shifted-lognormal price of risk and their relative
          difference (m_sln - m_normal) / m_normal.
    A failed calibration marks its row with the error kind and the run continues.
*/
inline std::vector<FigureTable> emit_figure_tables(const FigureParams& fp) {
    const auto grid = fp.limit_grid();
    auto prof = [&](double limit, double q) { return BusinessUnitProfile{fp.mu_required, limit, q, fp.r}; };

    FigureTable fig3{"fig3", {"sigma_normal"}, {{"mu_required", fp.mu_required}, {"q", fp.q}}, {}};
    FigureTable fig4{"fig4", {}, {{"mu_required", fp.mu_required}, {"r", fp.r}}, {}};
    for (double q : fp.q_levels)
        fig4.value_columns.push_back(detail::level_label(q));
    FigureTable fig5{"fig5",
                     {"m_b_normal", "m_b_sln", "rel_diff"},
                     {{"mu_required", fp.mu_required}, {"r", fp.r}, {"q", fp.q}, {"gamma", fp.gamma}},
                     {}};

    for (double limit : grid) {
        fig3.rows.push_back(detail::figure_row(limit, [&] {
            return std::vector<double>{implied_vol_normal(prof(limit, fp.q))};
        }));
        fig4.rows.push_back(detail::figure_row(limit, [&] {
            std::vector<double> out;
            for (double q : fp.q_levels) {
                const auto p = prof(limit, q);
                out.push_back(price_of_risk(p, implied_vol_normal(p)));
            }
            return out;
        }));
        fig5.rows.push_back(detail::figure_row(limit, [&] {
            const auto p = prof(limit, fp.q);
            const double m_n = price_of_risk(p, implied_vol_normal(p));
            const double m_s = price_of_risk(p, implied_vol_sln(p, fp.gamma, RootChoice::Lower).sigma_implied);
            return std::vector<double>{m_n, m_s, (m_s - m_n) / m_n};
        }));
    }
    return {fig3, fig4, fig5};
}

} // namespace rampfe
