#pragma once

#include <rampfe/errors.hpp>
#include <rampfe/models.hpp>
#include <rampfe/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

namespace rampfe {

/*! Simulated factor values and numeraire values at each (path, stopping date).
    Factor order follows ModelSpec::factors; assets are stored as S, the rate
    factor as r.
*/
struct PathMatrix {
    ModelSpec model;
    MeasureSpec measure;
    std::vector<double> dates;
    std::size_t n_paths = 0;
    std::size_t n_factors = 0;
    std::vector<double> values;    //!< [path][date][factor]
    std::vector<double> numeraire; //!< [path][date]
    double numeraire0 = 1.0;       //!< numeraire value at t = 0

    double value(std::size_t path, std::size_t date, std::size_t factor) const {
        return values[(path * dates.size() + date) * n_factors + factor];
    }
    double& value(std::size_t path, std::size_t date, std::size_t factor) {
        return values[(path * dates.size() + date) * n_factors + factor];
    }
    std::span<const double> state(std::size_t path, std::size_t date) const {
        return {values.data() + (path * dates.size() + date) * n_factors, n_factors};
    }
    double numeraire_at(std::size_t path, std::size_t date) const { return numeraire[path * dates.size() + date]; }

    //! Deflator N(0) / N_p(d).
    double deflator(std::size_t path, std::size_t date) const { return numeraire0 / numeraire_at(path, date); }

    std::size_t date_index(double d) const {
        const auto it = std::find(dates.begin(), dates.end(), d);
        RAMPFE_REQUIRE(it != dates.end(), ErrorKind::UnknownDate, "date " + std::to_string(d) + " is not on the grid");
        return static_cast<std::size_t>(it - dates.begin());
    }

    bool operator==(const PathMatrix&) const = default;
};

namespace detail {

struct StepPlan {
    double h;
    double decay;       // e^{-kappa h}
    double rate_sd;     // exact OU transition standard deviation
    double rate_shift;  // deterministic drift term of the OU transition
    double asset_adj;   // T-forward asset drift adjustment integral / h, per unit (rho sigma sigma_r)
};

inline StepPlan plan_step(const ModelSpec& model, const MeasureSpec& measure, double t, double u) {
    StepPlan s{u - t, 1.0, 0.0, 0.0, 0.0};
    if (!model.stochastic_rates())
        return s;
    const auto& rf = model.rate();
    const double k = rf.kappa;
    const double h = s.h;
    s.decay = std::exp(-k * h);
    s.rate_sd = rf.sigma_r * std::sqrt(-std::expm1(-2.0 * k * h) / (2.0 * k));

    double theta = rf.theta;
    if (const auto* a = std::get_if<RiskAppetite>(&measure))
        theta += a->m_b * rf.sigma_r / k;
    s.rate_shift = theta * (-std::expm1(-k * h));

    if (const auto* q = std::get_if<RiskNeutral>(&measure); q && q->numeraire.kind == NumeraireKind::TForwardBond) {
        // dW^T = dW + sigma_r B(s, T) ds under the T-forward measure
        const double big_t = q->numeraire.maturity;
        const double s2 = rf.sigma_r * rf.sigma_r;
        const double integral_decay = -std::expm1(-k * h) / k;
        const double integral_cross = std::exp(-k * (big_t - u)) * (-std::expm1(-2.0 * k * h)) / (2.0 * k);
        s.rate_shift -= s2 / k * (integral_decay - integral_cross);
        const double int_b = h / k - (std::exp(-k * (big_t - u)) - std::exp(-k * (big_t - t))) / (k * k);
        s.asset_adj = int_b / h;
    }
    return s;
}

} // namespace detail

/*! Simulates factor and numeraire paths on the stopping dates of \p grid.
    Rates use the exact OU transition on each substep, the bank account the
    trapezoidal integral of r, and assets the exact lognormal step given the
    rate path. Path p draws from PathNormalStream(seed, p) only, so output is
    bit-identical for any \p threads (0 = hardware concurrency).
*/
inline PathMatrix simulate_paths(const ModelSpec& model, const MeasureSpec& measure, const TimeGrid& grid,
                                 std::size_t n_paths, std::uint64_t seed, std::size_t threads = 0) {
    model.validate();
    grid.validate();
    RAMPFE_REQUIRE(n_paths >= 2, ErrorKind::InvalidArgument, "n_paths must be >= 2");
    const Numeraire num = numeraire_of(measure);
    if (num.kind == NumeraireKind::TForwardBond)
        RAMPFE_REQUIRE(num.maturity >= grid.dates.back(), ErrorKind::InvalidGrid,
                       "T-forward numeraire maturity must be >= the last stopping date");
    if (const auto* a = std::get_if<RiskAppetite>(&measure))
        RAMPFE_REQUIRE(std::isfinite(a->m_b), ErrorKind::InvalidArgument, "m_b must be finite");

    PathMatrix out;
    out.model = model;
    out.measure = measure;
    out.dates = grid.dates;
    out.n_paths = n_paths;
    out.n_factors = model.factors.size();
    const std::size_t n_dates = grid.dates.size();
    out.values.assign(n_paths * n_dates * out.n_factors, 0.0);
    out.numeraire.assign(n_paths * n_dates, 0.0);
    out.numeraire0 = num.kind == NumeraireKind::TForwardBond ? zcb_price(model, 0.0, num.maturity) : 1.0;

    const Eigen::MatrixXd chol = correlation_factor(model.correlation_matrix());
    const auto rate_idx = model.rate_factor();
    const double sigma_r = rate_idx ? model.rate().sigma_r : 0.0;

    std::vector<detail::StepPlan> plans;
    std::vector<std::size_t> date_of_step;
    {
        double prev = 0.0;
        for (std::size_t k = 0; k < n_dates; ++k) {
            const double span = grid.dates[k] - prev;
            for (int s = 0; s < grid.substeps; ++s) {
                const double t = prev + span * s / grid.substeps;
                const double u = s + 1 == grid.substeps ? grid.dates[k] : prev + span * (s + 1) / grid.substeps;
                plans.push_back(detail::plan_step(model, measure, t, u));
                date_of_step.push_back(s + 1 == grid.substeps ? k : n_dates);
            }
            prev = grid.dates[k];
        }
    }

    const std::size_t nf = out.n_factors;
    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(nf), w(nf), log_s(nf, 0.0);
        for (std::size_t p = begin; p < end; ++p) {
            PathNormalStream stream(seed, p);
            double r = rate_idx ? model.rate().r0 : model.flat_rate;
            double log_b = 0.0;
            for (std::size_t f = 0; f < nf; ++f)
                if (const auto* a = std::get_if<LognormalAsset>(&model.factors[f]))
                    log_s[f] = std::log(a->s0);

            for (std::size_t step = 0; step < plans.size(); ++step) {
                const auto& sp = plans[step];
                for (std::size_t f = 0; f < nf; ++f)
                    z[f] = stream.normal();
                for (std::size_t i = 0; i < nf; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < nf; ++j)
                        acc += chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
                    w[i] = acc;
                }

                double r_next = r;
                if (rate_idx)
                    r_next = r * sp.decay + sp.rate_shift + sp.rate_sd * w[*rate_idx];
                const double r_bar = 0.5 * (r + r_next);
                log_b += r_bar * sp.h;

                for (std::size_t f = 0; f < nf; ++f) {
                    const auto* a = std::get_if<LognormalAsset>(&model.factors[f]);
                    if (!a)
                        continue;
                    double mu = r_bar;
                    if (const auto* hist = std::get_if<Historical>(&measure)) {
                        mu = hist->drift;
                    } else if (const auto* app = std::get_if<RiskAppetite>(&measure)) {
                        mu = app->riskless_rate.value_or(r_bar) + app->m_b * a->sigma;
                    } else if (rate_idx) {
                        mu = r_bar - model.correlation_between(f, *rate_idx) * a->sigma * sigma_r * sp.asset_adj;
                    }
                    log_s[f] += (mu - 0.5 * a->sigma * a->sigma) * sp.h + a->sigma * std::sqrt(sp.h) * w[f];
                }
                r = r_next;

                const std::size_t k = date_of_step[step];
                if (k == n_dates)
                    continue;
                for (std::size_t f = 0; f < nf; ++f)
                    out.value(p, k, f) =
                        std::holds_alternative<LognormalAsset>(model.factors[f]) ? std::exp(log_s[f]) : r;
                double n_val;
                const double d = grid.dates[k];
                if (num.kind == NumeraireKind::TForwardBond)
                    n_val = zcb_price(model, d, num.maturity, rate_idx ? std::optional<double>(r) : std::nullopt);
                else
                    n_val = rate_idx ? std::exp(log_b) : std::exp(model.flat_rate * d);
                out.numeraire[p * n_dates + k] = n_val;
            }
        }
    };

    std::size_t n_threads = threads == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : threads;
    n_threads = std::min(n_threads, n_paths);
    if (n_threads <= 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n_paths + n_threads - 1) / n_threads;
        for (std::size_t b = 0; b < n_paths; b += chunk)
            pool.emplace_back(run_range, b, std::min(n_paths, b + chunk));
    }
    return out;
}

} // namespace rampfe
