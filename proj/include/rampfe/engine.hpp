#pragma once

#include <rampfe/appetite.hpp>
#include <rampfe/errors.hpp>
#include <rampfe/models.hpp>
#include <rampfe/simulation.hpp>
#include <rampfe/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

/*! \file engine.hpp
    \brief Exposure profiles from simulated paths.

    Exposure is portfolio value floored at zero. PFE(q, d) is the rank
    ceil(n q) order statistic of exposures at d; it reads only the values at
    d, never the path history before it. Discounted statistics deflate by
    N(0) / N(d) of the simulation numeraire, and the risk appetite PFE
    inverse-discounts the discounted PFE at the drift m_B sigma + r.
*/

namespace rampfe {

//! Long forward on an asset factor: S(d) - K P(d, M), zero after maturity.
struct ForwardOnAsset {
    std::string asset = "S";
    double strike = 1.0;
    double maturity = 1.0;
    double notional = 1.0;
    bool operator==(const ForwardOnAsset&) const = default;
};

struct ZeroCouponBondHolding {
    double maturity = 1.0;
    double notional = 1.0;
    bool operator==(const ZeroCouponBondHolding&) const = default;
};

//! sum_i w_i * factor_i(d), keyed by factor name.
struct LinearCombination {
    std::vector<std::pair<std::string, double>> weights;
    bool operator==(const LinearCombination&) const = default;
};

using Position = std::variant<ForwardOnAsset, ZeroCouponBondHolding, LinearCombination>;

struct Portfolio {
    std::vector<Position> positions;

    void validate(const ModelSpec& model) const {
        for (const auto& pos : positions) {
            if (const auto* f = std::get_if<ForwardOnAsset>(&pos)) {
                const auto idx = model.factor_index(f->asset);
                RAMPFE_REQUIRE(idx && std::holds_alternative<LognormalAsset>(model.factors[*idx]),
                               ErrorKind::InvalidArgument, "forward references unknown asset '" + f->asset + "'");
                RAMPFE_REQUIRE(f->maturity > 0.0, ErrorKind::InvalidArgument, "forward maturity must be > 0");
            } else if (const auto* z = std::get_if<ZeroCouponBondHolding>(&pos)) {
                RAMPFE_REQUIRE(z->maturity > 0.0, ErrorKind::InvalidArgument, "bond maturity must be > 0");
            } else {
                for (const auto& [name, w] : std::get<LinearCombination>(pos).weights) {
                    RAMPFE_REQUIRE(model.factor_index(name).has_value(), ErrorKind::InvalidArgument,
                                   "linear combination references unknown factor '" + name + "'");
                    RAMPFE_REQUIRE(std::isfinite(w), ErrorKind::InvalidArgument, "weights must be finite");
                }
            }
        }
    }

    bool operator==(const Portfolio&) const = default;
};

//! Portfolio value on every path at stopping date \p d, priced from the state at d only.
inline std::vector<double> portfolio_value(const PathMatrix& paths, const Portfolio& portfolio, double d) {
    const std::size_t k = paths.date_index(d);
    const ModelSpec& model = paths.model;
    portfolio.validate(model);
    const auto rate_idx = model.rate_factor();

    std::vector<double> out(paths.n_paths, 0.0);
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        const auto state = paths.state(p, k);
        const std::optional<double> r = rate_idx ? std::optional<double>(state[*rate_idx]) : std::nullopt;
        double v = 0.0;
        for (const auto& pos : portfolio.positions) {
            if (const auto* f = std::get_if<ForwardOnAsset>(&pos)) {
                if (d <= f->maturity)
                    v += f->notional * (state[*model.factor_index(f->asset)] -
                                        f->strike * zcb_price(model, d, f->maturity, r));
            } else if (const auto* z = std::get_if<ZeroCouponBondHolding>(&pos)) {
                if (d <= z->maturity)
                    v += z->notional * zcb_price(model, d, z->maturity, r);
            } else {
                for (const auto& [name, w] : std::get<LinearCombination>(pos).weights)
                    v += w * state[*model.factor_index(name)];
            }
        }
        out[p] = v;
    }
    return out;
}

inline std::vector<double> floored(std::span<const double> values) {
    std::vector<double> e(values.begin(), values.end());
    for (auto& x : e)
        x = std::max(x, 0.0);
    return e;
}

//! 1-based rank ceil(n q) clamped to [1, n].
inline std::size_t quantile_rank(std::size_t n, double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * q));
    return std::clamp<std::size_t>(rank, 1, n);
}

namespace detail {
inline void check_sample(std::span<const double> values, double q) {
    RAMPFE_REQUIRE(values.size() >= 2, ErrorKind::EmptySample, "exposure statistics need at least 2 values");
    RAMPFE_REQUIRE(q > 0.0 && q < 1.0, ErrorKind::InvalidArgument, "quantile q must lie in (0, 1)");
}
} // namespace detail

//! Rank-ceil(n q) order statistic of max(x, 0).
inline double pfe(std::span<const double> values, double q) {
    detail::check_sample(values, q);
    auto e = floored(values);
    const auto k = quantile_rank(e.size(), q) - 1;
    std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k), e.end());
    return e[k];
}

enum class EmptyTail { UseQuantile, Throw };

/*! Mean of floored exposures at ranks above ceil(n q). An empty tail
    falls back to the quantile itself unless \p policy is Throw.
*/
inline double expected_shortfall(std::span<const double> values, double q, EmptyTail policy = EmptyTail::UseQuantile) {
    detail::check_sample(values, q);
    auto e = floored(values);
    std::sort(e.begin(), e.end());
    const auto k = quantile_rank(e.size(), q);
    if (k == e.size()) {
        RAMPFE_REQUIRE(policy == EmptyTail::UseQuantile, ErrorKind::InsufficientTail,
                       "no observations beyond the quantile rank");
        return e.back();
    }
    return compensated_sum(std::span<const double>(e).subspan(k)) / static_cast<double>(e.size() - k);
}

/*! Quantile of max(x, 0) under the deflator-weighted discounted CDF, times
    the average deflator. When every path has the same deflator w this is
    exactly w times the rank-ceil(n q) order statistic.
*/
inline double discounted_quantile(std::span<const double> values, std::span<const double> deflators, double q) {
    detail::check_sample(values, q);
    RAMPFE_REQUIRE(values.size() == deflators.size(), ErrorKind::InvalidArgument, "values/deflators size mismatch");
    const bool constant = std::all_of(deflators.begin(), deflators.end(),
                                      [w0 = deflators.front()](double w) { return w == w0; });
    if (constant)
        return deflators.front() * pfe(values, q);

    const auto e = floored(values);
    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });
    const double total = compensated_sum(deflators);
    const double target = q * total;
    double cum = 0.0;
    double level = e[order.back()];
    for (std::size_t i = 0; i < order.size(); ++i) {
        cum += deflators[order[i]];
        if (cum >= target && (i + 1 == order.size() || e[order[i + 1]] != e[order[i]])) {
            level = e[order[i]];
            break;
        }
    }
    return total / static_cast<double>(e.size()) * level;
}

inline std::vector<double> deflators_at(const PathMatrix& paths, std::size_t k) {
    std::vector<double> w(paths.n_paths);
    for (std::size_t p = 0; p < paths.n_paths; ++p)
        w[p] = paths.deflator(p, k);
    return w;
}

//! Measure-invariant discounted PFE at \p d (deflated by the simulation numeraire).
inline double discounted_pfe(const PathMatrix& paths, const Portfolio& portfolio, double d, double q) {
    const auto x = portfolio_value(paths, portfolio, d);
    return discounted_quantile(x, deflators_at(paths, paths.date_index(d)), q);
}

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

//! Discounted PFE with a batch-means Monte Carlo standard error.
inline Estimate discounted_pfe_with_error(const PathMatrix& paths, const Portfolio& portfolio, double d, double q,
                                          std::size_t batches = 20) {
    RAMPFE_REQUIRE(batches >= 2 && paths.n_paths / batches >= 2, ErrorKind::InvalidArgument,
                   "too few paths for the requested batch count");
    const auto x = portfolio_value(paths, portfolio, d);
    const auto w = deflators_at(paths, paths.date_index(d));
    const std::size_t size = paths.n_paths / batches;
    std::vector<double> per_batch;
    per_batch.reserve(batches);
    for (std::size_t b = 0; b < batches; ++b)
        per_batch.push_back(discounted_quantile(std::span<const double>(x).subspan(b * size, size),
                                                std::span<const double>(w).subspan(b * size, size), q));
    return {discounted_quantile(x, w, q), standard_deviation(per_batch) / std::sqrt(static_cast<double>(batches))};
}

struct DiscountedCdfEstimate {
    std::vector<double> thresholds;
    std::vector<double> value;
    std::vector<double> standard_error;
};

/*! Discounted CDF E[N(0)/N(T) 1{x(T) <= V}] on a threshold grid, estimated
    from one path set so the curve is monotone in V.
*/
inline DiscountedCdfEstimate dcdf(const PathMatrix& paths, const Portfolio& portfolio, double maturity,
                                  std::span<const double> thresholds) {
    const auto x = portfolio_value(paths, portfolio, maturity);
    RAMPFE_REQUIRE(x.size() >= 2, ErrorKind::EmptySample, "dcdf needs at least 2 paths");
    const auto w = deflators_at(paths, paths.date_index(maturity));
    DiscountedCdfEstimate out;
    out.thresholds.assign(thresholds.begin(), thresholds.end());
    std::vector<double> terms(x.size());
    for (double v : thresholds) {
        for (std::size_t p = 0; p < x.size(); ++p)
            terms[p] = x[p] <= v ? w[p] : 0.0;
        out.value.push_back(mean(terms));
        out.standard_error.push_back(standard_deviation(terms) / std::sqrt(static_cast<double>(terms.size())));
    }
    return out;
}

enum class Compounding { Continuous, Simple, Annual };

//! Zero-coupon price over \p tau at a constant \p rate.
inline double discount_factor(double rate, double tau, Compounding c = Compounding::Continuous) {
    switch (c) {
    case Compounding::Continuous: return std::exp(-rate * tau);
    case Compounding::Simple: return 1.0 / (1.0 + rate * tau);
    case Compounding::Annual: return std::pow(1.0 + rate, -tau);
    }
    return std::exp(-rate * tau);
}

inline double growth_factor(double rate, double tau, Compounding c = Compounding::Continuous) {
    return 1.0 / discount_factor(rate, tau, c);
}

/*! Future exposure from a discounted PFE: divided by the zero-coupon price
    from t to T at constant return \p mu_a.
*/
inline double pfe_A(double discounted_pfe_value, double mu_a, double t, double maturity,
                    Compounding compounding = Compounding::Continuous) {
    RAMPFE_REQUIRE(discounted_pfe_value >= 0.0, ErrorKind::InvalidArgument, "discounted PFE must be >= 0");
    RAMPFE_REQUIRE(maturity >= t, ErrorKind::InvalidTimes, "pfe_A needs T >= t");
    return discounted_pfe_value / discount_factor(mu_a, maturity - t, compounding);
}

struct ExposurePoint {
    double date = 0.0;
    double pfe = 0.0;
    double es = 0.0;
    double discounted_pfe = 0.0;
    double pfe_A = 0.0;
    double mu_A = 0.0;
    bool operator==(const ExposurePoint&) const = default;
};

struct ExposureProfile {
    std::vector<ExposurePoint> points;
    double q = 0.95;
    std::size_t n_paths = 0;
    std::string measure;
    double m_b = 0.0;
    bool operator==(const ExposureProfile&) const = default;
};

struct ProfileOptions {
    //! Bank price of risk for the pfe_A column; defaults to the measure's own m_b
    //! under the risk appetite measure and to 0 (the T-forward Q case) otherwise.
    std::optional<double> m_b;
    //! Volatility in m_B sigma + r; defaults to the first lognormal asset's sigma.
    std::optional<double> sigma;
    Compounding compounding = Compounding::Continuous;
    std::size_t threads = 0;
};

inline double appetite_sigma(const ModelSpec& model, const ProfileOptions& opt) {
    if (opt.sigma)
        return *opt.sigma;
    for (const auto& f : model.factors)
        if (const auto* a = std::get_if<LognormalAsset>(&f))
            return a->sigma;
    return 0.0;
}

inline double appetite_m_b(const MeasureSpec& measure, const ProfileOptions& opt) {
    if (opt.m_b)
        return *opt.m_b;
    if (const auto* a = std::get_if<RiskAppetite>(&measure))
        return a->m_b;
    return 0.0;
}

//! Riskless rate r in the A drift at horizon d: the measure's own rate if set, else the model yield to d.
inline double appetite_base_rate(const PathMatrix& paths, double d) {
    if (const auto* a = std::get_if<RiskAppetite>(&paths.measure); a && a->riskless_rate)
        return *a->riskless_rate;
    return zero_yield(paths.model, d);
}

//! Profile from an existing path set; statistics at each date read that date's values only.
inline ExposureProfile exposure_profile(const PathMatrix& paths, const Portfolio& portfolio, double q,
                                        const ProfileOptions& opt = {}) {
    portfolio.validate(paths.model);
    ExposureProfile out;
    out.q = q;
    out.n_paths = paths.n_paths;
    out.measure = std::string(measure_code(paths.measure));
    out.m_b = appetite_m_b(paths.measure, opt);
    const double sigma = appetite_sigma(paths.model, opt);
    for (std::size_t k = 0; k < paths.dates.size(); ++k) {
        const double d = paths.dates[k];
        const auto x = portfolio_value(paths, portfolio, d);
        ExposurePoint pt;
        pt.date = d;
        pt.pfe = pfe(x, q);
        pt.es = expected_shortfall(x, q);
        pt.discounted_pfe = discounted_quantile(x, deflators_at(paths, k), q);
        pt.mu_A = drift_A(out.m_b, sigma, appetite_base_rate(paths, d));
        pt.pfe_A = pfe_A(pt.discounted_pfe, pt.mu_A, 0.0, d, opt.compounding);
        out.points.push_back(pt);
    }
    return out;
}

//! Simulate, value, floor and take quantiles per stopping date.
inline ExposureProfile pfe_profile(const ModelSpec& model, const MeasureSpec& measure, const Portfolio& portfolio,
                                   const TimeGrid& grid, double q, std::size_t n_paths, std::uint64_t seed,
                                   const ProfileOptions& opt = {}) {
    portfolio.validate(model);
    RAMPFE_REQUIRE(q > 0.0 && q < 1.0, ErrorKind::InvalidArgument, "quantile q must lie in (0, 1)");
    const auto paths = simulate_paths(model, measure, grid, n_paths, seed, opt.threads);
    return exposure_profile(paths, portfolio, q, opt);
}

} // namespace rampfe
