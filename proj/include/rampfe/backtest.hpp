#pragma once

#include <rampfe/errors.hpp>
#include <rampfe/normal.hpp>
#include <rampfe/stats.hpp>

#include <cmath>
#include <string_view>
#include <vector>

namespace rampfe {

//! Time-ordered per-period relative returns; period_length is in years.
struct HistoricalSeries {
    std::vector<double> returns;
    double period_length = 1.0;

    void validate() const {
        RAMPFE_REQUIRE(returns.size() >= 3, ErrorKind::InsufficientData, "backtesting needs at least 3 observations");
        RAMPFE_REQUIRE(period_length > 0.0 && std::isfinite(period_length), ErrorKind::DomainError,
                       "period length must be > 0");
        for (double x : returns)
            RAMPFE_REQUIRE(std::isfinite(x), ErrorKind::DomainError, "series contains a non-finite return");
    }
};

struct PriceOfRiskInterval {
    double lower = 0.0;
    double upper = 0.0;
    double point_estimate = 0.0;
    double confidence = 0.95;
};

/*! Annualized (mu_hat - r) / sigma_hat with a Gaussian confidence interval
    on the mean return, sigma held at its estimate. The half width in
    price-of-risk units is z_{(1+c)/2} / sqrt(n period_length), the sample
    span in years.
*/
inline PriceOfRiskInterval estimate_interval(const HistoricalSeries& series, double r, double confidence = 0.95) {
    series.validate();
    RAMPFE_REQUIRE(confidence > 0.0 && confidence < 1.0, ErrorKind::DomainError, "confidence must lie in (0, 1)");
    const double n = static_cast<double>(series.returns.size());
    const double mu = mean(series.returns) / series.period_length;
    const double sd = standard_deviation(series.returns) / std::sqrt(series.period_length);
    RAMPFE_REQUIRE(sd > 0.0, ErrorKind::ZeroDispersion, "series has zero dispersion");

    const double z = normal_quantile(0.5 * (1.0 + confidence));
    const double half = z * sd / std::sqrt(n * series.period_length);
    PriceOfRiskInterval out;
    out.confidence = confidence;
    out.point_estimate = (mu - r) / sd;
    out.lower = (mu - half - r) / sd;
    out.upper = (mu + half - r) / sd;
    return out;
}

enum class Consistency { Consistent, InconsistentBelow, InconsistentAbove };

constexpr std::string_view to_string(Consistency c) noexcept {
    switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::InconsistentBelow: return "InconsistentBelow";
    case Consistency::InconsistentAbove: return "InconsistentAbove";
    }
    return "Unknown";
}

//! Closed-interval membership of the bank price of risk.
inline Consistency consistency_check(double m_b, const PriceOfRiskInterval& interval) {
    RAMPFE_REQUIRE(interval.lower <= interval.upper, ErrorKind::InvalidArgument, "interval has lower > upper");
    if (m_b < interval.lower)
        return Consistency::InconsistentBelow;
    if (m_b > interval.upper)
        return Consistency::InconsistentAbove;
    return Consistency::Consistent;
}

} // namespace rampfe
