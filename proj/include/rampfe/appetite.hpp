#pragma once

#include <rampfe/errors.hpp>
#include <rampfe/normal.hpp>
#include <rampfe/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/*! \file appetite.hpp
    \brief Bank price of risk implied by business-unit budgets and limits.

    A business unit with required per-period return mu and a quantile limit
    of L * mu at level q pins down a return volatility sigma; the bank price
    of risk is then (mu - r) / sigma. Three return distributions are
    supported: Normal, shifted lognormal and a shifted/scaled empirical
    sample.
*/

namespace rampfe {

//! Budget and limit of one business unit. All rates are per period.
struct BusinessUnitProfile {
    double mu_required = 0.10;
    double limit_multiple = 5.0; //!< limit as a multiple of mu_required
    double quantile = 0.95;
    double riskless_rate = 0.0;

    void validate() const {
        RAMPFE_REQUIRE(std::isfinite(mu_required), ErrorKind::DomainError, "mu_required must be finite");
        RAMPFE_REQUIRE(std::isfinite(limit_multiple) && limit_multiple > 0.0, ErrorKind::DomainError,
                       "limit multiple L must be > 0");
        RAMPFE_REQUIRE(quantile > 0.0 && quantile < 1.0, ErrorKind::DomainError, "quantile q must lie in (0, 1)");
        RAMPFE_REQUIRE(std::isfinite(riskless_rate), ErrorKind::DomainError, "riskless rate must be finite");
    }

    bool operator==(const BusinessUnitProfile&) const = default;
};

enum class CalibrationMethod { Normal, ShiftedLognormal, Empirical };
enum class RootChoice { Lower, Upper };
enum class DispersionConvention { Sample, Population };

constexpr std::string_view to_string(CalibrationMethod m) noexcept {
    switch (m) {
    case CalibrationMethod::Normal: return "Normal";
    case CalibrationMethod::ShiftedLognormal: return "ShiftedLognormal";
    case CalibrationMethod::Empirical: return "Empirical";
    }
    return "Unknown";
}

//! Ordered relative returns x_1 <= ... <= x_n, n >= 2.
class ReturnSample {
  public:
    explicit ReturnSample(std::vector<double> values) : values_(std::move(values)) {
        RAMPFE_REQUIRE(values_.size() >= 2, ErrorKind::InsufficientData, "a return sample needs at least 2 values");
        for (double v : values_)
            RAMPFE_REQUIRE(std::isfinite(v), ErrorKind::DomainError, "return sample contains a non-finite value");
        std::sort(values_.begin(), values_.end());
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    //! 1-based rank ceil(n q), clamped to [1, n].
    std::size_t quantile_rank(double q) const noexcept {
        const auto rank = static_cast<std::size_t>(std::ceil(static_cast<double>(values_.size()) * q));
        return std::clamp<std::size_t>(rank, 1, values_.size());
    }

  private:
    std::vector<double> values_;
};

struct SlnCalibration {
    double sigma_sln = 0.0;
    double mu_sln = 0.0;
    double gamma = -1.0;
    double sigma_implied = 0.0;
};

struct EmpiricalCalibration {
    double h = 0.0; //!< shift
    double g = 1.0; //!< scale
    std::size_t n_q = 0;
    double sigma_implied = 0.0;
    std::vector<double> transformed; //!< y_i = g (x_i + h), ascending
};

struct SlnAux {
    double sigma_sln;
    double mu_sln;
    double gamma;
};

struct EmpiricalAux {
    double h;
    double g;
    std::size_t n_q;
};

struct PriceOfRiskResult {
    double sigma_implied = 0.0;
    double m_b = 0.0;
    CalibrationMethod method = CalibrationMethod::Normal;
    std::variant<std::monostate, SlnAux, EmpiricalAux> aux;
};

//! sigma = mu (1 - L) / (sqrt(2) erfc^-1(2q)), the Normal(mu, sigma) law with q-quantile L mu.
inline double implied_vol_normal(const BusinessUnitProfile& p) {
    p.validate();
    RAMPFE_REQUIRE(p.quantile != 0.5, ErrorKind::DegenerateQuantile, "q = 0.5 leaves the volatility undetermined");
    RAMPFE_REQUIRE(p.limit_multiple != 1.0, ErrorKind::DegenerateLimit,
                   "L = 1 puts the quantile on the mean: zero volatility, undefined price of risk");
    const double sigma =
        p.mu_required * (1.0 - p.limit_multiple) / (std::numbers::sqrt2 * erfc_inv(2.0 * p.quantile));
    RAMPFE_REQUIRE(sigma > 0.0, ErrorKind::NegativeVolatility,
                   "limit and quantile lie on opposite sides of the mean (or mu_required is not positive)");
    return sigma;
}

/*! Fits gamma + Lognormal(mu_sln, sigma_sln) with mean mu_required and
    q-quantile L mu_required. The quantile condition is quadratic in
    sigma_sln; \p root picks which solution is returned.
*/
inline SlnCalibration implied_vol_sln(const BusinessUnitProfile& p, double gamma = -1.0,
                                      RootChoice root = RootChoice::Lower) {
    p.validate();
    const double mu = p.mu_required;
    const double limit = p.limit_multiple * mu;
    RAMPFE_REQUIRE(limit - gamma > 0.0, ErrorKind::DomainError, "L mu_required - gamma must be positive");
    RAMPFE_REQUIRE(mu - gamma > 0.0, ErrorKind::DomainError, "mu_required - gamma must be positive");

    const double c = erfc_inv(2.0 * p.quantile);
    const double spread = std::log(limit - gamma) - std::log(mu - gamma);
    const double discriminant = 2.0 * c * c - 2.0 * spread;
    RAMPFE_REQUIRE(discriminant >= 0.0, ErrorKind::NoRealRoot,
                   "no shifted lognormal matches this limit at this quantile");

    const double centre = -std::numbers::sqrt2 * c;
    const double half_width = std::sqrt(discriminant);
    SlnCalibration out;
    out.gamma = gamma;
    out.sigma_sln = root == RootChoice::Lower ? centre - half_width : centre + half_width;
    RAMPFE_REQUIRE(out.sigma_sln > 0.0, ErrorKind::NonPositiveSigma, "selected lognormal volatility is not positive");

    const double s2 = out.sigma_sln * out.sigma_sln;
    out.mu_sln = std::log(mu - gamma) - 0.5 * s2;
    out.sigma_implied = std::sqrt(std::expm1(s2) * std::exp(2.0 * out.mu_sln + s2));
    return out;
}

/*! Shift and scale an empirical return sample so that the sum of the
    transformed returns is mu_required and the rank-ceil(nq) return is
    L mu_required, then take the dispersion of the transformed sample.
*/
inline EmpiricalCalibration calibrate_empirical(const ReturnSample& sample, const BusinessUnitProfile& p,
                                                DispersionConvention convention = DispersionConvention::Sample) {
    p.validate();
    const auto xs = sample.values();
    const auto n = xs.size();
    RAMPFE_REQUIRE(n >= 2, ErrorKind::InsufficientData, "empirical calibration needs at least 2 returns");

    const double big_l = p.limit_multiple;
    const double denom = big_l * static_cast<double>(n) - 1.0;
    RAMPFE_REQUIRE(denom != 0.0, ErrorKind::DegenerateSystem, "L n = 1 makes the shift undetermined");

    EmpiricalCalibration out;
    out.n_q = sample.quantile_rank(p.quantile);
    const double x_q = xs[out.n_q - 1];
    const double sum = compensated_sum(xs);

    // x_q - L sum and the division carried with their rounding errors
    const double prod = big_l * sum;
    const double prod_err = std::fma(big_l, sum, -prod);
    const double num = x_q - prod;
    const double bv = num - x_q;
    const double num_err = (x_q - (num - bv)) + (-prod - bv) - prod_err;
    const double h0 = num / denom;
    out.h = h0 + (std::fma(-h0, denom, num) + num_err) / denom;
    const double anchor = x_q + out.h;
    const double scale = std::max(std::fabs(x_q), std::fabs(out.h));
    RAMPFE_REQUIRE(std::fabs(anchor) > 64.0 * std::numeric_limits<double>::epsilon() * scale && anchor != 0.0,
                   ErrorKind::SingularScale, "x_{n_q} + h vanishes; the scale is unbounded");
    out.g = big_l * p.mu_required / anchor;

    constexpr double fit_tol = 1e-12;
    if (std::fabs(out.h) <= fit_tol && std::fabs(out.g - 1.0) <= fit_tol) {
        out.h = 0.0;
        out.g = 1.0;
        out.transformed.assign(xs.begin(), xs.end());
    } else {
        out.transformed.reserve(n);
        for (double x : xs)
            out.transformed.push_back(out.g * (x + out.h));
    }
    out.sigma_implied = standard_deviation(out.transformed, convention == DispersionConvention::Sample ? 1 : 0);
    return out;
}

//! m_B = (mu_required - r) / sigma_implied.
inline double price_of_risk(const BusinessUnitProfile& p, double sigma_implied) {
    RAMPFE_REQUIRE(sigma_implied != 0.0, ErrorKind::ZeroVolatility,
                   "zero implied volatility: no finite limit is compatible with this price of risk");
    RAMPFE_REQUIRE(sigma_implied > 0.0, ErrorKind::NegativeVolatility, "implied volatility must be positive");
    return (p.mu_required - p.riskless_rate) / sigma_implied;
}

//! Drift under the risk appetite measure: m_B sigma + r.
inline double drift_A(double m_b, double sigma, double r) {
    RAMPFE_REQUIRE(sigma >= 0.0, ErrorKind::DomainError, "process volatility must be non-negative");
    return m_b * sigma + r;
}

struct CalibrationOptions {
    double gamma = -1.0;
    RootChoice root = RootChoice::Lower;
    DispersionConvention dispersion = DispersionConvention::Sample;
};

//! One-stop calibration; \p sample is required for the Empirical method only.
inline PriceOfRiskResult calibrate(const BusinessUnitProfile& p, CalibrationMethod method,
                                   const CalibrationOptions& options = {}, const ReturnSample* sample = nullptr) {
    PriceOfRiskResult out;
    out.method = method;
    switch (method) {
    case CalibrationMethod::Normal:
        out.sigma_implied = implied_vol_normal(p);
        break;
    case CalibrationMethod::ShiftedLognormal: {
        const auto sln = implied_vol_sln(p, options.gamma, options.root);
        out.sigma_implied = sln.sigma_implied;
        out.aux = SlnAux{sln.sigma_sln, sln.mu_sln, sln.gamma};
        break;
    }
    case CalibrationMethod::Empirical: {
        RAMPFE_REQUIRE(sample != nullptr, ErrorKind::InsufficientData, "Empirical method requires a return sample");
        const auto emp = calibrate_empirical(*sample, p, options.dispersion);
        out.sigma_implied = emp.sigma_implied;
        out.aux = EmpiricalAux{emp.h, emp.g, emp.n_q};
        break;
    }
    }
    out.m_b = price_of_risk(p, out.sigma_implied);
    return out;
}

} // namespace rampfe
