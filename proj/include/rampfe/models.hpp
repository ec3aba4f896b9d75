#pragma once

#include <rampfe/errors.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/*! \file models.hpp
    \brief Risk-factor processes, measures and numeraires.

    Factors are lognormal assets dS/S = mu dt + sigma dW and at most one
    mean-reverting Gaussian short rate dr = kappa (theta - r) dt + sigma_r dW.
    Without a rate factor the riskless rate is the flat ModelSpec::flat_rate.
*/

namespace rampfe {

struct LognormalAsset {
    std::string name = "S";
    double s0 = 1.0;
    double sigma = 0.2;
    bool operator==(const LognormalAsset&) const = default;
};

struct MeanRevertingRate {
    std::string name = "r";
    double r0 = 0.02;
    double kappa = 0.5;
    double theta = 0.03;
    double sigma_r = 0.01;
    bool operator==(const MeanRevertingRate&) const = default;
};

using Factor = std::variant<LognormalAsset, MeanRevertingRate>;

inline const std::string& factor_name(const Factor& f) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, f);
}

inline double factor_volatility(const Factor& f) {
    if (const auto* a = std::get_if<LognormalAsset>(&f))
        return a->sigma;
    return std::get<MeanRevertingRate>(f).sigma_r;
}

//! Lower-triangular-ish factor A with A A^T = C (Cholesky, or eigen square root when C is singular).
inline Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& c) {
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success)
        return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

struct ModelSpec {
    std::vector<Factor> factors;
    //! Row-major factor correlation; empty means independent factors.
    std::vector<std::vector<double>> correlation;
    double flat_rate = 0.0;

    std::optional<std::size_t> rate_factor() const {
        for (std::size_t i = 0; i < factors.size(); ++i)
            if (std::holds_alternative<MeanRevertingRate>(factors[i]))
                return i;
        return std::nullopt;
    }

    bool stochastic_rates() const { return rate_factor().has_value(); }

    const MeanRevertingRate& rate() const { return std::get<MeanRevertingRate>(factors.at(*rate_factor())); }

    std::optional<std::size_t> factor_index(std::string_view name) const {
        for (std::size_t i = 0; i < factors.size(); ++i)
            if (factor_name(factors[i]) == name)
                return i;
        return std::nullopt;
    }

    Eigen::MatrixXd correlation_matrix() const {
        const auto n = static_cast<Eigen::Index>(factors.size());
        if (correlation.empty())
            return Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd c(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                c(i, j) = correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return c;
    }

    double correlation_between(std::size_t i, std::size_t j) const {
        if (i == j)
            return 1.0;
        return correlation.empty() ? 0.0 : correlation[i][j];
    }

    void validate() const {
        RAMPFE_REQUIRE(!factors.empty(), ErrorKind::InvalidModel, "model needs at least one factor");
        RAMPFE_REQUIRE(std::isfinite(flat_rate), ErrorKind::InvalidModel, "flat_rate must be finite");
        std::size_t rates = 0;
        for (const auto& f : factors) {
            if (const auto* a = std::get_if<LognormalAsset>(&f)) {
                RAMPFE_REQUIRE(a->s0 > 0.0 && std::isfinite(a->s0), ErrorKind::InvalidModel,
                               "asset '" + a->name + "' needs s0 > 0");
                RAMPFE_REQUIRE(a->sigma >= 0.0 && std::isfinite(a->sigma), ErrorKind::InvalidModel,
                               "asset '" + a->name + "' needs sigma >= 0");
            } else {
                const auto& r = std::get<MeanRevertingRate>(f);
                ++rates;
                RAMPFE_REQUIRE(r.kappa > 0.0 && std::isfinite(r.kappa), ErrorKind::InvalidModel,
                               "rate '" + r.name + "' needs kappa > 0");
                RAMPFE_REQUIRE(r.sigma_r >= 0.0 && std::isfinite(r.sigma_r), ErrorKind::InvalidModel,
                               "rate '" + r.name + "' needs sigma_r >= 0");
                RAMPFE_REQUIRE(std::isfinite(r.r0) && std::isfinite(r.theta), ErrorKind::InvalidModel,
                               "rate '" + r.name + "' needs finite r0 and theta");
            }
        }
        RAMPFE_REQUIRE(rates <= 1, ErrorKind::InvalidModel, "at most one short-rate factor is supported");
        for (std::size_t i = 0; i < factors.size(); ++i)
            for (std::size_t j = i + 1; j < factors.size(); ++j)
                RAMPFE_REQUIRE(factor_name(factors[i]) != factor_name(factors[j]), ErrorKind::InvalidModel,
                               "duplicate factor name '" + factor_name(factors[i]) + "'");

        if (correlation.empty())
            return;
        const auto n = factors.size();
        RAMPFE_REQUIRE(correlation.size() == n, ErrorKind::InvalidCorrelation, "correlation must be n x n");
        for (std::size_t i = 0; i < n; ++i) {
            RAMPFE_REQUIRE(correlation[i].size() == n, ErrorKind::InvalidCorrelation, "correlation must be n x n");
            RAMPFE_REQUIRE(correlation[i][i] == 1.0, ErrorKind::InvalidCorrelation, "correlation diagonal must be 1");
            for (std::size_t j = 0; j < n; ++j) {
                RAMPFE_REQUIRE(correlation[i][j] == correlation[j][i], ErrorKind::InvalidCorrelation,
                               "correlation must be symmetric");
                RAMPFE_REQUIRE(std::fabs(correlation[i][j]) <= 1.0, ErrorKind::InvalidCorrelation,
                               "correlation entries must lie in [-1, 1]");
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation_matrix(), Eigen::EigenvaluesOnly);
        RAMPFE_REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10, ErrorKind::InvalidCorrelation,
                       "correlation matrix is not positive semidefinite");
    }

    bool operator==(const ModelSpec&) const = default;
};

enum class NumeraireKind { BankAccount, TForwardBond };

struct Numeraire {
    NumeraireKind kind = NumeraireKind::BankAccount;
    double maturity = 0.0; //!< T for the T-forward bond; unused for the bank account
    bool operator==(const Numeraire&) const = default;
};

struct Historical {
    double drift = 0.0;
    bool operator==(const Historical&) const = default;
};

struct RiskNeutral {
    Numeraire numeraire;
    bool operator==(const RiskNeutral&) const = default;
};

/*! Risk appetite measure: every factor drifts at its risk-neutral rate plus
    m_b times its own volatility. If riskless_rate is set it replaces the
    model's short rate as the asset drift base.
*/
struct RiskAppetite {
    double m_b = 0.0;
    std::optional<double> riskless_rate;
    bool operator==(const RiskAppetite&) const = default;
};

using MeasureSpec = std::variant<Historical, RiskNeutral, RiskAppetite>;

inline std::string_view measure_code(const MeasureSpec& m) {
    switch (m.index()) {
    case 0: return "P";
    case 1: return "Q";
    default: return "A";
    }
}

//! Numeraire a measure deflates with; only the risk-neutral measure can choose a bond.
inline Numeraire numeraire_of(const MeasureSpec& m) {
    if (const auto* q = std::get_if<RiskNeutral>(&m))
        return q->numeraire;
    return {};
}

struct TimeGrid {
    std::vector<double> dates;
    int substeps = 8;

    void validate() const {
        RAMPFE_REQUIRE(!dates.empty(), ErrorKind::InvalidGrid, "time grid needs at least one stopping date");
        RAMPFE_REQUIRE(substeps >= 1, ErrorKind::InvalidGrid, "substeps must be >= 1");
        RAMPFE_REQUIRE(dates.front() > 0.0, ErrorKind::InvalidGrid, "first stopping date must be > 0");
        for (std::size_t i = 0; i < dates.size(); ++i) {
            RAMPFE_REQUIRE(std::isfinite(dates[i]), ErrorKind::InvalidGrid, "stopping dates must be finite");
            if (i > 0)
                RAMPFE_REQUIRE(dates[i] > dates[i - 1], ErrorKind::InvalidGrid,
                               "stopping dates must be strictly increasing");
        }
    }

    bool operator==(const TimeGrid&) const = default;
};

//! Vasicek bond-vol kernel (1 - e^{-kappa tau}) / kappa.
inline double vasicek_b(double kappa, double tau) noexcept { return -std::expm1(-kappa * tau) / kappa; }

/*! Zero-coupon bond price P(t, T) given the short rate at t (affine closed
    form for the mean-reverting factor, e^{-r (T - t)} for a flat rate).
    \p short_rate defaults to the model's initial rate.
*/
inline double zcb_price(const ModelSpec& model, double t, double maturity, std::optional<double> short_rate = {}) {
    RAMPFE_REQUIRE(t <= maturity, ErrorKind::InvalidTimes, "zcb_price needs t <= T");
    RAMPFE_REQUIRE(t >= 0.0, ErrorKind::InvalidTimes, "zcb_price needs t >= 0");
    const double tau = maturity - t;
    if (!model.stochastic_rates())
        return std::exp(-short_rate.value_or(model.flat_rate) * tau);
    const auto& rf = model.rate();
    const double r = short_rate.value_or(rf.r0);
    const double b = vasicek_b(rf.kappa, tau);
    const double s2 = rf.sigma_r * rf.sigma_r;
    const double k2 = rf.kappa * rf.kappa;
    const double log_a = (rf.theta - s2 / (2.0 * k2)) * (b - tau) - s2 * b * b / (4.0 * rf.kappa);
    return std::exp(log_a - b * r);
}

//! Continuously compounded deterministic yield from today to \p horizon.
inline double zero_yield(const ModelSpec& model, double horizon) {
    if (!model.stochastic_rates() || horizon <= 0.0)
        return model.stochastic_rates() ? model.rate().r0 : model.flat_rate;
    return -std::log(zcb_price(model, 0.0, horizon)) / horizon;
}

} // namespace rampfe
