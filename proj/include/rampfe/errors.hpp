#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rampfe {

enum class ErrorKind {
    // appetite
    DegenerateQuantile,
    DegenerateLimit,
    NegativeVolatility,
    DomainError,
    NoRealRoot,
    NonPositiveSigma,
    InsufficientData,
    SingularScale,
    DegenerateSystem,
    ZeroVolatility,
    // models
    InvalidCorrelation,
    InvalidGrid,
    InvalidTimes,
    InvalidModel,
    // engine
    UnknownDate,
    EmptySample,
    InsufficientTail,
    InvalidArgument,
    // backtest
    ZeroDispersion,
    // io
    ParseError,
    ValidationError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::DegenerateQuantile: return "DegenerateQuantile";
    case ErrorKind::DegenerateLimit: return "DegenerateLimit";
    case ErrorKind::NegativeVolatility: return "NegativeVolatility";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularScale: return "SingularScale";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::ZeroVolatility: return "ZeroVolatility";
    case ErrorKind::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidTimes: return "InvalidTimes";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::UnknownDate: return "UnknownDate";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::InsufficientTail: return "InsufficientTail";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroDispersion: return "ZeroDispersion";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

//! Library-wide exception; kind() identifies the failure for callers that branch on it.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

#define RAMPFE_REQUIRE(condition, kind, message)                                                   \
    do {                                                                                           \
        if (!(condition))                                                                          \
            throw ::rampfe::Error((kind), (message));                                              \
    } while (false)

} // namespace rampfe
