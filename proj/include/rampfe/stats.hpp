#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace rampfe {

//! Neumaier-compensated sum.
inline double compensated_sum(std::span<const double> xs) noexcept {
    double sum = 0.0;
    double c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline double mean(std::span<const double> xs) noexcept {
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

//! Two-pass variance; ddof = 1 gives the sample (n - 1) convention.
inline double variance(std::span<const double> xs, std::size_t ddof = 1) noexcept {
    const double m = mean(xs);
    double acc = 0.0;
    double c = 0.0;
    for (double x : xs) {
        const double d = (x - m) * (x - m);
        const double t = acc + d;
        c += (std::fabs(acc) >= d) ? (acc - t) + d : (d - t) + acc;
        acc = t;
    }
    return (acc + c) / static_cast<double>(xs.size() - ddof);
}

inline double standard_deviation(std::span<const double> xs, std::size_t ddof = 1) noexcept {
    return std::sqrt(variance(xs, ddof));
}

} // namespace rampfe
