#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sdu {

// Population moments (divide by n, not n-1). The instance model stores
// moments derived from stored samples with this convention, so loaders and
// generators must agree bit-for-bit.
inline double mean_of(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double population_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) {
        const double d = x - m;
        s += d * d;
    }
    return s / static_cast<double>(xs.size());
}

inline double population_stddev(std::span<const double> xs) {
    return std::sqrt(population_variance(xs));
}

// |a-b| <= tol relative to the larger magnitude; equal values (incl. both
// zero) always pass.
inline bool approx_equal_rel(double a, double b, double tol) {
    if (a == b) return true;
    const double scale = std::fmax(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= tol * scale;
}

}  // namespace sdu
