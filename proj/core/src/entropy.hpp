#pragma once

#include <cmath>
#include <span>

namespace slgb::detail {

/// x·log2(x) with the 0·log 0 = 0 convention.
inline double xlog2x(double x) noexcept { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Total weight times the entropy (bits) of a weighted class tally.
inline double weighted_entropy(std::span<const double> tally) noexcept {
    double total = 0.0;
    double acc = 0.0;
    for (const double t : tally) {
        total += t;
        acc += xlog2x(t);
    }
    return xlog2x(total) - acc;
}

/// Entropy in bits of a weighted class tally.
inline double entropy(std::span<const double> tally) noexcept {
    double total = 0.0;
    for (const double t : tally) {
        total += t;
    }
    return total > 0.0 ? weighted_entropy(tally) / total : 0.0;
}

}  // namespace slgb::detail
