#pragma once

#include "slgb/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace slgb {

struct blobs_params {
    std::size_t rows{ 400 };
    std::size_t classes{ 2 };
    std::size_t informative{ 2 };
    /// Extra standard-normal attributes unrelated to the class.
    std::size_t noise_attributes{ 0 };
    double spread{ 1.0 };
    double separation{ 3.0 };
    /// Share of rows of class 0; the remainder is split evenly. 0 means balanced.
    double majority_share{ 0.0 };
    double label_noise{ 0.0 };
};

/// Isotropic Gaussian clusters, one per class, centred on random points of a hypercube.
[[nodiscard]] dataset make_blobs(const blobs_params &p, std::uint64_t seed);

/// Uniform points on [0, 1]^2 labelled by a `cells`×`cells` checkerboard (2 cells gives XOR).
[[nodiscard]] dataset make_checkerboard(std::size_t rows, std::size_t cells, double label_noise, std::uint64_t seed);

/// Concentric rings in the plane, one class per ring, with radial jitter.
[[nodiscard]] dataset make_rings(std::size_t rows, std::size_t classes, double jitter, std::uint64_t seed);

/// Numeric clusters plus nominal attributes whose value distribution depends on the class.
[[nodiscard]] dataset make_mixed(std::size_t rows, std::uint64_t seed);

/// Nominal-only data labelled by a small disjunctive rule with label noise.
[[nodiscard]] dataset make_nominal_rules(std::size_t rows, double label_noise, std::uint64_t seed);

/// Two classes separated by the hyperplane x1 + x2 = 1 in a 4-dimensional unit cube.
[[nodiscard]] dataset make_oblique(std::size_t rows, double label_noise, std::uint64_t seed);

/// Names accepted by make_synthetic.
[[nodiscard]] std::vector<std::string> synthetic_names();

/// One of the twelve benchmark datasets by name; throws parameter_error for unknown names.
[[nodiscard]] dataset make_synthetic(std::string_view name, std::uint64_t seed);

/// All twelve benchmark datasets (300 to 600 rows each).
[[nodiscard]] std::vector<dataset> synthetic_suite(std::uint64_t seed);

}  // namespace slgb
