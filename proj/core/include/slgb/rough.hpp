#pragma once

#include "slgb/dataset.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slgb {

struct heom_params {
    /// One non-negative weight per attribute; must have a positive sum.
    std::vector<double> attribute_weights;
    /// Two instances are similar when 1 - heom(x, y) >= epsilon.
    double epsilon{ 0.98 };

    void validate(std::size_t num_attributes) const;
};

/**
 * Weighted heterogeneous Euclidean-overlap distance in [0, 1]. Nominal
 * attributes contribute 0/1 overlap, numeric ones the squared difference of
 * normalized values; a missing value on either side contributes 1.
 */
[[nodiscard]] double heom(const instance &a, const instance &b, std::span<const attribute_schema> schema,
                          std::span<const double> attribute_weights);

/// Information gain (bits) of every attribute about the class; numeric attributes use 10 equal-frequency bins.
[[nodiscard]] std::vector<double> attribute_information_gain(const dataset &data);

enum class region { positive, boundary, negative };

struct region_sets {
    std::vector<std::size_t> positive;
    std::vector<std::size_t> boundary;
    std::vector<std::size_t> negative;

    [[nodiscard]] const std::vector<std::size_t> &of(region r) const;
};

/// Similarity classes of a labeled universe plus the approximation regions of every class.
struct similarity_structure {
    std::size_t size{ 0 };
    /// Sorted indices j with 1 - heom(x_i, x_j) >= epsilon; always contains i.
    std::vector<std::vector<std::size_t>> similarity_classes;
    std::vector<std::size_t> labels;
    /// Indexed by class.
    std::vector<region_sets> regions;

    [[nodiscard]] region region_of(std::size_t instance, std::size_t cls) const;
};

/**
 * Builds the O(n^2) similarity relation (parallel over row blocks when
 * `threads > 1`) and, per class y, the positive region {i : R(i) ⊆ X_y}, the
 * boundary region (upper approximation minus positive) and the negative rest.
 */
[[nodiscard]] similarity_structure build_similarity_structure(const dataset &data, const heom_params &params,
                                                              std::size_t threads = 1);

struct memberships {
    double positive{ 0.0 };
    double boundary{ 0.0 };
    double negative{ 0.0 };
};

/// Inclusion degrees |R(i) ∩ region| / |region| for class `cls`; an empty region yields 0.
[[nodiscard]] memberships region_memberships(const similarity_structure &s, std::size_t instance, std::size_t cls);

/// Per-class regions and similarity-class sizes, for inspection.
[[nodiscard]] std::string regions_to_json(const similarity_structure &s, std::span<const std::string> classes);

}  // namespace slgb
