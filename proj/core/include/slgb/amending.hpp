#pragma once

#include "slgb/dataset.hpp"
#include "slgb/forest.hpp"
#include "slgb/rough.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace slgb {

enum class amending_kind { none, conf, rst };

[[nodiscard]] std::string_view to_string(amending_kind kind) noexcept;
[[nodiscard]] std::optional<amending_kind> amending_from_string(std::string_view name) noexcept;

enum class provenance { originally_labeled, self_labeled };

/// Labeled rows followed by self-labeled rows, each with a training weight.
struct weighted_enlarged_set {
    dataset data;
    std::vector<double> weights;
    std::vector<provenance> origin;
};

/// Minority-class count divided by the count of each instance's class.
[[nodiscard]] std::vector<double> balance_weights(const dataset &labeled);

struct self_labels {
    std::vector<std::size_t> labels;
    std::vector<double> weights;
};

/// Forest prediction for every unlabeled row, weighted by its top class probability.
[[nodiscard]] self_labels conf_weights(const trained_forest &forest, const dataset &unlabeled);

/// logistic(positive + 0.5 * boundary - negative).
[[nodiscard]] double rst_weight(const memberships &m) noexcept;

struct rst_options {
    double epsilon{ 0.98 };
    /// Attribute weights for the distance; information gain on `enlarged` when empty.
    std::vector<double> attribute_weights;
    std::size_t threads{ 1 };
};

struct rst_result {
    std::vector<double> weights;
    std::vector<double> attribute_weights;
    /// Set when every attribute had zero information gain and uniform weights were used.
    bool uniform_fallback{ false };
};

/**
 * Inclusion-degree weight of every instance of `enlarged` for its own label.
 * Numeric attributes are rescaled to [0, 1] internally before distances are
 * taken.
 */
[[nodiscard]] rst_result rst_weights(const dataset &enlarged, const rst_options &options = {});

struct amending_options {
    rst_options rst;
    /// Multiply RST weights by the balance weights of the originally labeled rows instead of replacing them.
    bool rst_multiply_balance{ false };
};

struct amending_result {
    weighted_enlarged_set enlarged;
    /// Attribute weights used by RST (empty for other kinds).
    std::vector<double> attribute_weights;
    bool uniform_fallback{ false };
};

/**
 * Self-labels `unlabeled` with `forest` and weights the enlarged set:
 * none keeps balance weights and gives self-labels weight 1, conf uses the
 * forest confidence for self-labels, rst re-weights every row.
 */
[[nodiscard]] amending_result apply_amending(amending_kind kind, const dataset &labeled, const dataset &unlabeled,
                                             const trained_forest &forest, const amending_options &options = {});

}  // namespace slgb
