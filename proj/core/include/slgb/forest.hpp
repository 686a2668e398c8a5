#pragma once

#include "slgb/dataset.hpp"
#include "slgb/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slgb {

struct forest_config {
    std::size_t n_trees{ 100 };
    /// Defaults to ⌈log2(p)⌉ (at least 1) when unset.
    std::optional<std::size_t> attributes_per_split;
    double min_leaf_weight{ 2.0 };
    std::optional<std::size_t> max_depth;
    std::uint64_t seed{ 1 };
    /// Add one pseudo-count per class to leaf tallies when scoring.
    bool laplace_smoothing{ true };
    /// Worker threads used to grow trees; results do not depend on it.
    std::size_t threads{ 1 };

    [[nodiscard]] std::size_t resolved_attributes_per_split(std::size_t num_attributes) const;
    void validate(std::size_t num_attributes) const;
};

/// Node of a randomized tree; `attribute < 0` marks a leaf.
struct tree_node {
    int attribute{ -1 };
    bool numeric{ false };
    double threshold{ 0.0 };
    /// Numeric: [≤ threshold, > threshold]; nominal: one child per domain value.
    std::vector<std::size_t> children;
    /// Weighted class tallies of the training data that reached the node.
    std::vector<double> tally;
    /// Child followed when the tested value is missing.
    std::size_t missing_child{ 0 };

    [[nodiscard]] bool is_leaf() const noexcept { return attribute < 0; }
};

struct random_tree {
    std::vector<tree_node> nodes;

    [[nodiscard]] const tree_node &leaf_for(const instance &x) const;
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t leaf_count() const;
};

struct trained_forest {
    std::vector<random_tree> trees;
    std::vector<std::string> classes;
    std::vector<attribute_schema> schema;
    forest_config config;
    /// Set when training saw a single class; predictions then return it with probability 1.
    std::optional<std::size_t> degenerate_class;
};

/**
 * Grow one randomized tree on weighted data. Zero-weight rows are ignored.
 * At each node `attributes_per_split` attributes are drawn without
 * replacement; if none yields positive information gain the remaining
 * attributes are tried in random order before the node becomes a leaf.
 */
[[nodiscard]] random_tree grow_tree(const dataset &data, std::span<const double> weights, const forest_config &config,
                                    rng &gen);

/**
 * Bagged ensemble: every tree is grown on a bootstrap sample of |data| draws
 * with selection probability proportional to `weights`.
 */
[[nodiscard]] trained_forest train_forest(const dataset &labeled, std::span<const double> weights,
                                          const forest_config &config);

/// Average of the per-tree leaf class distributions; sums to 1.
[[nodiscard]] std::vector<double> predict_proba(const trained_forest &forest, const instance &x);

/// Argmax of predict_proba; ties go to the first declared class.
[[nodiscard]] std::size_t predict(const trained_forest &forest, const instance &x);

/// Index of the largest element, lowest index on ties.
[[nodiscard]] std::size_t argmax_first(std::span<const double> values);

/// Versioned JSON document with tree structure, thresholds and leaf tallies.
[[nodiscard]] std::string forest_to_json(const trained_forest &forest);
[[nodiscard]] trained_forest forest_from_json(std::string_view json);

}  // namespace slgb
