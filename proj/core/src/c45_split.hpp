#pragma once

#include "slgb/dataset.hpp"
#include "slgb/rules.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace slgb::detail {

/// Training rows with positive weight, weights rescaled to mean 1 over those rows.
struct weighted_rows {
    const dataset *data{ nullptr };
    std::vector<double> weight;
    std::vector<std::size_t> rows;

    [[nodiscard]] std::size_t label(std::size_t r) const { return *data->instances[r].label; }
    [[nodiscard]] const instance &row(std::size_t r) const { return data->instances[r]; }
    [[nodiscard]] std::size_t num_classes() const { return data->num_classes(); }
};

/// Validates inputs (labels present, weights aligned, non-negative, positive sum).
[[nodiscard]] weighted_rows prepare_rows(const dataset &data, std::span<const double> weights);

[[nodiscard]] std::vector<double> class_distribution(const weighted_rows &wr, std::span<const std::size_t> rows);

[[nodiscard]] double total_of(std::span<const double> dist);

/// C4.5 pessimistic error increment for `errors` misclassified out of `n` at confidence `cf`.
[[nodiscard]] double added_errors(double n, double errors, double cf);

/// Observed + pessimistic errors of a leaf with class distribution `dist`.
[[nodiscard]] double estimated_errors(std::span<const double> dist, double cf);

struct split_model {
    std::size_t attribute{ 0 };
    bool numeric{ false };
    double threshold{ 0.0 };
    std::size_t branches{ 0 };
    /// Branch receiving rows whose tested value is missing.
    std::size_t heavy_branch{ 0 };

    [[nodiscard]] std::size_t branch_of(const instance &x) const;
    [[nodiscard]] std::vector<std::vector<std::size_t>> partition(const weighted_rows &wr,
                                                                  std::span<const std::size_t> rows) const;
    [[nodiscard]] condition branch_condition(std::size_t branch) const;
};

/// C4.5 split selection: best gain ratio among splits with at least average gain.
[[nodiscard]] std::optional<split_model> select_split(const weighted_rows &wr, std::span<const std::size_t> rows,
                                                      double min_leaf_weight);

/// First-match coverage and confidence of every rule of an ordered list.
void annotate_list_coverage(rule_model &model, const weighted_rows &wr);

}  // namespace slgb::detail
