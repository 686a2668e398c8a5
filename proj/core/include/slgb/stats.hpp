#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slgb {

/// Rows are datasets, columns are compared configurations; higher is better.
struct score_matrix {
    std::vector<std::string> row_names;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> scores;

    [[nodiscard]] std::size_t rows() const noexcept { return scores.size(); }
    [[nodiscard]] std::size_t columns() const noexcept { return column_names.size(); }
    [[nodiscard]] std::vector<double> column(std::size_t j) const;
    /// At least 2×2, rectangular, all entries finite.
    void validate() const;
};

/// CSV with a header `name,<config>,...` and one row per dataset.
[[nodiscard]] score_matrix read_score_matrix(std::istream &in);

struct friedman_result {
    double statistic{ 0.0 };
    double p_value{ 1.0 };
    /// Average rank per column; rank 1 is the best score, ties get midranks.
    std::vector<double> average_ranks;
};

/// Tie-corrected Friedman statistic with a chi-square(k - 1) p-value.
[[nodiscard]] friedman_result friedman_test(const score_matrix &m);

struct wilcoxon_result {
    /// Rank sum of the pairs where a > b.
    double r_plus{ 0.0 };
    /// Rank sum of the pairs where a < b.
    double r_minus{ 0.0 };
    double p_value{ 1.0 };
    /// Non-zero differences used.
    std::size_t n{ 0 };
    bool exact{ false };
};

/// Largest number of non-zero differences for which the exact null distribution is enumerated.
inline constexpr std::size_t wilcoxon_exact_limit = 20;

/**
 * Two-sided signed-rank test. Zero differences are dropped and tied absolute
 * differences receive midranks. Up to `wilcoxon_exact_limit` pairs the p-value
 * is exact; beyond that a normal approximation with tie and continuity
 * corrections is used.
 */
[[nodiscard]] wilcoxon_result wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct holm_result {
    /// In input order.
    std::vector<double> adjusted;
    std::vector<bool> rejected;
};

[[nodiscard]] holm_result holm_correction(std::span<const double> p_values, double alpha = 0.05);

struct pairwise_row {
    std::string pair;
    double p_value{ 1.0 };
    double r_minus{ 0.0 };
    double r_plus{ 0.0 };
    double holm_p{ 1.0 };
    bool rejected{ false };
};

struct test_battery {
    friedman_result friedman;
    std::size_t control{ 0 };
    std::vector<pairwise_row> pairs;
    double alpha{ 0.05 };
};

/**
 * Friedman test plus control-versus-each Wilcoxon tests with Holm correction.
 * The control defaults to the column with the best average rank. R+ counts
 * datasets where the control scores higher.
 */
[[nodiscard]] test_battery run_test_battery(const score_matrix &m, std::optional<std::size_t> control = std::nullopt,
                                            double alpha = 0.05);

/// Columns: pair, p_value, r_minus, r_plus, holm_p, decision.
[[nodiscard]] std::string battery_to_csv(const test_battery &b);
[[nodiscard]] std::string battery_to_json(const test_battery &b, const score_matrix &m);

}  // namespace slgb
