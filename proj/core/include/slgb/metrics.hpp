#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slgb {

/// Rows are actual classes, columns predicted classes.
struct confusion_matrix {
    std::vector<std::vector<std::uint64_t>> counts;

    [[nodiscard]] static confusion_matrix from_predictions(std::span<const std::size_t> actual,
                                                           std::span<const std::size_t> predicted,
                                                           std::size_t num_classes);
    [[nodiscard]] std::uint64_t total() const noexcept;
    /// Throws parameter_error unless square with a positive total.
    void validate() const;
};

/// Cohen's kappa; defined as 0 when the expected agreement is 1.
[[nodiscard]] double kappa(const confusion_matrix &cm);
[[nodiscard]] double accuracy(const confusion_matrix &cm);

/// Rule count of the grey box over that of the labeled-only white box.
[[nodiscard]] double relative_growth(std::size_t grey_rules, std::size_t white_rules);

struct simplicity_params {
    double upper{ 1.0 };
    double lower{ 0.0 };
    double slope{ 0.1 };
    double shift{ 30.0 };
    double growth{ 0.5 };

    void validate() const;
};

/// Generalized logistic decreasing from `upper` towards `lower` as the rule count grows.
[[nodiscard]] double simplicity(double rules, const simplicity_params &params = {});

/// alpha * (kappa + 1) / 2 + (1 - alpha) * simplicity.
[[nodiscard]] double utility(double kappa_value, double simplicity_value, double alpha = 0.6);

}  // namespace slgb
