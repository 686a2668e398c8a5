#pragma once

#include "slgb/amending.hpp"
#include "slgb/dataset.hpp"
#include "slgb/forest.hpp"
#include "slgb/rules.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slgb {

enum class whitebox_kind { c45, part, ripper };

[[nodiscard]] std::string_view to_string(whitebox_kind kind) noexcept;

struct slgb_config {
    forest_config forest;
    whitebox_kind whitebox{ whitebox_kind::part };
    c45_options c45;
    ripper_options ripper;
    amending_kind amending{ amending_kind::rst };
    double epsilon{ 0.98 };
    /// Fixed attribute weights for the distance; information gain when empty.
    std::vector<double> attribute_weights;
    bool rst_multiply_balance{ false };
    std::uint64_t seed{ 1 };

    /// Short name such as `rf-part-rst`.
    [[nodiscard]] std::string name() const;
    void validate(std::size_t num_attributes) const;
};

/// Parses `rf-{c45|part|rip}-{none|conf|rst}` into the white box and amending fields of `base`.
[[nodiscard]] slgb_config parse_config_name(std::string_view name, const slgb_config &base = {});

struct weight_summary {
    double min{ 0.0 };
    double max{ 0.0 };
    double mean{ 0.0 };
};

struct training_report {
    std::size_t labeled{ 0 };
    std::size_t self_labeled{ 0 };
    weight_summary labeled_weights;
    weight_summary self_labeled_weights;
    /// Number of self-labels per class.
    std::vector<std::size_t> self_label_counts;
    std::vector<double> attribute_weights;
    std::vector<std::string> warnings;
};

struct slgb_model {
    rule_model surrogate;
    /// Kept for audit only; never consulted by predict_slgb.
    trained_forest forest;
    slgb_config config;
    training_report report;
};

/**
 * Self-labeling grey box: a random forest trained on balance-weighted labeled
 * data labels `unlabeled`; the enlarged set (labeled rows first) is amended
 * and used to train the white-box surrogate. Missing numeric cells are filled
 * with means over labeled and unlabeled rows before training.
 */
[[nodiscard]] slgb_model fit(const dataset &labeled, const dataset &unlabeled, const slgb_config &config);

/// Trains the configured white box on explicit weights (the labeled-only baseline).
[[nodiscard]] rule_model train_whitebox(const dataset &data, std::span<const double> weights,
                                        const slgb_config &config);

[[nodiscard]] std::size_t predict_slgb(const slgb_model &model, const instance &x);

struct explanation {
    std::optional<std::size_t> rule_index;
    rule fired;
    bool is_default{ false };
    std::string text;
    std::size_t predicted{ 0 };
};

[[nodiscard]] explanation explain(const slgb_model &model, const instance &x);

/// Config, surrogate and training report; the forest is not included.
[[nodiscard]] std::string model_to_json(const slgb_model &model);
/// Restores a bundle written by model_to_json; the returned forest is empty.
[[nodiscard]] slgb_model model_from_json(std::string_view json);

}  // namespace slgb
