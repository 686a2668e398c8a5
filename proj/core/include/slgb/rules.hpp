#pragma once

#include "slgb/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slgb {

enum class condition_op { less_equal, greater, equal };

/// Single attribute test. For `equal` the value is the nominal code.
struct condition {
    std::size_t attribute{ 0 };
    condition_op op{ condition_op::equal };
    double value{ 0.0 };

    /// Missing values never satisfy a condition.
    [[nodiscard]] bool matches(const instance &x) const noexcept;

    friend bool operator==(const condition &, const condition &) = default;
};

struct rule {
    std::vector<condition> conditions;
    std::size_t consequent{ 0 };
    /// Weighted count of training instances this rule fired on.
    double coverage{ 0.0 };
    /// Share of that weight carrying the consequent class.
    double confidence{ 0.0 };

    [[nodiscard]] bool covers(const instance &x) const noexcept;
    [[nodiscard]] bool is_default() const noexcept { return conditions.empty(); }

    friend bool operator==(const rule &, const rule &) = default;
};

enum class rule_model_kind { tree, part_list, ripper_list };

[[nodiscard]] std::string_view to_string(rule_model_kind kind) noexcept;

/**
 * Interpretable classifier. Trees are stored as one rule per leaf (the
 * root-to-leaf path), so exactly one rule matches a complete instance; lists
 * are ordered and end with an unconditioned default rule.
 */
struct rule_model {
    rule_model_kind kind{ rule_model_kind::tree };
    std::vector<rule> rules;
    std::size_t default_class{ 0 };
    std::vector<std::string> classes;
    std::vector<attribute_schema> schema;

    /// Index of the rule that decides `x`, if any rule matches.
    [[nodiscard]] std::optional<std::size_t> firing_rule(const instance &x) const;

    friend bool operator==(const rule_model &, const rule_model &) = default;
};

struct c45_options {
    double min_leaf_weight{ 2.0 };
    double confidence_factor{ 0.25 };
    bool subtree_raising{ true };

    void validate() const;
};

struct ripper_options {
    double min_rule_weight{ 2.0 };
    std::size_t prune_folds{ 3 };
    std::size_t optimize_iters{ 2 };
    std::uint64_t seed{ 1 };

    void validate() const;
};

/**
 * C4.5 decision tree: weighted gain-ratio splits (multiway on nominal
 * attributes, binary midpoints on numeric ones), collapse, then pessimistic
 * pruning with subtree raising at the given confidence factor.
 *
 * Weights are rescaled to mean 1 over the positive-weight rows before
 * induction, so models are invariant to multiplying all weights by a constant
 * and `min_leaf_weight` is expressed in instance units.
 */
[[nodiscard]] rule_model train_c45(const dataset &data, std::span<const double> weights, const c45_options &options = {});

/// PART decision list built by separate-and-conquer over partial C4.5 trees.
[[nodiscard]] rule_model train_part(const dataset &data, std::span<const double> weights,
                                    const c45_options &options = {});

/**
 * RIPPER decision list: classes are covered in ascending weighted frequency
 * with IREP* (FOIL-gain growth, reduced-error pruning, description-length
 * stopping), followed by `optimize_iters` rounds of rule replacement/revision.
 */
[[nodiscard]] rule_model train_ripper(const dataset &data, std::span<const double> weights,
                                      const ripper_options &options = {});

/// Trees: the matching leaf's class; lists: first matching rule. Falls back to default_class.
[[nodiscard]] std::size_t predict_rules(const rule_model &model, const instance &x);

/// Leaf count for trees; rule count including the default rule for lists.
[[nodiscard]] std::size_t count_rules(const rule_model &model);

[[nodiscard]] std::string render_condition(const rule_model &model, const condition &c);
[[nodiscard]] std::string render_rule(const rule_model &model, const rule &r);
/// One `IF … THEN class (coverage, confidence)` line per rule.
[[nodiscard]] std::string render_text(const rule_model &model);

[[nodiscard]] std::string rule_model_to_json(const rule_model &model);
[[nodiscard]] rule_model rule_model_from_json(std::string_view json);

}  // namespace slgb
