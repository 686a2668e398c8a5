#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slgb {

enum class attribute_kind { numeric, nominal };

/// Missing cells are stored as quiet NaN in both numeric and nominal columns.
inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

[[nodiscard]] inline bool is_missing(double v) noexcept { return std::isnan(v); }

/**
 * Description of one predictive attribute.
 *
 * Nominal values are stored in instances as the index into `values`.
 * For numeric attributes `min`/`max` hold the observed range of the data the
 * schema was last computed on.
 */
struct attribute_schema {
    std::string name;
    attribute_kind kind{ attribute_kind::numeric };
    std::vector<std::string> values;
    double min{ 0.0 };
    double max{ 0.0 };

    [[nodiscard]] bool is_numeric() const noexcept { return kind == attribute_kind::numeric; }
    [[nodiscard]] bool is_nominal() const noexcept { return kind == attribute_kind::nominal; }
    [[nodiscard]] std::optional<std::size_t> value_index(std::string_view value) const;

    /// Throws schema_error when the invariants do not hold.
    void validate() const;

    friend bool operator==(const attribute_schema &, const attribute_schema &) = default;
};

struct instance {
    std::vector<double> values;
    std::optional<std::size_t> label;
    double weight{ 1.0 };

    friend bool operator==(const instance &lhs, const instance &rhs);
};

/// Schema-typed table of instances with an ordered class set.
struct dataset {
    std::string relation{ "data" };
    std::string class_name{ "class" };
    std::vector<attribute_schema> schema;
    std::vector<std::string> classes;
    std::vector<instance> instances;

    [[nodiscard]] std::size_t size() const noexcept { return instances.size(); }
    [[nodiscard]] bool empty() const noexcept { return instances.empty(); }
    [[nodiscard]] std::size_t num_attributes() const noexcept { return schema.size(); }
    [[nodiscard]] std::size_t num_classes() const noexcept { return classes.size(); }

    [[nodiscard]] bool fully_labeled() const noexcept;
    [[nodiscard]] bool fully_unlabeled() const noexcept;

    /// Per-class instance counts over labeled instances.
    [[nodiscard]] std::vector<std::size_t> class_counts() const;

    /// Copy of this dataset restricted to `rows`, in the given order.
    [[nodiscard]] dataset subset(std::span<const std::size_t> rows) const;

    /// Same schema and classes, no instances.
    [[nodiscard]] dataset empty_like() const;

    [[nodiscard]] bool same_schema(const dataset &other) const;

    /// Throws schema_error on a violated invariant (value arity, label range, ≥2 classes).
    void validate() const;
};

enum class data_format { csv, keel_arff };

struct load_options {
    /// Class column by name; defaults to the last column (or KEEL `@outputs`).
    std::optional<std::string> class_column;
};

/**
 * Parse a dataset from a CSV (header row required) or KEEL/ARFF-style stream.
 *
 * CSV column kinds are inferred: a column is numeric when every non-missing
 * cell parses as a number. Empty cells and `?` are missing; a `?` in the
 * class column leaves the instance unlabeled. Missing nominal cells are mapped
 * onto an extra `?` category appended to the attribute's domain.
 *
 * Throws schema_error, row_error (with the 1-based line number) or
 * empty_dataset_error.
 */
[[nodiscard]] dataset load_dataset(std::istream &in, data_format format, const load_options &options = {});
[[nodiscard]] dataset load_dataset_file(const std::string &path, const load_options &options = {});

/// Guess the format from the extension: `.arff`/`.dat` → keel_arff, otherwise csv.
[[nodiscard]] data_format format_from_path(std::string_view path);

/// Unlabeled instances are written with `?` in the class column.
void write_dataset(std::ostream &out, const dataset &d, data_format format);

/// Recompute numeric min/max from the instances currently held.
void refresh_ranges(dataset &d);

/**
 * Min-max scale every numeric attribute to [0,1] using the range observed in
 * `d` itself (the training data). Constant attributes map to 0. The returned
 * schema records the post-scaling range, so the operation is idempotent.
 */
[[nodiscard]] dataset normalize_numeric(dataset d);

/// Numeric means fitted on training data and used to fill missing numeric cells.
class mean_imputer {
  public:
    [[nodiscard]] static mean_imputer fit(const dataset &training);
    [[nodiscard]] static mean_imputer fit(std::span<const dataset *const> training);

    [[nodiscard]] dataset apply(dataset d) const;
    [[nodiscard]] const std::vector<double> &means() const noexcept { return means_; }

  private:
    std::vector<double> means_;
};

/// Labeled / unlabeled / test partition of a dataset.
struct semi_supervised_split {
    dataset labeled;
    dataset unlabeled;
    dataset test;
    double ratio{ 0.0 };
    /// Ground truth of `unlabeled`, kept for transductive scoring only.
    std::vector<std::size_t> hidden_labels;
    /// Row indices into the source dataset.
    std::vector<std::size_t> labeled_rows;
    std::vector<std::size_t> unlabeled_rows;
    std::vector<std::size_t> test_rows;
    std::vector<std::string> warnings;
};

/**
 * Stratified k-fold partition: fold `fold` of `folds` becomes the test set and
 * a stratified `ratio` share of the remaining training rows keeps its labels.
 * At least one labeled instance per class present in training is enforced.
 * Deterministic in (d, ratio, seed, fold, folds).
 */
[[nodiscard]] semi_supervised_split make_split(const dataset &d, double ratio, std::uint64_t seed, std::size_t fold = 0,
                                               std::size_t folds = 10);

/**
 * 20% stratified test hold-out; the remaining rows are divided into two equal
 * disjoint pools. The labeled part takes `labeled_frac` of the first pool and
 * the unlabeled part `unlabeled_frac` of the second.
 */
[[nodiscard]] semi_supervised_split make_grid_split(const dataset &d, double labeled_frac, double unlabeled_frac,
                                                    std::uint64_t seed);

/// Labels stored in a dataset; unlabeled rows throw configuration_error.
[[nodiscard]] std::vector<std::size_t> labels_of(const dataset &d);

}  // namespace slgb
