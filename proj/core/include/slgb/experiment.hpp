#pragma once

#include "slgb/dataset.hpp"
#include "slgb/metrics.hpp"
#include "slgb/pipeline.hpp"
#include "slgb/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slgb {

struct experiment_config {
    /// File paths, `synth:<name>` or `synth:suite` for all twelve generated datasets.
    std::vector<std::string> datasets;
    std::vector<double> ratios{ 0.1, 0.2, 0.3, 0.4 };
    std::size_t folds{ 10 };
    /// Names of the form rf-<c45|part|rip>-<none|conf|rst>.
    std::vector<std::string> configs{ "rf-part-rst" };
    simplicity_params simplicity;
    double alpha{ 0.6 };
    std::uint64_t seed{ 1 };
    double epsilon{ 0.98 };
    std::size_t n_trees{ 100 };
    /// Cells evaluated concurrently; results do not depend on it.
    std::size_t threads{ 1 };
    /// Grid studies: independent splits per grid cell.
    std::size_t grid_repeats{ 3 };
    std::optional<std::string> class_column;
    /// Reports are written here when set.
    std::string out_dir;

    void validate() const;
};

struct cell_result {
    std::string dataset;
    std::string config;
    double ratio{ 0.0 };
    std::size_t fold{ 0 };
    /// Grid studies only.
    double labeled_frac{ 0.0 };
    double unlabeled_frac{ 0.0 };
    std::uint64_t seed{ 0 };
    bool ok{ false };
    std::string message;

    std::size_t labeled{ 0 };
    std::size_t unlabeled{ 0 };
    std::size_t test{ 0 };
    double kappa{ 0.0 };
    double accuracy{ 0.0 };
    std::size_t rules{ 0 };
    double baseline_kappa{ 0.0 };
    double baseline_accuracy{ 0.0 };
    std::size_t baseline_rules{ 0 };
    double growth{ 0.0 };
    double simplicity{ 0.0 };
    double utility{ 0.0 };
    /// Kappa of the surrogate on the unlabeled part against its hidden labels.
    std::optional<double> transductive_kappa;
};

struct aggregate_row {
    std::string dataset;
    std::string config;
    double ratio{ 0.0 };
    double labeled_frac{ 0.0 };
    double unlabeled_frac{ 0.0 };
    std::size_t cells{ 0 };
    std::size_t failed{ 0 };
    double kappa_mean{ 0.0 };
    double kappa_sd{ 0.0 };
    double accuracy_mean{ 0.0 };
    double rules_mean{ 0.0 };
    double rules_median{ 0.0 };
    double baseline_kappa_mean{ 0.0 };
    double baseline_rules_median{ 0.0 };
    double growth_mean{ 0.0 };
    double simplicity_mean{ 0.0 };
    double utility_mean{ 0.0 };
};

struct ratio_stats {
    double ratio{ 0.0 };
    score_matrix scores;
    std::optional<test_battery> battery;
};

struct experiment_report {
    experiment_config config;
    bool grid{ false };
    std::vector<double> grid_fracs;
    std::vector<cell_result> cells;
    /// Per dataset, ratio (or grid cell) and config.
    std::vector<aggregate_row> aggregates;
    /// Means over datasets per ratio (or grid cell) and config; `dataset` is "*".
    std::vector<aggregate_row> summary;
    std::vector<ratio_stats> stats;
    std::vector<std::string> warnings;
};

/// Resolves a dataset argument (path or `synth:<name>`) into datasets.
[[nodiscard]] std::vector<dataset> resolve_datasets(const std::string &spec, const experiment_config &cfg);

/**
 * Ratio sweep with stratified cross-validation. For each dataset, ratio, fold
 * and configuration a grey box and its labeled-only white-box baseline are
 * trained on the same split and scored on the test fold. A failing cell is
 * recorded with its reason instead of aborting the sweep.
 */
[[nodiscard]] experiment_report run_experiment(const experiment_config &cfg);

/// Labeled-fraction × unlabeled-fraction study over `fracs`.
[[nodiscard]] experiment_report run_grid(const experiment_config &cfg, const std::vector<double> &fracs);

/// One row per cell with fixed numeric formatting.
[[nodiscard]] std::string cells_to_csv(const experiment_report &report);
[[nodiscard]] std::string aggregates_to_csv(const std::vector<aggregate_row> &rows, bool grid);
/// Grid studies: one row per (labeled fraction, unlabeled fraction, config), averaged over datasets.
[[nodiscard]] std::string grid_table_csv(const experiment_report &report);
[[nodiscard]] std::string report_to_json(const experiment_report &report, const std::string &timestamp);

/// Writes cells.csv, aggregates.csv, report.json (and grid.csv or stats CSVs) into `dir`.
void write_report(const experiment_report &report, const std::string &dir);

}  // namespace slgb
