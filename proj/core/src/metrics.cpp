#include "slgb/metrics.hpp"

#include "slgb/error.hpp"

#include <cmath>

namespace slgb {

confusion_matrix confusion_matrix::from_predictions(std::span<const std::size_t> actual,
                                                    std::span<const std::size_t> predicted, std::size_t num_classes) {
    if (actual.size() != predicted.size()) {
        throw parameter_error("actual and predicted labels differ in length");
    }
    confusion_matrix cm;
    cm.counts.assign(num_classes, std::vector<std::uint64_t>(num_classes, 0));
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] >= num_classes || predicted[i] >= num_classes) {
            throw parameter_error("class index out of range");
        }
        ++cm.counts[actual[i]][predicted[i]];
    }
    return cm;
}

std::uint64_t confusion_matrix::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto &row : counts) {
        for (const auto c : row) {
            t += c;
        }
    }
    return t;
}

void confusion_matrix::validate() const {
    for (const auto &row : counts) {
        if (row.size() != counts.size()) {
            throw parameter_error("confusion matrix must be square");
        }
    }
    if (total() == 0) {
        throw parameter_error("confusion matrix is empty");
    }
}

double kappa(const confusion_matrix &cm) {
    cm.validate();
    const std::size_t k = cm.counts.size();
    const auto n = static_cast<double>(cm.total());
    double observed = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        observed += static_cast<double>(cm.counts[i][i]);
        double row = 0.0;
        double col = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row += static_cast<double>(cm.counts[i][j]);
            col += static_cast<double>(cm.counts[j][i]);
        }
        expected += row * col;
    }
    const double p_o = observed / n;
    const double p_e = expected / (n * n);
    if (std::abs(1.0 - p_e) < 1e-15) {
        return 0.0;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double accuracy(const confusion_matrix &cm) {
    cm.validate();
    double diag = 0.0;
    for (std::size_t i = 0; i < cm.counts.size(); ++i) {
        diag += static_cast<double>(cm.counts[i][i]);
    }
    return diag / static_cast<double>(cm.total());
}

double relative_growth(std::size_t grey_rules, std::size_t white_rules) {
    if (white_rules == 0) {
        throw parameter_error("white-box rule count must be positive");
    }
    return static_cast<double>(grey_rules) / static_cast<double>(white_rules);
}

void simplicity_params::validate() const {
    if (!(slope > 0.0) || !std::isfinite(slope)) {
        throw parameter_error("simplicity slope must be positive");
    }
    if (!(growth > 0.0) || !std::isfinite(growth)) {
        throw parameter_error("simplicity growth must be positive");
    }
    if (!std::isfinite(shift) || !std::isfinite(upper) || !std::isfinite(lower)) {
        throw parameter_error("simplicity parameters must be finite");
    }
}

double simplicity(double rules, const simplicity_params &p) {
    p.validate();
    if (!(rules >= 0.0)) {
        throw parameter_error("rule count must be non-negative");
    }
    const double denom = std::pow(1.0 + std::exp(-p.slope * (rules - p.shift)), 1.0 / p.growth);
    return p.upper + (p.lower - p.upper) / denom;
}

double utility(double kappa_value, double simplicity_value, double alpha) {
    if (!(kappa_value >= -1.0 && kappa_value <= 1.0)) {
        throw parameter_error("kappa must lie in [-1, 1]");
    }
    if (!(simplicity_value >= 0.0 && simplicity_value <= 1.0)) {
        throw parameter_error("simplicity must lie in [0, 1]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw parameter_error("alpha must lie in [0, 1]");
    }
    return alpha * (kappa_value + 1.0) / 2.0 + (1.0 - alpha) * simplicity_value;
}

}  // namespace slgb
