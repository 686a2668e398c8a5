#include "c45_split.hpp"

#include "entropy.hpp"
#include "slgb/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace slgb::detail {

namespace {

constexpr double tiny = 1e-6;

struct candidate {
    split_model split;
    double gain{ 0.0 };
    double gain_ratio{ 0.0 };
};

// Gain in bits per instance, discounted by the share of rows with a known value.
double info_gain(std::span<const double> parent_known, const std::vector<std::vector<double>> &bags, double known,
                 double total) {
    double split_ent = 0.0;
    for (const auto &bag : bags) {
        split_ent += weighted_entropy(bag);
    }
    const double numerator = weighted_entropy(parent_known) - split_ent;
    if (std::abs(numerator) < 1e-10 || known <= 0.0) {
        return 0.0;
    }
    return (known / total) * numerator / known;
}

double split_info(const std::vector<double> &bag_totals, double unknown, double total) {
    double acc = 0.0;
    for (const double b : bag_totals) {
        acc -= xlog2x(b);
    }
    acc -= xlog2x(unknown);
    acc += xlog2x(total);
    return acc / total;
}

std::size_t heaviest(const std::vector<double> &bag_totals) {
    return static_cast<std::size_t>(std::distance(bag_totals.begin(), std::ranges::max_element(bag_totals)));
}

std::optional<candidate> evaluate_nominal(const weighted_rows &wr, std::span<const std::size_t> rows, std::size_t a,
                                          double min_leaf, double total) {
    const std::size_t k = wr.num_classes();
    const std::size_t nvals = wr.data->schema[a].values.size();
    if (nvals < 2) {
        return std::nullopt;
    }
    std::vector<std::vector<double>> bags(nvals, std::vector<double>(k, 0.0));
    std::vector<double> known_dist(k, 0.0);
    double unknown = 0.0;
    for (const std::size_t r : rows) {
        const double v = wr.row(r).values[a];
        const double w = wr.weight[r];
        if (is_missing(v)) {
            unknown += w;
            continue;
        }
        bags[static_cast<std::size_t>(v)][wr.label(r)] += w;
        known_dist[wr.label(r)] += w;
    }
    std::vector<double> bag_totals(nvals);
    std::size_t big_enough = 0;
    for (std::size_t v = 0; v < nvals; ++v) {
        bag_totals[v] = total_of(bags[v]);
        if (bag_totals[v] >= min_leaf - 1e-9) {
            ++big_enough;
        }
    }
    if (big_enough < 2) {
        return std::nullopt;
    }
    const double known = total - unknown;
    candidate c;
    c.split.attribute = a;
    c.split.numeric = false;
    c.split.branches = nvals;
    c.split.heavy_branch = heaviest(bag_totals);
    c.gain = info_gain(known_dist, bags, known, total);
    const double si = split_info(bag_totals, unknown, total);
    c.gain_ratio = si > tiny ? c.gain / si : 0.0;
    return c;
}

std::optional<candidate> evaluate_numeric(const weighted_rows &wr, std::span<const std::size_t> rows, std::size_t a,
                                          double min_leaf, double total) {
    const std::size_t k = wr.num_classes();
    std::vector<std::size_t> known_rows;
    known_rows.reserve(rows.size());
    double unknown = 0.0;
    std::vector<double> known_dist(k, 0.0);
    for (const std::size_t r : rows) {
        const double v = wr.row(r).values[a];
        if (is_missing(v)) {
            unknown += wr.weight[r];
        } else {
            known_rows.push_back(r);
            known_dist[wr.label(r)] += wr.weight[r];
        }
    }
    if (known_rows.size() < 2) {
        return std::nullopt;
    }
    const double known = total - unknown;
    const double min_split = std::clamp(0.1 * known / static_cast<double>(k), min_leaf, 25.0);
    if (known < 2.0 * min_split - 1e-9) {
        return std::nullopt;
    }
    std::ranges::stable_sort(known_rows, [&](std::size_t x, std::size_t y) {
        return wr.row(x).values[a] < wr.row(y).values[a];
    });

    std::vector<std::vector<double>> bags(2, std::vector<double>(k, 0.0));
    bags[1] = known_dist;
    double left = 0.0;
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_threshold = 0.0;
    double best_left = 0.0;
    std::size_t num_splits = 0;
    for (std::size_t i = 0; i + 1 < known_rows.size(); ++i) {
        const std::size_t r = known_rows[i];
        const double w = wr.weight[r];
        bags[0][wr.label(r)] += w;
        bags[1][wr.label(r)] -= w;
        left += w;
        const double v = wr.row(r).values[a];
        const double next = wr.row(known_rows[i + 1]).values[a];
        if (!(v < next)) {
            continue;
        }
        if (left < min_split - 1e-9 || known - left < min_split - 1e-9) {
            continue;
        }
        ++num_splits;
        const double gain = info_gain(known_dist, bags, known, total);
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_threshold = v + (next - v) / 2.0;
            if (!(best_threshold < next)) {
                best_threshold = v;
            }
            best_left = left;
        }
    }
    if (num_splits == 0) {
        return std::nullopt;
    }
    const double corrected = best_gain - std::log2(static_cast<double>(num_splits)) / total;
    if (corrected <= 0.0) {
        return std::nullopt;
    }
    candidate c;
    c.split.attribute = a;
    c.split.numeric = true;
    c.split.threshold = best_threshold;
    c.split.branches = 2;
    const std::vector<double> bag_totals{ best_left, known - best_left };
    c.split.heavy_branch = heaviest(bag_totals);
    c.gain = corrected;
    const double si = split_info(bag_totals, unknown, total);
    c.gain_ratio = si > tiny ? c.gain / si : 0.0;
    return c;
}

}  // namespace

weighted_rows prepare_rows(const dataset &data, std::span<const double> weights) {
    if (data.empty()) {
        throw configuration_error("cannot learn rules from an empty dataset");
    }
    if (weights.size() != data.size()) {
        throw parameter_error("weights must align with instances");
    }
    if (!data.fully_labeled()) {
        throw configuration_error("rule learners need fully labeled training data");
    }
    weighted_rows wr;
    wr.data = &data;
    wr.weight.assign(weights.begin(), weights.end());
    double sum = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double w = weights[r];
        if (!std::isfinite(w) || w < 0.0) {
            throw parameter_error("weights must be finite and non-negative");
        }
        if (w > 0.0) {
            wr.rows.push_back(r);
            sum += w;
        }
    }
    if (wr.rows.empty()) {
        throw parameter_error("weights must have a positive sum");
    }
    const double scale = static_cast<double>(wr.rows.size()) / sum;
    for (double &w : wr.weight) {
        w *= scale;
    }
    return wr;
}

std::vector<double> class_distribution(const weighted_rows &wr, std::span<const std::size_t> rows) {
    std::vector<double> dist(wr.num_classes(), 0.0);
    for (const std::size_t r : rows) {
        dist[wr.label(r)] += wr.weight[r];
    }
    return dist;
}

double total_of(std::span<const double> dist) { return std::accumulate(dist.begin(), dist.end(), 0.0); }

// Pessimistic extra errors at a leaf: upper limit of the Wilson score interval for the error rate with
// z = quantile(1 - cf), a 0.5 continuity offset, and the exact binomial bound below one error. Same constants
// as Weka's addErrs, so pruned trees match J48 for the default cf = 0.25.
double added_errors(double n, double errors, double cf) {
    if (n <= 0.0) {
        return 0.0;
    }
    if (errors < 1.0) {
        const double base = n * (1.0 - std::pow(cf, 1.0 / n));
        if (errors <= 0.0) {
            return base;
        }
        return base + errors * (added_errors(n, 1.0, cf) - base);
    }
    if (errors + 0.5 >= n) {
        return std::max(n - errors, 0.0);
    }
    const double z = boost::math::quantile(boost::math::normal_distribution<double>{}, 1.0 - cf);
    const double f = (errors + 0.5) / n;
    const double r =
        (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) / (1.0 + z * z / n);
    return r * n - errors;
}

double estimated_errors(std::span<const double> dist, double cf) {
    const double total = total_of(dist);
    if (total <= 1e-12) {
        return 0.0;
    }
    const double incorrect = total - *std::ranges::max_element(dist);
    return incorrect + added_errors(total, incorrect, cf);
}

std::size_t split_model::branch_of(const instance &x) const {
    const double v = x.values[attribute];
    if (is_missing(v)) {
        return heavy_branch;
    }
    if (numeric) {
        return v <= threshold ? 0 : 1;
    }
    const auto b = static_cast<std::size_t>(v);
    return b < branches ? b : heavy_branch;
}

std::vector<std::vector<std::size_t>> split_model::partition(const weighted_rows &wr,
                                                             std::span<const std::size_t> rows) const {
    std::vector<std::vector<std::size_t>> parts(branches);
    for (const std::size_t r : rows) {
        parts[branch_of(wr.row(r))].push_back(r);
    }
    return parts;
}

condition split_model::branch_condition(std::size_t branch) const {
    if (numeric) {
        return condition{ attribute, branch == 0 ? condition_op::less_equal : condition_op::greater, threshold };
    }
    return condition{ attribute, condition_op::equal, static_cast<double>(branch) };
}

std::optional<split_model> select_split(const weighted_rows &wr, std::span<const std::size_t> rows,
                                        double min_leaf_weight) {
    const auto dist = class_distribution(wr, rows);
    const double total = total_of(dist);
    if (total < 2.0 * min_leaf_weight - 1e-9 || *std::ranges::max_element(dist) >= total - 1e-9) {
        return std::nullopt;
    }
    std::vector<candidate> valid;
    double gain_sum = 0.0;
    for (std::size_t a = 0; a < wr.data->num_attributes(); ++a) {
        const auto c = wr.data->schema[a].is_numeric() ? evaluate_numeric(wr, rows, a, min_leaf_weight, total)
                                                       : evaluate_nominal(wr, rows, a, min_leaf_weight, total);
        if (c) {
            gain_sum += c->gain;
            valid.push_back(*c);
        }
    }
    if (valid.empty()) {
        return std::nullopt;
    }
    const double average = gain_sum / static_cast<double>(valid.size());
    const candidate *best = nullptr;
    double best_ratio = 0.0;
    for (const auto &c : valid) {
        if (c.gain >= average - 1e-3 && c.gain_ratio > best_ratio + tiny) {
            best = &c;
            best_ratio = c.gain_ratio;
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    return best->split;
}

void annotate_list_coverage(rule_model &model, const weighted_rows &wr) {
    std::vector<double> covered(model.rules.size(), 0.0);
    std::vector<double> correct(model.rules.size(), 0.0);
    for (const std::size_t r : wr.rows) {
        const auto fired = model.firing_rule(wr.row(r));
        if (!fired) {
            continue;
        }
        covered[*fired] += wr.weight[r];
        if (model.rules[*fired].consequent == wr.label(r)) {
            correct[*fired] += wr.weight[r];
        }
    }
    for (std::size_t i = 0; i < model.rules.size(); ++i) {
        model.rules[i].coverage = covered[i];
        model.rules[i].confidence = covered[i] > 0.0 ? correct[i] / covered[i] : 0.0;
    }
}

}  // namespace slgb::detail
