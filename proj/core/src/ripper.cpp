#include "c45_split.hpp"
#include "slgb/error.hpp"
#include "slgb/forest.hpp"
#include "slgb/random.hpp"
#include "slgb/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace slgb {

namespace {

using detail::weighted_rows;
using rows_t = std::vector<std::size_t>;
using ruleset = std::vector<rule>;

constexpr double eps = 1e-9;
constexpr double dl_slack = 64.0;

double log2_safe(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

// Bits to encode a subset of `k` elements out of `n` when each is present with probability `p`.
double subset_dl(double n, double k, double p) {
    p = std::clamp(p, 0.0, 1.0);
    double acc = k > 0.0 ? -k * log2_safe(p) : 0.0;
    acc -= (n - k) * log2_safe(1.0 - p);
    return acc;
}

struct coverage {
    double cover{ 0.0 };
    double uncover{ 0.0 };
    double fp{ 0.0 };
    double fn{ 0.0 };
};

class ripper_learner {
  public:
    ripper_learner(const weighted_rows &wr, const ripper_options &opt) : wr_{ wr }, opt_{ opt }, gen_{ opt.seed } {
        const auto &schema = wr.data->schema;
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (schema[a].is_nominal()) {
                all_conditions_ += static_cast<double>(schema[a].values.size());
            } else {
                std::set<double> distinct;
                for (const std::size_t r : wr.rows) {
                    const double v = wr.row(r).values[a];
                    if (!is_missing(v)) {
                        distinct.insert(v);
                    }
                }
                all_conditions_ += 2.0 * static_cast<double>(distinct.size());
            }
        }
        all_conditions_ = std::max(all_conditions_, 1.0);
    }

    /// Rules for class `pos` learned on `rows`, followed by optimization passes.
    ruleset learn_class(const rows_t &rows, std::size_t pos) {
        exp_fp_ = positive_share(rows, pos);
        ruleset rules = irep(ruleset{}, rows, pos);
        for (std::size_t it = 0; it < opt_.optimize_iters && !rules.empty(); ++it) {
            rules = optimize(std::move(rules), rows, pos);
        }
        return rules;
    }

  private:
    [[nodiscard]] bool covered_by_any(const ruleset &rules, const instance &x) const {
        return std::ranges::any_of(rules, [&](const rule &r) { return r.covers(x); });
    }

    [[nodiscard]] double positive_share(const rows_t &rows, std::size_t pos) const {
        double p = 0.0;
        double t = 0.0;
        for (const std::size_t r : rows) {
            t += wr_.weight[r];
            if (wr_.label(r) == pos) {
                p += wr_.weight[r];
            }
        }
        return t > 0.0 ? p / t : 0.0;
    }

    [[nodiscard]] double positive_weight(const rows_t &rows, std::size_t pos) const {
        double p = 0.0;
        for (const std::size_t r : rows) {
            if (wr_.label(r) == pos) {
                p += wr_.weight[r];
            }
        }
        return p;
    }

    [[nodiscard]] coverage coverage_of(const ruleset &rules, const rows_t &rows, std::size_t pos) const {
        coverage c;
        for (const std::size_t r : rows) {
            const double w = wr_.weight[r];
            const bool positive = wr_.label(r) == pos;
            if (covered_by_any(rules, wr_.row(r))) {
                c.cover += w;
                if (!positive) {
                    c.fp += w;
                }
            } else {
                c.uncover += w;
                if (positive) {
                    c.fn += w;
                }
            }
        }
        return c;
    }

    [[nodiscard]] double theory_dl(const rule &r) const {
        const auto k = static_cast<double>(r.conditions.size());
        if (k <= 0.0) {
            return 0.0;
        }
        double dl = log2_safe(k);
        if (k > 1.0) {
            dl += 2.0 * log2_safe(dl);
        }
        dl += subset_dl(all_conditions_, k, std::min(k / all_conditions_, 1.0));
        return 0.5 * dl;
    }

    [[nodiscard]] double data_dl(const coverage &c) const {
        const double total_bits = log2_safe(c.cover + c.uncover + 1.0);
        double cover_bits = 0.0;
        double uncover_bits = 0.0;
        if (c.cover > c.uncover) {
            const double exp_err = exp_fp_ * (c.fp + c.fn);
            cover_bits = subset_dl(c.cover, c.fp, exp_err / c.cover);
            uncover_bits = c.uncover > 0.0 ? subset_dl(c.uncover, c.fn, c.fn / c.uncover) : 0.0;
        } else {
            const double exp_err = (1.0 - exp_fp_) * (c.fp + c.fn);
            cover_bits = c.cover > 0.0 ? subset_dl(c.cover, c.fp, c.fp / c.cover) : 0.0;
            uncover_bits = c.uncover > 0.0 ? subset_dl(c.uncover, c.fn, exp_err / c.uncover) : 0.0;
        }
        return total_bits + cover_bits + uncover_bits;
    }

    [[nodiscard]] double total_dl(const ruleset &rules, const rows_t &rows, std::size_t pos) const {
        double dl = data_dl(coverage_of(rules, rows, pos));
        for (const auto &r : rules) {
            dl += theory_dl(r);
        }
        return dl;
    }

    // Stratified split: roughly 1/prune_folds of each class goes to the prune set.
    std::pair<rows_t, rows_t> grow_prune_split(const rows_t &rows, std::size_t pos) {
        rows_t positives;
        rows_t negatives;
        for (const std::size_t r : rows) {
            (wr_.label(r) == pos ? positives : negatives).push_back(r);
        }
        gen_.shuffle(std::span<std::size_t>{ positives });
        gen_.shuffle(std::span<std::size_t>{ negatives });
        rows_t grow;
        rows_t prune;
        for (const rows_t *group : { &positives, &negatives }) {
            const std::size_t n_prune = group->size() / opt_.prune_folds;
            for (std::size_t i = 0; i < group->size(); ++i) {
                (i < n_prune ? prune : grow).push_back((*group)[i]);
            }
        }
        std::ranges::sort(grow);
        std::ranges::sort(prune);
        return { std::move(grow), std::move(prune) };
    }

    // Greedily add the condition with the largest FOIL gain until no negatives are covered.
    [[nodiscard]] rule grow(rule start, const rows_t &rows, std::size_t pos) const {
        rows_t covered;
        for (const std::size_t r : rows) {
            if (start.covers(wr_.row(r))) {
                covered.push_back(r);
            }
        }
        const std::size_t k = wr_.data->num_attributes();
        while (true) {
            double p0 = 0.0;
            double t0 = 0.0;
            for (const std::size_t r : covered) {
                t0 += wr_.weight[r];
                if (wr_.label(r) == pos) {
                    p0 += wr_.weight[r];
                }
            }
            if (p0 <= eps || t0 - p0 <= eps) {
                break;
            }
            const double base = std::log2(p0 / t0);
            double best_gain = 0.0;
            std::optional<condition> best;
            auto consider = [&](const condition &c, double p1, double t1) {
                if (p1 <= eps || t1 < opt_.min_rule_weight - eps) {
                    return;
                }
                const double gain = p1 * (std::log2(p1 / t1) - base);
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best = c;
                }
            };
            for (std::size_t a = 0; a < k; ++a) {
                if (std::ranges::any_of(start.conditions, [&](const condition &c) {
                        return c.attribute == a && c.op == condition_op::equal;
                    })) {
                    continue;
                }
                if (wr_.data->schema[a].is_nominal()) {
                    const std::size_t nv = wr_.data->schema[a].values.size();
                    std::vector<double> p(nv, 0.0);
                    std::vector<double> t(nv, 0.0);
                    for (const std::size_t r : covered) {
                        const double v = wr_.row(r).values[a];
                        if (is_missing(v)) {
                            continue;
                        }
                        const auto idx = static_cast<std::size_t>(v);
                        t[idx] += wr_.weight[r];
                        if (wr_.label(r) == pos) {
                            p[idx] += wr_.weight[r];
                        }
                    }
                    for (std::size_t v = 0; v < nv; ++v) {
                        consider(condition{ a, condition_op::equal, static_cast<double>(v) }, p[v], t[v]);
                    }
                    continue;
                }
                rows_t known;
                double p_known = 0.0;
                double t_known = 0.0;
                for (const std::size_t r : covered) {
                    if (!is_missing(wr_.row(r).values[a])) {
                        known.push_back(r);
                        t_known += wr_.weight[r];
                        if (wr_.label(r) == pos) {
                            p_known += wr_.weight[r];
                        }
                    }
                }
                std::ranges::stable_sort(known, [&](std::size_t x, std::size_t y) {
                    return wr_.row(x).values[a] < wr_.row(y).values[a];
                });
                double p_left = 0.0;
                double t_left = 0.0;
                for (std::size_t i = 0; i + 1 < known.size(); ++i) {
                    const std::size_t r = known[i];
                    t_left += wr_.weight[r];
                    if (wr_.label(r) == pos) {
                        p_left += wr_.weight[r];
                    }
                    const double v = wr_.row(r).values[a];
                    const double next = wr_.row(known[i + 1]).values[a];
                    if (!(v < next)) {
                        continue;
                    }
                    double mid = v + (next - v) / 2.0;
                    if (!(mid < next)) {
                        mid = v;
                    }
                    consider(condition{ a, condition_op::less_equal, mid }, p_left, t_left);
                    consider(condition{ a, condition_op::greater, mid }, p_known - p_left, t_known - t_left);
                }
            }
            if (!best) {
                break;
            }
            start.conditions.push_back(*best);
            std::erase_if(covered, [&](std::size_t r) { return !best->matches(wr_.row(r)); });
        }
        return start;
    }

    // Keep the prefix maximizing (p - n) / (p + n) on the prune set; shorter wins ties.
    [[nodiscard]] rule prune_rule(rule r, const rows_t &prune, std::size_t pos) const {
        if (r.conditions.size() <= 1 || prune.empty()) {
            return r;
        }
        std::vector<double> p(r.conditions.size(), 0.0);
        std::vector<double> n(r.conditions.size(), 0.0);
        for (const std::size_t row : prune) {
            const auto &x = wr_.row(row);
            const double w = wr_.weight[row];
            const bool positive = wr_.label(row) == pos;
            for (std::size_t i = 0; i < r.conditions.size(); ++i) {
                if (!r.conditions[i].matches(x)) {
                    break;
                }
                (positive ? p[i] : n[i]) += w;
            }
        }
        std::size_t best_len = r.conditions.size();
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.conditions.size(); ++i) {
            const double covered = p[i] + n[i];
            const double value = covered > 0.0 ? (p[i] - n[i]) / covered : -1.0;
            if (value > best_value + 1e-12) {
                best_value = value;
                best_len = i + 1;
            }
        }
        r.conditions.resize(best_len);
        return r;
    }

    // Keep the prefix of `candidate` that maximizes accuracy of the whole ruleset on the prune set.
    [[nodiscard]] rule prune_in_context(const ruleset &rules, std::size_t index, rule candidate, const rows_t &prune,
                                        std::size_t pos) const {
        if (candidate.conditions.size() <= 1 || prune.empty()) {
            return candidate;
        }
        ruleset others;
        for (std::size_t j = 0; j < rules.size(); ++j) {
            if (j != index) {
                others.push_back(rules[j]);
            }
        }
        const std::size_t len = candidate.conditions.size();
        std::vector<double> accuracy(len, 0.0);
        for (const std::size_t row : prune) {
            const auto &x = wr_.row(row);
            const double w = wr_.weight[row];
            const bool positive = wr_.label(row) == pos;
            const bool by_others = covered_by_any(others, x);
            std::size_t matched = 0;
            while (matched < len && candidate.conditions[matched].matches(x)) {
                ++matched;
            }
            for (std::size_t i = 0; i < len; ++i) {
                const bool covered = by_others || matched >= i + 1;
                if (covered == positive) {
                    accuracy[i] += w;
                }
            }
        }
        std::size_t best_len = len;
        double best = -1.0;
        for (std::size_t i = 0; i < len; ++i) {
            if (accuracy[i] > best + 1e-12) {
                best = accuracy[i];
                best_len = i + 1;
            }
        }
        candidate.conditions.resize(best_len);
        return candidate;
    }

    ruleset irep(ruleset rules, const rows_t &rows, std::size_t pos) {
        double min_dl = total_dl(rules, rows, pos);
        for (std::size_t guard = 0; guard < rows.size() + 1; ++guard) {
            rows_t uncovered;
            for (const std::size_t r : rows) {
                if (!covered_by_any(rules, wr_.row(r))) {
                    uncovered.push_back(r);
                }
            }
            if (positive_weight(uncovered, pos) <= eps) {
                break;
            }
            auto [grow_rows, prune_rows] = grow_prune_split(uncovered, pos);
            rule r = grow(rule{ {}, pos, 0.0, 0.0 }, grow_rows, pos);
            if (r.conditions.empty()) {
                break;
            }
            r = prune_rule(std::move(r), prune_rows, pos);
            const rows_t &check = prune_rows.empty() ? grow_rows : prune_rows;
            double p = 0.0;
            double n = 0.0;
            for (const std::size_t row : check) {
                if (r.covers(wr_.row(row))) {
                    (wr_.label(row) == pos ? p : n) += wr_.weight[row];
                }
            }
            if (p + n <= eps || p / (p + n) < 0.5) {
                break;
            }
            rules.push_back(std::move(r));
            const double dl = total_dl(rules, rows, pos);
            if (dl > min_dl + dl_slack) {
                rules.pop_back();
                break;
            }
            min_dl = std::min(min_dl, dl);
        }
        return rules;
    }

    ruleset optimize(ruleset rules, const rows_t &rows, std::size_t pos) {
        for (std::size_t i = 0; i < rules.size(); ++i) {
            rows_t remaining;
            for (const std::size_t r : rows) {
                if (!covered_by_any(ruleset(rules.begin(), rules.begin() + static_cast<std::ptrdiff_t>(i)),
                                    wr_.row(r))) {
                    remaining.push_back(r);
                }
            }
            if (positive_weight(remaining, pos) <= eps) {
                continue;
            }
            auto [grow_rows, prune_rows] = grow_prune_split(remaining, pos);
            rule replacement = grow(rule{ {}, pos, 0.0, 0.0 }, grow_rows, pos);
            replacement = prune_in_context(rules, i, std::move(replacement), prune_rows, pos);
            rule revision = grow(rules[i], grow_rows, pos);
            revision = prune_in_context(rules, i, std::move(revision), prune_rows, pos);

            double best_dl = total_dl(rules, rows, pos);
            rule chosen = rules[i];
            for (rule *cand : { &revision, &replacement }) {
                if (cand->conditions.empty()) {
                    continue;
                }
                ruleset trial = rules;
                trial[i] = *cand;
                const double dl = total_dl(trial, rows, pos);
                if (dl < best_dl - 1e-9) {
                    best_dl = dl;
                    chosen = *cand;
                }
            }
            rules[i] = std::move(chosen);
        }
        rules = irep(std::move(rules), rows, pos);
        for (std::size_t i = rules.size(); i-- > 0;) {
            ruleset without = rules;
            without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
            if (total_dl(without, rows, pos) < total_dl(rules, rows, pos) - 1e-9) {
                rules = std::move(without);
            }
        }
        return rules;
    }

    const weighted_rows &wr_;
    const ripper_options &opt_;
    rng gen_;
    double all_conditions_{ 0.0 };
    double exp_fp_{ 0.0 };
};

}  // namespace

void ripper_options::validate() const {
    if (!(min_rule_weight > 0.0) || !std::isfinite(min_rule_weight)) {
        throw parameter_error("min_rule_weight must be positive");
    }
    if (prune_folds < 2) {
        throw parameter_error("prune_folds must be at least 2");
    }
}

rule_model train_ripper(const dataset &data, std::span<const double> weights, const ripper_options &options) {
    options.validate();
    const auto wr = detail::prepare_rows(data, weights);
    const auto dist = detail::class_distribution(wr, wr.rows);
    const std::size_t k = data.num_classes();

    // Ascending frequency; among equals the later-declared class is learned first,
    // so the first-declared one ends up as the default.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        if (std::abs(dist[a] - dist[b]) > 1e-9) {
            return dist[a] < dist[b];
        }
        return a > b;
    });

    rule_model model;
    model.kind = rule_model_kind::ripper_list;
    model.classes = data.classes;
    model.schema = data.schema;

    ripper_learner learner{ wr, options };
    rows_t residual = wr.rows;
    for (std::size_t idx = 0; idx + 1 < k; ++idx) {
        const std::size_t pos = order[idx];
        if (std::ranges::none_of(residual, [&](std::size_t r) { return wr.label(r) == pos; })) {
            continue;
        }
        auto rules = learner.learn_class(residual, pos);
        std::erase_if(residual, [&](std::size_t r) {
            return std::ranges::any_of(rules, [&](const rule &ru) { return ru.covers(wr.row(r)); });
        });
        for (auto &r : rules) {
            model.rules.push_back(std::move(r));
        }
        if (residual.empty()) {
            break;
        }
    }
    const std::size_t default_class =
        residual.empty() ? order.back() : argmax_first(detail::class_distribution(wr, residual));
    model.rules.push_back(rule{ {}, default_class, 0.0, 0.0 });
    model.default_class = default_class;

    detail::annotate_list_coverage(model, wr);
    std::vector<rule> kept;
    for (auto &r : model.rules) {
        if (r.is_default() || r.coverage > 0.0) {
            kept.push_back(std::move(r));
        }
    }
    model.rules = std::move(kept);
    return model;
}

}  // namespace slgb
