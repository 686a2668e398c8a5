#include "c45_split.hpp"
#include "entropy.hpp"
#include "slgb/error.hpp"
#include "slgb/forest.hpp"
#include "slgb/rules.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace slgb {

namespace {

using detail::weighted_rows;

struct node {
    std::vector<std::size_t> rows;
    std::vector<double> dist;
    std::size_t cls{ 0 };
    std::optional<detail::split_model> split;
    std::vector<std::unique_ptr<node>> children;
    /// PART: false while a branch was left unexpanded.
    bool expanded{ true };

    [[nodiscard]] bool leaf() const { return !split; }
    [[nodiscard]] double total() const { return detail::total_of(dist); }

    void make_leaf() {
        split.reset();
        children.clear();
    }
};

std::unique_ptr<node> make_node(const weighted_rows &wr, std::vector<std::size_t> rows, std::size_t parent_cls) {
    auto n = std::make_unique<node>();
    n->dist = detail::class_distribution(wr, rows);
    n->cls = n->total() > 1e-12 ? argmax_first(n->dist) : parent_cls;
    n->rows = std::move(rows);
    return n;
}

class c45_builder {
  public:
    c45_builder(const weighted_rows &wr, const c45_options &opt) : wr_{ wr }, opt_{ opt } {}

    std::unique_ptr<node> build(std::vector<std::size_t> rows, std::size_t parent_cls) const {
        auto n = make_node(wr_, std::move(rows), parent_cls);
        n->split = detail::select_split(wr_, n->rows, opt_.min_leaf_weight);
        if (!n->split) {
            return n;
        }
        auto parts = n->split->partition(wr_, n->rows);
        for (auto &part : parts) {
            n->children.push_back(build(std::move(part), n->cls));
        }
        return n;
    }

    /// Replace subtrees that do not reduce training error by a leaf.
    void collapse(node &n) const {
        if (n.leaf()) {
            return;
        }
        const double as_leaf = n.total() - n.dist[argmax_first(n.dist)];
        if (training_errors(n) >= as_leaf - 1e-3) {
            n.make_leaf();
            return;
        }
        for (auto &child : n.children) {
            collapse(*child);
        }
    }

    void prune(node &n) const {
        if (n.leaf()) {
            return;
        }
        for (auto &child : n.children) {
            prune(*child);
        }
        std::size_t largest = 0;
        for (std::size_t b = 1; b < n.children.size(); ++b) {
            if (n.children[b]->total() > n.children[largest]->total()) {
                largest = b;
            }
        }
        const double leaf_errors = detail::estimated_errors(n.dist, opt_.confidence_factor);
        const double tree_errors = subtree_errors(n);
        const double branch_errors = opt_.subtree_raising ? errors_for_branch(*n.children[largest], n.rows)
                                                          : std::numeric_limits<double>::infinity();
        if (leaf_errors <= tree_errors + 0.1 && leaf_errors <= branch_errors + 0.1) {
            n.make_leaf();
            return;
        }
        if (branch_errors <= tree_errors + 0.1) {
            auto raised = std::move(n.children[largest]);
            n.split = raised->split;
            n.children = std::move(raised->children);
            redistribute(n, n.rows, n.cls);
            prune(n);
        }
    }

  private:
    double training_errors(const node &n) const {
        if (n.leaf()) {
            return n.total() - n.dist[n.cls];
        }
        double acc = 0.0;
        for (const auto &child : n.children) {
            acc += training_errors(*child);
        }
        return acc;
    }

    double subtree_errors(const node &n) const {
        if (n.leaf()) {
            return detail::estimated_errors(n.dist, opt_.confidence_factor);
        }
        double acc = 0.0;
        for (const auto &child : n.children) {
            acc += subtree_errors(*child);
        }
        return acc;
    }

    // Estimated errors if `n` had to classify `rows` instead of its own training rows.
    double errors_for_branch(const node &n, std::span<const std::size_t> rows) const {
        if (n.leaf()) {
            return detail::estimated_errors(detail::class_distribution(wr_, rows), opt_.confidence_factor);
        }
        auto parts = n.split->partition(wr_, rows);
        double acc = 0.0;
        for (std::size_t b = 0; b < parts.size(); ++b) {
            acc += errors_for_branch(*n.children[b], parts[b]);
        }
        return acc;
    }

    void redistribute(node &n, std::vector<std::size_t> rows, std::size_t parent_cls) const {
        n.dist = detail::class_distribution(wr_, rows);
        n.cls = n.total() > 1e-12 ? argmax_first(n.dist) : parent_cls;
        n.rows = std::move(rows);
        if (n.leaf()) {
            return;
        }
        auto parts = n.split->partition(wr_, n.rows);
        for (std::size_t b = 0; b < parts.size(); ++b) {
            redistribute(*n.children[b], std::move(parts[b]), n.cls);
        }
    }

    const weighted_rows &wr_;
    const c45_options &opt_;
};

void collect_leaves(const node &n, std::vector<condition> &path, std::vector<rule> &out) {
    if (n.leaf()) {
        const double total = n.total();
        out.push_back(rule{ path, n.cls, total, total > 0.0 ? n.dist[n.cls] / total : 0.0 });
        return;
    }
    for (std::size_t b = 0; b < n.children.size(); ++b) {
        path.push_back(n.split->branch_condition(b));
        collect_leaves(*n.children[b], path, out);
        path.pop_back();
    }
}

rule_model empty_model(const dataset &data, rule_model_kind kind) {
    rule_model model;
    model.kind = kind;
    model.classes = data.classes;
    model.schema = data.schema;
    return model;
}

// Partial tree: subsets are expanded in order of increasing entropy and
// expansion stops at the first child that does not end up a leaf.
class part_builder {
  public:
    part_builder(const weighted_rows &wr, const c45_options &opt) : wr_{ wr }, opt_{ opt } {}

    std::unique_ptr<node> expand(std::vector<std::size_t> rows, std::size_t parent_cls) const {
        auto n = make_node(wr_, std::move(rows), parent_cls);
        n->split = detail::select_split(wr_, n->rows, opt_.min_leaf_weight);
        if (!n->split) {
            return n;
        }
        auto parts = n->split->partition(wr_, n->rows);
        n->children.resize(parts.size());
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t b = 0; b < parts.size(); ++b) {
            const auto dist = detail::class_distribution(wr_, parts[b]);
            if (detail::total_of(dist) > 1e-12) {
                order.emplace_back(detail::entropy(dist), b);
            }
        }
        std::ranges::sort(order);
        bool all_leaves = true;
        for (const auto &[ent, b] : order) {
            n->children[b] = expand(std::move(parts[b]), n->cls);
            if (!n->children[b]->leaf() || !n->children[b]->expanded) {
                all_leaves = false;
                break;
            }
        }
        if (!all_leaves) {
            n->expanded = false;
            return n;
        }
        double tree_errors = 0.0;
        for (const auto &child : n->children) {
            if (child) {
                tree_errors += detail::estimated_errors(child->dist, opt_.confidence_factor);
            }
        }
        if (detail::estimated_errors(n->dist, opt_.confidence_factor) <= tree_errors + 0.1) {
            n->make_leaf();
        }
        return n;
    }

  private:
    const weighted_rows &wr_;
    const c45_options &opt_;
};

struct leaf_choice {
    std::vector<condition> path;
    std::size_t cls{ 0 };
    double correct{ -1.0 };
};

void best_leaf(const node &n, std::vector<condition> &path, leaf_choice &best) {
    if (n.leaf()) {
        const double correct = n.dist[n.cls];
        if (n.total() > 1e-12 && correct > best.correct + 1e-12) {
            best = leaf_choice{ path, n.cls, correct };
        }
        return;
    }
    for (std::size_t b = 0; b < n.children.size(); ++b) {
        if (!n.children[b]) {
            continue;
        }
        path.push_back(n.split->branch_condition(b));
        best_leaf(*n.children[b], path, best);
        path.pop_back();
    }
}

}  // namespace

void c45_options::validate() const {
    if (!(min_leaf_weight > 0.0) || !std::isfinite(min_leaf_weight)) {
        throw parameter_error("min_leaf_weight must be positive");
    }
    if (!(confidence_factor > 0.0 && confidence_factor <= 0.5)) {
        throw parameter_error("confidence_factor must lie in (0, 0.5]");
    }
}

rule_model train_c45(const dataset &data, std::span<const double> weights, const c45_options &options) {
    options.validate();
    const auto wr = detail::prepare_rows(data, weights);
    const c45_builder builder{ wr, options };
    const auto root_dist = detail::class_distribution(wr, wr.rows);
    auto root = builder.build(wr.rows, argmax_first(root_dist));
    builder.collapse(*root);
    builder.prune(*root);

    auto model = empty_model(data, rule_model_kind::tree);
    model.default_class = root->cls;
    std::vector<condition> path;
    collect_leaves(*root, path, model.rules);
    return model;
}

rule_model train_part(const dataset &data, std::span<const double> weights, const c45_options &options) {
    options.validate();
    const auto wr = detail::prepare_rows(data, weights);
    const part_builder builder{ wr, options };
    const std::size_t majority = argmax_first(detail::class_distribution(wr, wr.rows));

    auto model = empty_model(data, rule_model_kind::part_list);
    std::vector<std::size_t> residual = wr.rows;
    // Every iteration removes at least one row, so this bound is never the binding one in practice.
    for (std::size_t guard = 0; !residual.empty() && guard <= data.size(); ++guard) {
        const auto dist = detail::class_distribution(wr, residual);
        auto root = builder.expand(residual, argmax_first(dist));
        leaf_choice choice;
        std::vector<condition> path;
        best_leaf(*root, path, choice);
        if (choice.correct < 0.0 || choice.path.empty()) {
            model.rules.push_back(rule{ {}, choice.correct < 0.0 ? argmax_first(dist) : choice.cls, 0.0, 0.0 });
            break;
        }
        rule r{ std::move(choice.path), choice.cls, 0.0, 0.0 };
        std::vector<std::size_t> rest;
        for (const std::size_t row : residual) {
            if (!r.covers(wr.row(row))) {
                rest.push_back(row);
            }
        }
        if (rest.size() == residual.size()) {
            // Only rows with missing tested values reached the leaf; close the list.
            model.rules.push_back(rule{ {}, argmax_first(dist), 0.0, 0.0 });
            break;
        }
        model.rules.push_back(std::move(r));
        residual = std::move(rest);
    }
    if (model.rules.empty() || !model.rules.back().is_default()) {
        const std::size_t cls =
            residual.empty() ? majority : argmax_first(detail::class_distribution(wr, residual));
        model.rules.push_back(rule{ {}, cls, 0.0, 0.0 });
    }
    model.default_class = model.rules.back().consequent;
    detail::annotate_list_coverage(model, wr);
    return model;
}

}  // namespace slgb
