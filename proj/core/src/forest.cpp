#include "slgb/forest.hpp"

#include "entropy.hpp"
#include "json_io.hpp"
#include "slgb/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace slgb {

namespace {

constexpr double gain_epsilon = 1e-10;

struct split_choice {
    int attribute{ -1 };
    double threshold{ 0.0 };
    double gain{ 0.0 };
};

class tree_grower {
  public:
    tree_grower(const dataset &data, std::span<const double> weights, const forest_config &config, rng &gen)
        : data_{ data }, weights_{ weights }, config_{ config }, gen_{ gen },
          k_{ config.resolved_attributes_per_split(data.num_attributes()) } {}

    random_tree grow() {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (weights_[i] > 0.0) {
                rows.push_back(i);
            }
        }
        build(rows, 0, {});
        return std::move(tree_);
    }

  private:
    std::vector<double> tally_of(const std::vector<std::size_t> &rows) const {
        std::vector<double> tally(data_.num_classes(), 0.0);
        for (const auto r : rows) {
            tally[*data_.instances[r].label] += weights_[r];
        }
        return tally;
    }

    split_choice evaluate_numeric(std::size_t a, const std::vector<std::size_t> &rows, double node_total) const {
        std::vector<std::pair<double, std::size_t>> known;
        known.reserve(rows.size());
        for (const auto r : rows) {
            const double v = data_.instances[r].values[a];
            if (!is_missing(v)) {
                known.emplace_back(v, r);
            }
        }
        split_choice best;
        if (known.size() < 2) {
            return best;
        }
        std::sort(known.begin(), known.end());
        const std::size_t k = data_.num_classes();
        std::vector<double> right(k, 0.0);
        std::vector<double> left(k, 0.0);
        double known_total = 0.0;
        for (const auto &[v, r] : known) {
            right[*data_.instances[r].label] += weights_[r];
            known_total += weights_[r];
        }
        const double parent = detail::weighted_entropy(right);
        double left_total = 0.0;
        for (std::size_t i = 0; i + 1 < known.size(); ++i) {
            const auto r = known[i].second;
            const double w = weights_[r];
            left[*data_.instances[r].label] += w;
            right[*data_.instances[r].label] -= w;
            left_total += w;
            if (known[i].first == known[i + 1].first) {
                continue;
            }
            const double right_total = known_total - left_total;
            if (left_total < config_.min_leaf_weight || right_total < config_.min_leaf_weight) {
                continue;
            }
            const double gain = (parent - detail::weighted_entropy(left) - detail::weighted_entropy(right)) / node_total;
            if (gain > best.gain + gain_epsilon) {
                best.gain = gain;
                best.attribute = static_cast<int>(a);
                best.threshold = 0.5 * (known[i].first + known[i + 1].first);
            }
        }
        return best;
    }

    split_choice evaluate_nominal(std::size_t a, const std::vector<std::size_t> &rows, double node_total) const {
        const std::size_t k = data_.num_classes();
        const std::size_t values = data_.schema[a].values.size();
        std::vector<double> tallies(values * k, 0.0);
        std::vector<double> branch(values, 0.0);
        std::vector<double> known(k, 0.0);
        for (const auto r : rows) {
            const double v = data_.instances[r].values[a];
            if (is_missing(v)) {
                continue;
            }
            const auto b = static_cast<std::size_t>(v);
            const auto c = *data_.instances[r].label;
            tallies[b * k + c] += weights_[r];
            branch[b] += weights_[r];
            known[c] += weights_[r];
        }
        const auto heavy = std::count_if(branch.begin(), branch.end(),
                                         [&](double w) { return w >= config_.min_leaf_weight; });
        split_choice best;
        if (heavy < 2) {
            return best;
        }
        double children = 0.0;
        for (std::size_t b = 0; b < values; ++b) {
            children += detail::weighted_entropy(std::span<const double>{ tallies.data() + b * k, k });
        }
        best.gain = (detail::weighted_entropy(known) - children) / node_total;
        best.attribute = static_cast<int>(a);
        return best;
    }

    std::size_t build(const std::vector<std::size_t> &rows, std::size_t depth, const std::vector<double> &parent_tally) {
        const std::size_t index = tree_.nodes.size();
        tree_.nodes.emplace_back();
        auto tally = rows.empty() ? parent_tally : tally_of(rows);
        const double total = std::accumulate(tally.begin(), tally.end(), 0.0);
        const double top = tally.empty() ? 0.0 : *std::max_element(tally.begin(), tally.end());
        tree_.nodes[index].tally = tally;

        const bool depth_exhausted = config_.max_depth && depth >= *config_.max_depth;
        if (rows.empty() || total < 2.0 * config_.min_leaf_weight || top >= total - 1e-12 || depth_exhausted) {
            return index;
        }

        std::vector<std::size_t> order(data_.num_attributes());
        std::iota(order.begin(), order.end(), std::size_t{ 0 });
        gen_.shuffle(std::span<std::size_t>{ order });
        split_choice best;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i >= k_ && best.gain > gain_epsilon) {
                break;
            }
            const auto a = order[i];
            const auto candidate = data_.schema[a].is_numeric() ? evaluate_numeric(a, rows, total)
                                                                : evaluate_nominal(a, rows, total);
            if (candidate.gain > best.gain + gain_epsilon) {
                best = candidate;
            }
        }
        if (best.attribute < 0 || best.gain <= gain_epsilon) {
            return index;
        }

        const auto a = static_cast<std::size_t>(best.attribute);
        const bool numeric = data_.schema[a].is_numeric();
        const std::size_t branches = numeric ? 2 : data_.schema[a].values.size();
        std::vector<std::vector<std::size_t>> parts(branches);
        std::vector<std::size_t> missing;
        std::vector<double> part_weight(branches, 0.0);
        for (const auto r : rows) {
            const double v = data_.instances[r].values[a];
            if (is_missing(v)) {
                missing.push_back(r);
                continue;
            }
            const std::size_t b = numeric ? (v <= best.threshold ? 0 : 1) : static_cast<std::size_t>(v);
            parts[b].push_back(r);
            part_weight[b] += weights_[r];
        }
        const std::size_t heavy = argmax_first(part_weight);
        parts[heavy].insert(parts[heavy].end(), missing.begin(), missing.end());

        tree_.nodes[index].attribute = best.attribute;
        tree_.nodes[index].numeric = numeric;
        tree_.nodes[index].threshold = best.threshold;
        tree_.nodes[index].missing_child = heavy;
        std::vector<std::size_t> children;
        for (const auto &part : parts) {
            children.push_back(build(part, depth + 1, tally));
        }
        tree_.nodes[index].children = std::move(children);
        return index;
    }

    const dataset &data_;
    std::span<const double> weights_;
    const forest_config &config_;
    rng &gen_;
    std::size_t k_;
    random_tree tree_;
};

void check_weights(const dataset &data, std::span<const double> weights) {
    if (weights.size() != data.size()) {
        throw parameter_error("weights must align with instances");
    }
    double sum = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw parameter_error("weights must be finite and non-negative");
        }
        sum += w;
    }
    if (!(sum > 0.0)) {
        throw parameter_error("weights must have a positive sum");
    }
}

random_tree bagged_tree(const dataset &data, const std::vector<double> &cumulative, const forest_config &config,
                        std::size_t t) {
    rng gen{ mix_seed(config.seed, 0xF0, t) };
    const double total = cumulative.back();
    std::vector<double> counts(data.size(), 0.0);
    for (std::size_t draw = 0; draw < data.size(); ++draw) {
        const double u = gen.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        ++counts[static_cast<std::size_t>(it - cumulative.begin())];
    }
    return grow_tree(data, counts, config, gen);
}

}  // namespace

std::size_t forest_config::resolved_attributes_per_split(std::size_t num_attributes) const {
    if (attributes_per_split) {
        return *attributes_per_split;
    }
    if (num_attributes <= 1) {
        return 1;
    }
    return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(num_attributes)) - 1e-12));
}

void forest_config::validate(std::size_t num_attributes) const {
    if (n_trees < 1) {
        throw parameter_error("a forest needs at least one tree");
    }
    const auto k = resolved_attributes_per_split(num_attributes);
    if (k < 1 || k > std::max<std::size_t>(num_attributes, 1)) {
        throw parameter_error("attributes_per_split must lie in [1, attribute count]");
    }
    if (!(min_leaf_weight > 0.0)) {
        throw parameter_error("min_leaf_weight must be positive");
    }
    if (max_depth && *max_depth < 1) {
        throw parameter_error("max_depth must be positive");
    }
}

const tree_node &random_tree::leaf_for(const instance &x) const {
    std::size_t n = 0;
    while (!nodes[n].is_leaf()) {
        const auto &node = nodes[n];
        const double v = x.values[static_cast<std::size_t>(node.attribute)];
        std::size_t branch = node.missing_child;
        if (!is_missing(v)) {
            if (node.numeric) {
                branch = v <= node.threshold ? 0 : 1;
            } else if (v >= 0.0 && static_cast<std::size_t>(v) < node.children.size()) {
                branch = static_cast<std::size_t>(v);
            }
        }
        n = node.children[branch];
    }
    return nodes[n];
}

std::size_t random_tree::depth() const {
    std::vector<std::size_t> level(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        for (const auto c : nodes[n].children) {
            level[c] = level[n] + 1;
            deepest = std::max(deepest, level[c]);
        }
    }
    return deepest;
}

std::size_t random_tree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto &n) { return n.is_leaf(); }));
}

random_tree grow_tree(const dataset &data, std::span<const double> weights, const forest_config &config, rng &gen) {
    return tree_grower{ data, weights, config, gen }.grow();
}

trained_forest train_forest(const dataset &labeled, std::span<const double> weights, const forest_config &config) {
    if (labeled.empty()) {
        throw configuration_error("cannot train a forest on an empty dataset");
    }
    if (!labeled.fully_labeled()) {
        throw configuration_error("forest training data must be fully labeled");
    }
    check_weights(labeled, weights);
    config.validate(labeled.num_attributes());

    trained_forest forest;
    forest.classes = labeled.classes;
    forest.schema = labeled.schema;
    forest.config = config;

    std::vector<double> class_weight(labeled.num_classes(), 0.0);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        class_weight[*labeled.instances[i].label] += weights[i];
    }
    if (std::count_if(class_weight.begin(), class_weight.end(), [](double w) { return w > 0.0; }) == 1) {
        forest.degenerate_class = argmax_first(class_weight);
        return forest;
    }

    std::vector<double> cumulative(labeled.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

    forest.trees.resize(config.n_trees);
    const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.n_trees);
    if (workers == 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) {
            forest.trees[t] = bagged_tree(labeled, cumulative, config, t);
        }
        return forest;
    }
    std::atomic<std::size_t> next{ 0 };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t = next++; t < config.n_trees; t = next++) {
                forest.trees[t] = bagged_tree(labeled, cumulative, config, t);
            }
        });
    }
    pool.clear();
    return forest;
}

std::vector<double> predict_proba(const trained_forest &forest, const instance &x) {
    const std::size_t k = forest.classes.size();
    std::vector<double> proba(k, 0.0);
    if (forest.degenerate_class) {
        proba[*forest.degenerate_class] = 1.0;
        return proba;
    }
    if (forest.trees.empty()) {
        std::fill(proba.begin(), proba.end(), 1.0 / static_cast<double>(k));
        return proba;
    }
    const double smoothing = forest.config.laplace_smoothing ? 1.0 : 0.0;
    for (const auto &tree : forest.trees) {
        const auto &tally = tree.leaf_for(x).tally;
        const double total = std::accumulate(tally.begin(), tally.end(), 0.0) + smoothing * static_cast<double>(k);
        for (std::size_t c = 0; c < k; ++c) {
            proba[c] += total > 0.0 ? (tally[c] + smoothing) / total : 1.0 / static_cast<double>(k);
        }
    }
    const double sum = std::accumulate(proba.begin(), proba.end(), 0.0);
    for (auto &p : proba) {
        p /= sum;
    }
    return proba;
}

std::size_t predict(const trained_forest &forest, const instance &x) {
    const auto proba = predict_proba(forest, x);
    return argmax_first(proba);
}

std::size_t argmax_first(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

std::string forest_to_json(const trained_forest &forest) {
    detail::json doc;
    doc["format"] = "slgb-forest";
    doc["version"] = 1;
    doc["classes"] = forest.classes;
    doc["schema"] = detail::schema_to_json(forest.schema);
    const auto &cfg = forest.config;
    doc["config"] = { { "n_trees", cfg.n_trees },
                      { "attributes_per_split", cfg.resolved_attributes_per_split(forest.schema.size()) },
                      { "min_leaf_weight", cfg.min_leaf_weight },
                      { "max_depth", cfg.max_depth ? detail::json(*cfg.max_depth) : detail::json(nullptr) },
                      { "seed", cfg.seed },
                      { "laplace_smoothing", cfg.laplace_smoothing } };
    doc["degenerate_class"] = forest.degenerate_class ? detail::json(*forest.degenerate_class) : detail::json(nullptr);
    auto &trees = doc["trees"] = detail::json::array();
    for (const auto &tree : forest.trees) {
        detail::json nodes = detail::json::array();
        for (const auto &n : tree.nodes) {
            detail::json node;
            node["attribute"] = n.attribute;
            if (!n.is_leaf()) {
                node["numeric"] = n.numeric;
                node["threshold"] = n.threshold;
                node["children"] = n.children;
                node["missing_child"] = n.missing_child;
            }
            node["tally"] = n.tally;
            nodes.push_back(std::move(node));
        }
        trees.push_back({ { "nodes", std::move(nodes) } });
    }
    return doc.dump();
}

trained_forest forest_from_json(std::string_view text) {
    const auto doc = detail::parse_document(text, "slgb-forest", 1);
    trained_forest forest;
    try {
        forest.classes = doc.at("classes").get<std::vector<std::string>>();
        forest.schema = detail::schema_from_json(doc.at("schema"));
        const auto &cfg = doc.at("config");
        forest.config.n_trees = cfg.at("n_trees").get<std::size_t>();
        forest.config.attributes_per_split = cfg.at("attributes_per_split").get<std::size_t>();
        forest.config.min_leaf_weight = cfg.at("min_leaf_weight").get<double>();
        if (!cfg.at("max_depth").is_null()) {
            forest.config.max_depth = cfg.at("max_depth").get<std::size_t>();
        }
        forest.config.seed = cfg.at("seed").get<std::uint64_t>();
        forest.config.laplace_smoothing = cfg.at("laplace_smoothing").get<bool>();
        if (!doc.at("degenerate_class").is_null()) {
            forest.degenerate_class = doc.at("degenerate_class").get<std::size_t>();
        }
        for (const auto &t : doc.at("trees")) {
            random_tree tree;
            for (const auto &n : t.at("nodes")) {
                tree_node node;
                node.attribute = n.at("attribute").get<int>();
                node.tally = n.at("tally").get<std::vector<double>>();
                if (node.attribute >= 0) {
                    node.numeric = n.at("numeric").get<bool>();
                    node.threshold = n.at("threshold").get<double>();
                    node.children = n.at("children").get<std::vector<std::size_t>>();
                    node.missing_child = n.at("missing_child").get<std::size_t>();
                }
                tree.nodes.push_back(std::move(node));
            }
            forest.trees.push_back(std::move(tree));
        }
    } catch (const detail::json::exception &e) {
        throw error(std::string{ "malformed forest document: " } + e.what());
    }
    return forest;
}

}  // namespace slgb
