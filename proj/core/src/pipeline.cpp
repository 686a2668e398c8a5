#include "slgb/pipeline.hpp"

#include "json_io.hpp"
#include "slgb/error.hpp"
#include "slgb/random.hpp"

#include <algorithm>
#include <array>

namespace slgb {

namespace {

constexpr std::array whitebox_names{ std::pair{ whitebox_kind::c45, std::string_view{ "c45" } },
                                     std::pair{ whitebox_kind::part, std::string_view{ "part" } },
                                     std::pair{ whitebox_kind::ripper, std::string_view{ "rip" } } };

std::optional<whitebox_kind> whitebox_from_string(std::string_view name) {
    for (const auto &[kind, n] : whitebox_names) {
        if (n == name) {
            return kind;
        }
    }
    if (name == "ripper") {
        return whitebox_kind::ripper;
    }
    return std::nullopt;
}

weight_summary summarize(std::span<const double> w) {
    weight_summary s;
    if (w.empty()) {
        return s;
    }
    s.min = *std::ranges::min_element(w);
    s.max = *std::ranges::max_element(w);
    double acc = 0.0;
    for (const double v : w) {
        acc += v;
    }
    s.mean = acc / static_cast<double>(w.size());
    return s;
}

detail::json summary_to_json(const weight_summary &s) {
    return detail::json{ { "min", s.min }, { "max", s.max }, { "mean", s.mean } };
}

weight_summary summary_from_json(const detail::json &j) {
    return weight_summary{ j.value("min", 0.0), j.value("max", 0.0), j.value("mean", 0.0) };
}

detail::json config_to_json(const slgb_config &c) {
    detail::json j;
    j["name"] = c.name();
    j["seed"] = c.seed;
    detail::json f;
    f["n_trees"] = c.forest.n_trees;
    if (c.forest.attributes_per_split) {
        f["attributes_per_split"] = *c.forest.attributes_per_split;
    }
    f["min_leaf_weight"] = c.forest.min_leaf_weight;
    if (c.forest.max_depth) {
        f["max_depth"] = *c.forest.max_depth;
    }
    f["seed"] = c.forest.seed;
    f["laplace_smoothing"] = c.forest.laplace_smoothing;
    j["forest"] = std::move(f);
    j["whitebox"] = std::string{ to_string(c.whitebox) };
    j["c45"] = detail::json{ { "min_leaf_weight", c.c45.min_leaf_weight },
                             { "confidence_factor", c.c45.confidence_factor },
                             { "subtree_raising", c.c45.subtree_raising } };
    j["ripper"] = detail::json{ { "min_rule_weight", c.ripper.min_rule_weight },
                                { "prune_folds", c.ripper.prune_folds },
                                { "optimize_iters", c.ripper.optimize_iters },
                                { "seed", c.ripper.seed } };
    j["amending"] = std::string{ to_string(c.amending) };
    j["epsilon"] = c.epsilon;
    j["attribute_weights"] = c.attribute_weights;
    j["rst_multiply_balance"] = c.rst_multiply_balance;
    return j;
}

slgb_config config_from_json(const detail::json &j) {
    slgb_config c;
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto &f = j.at("forest");
    c.forest.n_trees = f.at("n_trees").get<std::size_t>();
    if (f.contains("attributes_per_split")) {
        c.forest.attributes_per_split = f.at("attributes_per_split").get<std::size_t>();
    }
    c.forest.min_leaf_weight = f.at("min_leaf_weight").get<double>();
    if (f.contains("max_depth")) {
        c.forest.max_depth = f.at("max_depth").get<std::size_t>();
    }
    c.forest.seed = f.at("seed").get<std::uint64_t>();
    c.forest.laplace_smoothing = f.at("laplace_smoothing").get<bool>();
    const auto wb = whitebox_from_string(j.at("whitebox").get<std::string>());
    const auto am = amending_from_string(j.at("amending").get<std::string>());
    if (!wb || !am) {
        throw error("unknown white box or amending kind in model bundle");
    }
    c.whitebox = *wb;
    c.amending = *am;
    const auto &c45 = j.at("c45");
    c.c45.min_leaf_weight = c45.at("min_leaf_weight").get<double>();
    c.c45.confidence_factor = c45.at("confidence_factor").get<double>();
    c.c45.subtree_raising = c45.at("subtree_raising").get<bool>();
    const auto &rip = j.at("ripper");
    c.ripper.min_rule_weight = rip.at("min_rule_weight").get<double>();
    c.ripper.prune_folds = rip.at("prune_folds").get<std::size_t>();
    c.ripper.optimize_iters = rip.at("optimize_iters").get<std::size_t>();
    c.ripper.seed = rip.at("seed").get<std::uint64_t>();
    c.epsilon = j.at("epsilon").get<double>();
    c.attribute_weights = j.at("attribute_weights").get<std::vector<double>>();
    c.rst_multiply_balance = j.at("rst_multiply_balance").get<bool>();
    return c;
}

}  // namespace

std::string_view to_string(whitebox_kind kind) noexcept {
    for (const auto &[k, n] : whitebox_names) {
        if (k == kind) {
            return n;
        }
    }
    return "part";
}

std::string slgb_config::name() const {
    return "rf-" + std::string{ to_string(whitebox) } + "-" + std::string{ to_string(amending) };
}

void slgb_config::validate(std::size_t num_attributes) const {
    forest.validate(num_attributes);
    c45.validate();
    ripper.validate();
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw parameter_error("epsilon must lie in (0, 1]");
    }
    if (!attribute_weights.empty()) {
        heom_params{ attribute_weights, epsilon }.validate(num_attributes);
    }
}

slgb_config parse_config_name(std::string_view name, const slgb_config &base) {
    std::string lower{ name };
    std::ranges::transform(lower, lower.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    const auto first = lower.find('-');
    const auto second = first == std::string::npos ? std::string::npos : lower.find('-', first + 1);
    if (second == std::string::npos || lower.substr(0, first) != "rf") {
        throw parameter_error("configuration name must look like rf-<c45|part|rip>-<none|conf|rst>: '" + lower + "'");
    }
    const auto wb = whitebox_from_string(std::string_view{ lower }.substr(first + 1, second - first - 1));
    const auto am = amending_from_string(std::string_view{ lower }.substr(second + 1));
    if (!wb || !am) {
        throw parameter_error("unknown white box or amending in '" + lower + "'");
    }
    slgb_config c = base;
    c.whitebox = *wb;
    c.amending = *am;
    return c;
}

rule_model train_whitebox(const dataset &data, std::span<const double> weights, const slgb_config &config) {
    switch (config.whitebox) {
    case whitebox_kind::c45:
        return train_c45(data, weights, config.c45);
    case whitebox_kind::part:
        return train_part(data, weights, config.c45);
    case whitebox_kind::ripper: {
        ripper_options opt = config.ripper;
        opt.seed = mix_seed(config.seed, 0x52, config.ripper.seed);
        return train_ripper(data, weights, opt);
    }
    }
    throw parameter_error("unknown white box");
}

slgb_model fit(const dataset &labeled, const dataset &unlabeled_in, const slgb_config &config) {
    if (labeled.empty()) {
        throw configuration_error("labeled set must not be empty");
    }
    if (!labeled.fully_labeled()) {
        throw configuration_error("labeled set contains unlabeled rows");
    }
    if (!labeled.same_schema(unlabeled_in)) {
        throw configuration_error("labeled and unlabeled sets have different schemas");
    }
    config.validate(labeled.num_attributes());

    const std::array<const dataset *, 2> parts{ &labeled, &unlabeled_in };
    const auto imputer = mean_imputer::fit(parts);
    const dataset train = imputer.apply(labeled);
    dataset unlabeled = imputer.apply(unlabeled_in);
    for (auto &inst : unlabeled.instances) {
        inst.label.reset();
    }

    slgb_model model;
    model.config = config;

    forest_config fc = config.forest;
    fc.seed = mix_seed(config.seed, 0xF0, config.forest.seed);
    model.forest = train_forest(train, balance_weights(train), fc);

    amending_options opts;
    opts.rst.epsilon = config.epsilon;
    opts.rst.attribute_weights = config.attribute_weights;
    opts.rst.threads = config.forest.threads;
    opts.rst_multiply_balance = config.rst_multiply_balance;
    auto amended = apply_amending(config.amending, train, unlabeled, model.forest, opts);

    auto &report = model.report;
    report.labeled = train.size();
    report.self_labeled = unlabeled.size();
    const auto &w = amended.enlarged.weights;
    report.labeled_weights = summarize(std::span{ w }.first(train.size()));
    report.self_labeled_weights = summarize(std::span{ w }.subspan(train.size()));
    report.self_label_counts.assign(train.num_classes(), 0);
    for (std::size_t i = train.size(); i < amended.enlarged.data.size(); ++i) {
        ++report.self_label_counts[*amended.enlarged.data.instances[i].label];
    }
    report.attribute_weights = amended.attribute_weights;
    if (!unlabeled.empty()) {
        for (std::size_t y = 0; y < train.num_classes(); ++y) {
            if (report.self_label_counts[y] == 0) {
                report.warnings.push_back("class '" + train.classes[y] + "' received no self-labels");
            }
        }
    }
    if (amended.uniform_fallback) {
        report.warnings.push_back("all attributes had zero information gain; uniform distance weights used");
    }

    model.surrogate = train_whitebox(amended.enlarged.data, amended.enlarged.weights, config);
    return model;
}

std::size_t predict_slgb(const slgb_model &model, const instance &x) { return predict_rules(model.surrogate, x); }

explanation explain(const slgb_model &model, const instance &x) {
    explanation e;
    e.predicted = predict_slgb(model, x);
    e.rule_index = model.surrogate.firing_rule(x);
    if (e.rule_index) {
        e.fired = model.surrogate.rules[*e.rule_index];
    } else {
        e.fired = rule{ {}, model.surrogate.default_class, 0.0, 0.0 };
    }
    e.is_default = e.fired.is_default();
    e.text = render_rule(model.surrogate, e.fired);
    return e;
}

std::string model_to_json(const slgb_model &model) {
    using detail::json;
    json doc;
    doc["format"] = "slgb-model";
    doc["version"] = 1;
    doc["config"] = config_to_json(model.config);
    doc["surrogate"] = json::parse(rule_model_to_json(model.surrogate));
    const auto &r = model.report;
    json rep;
    rep["labeled"] = r.labeled;
    rep["self_labeled"] = r.self_labeled;
    rep["labeled_weights"] = summary_to_json(r.labeled_weights);
    rep["self_labeled_weights"] = summary_to_json(r.self_labeled_weights);
    rep["self_label_counts"] = r.self_label_counts;
    rep["attribute_weights"] = r.attribute_weights;
    rep["warnings"] = r.warnings;
    doc["report"] = std::move(rep);
    return doc.dump(2);
}

slgb_model model_from_json(std::string_view text) {
    const auto doc = detail::parse_document(text, "slgb-model", 1);
    slgb_model model;
    try {
        model.config = config_from_json(doc.at("config"));
        model.surrogate = rule_model_from_json(doc.at("surrogate").dump());
        const auto &rep = doc.at("report");
        auto &r = model.report;
        r.labeled = rep.at("labeled").get<std::size_t>();
        r.self_labeled = rep.at("self_labeled").get<std::size_t>();
        r.labeled_weights = summary_from_json(rep.at("labeled_weights"));
        r.self_labeled_weights = summary_from_json(rep.at("self_labeled_weights"));
        r.self_label_counts = rep.at("self_label_counts").get<std::vector<std::size_t>>();
        r.attribute_weights = rep.at("attribute_weights").get<std::vector<double>>();
        r.warnings = rep.at("warnings").get<std::vector<std::string>>();
    } catch (const detail::json::exception &e) {
        throw error(std::string{ "malformed model document: " } + e.what());
    }
    model.forest.classes = model.surrogate.classes;
    model.forest.schema = model.surrogate.schema;
    return model;
}

}  // namespace slgb
