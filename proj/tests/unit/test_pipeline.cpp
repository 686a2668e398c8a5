#include "fixtures.hpp"
#include "slgb/error.hpp"
#include "slgb/metrics.hpp"
#include "slgb/pipeline.hpp"
#include "slgb/synthetic.hpp"

#include <gtest/gtest.h>

using namespace slgb;

namespace {

slgb_config quick(std::string_view name, std::uint64_t seed = 1) {
    slgb_config base;
    base.forest.n_trees = 25;
    base.seed = seed;
    return parse_config_name(name, base);
}

double kappa_on(const dataset &test, const std::function<std::size_t(const instance &)> &predict_fn) {
    std::vector<std::size_t> actual;
    std::vector<std::size_t> predicted;
    for (const auto &x : test.instances) {
        actual.push_back(*x.label);
        predicted.push_back(predict_fn(x));
    }
    return kappa(confusion_matrix::from_predictions(actual, predicted, test.num_classes()));
}

std::vector<instance> probe_grid(const dataset &d, std::uint64_t seed) {
    rng gen{ seed };
    std::vector<instance> out;
    for (int i = 0; i < 300; ++i) {
        instance x;
        for (const auto &a : d.schema) {
            x.values.push_back(a.is_numeric() ? gen.uniform(-6, 8) : static_cast<double>(gen.index(a.values.size())));
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

TEST(Pipeline, ReductionToSupervisedWhiteBox) {
    const auto d = make_synthetic("mixed", 7);
    const auto split = make_split(d, 0.3, 3);
    for (const auto *name : { "rf-c45-none", "rf-part-none", "rf-rip-none" }) {
        const auto cfg = quick(name);
        const auto model = fit(split.labeled, split.labeled.empty_like(), cfg);
        const auto direct = train_whitebox(split.labeled, balance_weights(split.labeled), cfg);
        EXPECT_EQ(model.surrogate, direct) << name;
        for (const auto &x : probe_grid(d, 4)) {
            ASSERT_EQ(predict_slgb(model, x), predict_rules(direct, x)) << name;
        }
    }
}

TEST(Pipeline, DeterministicSurrogateJson) {
    const auto d = make_synthetic("blobs3_noise", 2);
    const auto split = make_split(d, 0.1, 5);
    for (const auto *name : { "rf-part-rst", "rf-rip-conf", "rf-c45-none" }) {
        const auto a = fit(split.labeled, split.unlabeled, quick(name));
        const auto b = fit(split.labeled, split.unlabeled, quick(name));
        EXPECT_EQ(rule_model_to_json(a.surrogate), rule_model_to_json(b.surrogate)) << name;
        EXPECT_EQ(model_to_json(a), model_to_json(b)) << name;
    }
}

TEST(Pipeline, InferenceNeverConsultsTheForest) {
    const auto d = make_synthetic("rings2", 3);
    const auto split = make_split(d, 0.2, 1);
    auto model = fit(split.labeled, split.unlabeled, quick("rf-part-rst"));
    const auto probes = probe_grid(d, 9);
    std::vector<std::size_t> before;
    for (const auto &x : probes) {
        before.push_back(predict_slgb(model, x));
        ASSERT_EQ(before.back(), predict_rules(model.surrogate, x));
    }
    for (auto &t : model.forest.trees) {
        for (auto &n : t.nodes) {
            n.attribute = 12345;
            n.children.clear();
            n.tally.assign(n.tally.size(), -1.0);
        }
    }
    model.forest.classes.clear();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        ASSERT_EQ(predict_slgb(model, probes[i]), before[i]);
    }
}

TEST(Pipeline, SelfLabelsFollowTheForest) {
    const auto d = make_synthetic("blobs4", 6);
    const auto split = make_split(d, 0.1, 2);
    const auto model = fit(split.labeled, split.unlabeled, quick("rf-part-conf"));
    std::vector<std::size_t> counts(d.num_classes(), 0);
    for (const auto &x : split.unlabeled.instances) {
        ++counts[predict(model.forest, x)];
    }
    EXPECT_EQ(model.report.self_label_counts, counts);
    EXPECT_EQ(model.report.labeled, split.labeled.size());
    EXPECT_EQ(model.report.self_labeled, split.unlabeled.size());
    EXPECT_GE(model.report.self_labeled_weights.min, 1.0 / 4.0);
    EXPECT_LE(model.report.self_labeled_weights.max, 1.0);
}

TEST(Pipeline, WarnsWhenAClassGetsNoSelfLabels) {
    const auto l = fx::two_blobs(15, 10.0, 4, 0.5);
    dataset u = l.empty_like();
    for (const auto &x : l.instances) {
        if (*x.label == 0) {
            instance copy = x;
            copy.label.reset();
            u.instances.push_back(copy);
        }
    }
    const auto model = fit(l, u, quick("rf-part-rst"));
    ASSERT_EQ(model.report.self_label_counts[1], 0U);
    ASSERT_FALSE(model.report.warnings.empty());
    EXPECT_NE(model.report.warnings[0].find("'B'"), std::string::npos);
}

TEST(Pipeline, TwoClusterLiftTendency) {
    std::size_t wins = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const auto d = fx::two_blobs(100, 2.0, 1000 + run, 1.0);
        const auto split = make_split(d, 0.1, run);
        const auto cfg = quick("rf-part-rst", run);
        const auto model = fit(split.labeled, split.unlabeled, cfg);
        const auto baseline = train_whitebox(split.labeled, balance_weights(split.labeled), cfg);
        const double grey = kappa_on(split.test, [&](const instance &x) { return predict_slgb(model, x); });
        const double white = kappa_on(split.test, [&](const instance &x) { return predict_rules(baseline, x); });
        wins += grey >= white ? 1 : 0;
    }
    RecordProperty("wins", static_cast<int>(wins));
    EXPECT_GE(wins, 12U) << wins << " of 20";
}

TEST(Pipeline, ImputesMissingNumericCells) {
    auto d = make_synthetic("blobs2", 3);
    for (std::size_t r = 0; r < d.size(); r += 9) {
        d.instances[r].values[r % 2] = missing_value;
    }
    const auto split = make_split(d, 0.2, 1);
    const auto model = fit(split.labeled, split.unlabeled, quick("rf-rip-rst"));
    EXPECT_GE(count_rules(model.surrogate), 1U);
}

TEST(Pipeline, InputErrors) {
    const auto d = fx::two_blobs(20, 3.0, 2);
    EXPECT_THROW((void)fit(d.empty_like(), fx::without_labels(d), quick("rf-part-rst")), configuration_error);
    EXPECT_THROW((void)fit(d, fx::without_labels(make_synthetic("mixed", 1)), quick("rf-part-rst")),
                 configuration_error);
    EXPECT_THROW((void)fit(fx::without_labels(d), d.empty_like(), quick("rf-part-rst")), configuration_error);
    auto bad = quick("rf-part-rst");
    bad.epsilon = 1.5;
    EXPECT_THROW((void)fit(d, d.empty_like(), bad), parameter_error);
}

TEST(Pipeline, ConfigNames) {
    const auto c = parse_config_name("RF-RIP-CONF");
    EXPECT_EQ(c.whitebox, whitebox_kind::ripper);
    EXPECT_EQ(c.amending, amending_kind::conf);
    EXPECT_EQ(c.name(), "rf-rip-conf");
    EXPECT_EQ(parse_config_name("rf-ripper-rst").whitebox, whitebox_kind::ripper);
    for (const auto *name : { "rf-c45-none", "rf-part-rst", "rf-rip-none" }) {
        EXPECT_EQ(parse_config_name(name).name(), name);
    }
    EXPECT_THROW((void)parse_config_name("mlp-part-rst"), parameter_error);
    EXPECT_THROW((void)parse_config_name("rf-part"), parameter_error);
    EXPECT_THROW((void)parse_config_name("rf-svm-rst"), parameter_error);
}

TEST(Pipeline, ModelBundleRoundTrip) {
    const auto d = make_synthetic("mixed", 2);
    const auto split = make_split(d, 0.2, 4);
    const auto model = fit(split.labeled, split.unlabeled, quick("rf-c45-rst"));
    const auto json = model_to_json(model);
    const auto back = model_from_json(json);
    EXPECT_EQ(back.surrogate, model.surrogate);
    EXPECT_EQ(back.config.name(), model.config.name());
    EXPECT_EQ(back.report.self_label_counts, model.report.self_label_counts);
    EXPECT_TRUE(back.forest.trees.empty());
    EXPECT_EQ(model_to_json(back), json);
    EXPECT_THROW((void)model_from_json("not json"), error);
}

TEST(Explain, FirstMatchingRule) {
    slgb_model m;
    m.surrogate.kind = rule_model_kind::part_list;
    m.surrogate.classes = { "A", "B" };
    m.surrogate.schema = { fx::numeric("x") };
    m.surrogate.rules.push_back({ { { 0, condition_op::greater, 5.0 } }, 1, 4.0, 1.0 });
    m.surrogate.rules.push_back({ { { 0, condition_op::greater, 1.0 } }, 0, 3.0, 0.75 });
    m.surrogate.rules.push_back({ {}, 1, 2.0, 0.5 });
    m.surrogate.default_class = 1;
    instance x;
    x.values = { 2.0 };
    const auto e = explain(m, x);
    EXPECT_EQ(e.rule_index, std::optional<std::size_t>{ 1 });
    EXPECT_EQ(e.fired, m.surrogate.rules[1]);
    EXPECT_FALSE(e.is_default);
    EXPECT_EQ(e.predicted, 0U);
    EXPECT_NE(e.text.find("x > 1"), std::string::npos);

    x.values = { 0.5 };
    const auto d = explain(m, x);
    EXPECT_TRUE(d.is_default);
    EXPECT_EQ(d.predicted, 1U);
    EXPECT_EQ(d.rule_index, std::optional<std::size_t>{ 2 });
}

TEST(Explain, SingleDefaultRuleModel) {
    slgb_model m;
    m.surrogate.kind = rule_model_kind::ripper_list;
    m.surrogate.classes = { "A", "B" };
    m.surrogate.schema = { fx::numeric("x") };
    m.surrogate.rules.push_back({ {}, 1, 10.0, 0.6 });
    m.surrogate.default_class = 1;
    for (const double v : { -1.0, 0.0, 1e9 }) {
        instance x;
        x.values = { v };
        EXPECT_EQ(predict_slgb(m, x), 1U);
        EXPECT_TRUE(explain(m, x).is_default);
    }
}

TEST(Explain, TreePathMatchesLeafDepth) {
    const auto d = make_synthetic("checker3", 1);
    const auto split = make_split(d, 0.4, 2);
    const auto model = fit(split.labeled, split.unlabeled, quick("rf-c45-none"));
    for (const auto &x : split.test.instances) {
        const auto e = explain(model, x);
        ASSERT_TRUE(e.rule_index.has_value());
        ASSERT_TRUE(e.fired.covers(x));
        ASSERT_EQ(e.predicted, predict_slgb(model, x));
        // Every proper prefix of the path is an internal node, so it is shared with at least one other leaf
        // and the path length is the leaf depth.
        const auto &path = e.fired.conditions;
        for (std::size_t depth = 0; depth < path.size(); ++depth) {
            std::size_t sharing = 0;
            for (const auto &r : model.surrogate.rules) {
                sharing += r.conditions.size() > depth &&
                                   std::equal(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(depth),
                                              r.conditions.begin())
                               ? 1
                               : 0;
            }
            ASSERT_GE(sharing, 2U);
        }
    }
    EXPECT_GT(count_rules(model.surrogate), 1U);
}
