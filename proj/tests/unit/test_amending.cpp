#include "fixtures.hpp"
#include "rough_oracle.hpp"
#include "slgb/amending.hpp"
#include "slgb/error.hpp"
#include "slgb/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace slgb;

namespace {

dataset with_counts(const std::vector<std::size_t> &counts) {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    std::vector<std::string> classes;
    for (std::size_t y = 0; y < counts.size(); ++y) {
        classes.push_back(std::string(1, static_cast<char>('A' + y)));
        for (std::size_t i = 0; i < counts[y]; ++i) {
            rows.push_back({ static_cast<double>(rows.size()) });
            labels.push_back(y);
        }
    }
    return fx::make_dataset({ fx::numeric("x") }, classes, rows, labels);
}

trained_forest one_leaf_forest(std::vector<double> tally) {
    trained_forest f;
    f.classes.resize(tally.size(), "c");
    for (std::size_t c = 0; c < tally.size(); ++c) {
        f.classes[c] += std::to_string(c);
    }
    f.schema = { fx::numeric("x") };
    f.config.laplace_smoothing = false;
    f.config.n_trees = 1;
    random_tree t;
    tree_node leaf;
    leaf.tally = std::move(tally);
    t.nodes.push_back(leaf);
    f.trees.push_back(t);
    return f;
}

forest_config small_forest() {
    forest_config cfg;
    cfg.n_trees = 20;
    return cfg;
}

}  // namespace

TEST(BalanceWeights, Examples) {
    const auto a = balance_weights(with_counts({ 30, 10 }));
    EXPECT_DOUBLE_EQ(a.front(), 1.0 / 3.0);
    EXPECT_EQ(a.back(), 1.0);
    for (const double w : balance_weights(with_counts({ 12, 12, 12 }))) {
        EXPECT_EQ(w, 1.0);
    }
    const auto c = balance_weights(with_counts({ 50, 25, 5 }));
    EXPECT_EQ(c[0], 0.1);
    EXPECT_EQ(c[50], 0.2);
    EXPECT_EQ(c[75], 1.0);
}

TEST(BalanceWeights, ClassesAbsentFromLabeledDataAreIgnored) {
    auto d = with_counts({ 4, 2 });
    d.classes.push_back("unused");
    const auto w = balance_weights(d);
    EXPECT_EQ(w.front(), 0.5);
    EXPECT_EQ(w.back(), 1.0);
}

TEST(ConfWeights, TopProbability) {
    const auto f = one_leaf_forest({ 9.0, 1.0 });
    auto u = fx::without_labels(with_counts({ 1, 1 }));
    const auto s = conf_weights(f, u);
    EXPECT_EQ(s.labels, (std::vector<std::size_t>{ 0, 0 }));
    EXPECT_DOUBLE_EQ(s.weights[0], 0.9);

    const auto uniform = conf_weights(one_leaf_forest({ 2.0, 2.0, 2.0 }), u);
    EXPECT_DOUBLE_EQ(uniform.weights[0], 1.0 / 3.0);
    EXPECT_EQ(uniform.labels[0], 0U);
}

TEST(ConfWeights, SmoothedPureLeafStaysBelowOne) {
    const auto d = fx::two_blobs(20, 8.0, 3, 0.5);
    const auto f = train_forest(d, fx::ones(d.size()), small_forest());
    const auto s = conf_weights(f, fx::without_labels(d));
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(s.labels[i], *d.instances[i].label);
        EXPECT_LT(s.weights[i], 1.0);
        EXPECT_GT(s.weights[i], 0.5);
    }
}

TEST(ConfWeights, EqualsMaxProbabilityAndIsMonotone) {
    const auto d = make_synthetic("blobs_noisy", 2);
    const auto f = train_forest(d, fx::ones(d.size()), small_forest());
    const auto u = fx::without_labels(make_synthetic("blobs_noisy", 3));
    const auto s = conf_weights(f, u);
    std::vector<double> top;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto p = predict_proba(f, u.instances[i]);
        top.push_back(*std::max_element(p.begin(), p.end()));
        ASSERT_EQ(s.weights[i], top.back());
        ASSERT_EQ(s.labels[i], predict(f, u.instances[i]));
        ASSERT_GE(s.weights[i], 1.0 / 3.0);
        ASSERT_LE(s.weights[i], 1.0);
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < u.size(); j += 13) {
            if (top[i] > top[j]) {
                ASSERT_GT(s.weights[i], s.weights[j]);
            }
        }
    }
}

TEST(RstWeight, LogisticValues) {
    EXPECT_NEAR(rst_weight({ 1.0, 0.0, 0.0 }), 0.7311, 1e-4);
    EXPECT_NEAR(rst_weight({ 1.0, 0.0, 0.0 }), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_EQ(rst_weight({ 0.0, 0.0, 0.0 }), 0.5);
    EXPECT_NEAR(rst_weight({ 0.0, 0.0, 1.0 }), 0.2689, 1e-4);
    EXPECT_NEAR(rst_weight({ 0.0, 1.0, 0.0 }), 1.0 / (1.0 + std::exp(-0.5)), 1e-15);
}

TEST(RstWeights, StrictlyInsideUnitInterval) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto u = fx::make_random_universe(seed, 40);
        rst_options opt;
        opt.epsilon = u.epsilon;
        const auto r = rst_weights(u.data, opt);
        ASSERT_EQ(r.weights.size(), u.data.size());
        for (const double w : r.weights) {
            ASSERT_GT(w, 0.0);
            ASSERT_LT(w, 1.0);
        }
    }
}

TEST(RstWeights, InformationGainIsComputedOnTheGivenSet) {
    const auto d = make_synthetic("mixed", 1);
    const auto r = rst_weights(d);
    EXPECT_EQ(r.attribute_weights, attribute_information_gain(d));
    EXPECT_FALSE(r.uniform_fallback);
}

TEST(RstWeights, UniformFallbackWhenNoAttributeIsInformative) {
    const auto d = fx::make_dataset({ fx::numeric("x") }, { "A", "B" }, { { 1 }, { 1 }, { 1 }, { 1 } },
                                    { 0, 1, 0, 1 });
    const auto r = rst_weights(d);
    EXPECT_TRUE(r.uniform_fallback);
    EXPECT_EQ(r.attribute_weights, (std::vector<double>{ 1.0 }));
}

TEST(ApplyAmending, NoneWithoutUnlabeledIsTheLabeledSet) {
    const auto l = make_synthetic("imbalanced", 2);
    const auto f = train_forest(l, balance_weights(l), small_forest());
    const auto r = apply_amending(amending_kind::none, l, l.empty_like(), f);
    EXPECT_EQ(r.enlarged.data.instances, l.instances);
    EXPECT_EQ(r.enlarged.weights, balance_weights(l));
    EXPECT_TRUE(std::all_of(r.enlarged.origin.begin(), r.enlarged.origin.end(),
                            [](provenance p) { return p == provenance::originally_labeled; }));
}

TEST(ApplyAmending, LabeledFirstThenSelfLabeled) {
    const auto d = make_synthetic("blobs3_noise", 4);
    const auto split = make_split(d, 0.2, 1);
    const auto bw = balance_weights(split.labeled);
    const auto f = train_forest(split.labeled, bw, small_forest());
    const auto self = conf_weights(f, split.unlabeled);
    for (const auto kind : { amending_kind::none, amending_kind::conf, amending_kind::rst }) {
        const auto r = apply_amending(kind, split.labeled, split.unlabeled, f);
        const std::size_t nl = split.labeled.size();
        ASSERT_EQ(r.enlarged.data.size(), nl + split.unlabeled.size());
        ASSERT_TRUE(r.enlarged.data.fully_labeled());
        for (std::size_t i = 0; i < r.enlarged.data.size(); ++i) {
            const bool original = i < nl;
            ASSERT_EQ(r.enlarged.origin[i], original ? provenance::originally_labeled : provenance::self_labeled);
            if (!original) {
                ASSERT_EQ(*r.enlarged.data.instances[i].label, self.labels[i - nl]);
            }
            const double w = r.enlarged.weights[i];
            switch (kind) {
            case amending_kind::none:
                ASSERT_EQ(w, original ? bw[i] : 1.0);
                break;
            case amending_kind::conf:
                ASSERT_EQ(w, original ? bw[i] : self.weights[i - nl]);
                break;
            case amending_kind::rst:
                ASSERT_GT(w, 0.0);
                ASSERT_LT(w, 1.0);
                break;
            }
        }
        if (kind == amending_kind::rst) {
            EXPECT_EQ(r.enlarged.weights, rst_weights(r.enlarged.data).weights);
            EXPECT_EQ(r.attribute_weights.size(), d.num_attributes());
        }
    }
}

TEST(ApplyAmending, RstOnBridgeSetMatchesOracle) {
    const auto l = fx::make_dataset({ fx::numeric("x") }, { "A", "B" },
                                    { { 0.0 }, { 0.05 }, { 0.5 }, { 0.95 }, { 1.0 } }, { 0, 0, 0, 1, 1 });
    const auto f = train_forest(l, balance_weights(l), small_forest());
    amending_options opt;
    opt.rst.epsilon = 0.45;
    opt.rst.attribute_weights = { 1.0 };
    const auto r = apply_amending(amending_kind::rst, l, l.empty_like(), f, opt);
    const auto o = oracle::evaluate(l, { 1.0 }, 0.45, true);
    ASSERT_EQ(r.enlarged.weights.size(), 5U);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(r.enlarged.weights[i], o.weights[i], 1e-12);
    }
    EXPECT_NEAR(r.enlarged.weights[0], 1.0 / (1.0 + std::exp(-(1.0 + 0.5 / 3.0))), 1e-12);
}

TEST(ApplyAmending, MultiplyBalanceToggle) {
    const auto d = make_synthetic("imbalanced", 5);
    const auto split = make_split(d, 0.3, 2);
    const auto bw = balance_weights(split.labeled);
    const auto f = train_forest(split.labeled, bw, small_forest());
    const auto replaced = apply_amending(amending_kind::rst, split.labeled, split.unlabeled, f);
    amending_options opt;
    opt.rst_multiply_balance = true;
    const auto multiplied = apply_amending(amending_kind::rst, split.labeled, split.unlabeled, f, opt);
    for (std::size_t i = 0; i < replaced.enlarged.weights.size(); ++i) {
        const double factor = i < bw.size() ? bw[i] : 1.0;
        ASSERT_DOUBLE_EQ(multiplied.enlarged.weights[i], replaced.enlarged.weights[i] * factor);
    }
}

TEST(ApplyAmending, RejectsMismatchedSchemas) {
    const auto l = fx::two_blobs(10, 3.0, 1);
    const auto f = train_forest(l, fx::ones(l.size()), small_forest());
    auto other = fx::without_labels(make_synthetic("mixed", 1));
    EXPECT_THROW((void)apply_amending(amending_kind::none, l, other, f), configuration_error);
    EXPECT_THROW((void)apply_amending(amending_kind::none, l.empty_like(), l.empty_like(), f), configuration_error);
}

TEST(AmendingKind, Names) {
    for (const auto kind : { amending_kind::none, amending_kind::conf, amending_kind::rst }) {
        EXPECT_EQ(amending_from_string(to_string(kind)), kind);
    }
    EXPECT_FALSE(amending_from_string("fuzzy").has_value());
}
