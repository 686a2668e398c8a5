#include "fixtures.hpp"
#include "slgb/error.hpp"
#include "slgb/forest.hpp"
#include "slgb/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace slgb;

namespace {

random_tree single_leaf(std::vector<double> tally) {
    random_tree t;
    tree_node leaf;
    leaf.tally = std::move(tally);
    t.nodes.push_back(leaf);
    return t;
}

trained_forest hand_forest(const std::vector<std::vector<double>> &leaf_tallies, bool laplace) {
    trained_forest f;
    f.classes = { "A", "B" };
    f.schema = { fx::numeric("x") };
    f.config.laplace_smoothing = laplace;
    f.config.n_trees = leaf_tallies.size();
    for (const auto &t : leaf_tallies) {
        f.trees.push_back(single_leaf(t));
    }
    return f;
}

instance probe(double x, double y) {
    instance i;
    i.values = { x, y };
    return i;
}

double training_accuracy(const trained_forest &f, const dataset &d) {
    std::size_t hit = 0;
    for (const auto &x : d.instances) {
        hit += predict(f, x) == *x.label ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(d.size());
}

}  // namespace

TEST(Forest, SeparableSetIsFittedExactly) {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    rng gen{ 3 };
    for (std::size_t i = 0; i < 40; ++i) {
        const double x = gen.uniform();
        const double y = gen.uniform();
        rows.push_back({ x, y });
        labels.push_back(x + 0.5 * y > 0.75 ? 1 : 0);
    }
    const auto d = fx::make_dataset({ fx::numeric("x"), fx::numeric("y") }, { "A", "B" }, rows, labels);
    const auto f = train_forest(d, fx::ones(d.size()), forest_config{});
    EXPECT_EQ(f.trees.size(), 100U);
    EXPECT_DOUBLE_EQ(training_accuracy(f, d), 1.0);
}

TEST(Forest, SingleClassIsDegenerate) {
    const auto d = fx::make_dataset({ fx::numeric("x") }, { "A", "B" }, { { 1.0 }, { 2.0 }, { 3.0 } },
                                         { 1, 1, 1 });
    const auto f = train_forest(d, fx::ones(3), forest_config{});
    ASSERT_TRUE(f.degenerate_class.has_value());
    EXPECT_EQ(*f.degenerate_class, 1U);
    instance x;
    x.values = { -50.0 };
    const auto p = predict_proba(f, x);
    EXPECT_DOUBLE_EQ(p[1], 1.0);
    EXPECT_DOUBLE_EQ(p[0], 0.0);
    EXPECT_EQ(predict(f, x), 1U);
}

TEST(Forest, PureLeafWithoutSmoothing) {
    const auto f = hand_forest({ { 4.0, 0.0 } }, false);
    instance x;
    x.values = { 0.3 };
    const auto p = predict_proba(f, x);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 0.0);
    EXPECT_EQ(predict(f, x), 0U);
}

TEST(Forest, ThreeTreeVoteAverages) {
    const auto f = hand_forest({ { 3.0, 0.0 }, { 5.0, 0.0 }, { 0.0, 2.0 } }, false);
    instance x;
    x.values = { 0.0 };
    const auto p = predict_proba(f, x);
    EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-12);
}

TEST(Forest, LaplaceSmoothingKeepsPureLeavesBelowOne) {
    const auto f = hand_forest({ { 4.0, 0.0 } }, true);
    instance x;
    x.values = { 0.0 };
    const auto p = predict_proba(f, x);
    EXPECT_NEAR(p[0], 5.0 / 6.0, 1e-12);
}

TEST(Forest, ExactTieGoesToFirstClass) {
    const auto f = hand_forest({ { 1.0, 0.0 }, { 0.0, 1.0 } }, false);
    instance x;
    x.values = { 0.0 };
    EXPECT_EQ(predict(f, x), 0U);
    EXPECT_EQ(argmax_first(std::vector<double>{ 0.7, 0.3 }), 0U);
    EXPECT_EQ(argmax_first(std::vector<double>{ 0.2, 0.4, 0.4 }), 1U);
}

TEST(Forest, ProbabilitiesFormADistribution) {
    for (const auto &name : { "blobs3_noise", "mixed", "nominal_rules" }) {
        const auto d = make_synthetic(name, 11);
        forest_config cfg;
        cfg.n_trees = 15;
        const auto f = train_forest(d, fx::ones(d.size()), cfg);
        for (const auto &x : d.instances) {
            const auto p = predict_proba(f, x);
            const double sum = std::accumulate(p.begin(), p.end(), 0.0);
            ASSERT_NEAR(sum, 1.0, 1e-9);
            for (const double v : p) {
                ASSERT_GE(v, 0.0);
            }
        }
    }
}

TEST(Forest, DeterministicAndThreadIndependent) {
    const auto d = make_synthetic("mixed", 2);
    forest_config cfg;
    cfg.n_trees = 20;
    cfg.seed = 17;
    const auto a = train_forest(d, fx::ones(d.size()), cfg);
    const auto b = train_forest(d, fx::ones(d.size()), cfg);
    cfg.threads = 3;
    const auto c = train_forest(d, fx::ones(d.size()), cfg);
    EXPECT_EQ(forest_to_json(a), forest_to_json(b));
    EXPECT_EQ(forest_to_json(a), forest_to_json(c));
}

TEST(Forest, JsonRoundTripPreservesPredictions) {
    const auto d = make_synthetic("mixed", 4);
    forest_config cfg;
    cfg.n_trees = 10;
    const auto f = train_forest(d, fx::ones(d.size()), cfg);
    const auto json = forest_to_json(f);
    const auto back = forest_from_json(json);
    EXPECT_EQ(forest_to_json(back), json);
    for (const auto &x : d.instances) {
        ASSERT_EQ(predict_proba(back, x), predict_proba(f, x));
    }
}

TEST(Forest, DefaultAttributesPerSplitIsCeilLog2) {
    forest_config cfg;
    EXPECT_EQ(cfg.resolved_attributes_per_split(1), 1U);
    EXPECT_EQ(cfg.resolved_attributes_per_split(2), 1U);
    EXPECT_EQ(cfg.resolved_attributes_per_split(5), 3U);
    EXPECT_EQ(cfg.resolved_attributes_per_split(8), 3U);
    EXPECT_EQ(cfg.resolved_attributes_per_split(9), 4U);
}

TEST(Forest, RejectsBadInputs) {
    const auto d = fx::two_blobs(10, 3.0, 1);
    forest_config cfg;
    EXPECT_THROW((void)train_forest(d, std::vector<double>(3, 1.0), cfg), error);
    EXPECT_THROW((void)train_forest(d, std::vector<double>(d.size(), 0.0), cfg), error);
    std::vector<double> negative(d.size(), 1.0);
    negative[0] = -1.0;
    EXPECT_THROW((void)train_forest(d, negative, cfg), error);
    cfg.n_trees = 0;
    EXPECT_THROW((void)train_forest(d, fx::ones(d.size()), cfg), parameter_error);
    cfg.n_trees = 5;
    cfg.attributes_per_split = 3;
    EXPECT_THROW((void)train_forest(d, fx::ones(d.size()), cfg), parameter_error);
}

TEST(Forest, ZeroWeightClassGetsNoVotes) {
    const auto d = fx::two_blobs(30, 1.0, 8);
    std::vector<double> w(d.size(), 1.0);
    for (std::size_t r = 0; r < d.size(); ++r) {
        if (*d.instances[r].label == 1) {
            w[r] = 0.0;
        }
    }
    forest_config cfg;
    cfg.n_trees = 10;
    const auto f = train_forest(d, w, cfg);
    for (const auto &x : d.instances) {
        ASSERT_EQ(predict(f, x), 0U);
    }
}

TEST(Forest, MoreTreesReduceVariance) {
    const auto d = fx::two_blobs(60, 1.5, 21, 1.2);
    const std::vector<instance> probes{ probe(0.75, 0.75), probe(0.0, 1.5), probe(1.5, 0.0), probe(1.0, 0.5),
                                        probe(0.4, 1.0) };
    auto variance_for = [&](std::size_t trees) {
        double total = 0.0;
        for (const auto &x : probes) {
            std::vector<double> values;
            for (std::uint64_t seed = 1; seed <= 12; ++seed) {
                forest_config cfg;
                cfg.n_trees = trees;
                cfg.seed = seed;
                values.push_back(predict_proba(train_forest(d, fx::ones(d.size()), cfg), x)[0]);
            }
            const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 12.0;
            for (const double v : values) {
                total += (v - mean) * (v - mean);
            }
        }
        return total;
    };
    const double v1 = variance_for(1);
    const double v10 = variance_for(10);
    const double v100 = variance_for(100);
    EXPECT_GT(v1, v10);
    EXPECT_GT(v10, v100);
}

TEST(Forest, DoubledWeightMatchesDuplicatedRow) {
    // Without the bootstrap, a tree sees weights only through tallies, so a row of weight 2
    // and two copies of weight 1 must grow the same tree from the same stream.
    const auto d = fx::two_blobs(25, 1.0, 5);
    for (std::size_t dup = 0; dup < d.size(); dup += 7) {
        std::vector<double> weighted(d.size(), 1.0);
        weighted[dup] = 2.0;
        auto copied = d;
        copied.instances.push_back(d.instances[dup]);
        forest_config cfg;
        rng g1{ 99 };
        rng g2{ 99 };
        const auto a = grow_tree(d, weighted, cfg, g1);
        const auto b = grow_tree(copied, fx::ones(copied.size()), cfg, g2);
        for (double x = -2.0; x <= 3.0; x += 0.25) {
            for (double y = -2.0; y <= 3.0; y += 0.25) {
                ASSERT_EQ(a.leaf_for(probe(x, y)).tally, b.leaf_for(probe(x, y)).tally);
            }
        }
    }
}
