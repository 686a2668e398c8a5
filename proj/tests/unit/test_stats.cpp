#include "slgb/error.hpp"
#include "slgb/random.hpp"
#include "slgb/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace slgb;

namespace {

// Midranks of |d| over the non-zero differences, paired with the sign.
std::vector<std::pair<double, int>> signed_ranks(const std::vector<double> &a, const std::vector<double> &b) {
    std::vector<std::pair<double, int>> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) {
            diffs.emplace_back(std::abs(d), d > 0 ? 1 : -1);
        }
    }
    std::vector<std::pair<double, int>> out;
    for (const auto &[v, s] : diffs) {
        double below = 0.0;
        double equal = 0.0;
        for (const auto &other : diffs) {
            below += other.first < v ? 1.0 : 0.0;
            equal += other.first == v ? 1.0 : 0.0;
        }
        out.emplace_back(below + (equal + 1.0) / 2.0, s);
    }
    return out;
}

// Two-sided exact p by enumerating all 2^n sign patterns.
double brute_force_exact_p(const std::vector<double> &a, const std::vector<double> &b) {
    const auto ranks = signed_ranks(a, b);
    const std::size_t n = ranks.size();
    double observed = 0.0;
    double total = 0.0;
    for (const auto &[r, s] : ranks) {
        observed += s > 0 ? r : 0.0;
        total += r;
    }
    const double t = std::min(observed, total - observed);
    std::size_t at_most = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{ 1 } << n); ++mask) {
        double plus = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            plus += (mask >> i) & 1U ? ranks[i].first : 0.0;
        }
        at_most += plus <= t + 1e-9 ? 1 : 0;
    }
    return std::min(1.0, 2.0 * static_cast<double>(at_most) / std::ldexp(1.0, static_cast<int>(n)));
}

// Normal approximation with tie and continuity corrections.
double normal_p(const std::vector<double> &a, const std::vector<double> &b) {
    const auto ranks = signed_ranks(a, b);
    const double n = static_cast<double>(ranks.size());
    double plus = 0.0;
    for (const auto &[r, s] : ranks) {
        plus += s > 0 ? r : 0.0;
    }
    double tie = 0.0;
    std::vector<double> rs;
    for (const auto &pr : ranks) {
        rs.push_back(pr.first);
    }
    std::sort(rs.begin(), rs.end());
    for (std::size_t i = 0; i < rs.size();) {
        std::size_t j = i;
        while (j < rs.size() && rs[j] == rs[i]) {
            ++j;
        }
        const double t = static_cast<double>(j - i);
        tie += t * t * t - t;
        i = j;
    }
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie / 48.0;
    const double z = std::max(0.0, std::abs(plus - mean) - 0.5) / std::sqrt(var);
    return std::erfc(z / std::sqrt(2.0));
}

// Upper tail of chi-square with 3 degrees of freedom.
double chi2_df3_tail(double x) {
    return std::erfc(std::sqrt(x / 2.0)) + std::sqrt(2.0 * x / M_PI) * std::exp(-x / 2.0);
}

score_matrix from_rows(const std::vector<std::vector<double>> &rows) {
    score_matrix m;
    for (std::size_t j = 0; j < rows[0].size(); ++j) {
        m.column_names.push_back("m" + std::to_string(j));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.row_names.push_back("d" + std::to_string(i));
        m.scores.push_back(rows[i]);
    }
    return m;
}

}  // namespace

TEST(Wilcoxon, IdenticalSamples) {
    const std::vector<double> a{ 0.1, 0.5, 0.7, 0.2, 0.9 };
    const auto r = wilcoxon_signed_rank(a, a);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.r_plus, 0.0);
    EXPECT_EQ(r.r_minus, 0.0);
    EXPECT_EQ(r.n, 0U);
}

TEST(Wilcoxon, UniformShiftOfFifteen) {
    std::vector<double> b;
    std::vector<double> a;
    for (int i = 0; i < 15; ++i) {
        b.push_back(0.03 * i);
        a.push_back(b.back() + 1.0);
    }
    const auto r = wilcoxon_signed_rank(a, b);
    EXPECT_TRUE(r.exact);
    EXPECT_DOUBLE_EQ(r.r_plus, 120.0);
    EXPECT_DOUBLE_EQ(r.r_minus, 0.0);
    EXPECT_NEAR(r.p_value, std::ldexp(1.0, -14), 1e-9);
    EXPECT_NEAR(r.p_value, 6.1e-5, 1e-6);
}

TEST(Wilcoxon, SignSymmetricDifferences) {
    const std::vector<double> b{ 0, 0, 0, 0, 0, 0, 0, 0 };
    const std::vector<double> a{ 0.1, -0.1, 0.3, -0.3, 0.2, -0.2, 0.5, -0.5 };
    const auto r = wilcoxon_signed_rank(a, b);
    EXPECT_DOUBLE_EQ(r.r_plus, r.r_minus);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Wilcoxon, RankSumIdentityAndBruteForceExact) {
    rng gen{ 8 };
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 5 + gen.index(8);
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < n; ++i) {
            // Two-decimal values produce zero differences and ties.
            a.push_back(std::round(gen.uniform() * 20.0) / 20.0);
            b.push_back(std::round(gen.uniform() * 20.0) / 20.0);
        }
        const auto r = wilcoxon_signed_rank(a, b);
        const double nn = static_cast<double>(r.n);
        ASSERT_NEAR(r.r_plus + r.r_minus, nn * (nn + 1) / 2.0, 1e-9);
        ASSERT_NEAR(r.p_value, brute_force_exact_p(a, b), 1e-12) << "trial " << trial;
    }
}

TEST(Wilcoxon, ExactAgreesWithNormalBetweenFifteenAndTwenty) {
    // Every achievable untied statistic: differences carry ranks 1..n and the positive ones sum to t.
    for (std::size_t n = 15; n <= 20; ++n) {
        const std::size_t total = n * (n + 1) / 2;
        double worst = 0.0;
        for (std::size_t t = 0; t <= total; ++t) {
            std::vector<double> a;
            std::vector<double> b(n, 0.0);
            std::size_t left = t;
            for (std::size_t r = n; r >= 1; --r) {
                const bool positive = r <= left;
                left -= positive ? r : 0;
                a.push_back(positive ? static_cast<double>(r) : -static_cast<double>(r));
            }
            const auto w = wilcoxon_signed_rank(a, b);
            ASSERT_TRUE(w.exact);
            ASSERT_DOUBLE_EQ(w.r_plus, static_cast<double>(t));
            worst = std::max(worst, std::abs(w.p_value - normal_p(a, b)));
        }
        EXPECT_LE(worst, 0.01) << "n " << n;
    }
}

TEST(Wilcoxon, LargeSamplesUseNormalApproximation) {
    rng gen{ 5 };
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 40; ++i) {
        a.push_back(std::round(gen.normal() * 10.0) / 10.0 + 0.2);
        b.push_back(std::round(gen.normal() * 10.0) / 10.0);
    }
    const auto r = wilcoxon_signed_rank(a, b);
    EXPECT_FALSE(r.exact);
    EXPECT_NEAR(r.p_value, normal_p(a, b), 1e-12);
}

TEST(Wilcoxon, InputErrors) {
    EXPECT_THROW((void)wilcoxon_signed_rank(std::vector<double>{ 1, 2, 3, 4, 5 }, std::vector<double>{ 1, 2 }),
                 parameter_error);
    EXPECT_THROW((void)wilcoxon_signed_rank(std::vector<double>{ 1, 2, 3 }, std::vector<double>{ 1, 2, 4 }),
                 parameter_error);
}

TEST(Holm, Examples) {
    const auto single = holm_correction(std::vector<double>{ 0.03 });
    EXPECT_DOUBLE_EQ(single.adjusted[0], 0.03);
    EXPECT_TRUE(single.rejected[0]);

    const auto three = holm_correction(std::vector<double>{ 0.01, 0.04, 0.03 });
    EXPECT_NEAR(three.adjusted[0], 0.03, 1e-15);
    EXPECT_NEAR(three.adjusted[1], 0.06, 1e-15);
    EXPECT_NEAR(three.adjusted[2], 0.06, 1e-15);
    EXPECT_EQ(three.rejected, (std::vector<bool>{ true, false, false }));

    const auto ones = holm_correction(std::vector<double>{ 1.0, 1.0, 1.0, 1.0 });
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(ones.adjusted[i], 1.0);
        EXPECT_FALSE(ones.rejected[i]);
    }
    EXPECT_THROW((void)holm_correction(std::vector<double>{ 0.2, 1.3 }), parameter_error);
}

TEST(Holm, Properties) {
    rng gen{ 12 };
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p;
        const std::size_t m = 1 + gen.index(10);
        for (std::size_t i = 0; i < m; ++i) {
            p.push_back(gen.uniform() * gen.uniform());
        }
        const auto h = holm_correction(p);
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{ 0 });
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
        for (std::size_t i = 0; i < m; ++i) {
            ASSERT_GE(h.adjusted[i], p[i]);
            ASSERT_LE(h.adjusted[i], 1.0);
            ASSERT_EQ(h.rejected[i], h.adjusted[i] <= 0.05);
            if (i > 0) {
                ASSERT_GE(h.adjusted[order[i]], h.adjusted[order[i - 1]]);
            }
        }
    }
}

TEST(Friedman, IdenticalColumns) {
    const auto r = friedman_test(from_rows({ { 0.5, 0.5, 0.5 }, { 0.2, 0.2, 0.2 }, { 0.9, 0.9, 0.9 } }));
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(Friedman, DominanceIsMaximallySeparated) {
    std::vector<std::vector<double>> rows;
    rng gen{ 2 };
    for (int i = 0; i < 20; ++i) {
        const double base = gen.uniform();
        rows.push_back({ base + 0.3, base + 0.1 + 0.05 * gen.uniform(), base });
    }
    const auto r = friedman_test(from_rows(rows));
    EXPECT_NEAR(r.statistic, 40.0, 1e-9);
    EXPECT_LT(r.p_value, 0.001);
    EXPECT_NEAR(r.p_value, std::exp(-20.0), 1e-15);
    EXPECT_EQ(r.average_ranks, (std::vector<double>{ 1.0, 2.0, 3.0 }));
}

TEST(Friedman, HandRankedThreeByFour) {
    // Ranks (best = 1): d0 (1,2,3,4), d1 (3,1,4,2), d2 (2,3,4,1); rank sums (6,6,11,7).
    const auto m = from_rows({ { 0.9, 0.8, 0.7, 0.6 }, { 0.7, 0.9, 0.6, 0.8 }, { 0.85, 0.75, 0.65, 0.95 } });
    const auto r = friedman_test(m);
    const double expected = 12.0 / (3.0 * 4.0 * 5.0) * (36 + 36 + 121 + 49) - 3.0 * 3.0 * 5.0;
    EXPECT_NEAR(r.statistic, expected, 1e-9);
    EXPECT_NEAR(r.statistic, 3.4, 1e-9);
    EXPECT_NEAR(r.p_value, chi2_df3_tail(3.4), 1e-9);
    EXPECT_NEAR(r.average_ranks[2], 11.0 / 3.0, 1e-12);
}

TEST(Friedman, TiesUseMidranksAndCorrection) {
    // d0 ties the first two columns: ranks (1.5,1.5,3); the others are untied.
    const auto m = from_rows({ { 0.9, 0.9, 0.1 }, { 0.8, 0.7, 0.6 }, { 0.5, 0.6, 0.4 }, { 0.3, 0.2, 0.1 } });
    const auto r = friedman_test(m);
    const std::vector<double> sums{ 1.5 + 1 + 2 + 1, 1.5 + 2 + 1 + 2, 3 + 3 + 3 + 3 };
    double ss = 0.0;
    for (const double s : sums) {
        ss += s * s;
    }
    const double n = 4.0;
    const double k = 3.0;
    const double uncorrected = 12.0 / (n * k * (k + 1)) * ss - 3.0 * n * (k + 1);
    const double correction = 1.0 - (8.0 - 2.0) / (n * (k * k * k - k));
    EXPECT_NEAR(r.statistic, uncorrected / correction, 1e-9);
    EXPECT_NEAR(r.p_value, std::exp(-r.statistic / 2.0), 1e-12);
}

TEST(Friedman, InvariantUnderMonotoneRowTransforms) {
    rng gen{ 6 };
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({ gen.uniform(), gen.uniform(), gen.uniform(), gen.uniform() });
    }
    const auto before = friedman_test(from_rows(rows));
    for (auto &row : rows) {
        const double scale = gen.uniform(0.5, 3.0);
        for (double &v : row) {
            v = std::exp(scale * v) - 7.0;
        }
    }
    const auto after = friedman_test(from_rows(rows));
    EXPECT_NEAR(before.statistic, after.statistic, 1e-12);
    EXPECT_EQ(before.average_ranks, after.average_ranks);
}

TEST(ScoreMatrix, ParsesAndValidates) {
    std::istringstream in("name,a,b\nx,0.1,0.2\ny,0.3,0.4\n");
    const auto m = read_score_matrix(in);
    EXPECT_EQ(m.rows(), 2U);
    EXPECT_EQ(m.column(1), (std::vector<double>{ 0.2, 0.4 }));
    std::istringstream bad("name,a,b\nx,0.1\n");
    EXPECT_THROW((void)read_score_matrix(bad), row_error);
    std::istringstream nan("name,a,b\nx,0.1,zz\n");
    EXPECT_THROW((void)read_score_matrix(nan), row_error);
    EXPECT_THROW((void)friedman_test(from_rows({ { 0.1, 0.2 } })), parameter_error);
}

TEST(Battery, ControlAgainstEachWithHolm) {
    std::ifstream in(std::string{ SLGB_TEST_DATA } + "/scores.csv");
    const auto m = read_score_matrix(in);
    const auto b = run_test_battery(m);
    EXPECT_EQ(b.control, 0U);
    ASSERT_EQ(b.pairs.size(), 2U);
    EXPECT_EQ(b.pairs[0].pair, "rf-part-rst vs rf-part-none");
    const auto direct = wilcoxon_signed_rank(m.column(0), m.column(1));
    EXPECT_EQ(b.pairs[0].p_value, direct.p_value);
    EXPECT_EQ(b.pairs[0].r_plus, direct.r_plus);
    std::vector<double> raw{ b.pairs[0].p_value, b.pairs[1].p_value };
    const auto holm = holm_correction(raw);
    EXPECT_EQ(b.pairs[1].holm_p, holm.adjusted[1]);
    const auto csv = battery_to_csv(b);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "pair,p_value,r_minus,r_plus,holm_p,decision");
    EXPECT_NE(battery_to_json(b, m).find("\"friedman\""), std::string::npos);

    const auto explicit_control = run_test_battery(m, 2);
    EXPECT_EQ(explicit_control.control, 2U);
    EXPECT_THROW((void)run_test_battery(m, 7), parameter_error);
}

TEST(Battery, PublishedMeansFixture) {
    // Mean kappa of the grey box and four self-labeling methods at the four labeled ratios.
    std::ifstream in(std::string{ SLGB_TEST_DATA } + "/table_sota.csv");
    const auto m = read_score_matrix(in);
    ASSERT_EQ(m.rows(), 4U);
    ASSERT_EQ(m.columns(), 5U);
    EXPECT_EQ(m.column_names[0], "SlGb");
    EXPECT_DOUBLE_EQ(m.scores[0][0], 0.56);
    const auto f = friedman_test(m);
    EXPECT_DOUBLE_EQ(f.average_ranks[0], 1.0);
    for (std::size_t j = 1; j < m.columns(); ++j) {
        EXPECT_GT(f.average_ranks[j], 1.0);
    }
    EXPECT_GT(f.statistic, 0.0);
    EXPECT_LT(f.p_value, 0.1);
    // Four rows are too few for the signed-rank test, so every pair is reported as retained.
    const auto b = run_test_battery(m);
    EXPECT_EQ(b.control, 0U);
    ASSERT_EQ(b.pairs.size(), 4U);
    for (const auto &row : b.pairs) {
        EXPECT_EQ(row.p_value, 1.0);
        EXPECT_FALSE(row.rejected);
    }
}
