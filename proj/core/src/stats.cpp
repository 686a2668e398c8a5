#include "slgb/stats.hpp"

#include "json_io.hpp"
#include "slgb/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>

namespace slgb {

namespace {

// Midranks (1-based, ascending) of `values`.
std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

// Σ (t³ - t) over groups of equal values.
double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::ranges::sort(sorted);
    double acc = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
            ++j;
        }
        const auto t = static_cast<double>(j - i + 1);
        acc += t * t * t - t;
        i = j + 1;
    }
    return acc;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    out.push_back(cell);
    for (auto &c : out) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t");
        c = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
    }
    return out;
}

std::string format_p(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::vector<double> score_matrix::column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto &row : scores) {
        out.push_back(row.at(j));
    }
    return out;
}

void score_matrix::validate() const {
    if (columns() < 2 || rows() < 2) {
        throw parameter_error("score matrix needs at least two rows and two columns");
    }
    for (const auto &row : scores) {
        if (row.size() != columns()) {
            throw parameter_error("score matrix rows must have one entry per column");
        }
        for (const double v : row) {
            if (!std::isfinite(v)) {
                throw parameter_error("score matrix entries must be finite");
            }
        }
    }
}

score_matrix read_score_matrix(std::istream &in) {
    score_matrix m;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (header) {
            if (cells.size() < 3) {
                throw schema_error("score CSV header needs a name column and at least two configurations");
            }
            m.column_names.assign(cells.begin() + 1, cells.end());
            header = false;
            continue;
        }
        if (cells.size() != m.column_names.size() + 1) {
            throw row_error(line_no, "expected " + std::to_string(m.column_names.size() + 1) + " cells");
        }
        std::vector<double> row;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            double v = 0.0;
            const auto &c = cells[j];
            const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size()) {
                throw row_error(line_no, "'" + c + "' is not a number");
            }
            row.push_back(v);
        }
        m.row_names.push_back(cells[0]);
        m.scores.push_back(std::move(row));
    }
    if (header) {
        throw schema_error("score CSV has no header");
    }
    if (m.scores.empty()) {
        throw empty_dataset_error("score CSV has no rows");
    }
    m.validate();
    return m;
}

friedman_result friedman_test(const score_matrix &m) {
    m.validate();
    const auto n = static_cast<double>(m.rows());
    const auto k = static_cast<double>(m.columns());
    friedman_result out;
    out.average_ranks.assign(m.columns(), 0.0);
    double ties = 0.0;
    for (const auto &row : m.scores) {
        // Negate so that the best score gets rank 1.
        std::vector<double> neg(row.size());
        std::ranges::transform(row, neg.begin(), [](double v) { return -v; });
        const auto r = midranks(neg);
        for (std::size_t j = 0; j < r.size(); ++j) {
            out.average_ranks[j] += r[j];
        }
        ties += tie_term(row);
    }
    double sum_sq = 0.0;
    for (double &r : out.average_ranks) {
        sum_sq += r * r;
        r /= n;
    }
    const double correction = 1.0 - ties / (n * k * (k * k - 1.0));
    if (correction <= 1e-12) {
        return out;
    }
    const double stat = (12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0)) / correction;
    out.statistic = std::max(stat, 0.0);
    const boost::math::chi_squared_distribution<double> chi{ k - 1.0 };
    out.p_value = std::clamp(boost::math::cdf(boost::math::complement(chi, out.statistic)), 0.0, 1.0);
    return out;
}

wilcoxon_result wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw parameter_error("paired samples must have equal length");
    }
    if (a.size() < 5) {
        throw parameter_error("the signed-rank test needs at least 5 pairs");
    }
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
            throw parameter_error("paired samples must be finite");
        }
        const double d = a[i] - b[i];
        if (d != 0.0) {
            diffs.push_back(d);
        }
    }
    wilcoxon_result out;
    out.n = diffs.size();
    if (diffs.empty()) {
        out.exact = true;
        return out;
    }
    std::vector<double> magnitudes(diffs.size());
    std::ranges::transform(diffs, magnitudes.begin(), [](double d) { return std::abs(d); });
    const auto ranks = midranks(magnitudes);
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        (diffs[i] > 0.0 ? out.r_plus : out.r_minus) += ranks[i];
    }
    const double smaller = std::min(out.r_plus, out.r_minus);
    const auto n = static_cast<double>(diffs.size());

    if (diffs.size() <= wilcoxon_exact_limit) {
        out.exact = true;
        // Doubled midranks are integers, so the null distribution is a subset-sum count.
        std::vector<std::size_t> doubled(ranks.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
            total += doubled[i];
        }
        std::vector<double> ways(total + 1, 0.0);
        ways[0] = 1.0;
        for (const std::size_t r : doubled) {
            for (std::size_t s = total; s >= r; --s) {
                ways[s] += ways[s - r];
                if (s == r) {
                    break;
                }
            }
        }
        const auto threshold = static_cast<std::size_t>(std::llround(2.0 * smaller));
        double tail = 0.0;
        for (std::size_t s = 0; s <= threshold && s <= total; ++s) {
            tail += ways[s];
        }
        out.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(diffs.size())));
        return out;
    }

    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(magnitudes) / 48.0;
    if (var <= 0.0) {
        return out;
    }
    const double z = std::max(0.0, std::abs(out.r_plus - mean) - 0.5) / std::sqrt(var);
    const boost::math::normal_distribution<double> normal{};
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, z)));
    return out;
}

holm_result holm_correction(std::span<const double> p_values, double alpha) {
    for (const double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw parameter_error("p-values must lie in [0, 1]");
        }
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw parameter_error("alpha must lie in (0, 1)");
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    holm_result out;
    out.adjusted.assign(m, 1.0);
    out.rejected.assign(m, false);
    double running = 0.0;
    bool still_rejecting = true;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t idx = order[i];
        const double scaled = std::min(1.0, static_cast<double>(m - i) * p_values[idx]);
        running = std::max(running, scaled);
        out.adjusted[idx] = running;
        still_rejecting = still_rejecting && running <= alpha;
        out.rejected[idx] = still_rejecting;
    }
    return out;
}

test_battery run_test_battery(const score_matrix &m, std::optional<std::size_t> control, double alpha) {
    test_battery b;
    b.alpha = alpha;
    b.friedman = friedman_test(m);
    if (control) {
        if (*control >= m.columns()) {
            throw parameter_error("control column out of range");
        }
        b.control = *control;
    } else {
        b.control = static_cast<std::size_t>(
            std::distance(b.friedman.average_ranks.begin(), std::ranges::min_element(b.friedman.average_ranks)));
    }
    const auto reference = m.column(b.control);
    std::vector<double> raw;
    for (std::size_t j = 0; j < m.columns(); ++j) {
        if (j == b.control) {
            continue;
        }
        const auto other = m.column(j);
        pairwise_row row;
        row.pair = m.column_names[b.control] + " vs " + m.column_names[j];
        if (m.rows() >= 5) {
            const auto w = wilcoxon_signed_rank(reference, other);
            row.p_value = w.p_value;
            row.r_minus = w.r_minus;
            row.r_plus = w.r_plus;
        }
        raw.push_back(row.p_value);
        b.pairs.push_back(std::move(row));
    }
    const auto holm = holm_correction(raw, alpha);
    for (std::size_t i = 0; i < b.pairs.size(); ++i) {
        b.pairs[i].holm_p = holm.adjusted[i];
        b.pairs[i].rejected = holm.rejected[i];
    }
    return b;
}

std::string battery_to_csv(const test_battery &b) {
    std::string out = "pair,p_value,r_minus,r_plus,holm_p,decision\n";
    for (const auto &row : b.pairs) {
        out += '"' + row.pair + "\"," + format_p(row.p_value) + ',' + format_p(row.r_minus) + ',' +
               format_p(row.r_plus) + ',' + format_p(row.holm_p) + ',' + (row.rejected ? "rejected" : "retained") +
               '\n';
    }
    return out;
}

std::string battery_to_json(const test_battery &b, const score_matrix &m) {
    using detail::json;
    json doc;
    doc["alpha"] = b.alpha;
    doc["friedman"] = json{ { "statistic", b.friedman.statistic },
                            { "p_value", b.friedman.p_value },
                            { "columns", m.column_names },
                            { "average_ranks", b.friedman.average_ranks } };
    doc["control"] = m.column_names.at(b.control);
    json pairs = json::array();
    for (const auto &row : b.pairs) {
        pairs.push_back(json{ { "pair", row.pair },
                              { "p_value", row.p_value },
                              { "r_minus", row.r_minus },
                              { "r_plus", row.r_plus },
                              { "holm_p", row.holm_p },
                              { "decision", row.rejected ? "rejected" : "retained" } });
    }
    doc["pairs"] = std::move(pairs);
    return doc.dump(2);
}

}  // namespace slgb
