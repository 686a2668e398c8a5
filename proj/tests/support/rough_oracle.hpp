#pragma once

// Literal, unoptimized reading of the rough-set definitions, used to cross-check
// the library. Sets are std::set, relations are a full boolean matrix.

#include "slgb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

namespace slgb::oracle {

struct class_regions {
    std::set<std::size_t> concept_set;
    std::set<std::size_t> lower;
    std::set<std::size_t> upper;
    std::set<std::size_t> positive;
    std::set<std::size_t> boundary;
    std::set<std::size_t> negative;
};

struct universe_result {
    std::vector<std::set<std::size_t>> similarity_classes;
    std::vector<class_regions> regions;
    /// [instance][class] -> {positive, boundary, negative}
    std::vector<std::vector<std::vector<double>>> memberships;
    /// Weight of every instance for its own label.
    std::vector<double> weights;
};

inline std::vector<std::vector<double>> min_max_scaled(const dataset &d) {
    std::vector<std::vector<double>> rows;
    for (const auto &x : d.instances) {
        rows.push_back(x.values);
    }
    for (std::size_t t = 0; t < d.num_attributes(); ++t) {
        if (!d.schema[t].is_numeric()) {
            continue;
        }
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const auto &r : rows) {
            if (!std::isnan(r[t])) {
                lo = std::min(lo, r[t]);
                hi = std::max(hi, r[t]);
            }
        }
        for (auto &r : rows) {
            if (!std::isnan(r[t])) {
                r[t] = hi > lo ? (r[t] - lo) / (hi - lo) : 0.0;
            }
        }
    }
    return rows;
}

inline double distance(const std::vector<double> &a, const std::vector<double> &b, const dataset &d,
                       const std::vector<double> &w) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        double rho = 0.0;
        if (std::isnan(a[t]) || std::isnan(b[t])) {
            rho = 1.0;
        } else if (d.schema[t].is_nominal()) {
            rho = a[t] == b[t] ? 0.0 : 1.0;
        } else {
            rho = (a[t] - b[t]) * (a[t] - b[t]);
        }
        num += w[t] * rho;
        den += w[t];
    }
    return std::sqrt(num / den);
}

inline double inclusion(const std::set<std::size_t> &cls, const std::set<std::size_t> &region) {
    if (region.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (const auto i : cls) {
        common += region.count(i);
    }
    return static_cast<double>(common) / static_cast<double>(region.size());
}

/// `scale` applies min-max scaling to numeric attributes first (as the weighting step does).
inline universe_result evaluate(const dataset &d, const std::vector<double> &w, double epsilon, bool scale) {
    const std::size_t n = d.size();
    std::vector<std::vector<double>> rows;
    if (scale) {
        rows = min_max_scaled(d);
    } else {
        for (const auto &x : d.instances) {
            rows.push_back(x.values);
        }
    }
    std::vector<std::vector<bool>> related(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // An object is at distance 0 from itself even when it has missing cells.
            const double delta = i == j ? 0.0 : distance(rows[i], rows[j], d, w);
            related[i][j] = 1.0 - delta >= epsilon;
        }
    }
    universe_result out;
    out.similarity_classes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (related[i][j]) {
                out.similarity_classes[i].insert(j);
            }
        }
    }
    for (std::size_t y = 0; y < d.num_classes(); ++y) {
        class_regions r;
        for (std::size_t i = 0; i < n; ++i) {
            if (*d.instances[i].label == y) {
                r.concept_set.insert(i);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto &cls = out.similarity_classes[i];
            if (std::includes(r.concept_set.begin(), r.concept_set.end(), cls.begin(), cls.end())) {
                r.lower.insert(i);
            }
            for (const auto j : cls) {
                if (r.concept_set.count(j) > 0) {
                    r.upper.insert(i);
                }
            }
        }
        r.positive = r.lower;
        for (std::size_t i = 0; i < n; ++i) {
            if (r.upper.count(i) > 0 && r.lower.count(i) == 0) {
                r.boundary.insert(i);
            }
            if (r.upper.count(i) == 0) {
                r.negative.insert(i);
            }
        }
        out.regions.push_back(std::move(r));
    }
    out.memberships.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t y = 0; y < d.num_classes(); ++y) {
            const auto &r = out.regions[y];
            const auto &cls = out.similarity_classes[i];
            out.memberships[i].push_back(
                { inclusion(cls, r.positive), inclusion(cls, r.boundary), inclusion(cls, r.negative) });
        }
        const auto &m = out.memberships[i][*d.instances[i].label];
        const double z = m[0] + 0.5 * m[1] - m[2];
        out.weights.push_back(1.0 / (1.0 + std::exp(-z)));
    }
    return out;
}

}  // namespace slgb::oracle
