#include "slgb/rough.hpp"

#include "entropy.hpp"
#include "json_io.hpp"
#include "slgb/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace slgb {

namespace {

constexpr std::size_t info_gain_bins = 10;

// Equal-frequency bin of every row; equal values share a bin, missing values get their own.
std::vector<std::size_t> equal_frequency_bins(const dataset &data, std::size_t a) {
    std::vector<double> known;
    for (const auto &inst : data.instances) {
        if (!is_missing(inst.values[a])) {
            known.push_back(inst.values[a]);
        }
    }
    std::ranges::sort(known);
    std::vector<std::size_t> bins(data.size(), info_gain_bins);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double v = data.instances[r].values[a];
        if (is_missing(v)) {
            continue;
        }
        const auto below = static_cast<std::size_t>(std::ranges::lower_bound(known, v) - known.begin());
        bins[r] = below * info_gain_bins / known.size();
    }
    return bins;
}

}  // namespace

void heom_params::validate(std::size_t num_attributes) const {
    if (attribute_weights.size() != num_attributes) {
        throw parameter_error("attribute weights must align with attributes");
    }
    double sum = 0.0;
    for (const double w : attribute_weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw parameter_error("attribute weights must be finite and non-negative");
        }
        sum += w;
    }
    if (!(sum > 0.0)) {
        throw parameter_error("attribute weights must not all be zero");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw parameter_error("epsilon must lie in (0, 1]");
    }
}

double heom(const instance &a, const instance &b, std::span<const attribute_schema> schema,
            std::span<const double> attribute_weights) {
    if (a.values.size() != schema.size() || b.values.size() != schema.size() ||
        attribute_weights.size() != schema.size()) {
        throw parameter_error("instances and attribute weights must align with the schema");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < schema.size(); ++t) {
        const double w = attribute_weights[t];
        den += w;
        if (w == 0.0) {
            continue;
        }
        const double x = a.values[t];
        const double y = b.values[t];
        double rho = 0.0;
        if (is_missing(x) || is_missing(y)) {
            rho = 1.0;
        } else if (schema[t].is_nominal()) {
            rho = x == y ? 0.0 : 1.0;
        } else {
            rho = (x - y) * (x - y);
        }
        num += w * rho;
    }
    if (!(den > 0.0)) {
        throw parameter_error("attribute weights must not all be zero");
    }
    return std::sqrt(num / den);
}

std::vector<double> attribute_information_gain(const dataset &data) {
    if (data.empty()) {
        throw configuration_error("information gain needs a non-empty dataset");
    }
    if (!data.fully_labeled()) {
        throw configuration_error("information gain needs fully labeled data");
    }
    const std::size_t k = data.num_classes();
    std::vector<double> class_tally(k, 0.0);
    for (const auto &inst : data.instances) {
        class_tally[*inst.label] += 1.0;
    }
    const double n = static_cast<double>(data.size());
    const double h_class = detail::entropy(class_tally);

    std::vector<double> gains(data.num_attributes(), 0.0);
    for (std::size_t a = 0; a < data.num_attributes(); ++a) {
        std::vector<std::size_t> cell(data.size());
        std::size_t num_cells = 0;
        if (data.schema[a].is_numeric()) {
            cell = equal_frequency_bins(data, a);
            num_cells = info_gain_bins + 1;
        } else {
            num_cells = data.schema[a].values.size() + 1;
            for (std::size_t r = 0; r < data.size(); ++r) {
                const double v = data.instances[r].values[a];
                cell[r] = is_missing(v) ? num_cells - 1 : static_cast<std::size_t>(v);
            }
        }
        std::vector<std::vector<double>> tallies(num_cells, std::vector<double>(k, 0.0));
        for (std::size_t r = 0; r < data.size(); ++r) {
            tallies[cell[r]][*data.instances[r].label] += 1.0;
        }
        double conditional = 0.0;
        for (const auto &t : tallies) {
            conditional += detail::weighted_entropy(t);
        }
        gains[a] = std::max(0.0, h_class - conditional / n);
    }
    return gains;
}

const std::vector<std::size_t> &region_sets::of(region r) const {
    switch (r) {
    case region::positive:
        return positive;
    case region::boundary:
        return boundary;
    case region::negative:
        return negative;
    }
    return negative;
}

region similarity_structure::region_of(std::size_t instance, std::size_t cls) const {
    if (cls >= regions.size()) {
        throw parameter_error("unknown class index");
    }
    const auto &rs = regions[cls];
    if (std::ranges::binary_search(rs.positive, instance)) {
        return region::positive;
    }
    if (std::ranges::binary_search(rs.boundary, instance)) {
        return region::boundary;
    }
    return region::negative;
}

similarity_structure build_similarity_structure(const dataset &data, const heom_params &params,
                                                std::size_t threads) {
    if (!data.fully_labeled()) {
        throw configuration_error("similarity structure needs fully labeled data");
    }
    params.validate(data.num_attributes());
    const std::size_t n = data.size();
    similarity_structure s;
    s.size = n;
    s.labels.reserve(n);
    for (const auto &inst : data.instances) {
        s.labels.push_back(*inst.label);
    }

    // Row i only evaluates pairs (i, j > i); the upper triangle is mirrored afterwards.
    std::vector<std::vector<std::size_t>> upper(n);
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < n; i += step) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = heom(data.instances[i], data.instances[j], data.schema, params.attribute_weights);
                if (1.0 - d >= params.epsilon) {
                    upper[i].push_back(j);
                }
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work, w, workers);
        }
    }

    s.similarity_classes.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        s.similarity_classes[i].push_back(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::size_t j : upper[i]) {
            s.similarity_classes[i].push_back(j);
            s.similarity_classes[j].push_back(i);
        }
    }
    for (auto &cls : s.similarity_classes) {
        std::ranges::sort(cls);
    }

    s.regions.assign(data.num_classes(), {});
    for (std::size_t y = 0; y < data.num_classes(); ++y) {
        auto &rs = s.regions[y];
        for (std::size_t i = 0; i < n; ++i) {
            const auto &sc = s.similarity_classes[i];
            const bool all_in = std::ranges::all_of(sc, [&](std::size_t j) { return s.labels[j] == y; });
            const bool any_in = std::ranges::any_of(sc, [&](std::size_t j) { return s.labels[j] == y; });
            if (all_in) {
                rs.positive.push_back(i);
            } else if (any_in) {
                rs.boundary.push_back(i);
            } else {
                rs.negative.push_back(i);
            }
        }
    }
    return s;
}

memberships region_memberships(const similarity_structure &s, std::size_t instance, std::size_t cls) {
    if (cls >= s.regions.size()) {
        throw parameter_error("unknown class index");
    }
    if (instance >= s.size) {
        throw parameter_error("instance index out of range");
    }
    const auto &sc = s.similarity_classes[instance];
    auto degree = [&](const std::vector<std::size_t> &reg) {
        if (reg.empty()) {
            return 0.0;
        }
        std::size_t common = 0;
        auto it = reg.begin();
        for (const std::size_t j : sc) {
            it = std::lower_bound(it, reg.end(), j);
            if (it == reg.end()) {
                break;
            }
            if (*it == j) {
                ++common;
            }
        }
        return static_cast<double>(common) / static_cast<double>(reg.size());
    };
    const auto &rs = s.regions[cls];
    return memberships{ degree(rs.positive), degree(rs.boundary), degree(rs.negative) };
}

std::string regions_to_json(const similarity_structure &s, std::span<const std::string> classes) {
    using detail::json;
    json doc;
    doc["format"] = "slgb-regions";
    doc["version"] = 1;
    doc["size"] = s.size;
    std::vector<std::size_t> sizes;
    for (const auto &sc : s.similarity_classes) {
        sizes.push_back(sc.size());
    }
    doc["similarity_class_sizes"] = sizes;
    json per_class = json::array();
    for (std::size_t y = 0; y < s.regions.size(); ++y) {
        json c;
        c["class"] = y < classes.size() ? classes[y] : std::to_string(y);
        c["positive"] = s.regions[y].positive;
        c["boundary"] = s.regions[y].boundary;
        c["negative"] = s.regions[y].negative;
        per_class.push_back(std::move(c));
    }
    doc["regions"] = std::move(per_class);
    return doc.dump(2);
}

}  // namespace slgb
