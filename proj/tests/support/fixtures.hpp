#pragma once

#include "slgb/dataset.hpp"
#include "slgb/random.hpp"

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

namespace slgb::fx {

inline attribute_schema numeric(std::string name) {
    attribute_schema a;
    a.name = std::move(name);
    a.kind = attribute_kind::numeric;
    return a;
}

inline attribute_schema nominal(std::string name, std::vector<std::string> values) {
    attribute_schema a;
    a.name = std::move(name);
    a.kind = attribute_kind::nominal;
    a.values = std::move(values);
    return a;
}

inline dataset make_dataset(std::vector<attribute_schema> schema, std::vector<std::string> classes,
                            const std::vector<std::vector<double>> &rows, const std::vector<std::size_t> &labels) {
    dataset d;
    d.schema = std::move(schema);
    d.classes = std::move(classes);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        instance x;
        x.values = rows[r];
        x.label = labels[r];
        d.instances.push_back(std::move(x));
    }
    refresh_ranges(d);
    return d;
}

inline dataset parse_csv(const std::string &text, const load_options &options = {}) {
    std::istringstream in(text);
    return load_dataset(in, data_format::csv, options);
}

/// Two Gaussian clusters in the plane, `per_class` rows each, classes interleaved.
inline dataset two_blobs(std::size_t per_class, double distance, std::uint64_t seed, double spread = 1.0) {
    rng gen{ seed };
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const std::size_t y = i % 2;
        const double c = y == 0 ? 0.0 : distance;
        rows.push_back({ c + spread * gen.normal(), c + spread * gen.normal() });
        labels.push_back(y);
    }
    return make_dataset({ numeric("x"), numeric("y") }, { "A", "B" }, rows, labels);
}

struct random_universe {
    dataset data;
    std::vector<double> attribute_weights;
    double epsilon{ 0.9 };
};

/// Small labeled universe with mixed attributes, clustered values and a few missing cells.
inline random_universe make_random_universe(std::uint64_t seed, std::size_t max_rows = 30) {
    rng gen{ seed };
    random_universe u;
    const std::size_t n = 5 + gen.index(max_rows - 4);
    const std::size_t k = 2 + gen.index(2);
    const std::size_t p = 2 + gen.index(3);
    for (std::size_t c = 0; c < k; ++c) {
        u.data.classes.push_back("c" + std::to_string(c));
    }
    std::vector<std::vector<double>> centres(p);
    for (std::size_t t = 0; t < p; ++t) {
        if (gen.uniform() < 0.4) {
            const std::size_t m = 2 + gen.index(2);
            std::vector<std::string> values;
            for (std::size_t v = 0; v < m; ++v) {
                values.push_back("v" + std::to_string(v));
            }
            u.data.schema.push_back(nominal("n" + std::to_string(t), values));
        } else {
            u.data.schema.push_back(numeric("x" + std::to_string(t)));
            centres[t] = { gen.uniform(), gen.uniform(), gen.uniform() };
        }
        u.attribute_weights.push_back(gen.uniform() < 0.15 ? 0.0 : gen.uniform(0.1, 1.0));
    }
    u.attribute_weights[gen.index(p)] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        instance x;
        for (std::size_t t = 0; t < p; ++t) {
            double v = 0.0;
            if (u.data.schema[t].is_nominal()) {
                v = static_cast<double>(gen.index(u.data.schema[t].values.size()));
            } else {
                v = centres[t][gen.index(3)] + 0.03 * gen.normal();
            }
            x.values.push_back(gen.uniform() < 0.04 ? missing_value : v);
        }
        x.label = gen.index(k);
        u.data.instances.push_back(std::move(x));
    }
    refresh_ranges(u.data);
    u.epsilon = gen.uniform(0.55, 0.97);
    return u;
}

inline std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

inline dataset without_labels(dataset d) {
    for (auto &x : d.instances) {
        x.label.reset();
    }
    return d;
}

}  // namespace slgb::fx
