#include "slgb/synthetic.hpp"

#include "slgb/error.hpp"
#include "slgb/random.hpp"

#include <cmath>
#include <numbers>

namespace slgb {

namespace {

std::vector<std::string> class_names(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < k; ++c) {
        out.push_back("c" + std::to_string(c));
    }
    return out;
}

attribute_schema numeric_attr(std::string name) {
    attribute_schema a;
    a.name = std::move(name);
    a.kind = attribute_kind::numeric;
    return a;
}

attribute_schema nominal_attr(std::string name, std::vector<std::string> values) {
    attribute_schema a;
    a.name = std::move(name);
    a.kind = attribute_kind::nominal;
    a.values = std::move(values);
    return a;
}

std::size_t flip_label(std::size_t y, std::size_t k, double noise, rng &gen) {
    if (noise > 0.0 && gen.uniform() < noise) {
        const std::size_t other = static_cast<std::size_t>(gen.index(k - 1));
        return other >= y ? other + 1 : other;
    }
    return y;
}

// FNV-1a, stable across standard libraries unlike std::hash.
std::uint64_t name_hash(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

dataset finish(dataset d, std::string relation) {
    d.relation = std::move(relation);
    refresh_ranges(d);
    d.validate();
    return d;
}

}  // namespace

dataset make_blobs(const blobs_params &p, std::uint64_t seed) {
    if (p.classes < 2 || p.informative == 0 || p.rows < p.classes) {
        throw parameter_error("blobs need at least two classes, one attribute and one row per class");
    }
    rng gen{ seed };
    std::vector<std::vector<double>> centres(p.classes, std::vector<double>(p.informative));
    for (auto &c : centres) {
        for (double &v : c) {
            v = gen.uniform(-p.separation, p.separation);
        }
    }
    dataset d;
    d.classes = class_names(p.classes);
    for (std::size_t t = 0; t < p.informative; ++t) {
        d.schema.push_back(numeric_attr("x" + std::to_string(t)));
    }
    for (std::size_t t = 0; t < p.noise_attributes; ++t) {
        d.schema.push_back(numeric_attr("noise" + std::to_string(t)));
    }
    for (std::size_t r = 0; r < p.rows; ++r) {
        std::size_t y = 0;
        if (p.majority_share > 0.0) {
            y = gen.uniform() < p.majority_share ? 0 : 1 + static_cast<std::size_t>(gen.index(p.classes - 1));
        } else {
            y = r % p.classes;
        }
        instance inst;
        for (std::size_t t = 0; t < p.informative; ++t) {
            inst.values.push_back(centres[y][t] + p.spread * gen.normal());
        }
        for (std::size_t t = 0; t < p.noise_attributes; ++t) {
            inst.values.push_back(gen.normal());
        }
        inst.label = flip_label(y, p.classes, p.label_noise, gen);
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "blobs");
}

dataset make_checkerboard(std::size_t rows, std::size_t cells, double label_noise, std::uint64_t seed) {
    if (cells < 2) {
        throw parameter_error("a checkerboard needs at least 2 cells per side");
    }
    rng gen{ seed };
    dataset d;
    d.classes = class_names(2);
    d.schema = { numeric_attr("x"), numeric_attr("y") };
    for (std::size_t r = 0; r < rows; ++r) {
        const double x = gen.uniform();
        const double y = gen.uniform();
        const auto cx = static_cast<std::size_t>(x * static_cast<double>(cells));
        const auto cy = static_cast<std::size_t>(y * static_cast<double>(cells));
        instance inst;
        inst.values = { x, y };
        inst.label = flip_label((cx + cy) % 2, 2, label_noise, gen);
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "checkerboard");
}

dataset make_rings(std::size_t rows, std::size_t classes, double jitter, std::uint64_t seed) {
    if (classes < 2) {
        throw parameter_error("rings need at least two classes");
    }
    rng gen{ seed };
    dataset d;
    d.classes = class_names(classes);
    d.schema = { numeric_attr("x"), numeric_attr("y") };
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t y = r % classes;
        const double radius = 1.0 + static_cast<double>(y) + jitter * gen.normal();
        const double angle = gen.uniform(0.0, 2.0 * std::numbers::pi);
        instance inst;
        inst.values = { radius * std::cos(angle), radius * std::sin(angle) };
        inst.label = y;
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "rings");
}

dataset make_mixed(std::size_t rows, std::uint64_t seed) {
    rng gen{ seed };
    dataset d;
    d.classes = class_names(3);
    d.schema = { numeric_attr("x0"), numeric_attr("x1"), nominal_attr("colour", { "red", "green", "blue", "grey" }),
                 nominal_attr("shape", { "round", "square" }) };
    const std::vector<std::vector<double>> centres{ { 0.0, 0.0 }, { 2.5, 0.5 }, { 1.0, 2.5 } };
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t y = r % 3;
        instance inst;
        inst.values = { centres[y][0] + gen.normal(), centres[y][1] + gen.normal() };
        // The class colour is drawn 60% of the time, otherwise any colour.
        const double colour = gen.uniform() < 0.6 ? static_cast<double>(y) : static_cast<double>(gen.index(4));
        const double shape = gen.uniform() < (y == 2 ? 0.8 : 0.3) ? 0.0 : 1.0;
        inst.values.push_back(colour);
        inst.values.push_back(shape);
        inst.label = y;
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "mixed");
}

dataset make_nominal_rules(std::size_t rows, double label_noise, std::uint64_t seed) {
    rng gen{ seed };
    dataset d;
    d.classes = { "yes", "no" };
    const std::vector<std::string> abc{ "a", "b", "c" };
    for (std::size_t t = 0; t < 5; ++t) {
        d.schema.push_back(nominal_attr("n" + std::to_string(t), abc));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        instance inst;
        for (std::size_t t = 0; t < 5; ++t) {
            inst.values.push_back(static_cast<double>(gen.index(3)));
        }
        const bool yes = (inst.values[0] == 0.0 && inst.values[1] != 2.0) || inst.values[2] == 1.0;
        inst.label = flip_label(yes ? 0 : 1, 2, label_noise, gen);
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "nominal_rules");
}

dataset make_oblique(std::size_t rows, double label_noise, std::uint64_t seed) {
    rng gen{ seed };
    dataset d;
    d.classes = class_names(2);
    for (std::size_t t = 0; t < 4; ++t) {
        d.schema.push_back(numeric_attr("x" + std::to_string(t)));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        instance inst;
        for (std::size_t t = 0; t < 4; ++t) {
            inst.values.push_back(gen.uniform());
        }
        inst.label = flip_label(inst.values[0] + inst.values[1] > 1.0 ? 1 : 0, 2, label_noise, gen);
        d.instances.push_back(std::move(inst));
    }
    return finish(std::move(d), "oblique");
}

std::vector<std::string> synthetic_names() {
    return { "blobs2",  "blobs3_noise", "blobs4",   "xor",           "checker3",  "rings2",
             "rings3",  "mixed",        "blobs_noisy", "imbalanced", "oblique",   "nominal_rules" };
}

dataset make_synthetic(std::string_view name, std::uint64_t seed) {
    const std::uint64_t s = mix_seed(seed, name_hash(name));
    dataset d;
    if (name == "blobs2") {
        d = make_blobs({ .rows = 400, .classes = 2, .informative = 2, .spread = 1.2, .separation = 2.5 }, s);
    } else if (name == "blobs3_noise") {
        d = make_blobs({ .rows = 450, .classes = 3, .informative = 3, .noise_attributes = 2, .spread = 1.2 }, s);
    } else if (name == "blobs4") {
        d = make_blobs({ .rows = 500, .classes = 4, .informative = 2, .spread = 0.9, .separation = 4.0 }, s);
    } else if (name == "xor") {
        d = make_checkerboard(400, 2, 0.0, s);
    } else if (name == "checker3") {
        d = make_checkerboard(540, 3, 0.0, s);
    } else if (name == "rings2") {
        d = make_rings(400, 2, 0.15, s);
    } else if (name == "rings3") {
        d = make_rings(450, 3, 0.15, s);
    } else if (name == "mixed") {
        d = make_mixed(450, s);
    } else if (name == "blobs_noisy") {
        d = make_blobs({ .rows = 500, .classes = 3, .informative = 2, .spread = 1.0, .label_noise = 0.1 }, s);
    } else if (name == "imbalanced") {
        d = make_blobs({ .rows = 400, .classes = 2, .informative = 3, .spread = 1.2, .majority_share = 0.8 }, s);
    } else if (name == "oblique") {
        d = make_oblique(500, 0.03, s);
    } else if (name == "nominal_rules") {
        d = make_nominal_rules(600, 0.05, s);
    } else {
        throw parameter_error("unknown synthetic dataset '" + std::string{ name } + "'");
    }
    d.relation = std::string{ name };
    return d;
}

std::vector<dataset> synthetic_suite(std::uint64_t seed) {
    std::vector<dataset> out;
    for (const auto &name : synthetic_names()) {
        out.push_back(make_synthetic(name, seed));
    }
    return out;
}

}  // namespace slgb
