#include "slgb/amending.hpp"

#include "slgb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slgb {

std::string_view to_string(amending_kind kind) noexcept {
    switch (kind) {
    case amending_kind::none:
        return "none";
    case amending_kind::conf:
        return "conf";
    case amending_kind::rst:
        return "rst";
    }
    return "none";
}

std::optional<amending_kind> amending_from_string(std::string_view name) noexcept {
    for (const auto k : { amending_kind::none, amending_kind::conf, amending_kind::rst }) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::vector<double> balance_weights(const dataset &labeled) {
    const auto labels = labels_of(labeled);
    const auto counts = labeled.class_counts();
    std::size_t minority = std::numeric_limits<std::size_t>::max();
    for (const std::size_t c : counts) {
        if (c > 0) {
            minority = std::min(minority, c);
        }
    }
    std::vector<double> w;
    w.reserve(labels.size());
    for (const std::size_t y : labels) {
        w.push_back(static_cast<double>(minority) / static_cast<double>(counts[y]));
    }
    return w;
}

self_labels conf_weights(const trained_forest &forest, const dataset &unlabeled) {
    self_labels out;
    out.labels.reserve(unlabeled.size());
    out.weights.reserve(unlabeled.size());
    for (const auto &inst : unlabeled.instances) {
        const auto proba = predict_proba(forest, inst);
        const std::size_t y = argmax_first(proba);
        out.labels.push_back(y);
        out.weights.push_back(proba[y]);
    }
    return out;
}

double rst_weight(const memberships &m) noexcept {
    const double z = m.positive + 0.5 * m.boundary - m.negative;
    return 1.0 / (1.0 + std::exp(-z));
}

rst_result rst_weights(const dataset &enlarged, const rst_options &options) {
    if (enlarged.empty()) {
        throw configuration_error("cannot compute RST weights of an empty dataset");
    }
    if (!enlarged.fully_labeled()) {
        throw configuration_error("RST weights need a fully labeled enlarged set");
    }
    rst_result out;
    out.attribute_weights = options.attribute_weights;
    if (out.attribute_weights.empty()) {
        out.attribute_weights = attribute_information_gain(enlarged);
        const bool all_zero =
            std::ranges::all_of(out.attribute_weights, [](double w) { return !(w > 1e-12); });
        if (all_zero) {
            out.attribute_weights.assign(enlarged.num_attributes(), 1.0);
            out.uniform_fallback = true;
        }
    }
    const heom_params params{ out.attribute_weights, options.epsilon };
    const dataset normalized = normalize_numeric(enlarged);
    const auto structure = build_similarity_structure(normalized, params, options.threads);
    out.weights.reserve(enlarged.size());
    for (std::size_t i = 0; i < enlarged.size(); ++i) {
        out.weights.push_back(rst_weight(region_memberships(structure, i, structure.labels[i])));
    }
    return out;
}

amending_result apply_amending(amending_kind kind, const dataset &labeled, const dataset &unlabeled,
                               const trained_forest &forest, const amending_options &options) {
    if (labeled.empty()) {
        throw configuration_error("labeled set must not be empty");
    }
    if (!labeled.same_schema(unlabeled)) {
        throw configuration_error("labeled and unlabeled sets have different schemas");
    }
    amending_result out;
    auto &e = out.enlarged;
    e.data = labeled;
    e.weights = balance_weights(labeled);
    e.origin.assign(labeled.size(), provenance::originally_labeled);

    const auto self = conf_weights(forest, unlabeled);
    for (std::size_t k = 0; k < unlabeled.size(); ++k) {
        instance inst = unlabeled.instances[k];
        inst.label = self.labels[k];
        e.data.instances.push_back(std::move(inst));
        e.weights.push_back(kind == amending_kind::conf ? self.weights[k] : 1.0);
        e.origin.push_back(provenance::self_labeled);
    }

    if (kind == amending_kind::rst) {
        auto rst = rst_weights(e.data, options.rst);
        if (options.rst_multiply_balance) {
            for (std::size_t i = 0; i < labeled.size(); ++i) {
                rst.weights[i] *= e.weights[i];
            }
        }
        e.weights = std::move(rst.weights);
        out.attribute_weights = std::move(rst.attribute_weights);
        out.uniform_fallback = rst.uniform_fallback;
    }
    return out;
}

}  // namespace slgb
