#include "slgb/rules.hpp"

#include "json_io.hpp"
#include "slgb/error.hpp"

#include <cstdio>

namespace slgb {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string_view op_symbol(condition_op op) {
    switch (op) {
    case condition_op::less_equal:
        return "<=";
    case condition_op::greater:
        return ">";
    case condition_op::equal:
        return "=";
    }
    return "?";
}

condition_op op_from_symbol(const std::string &s) {
    if (s == "<=") {
        return condition_op::less_equal;
    }
    if (s == ">") {
        return condition_op::greater;
    }
    if (s == "=") {
        return condition_op::equal;
    }
    throw error("unknown condition operator '" + s + "'");
}

rule_model_kind kind_from_string(const std::string &s) {
    for (const auto k : { rule_model_kind::tree, rule_model_kind::part_list, rule_model_kind::ripper_list }) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw error("unknown rule model kind '" + s + "'");
}

}  // namespace

bool condition::matches(const instance &x) const noexcept {
    if (attribute >= x.values.size()) {
        return false;
    }
    const double v = x.values[attribute];
    if (is_missing(v)) {
        return false;
    }
    switch (op) {
    case condition_op::less_equal:
        return v <= value;
    case condition_op::greater:
        return v > value;
    case condition_op::equal:
        return v == value;
    }
    return false;
}

bool rule::covers(const instance &x) const noexcept {
    for (const auto &c : conditions) {
        if (!c.matches(x)) {
            return false;
        }
    }
    return true;
}

std::string_view to_string(rule_model_kind kind) noexcept {
    switch (kind) {
    case rule_model_kind::tree:
        return "tree";
    case rule_model_kind::part_list:
        return "part";
    case rule_model_kind::ripper_list:
        return "ripper";
    }
    return "unknown";
}

std::optional<std::size_t> rule_model::firing_rule(const instance &x) const {
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].covers(x)) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t predict_rules(const rule_model &model, const instance &x) {
    if (x.values.size() != model.schema.size()) {
        throw configuration_error("instance arity does not match the model schema");
    }
    const auto fired = model.firing_rule(x);
    return fired ? model.rules[*fired].consequent : model.default_class;
}

std::size_t count_rules(const rule_model &model) { return model.rules.size(); }

std::string render_condition(const rule_model &model, const condition &c) {
    const auto &attr = model.schema.at(c.attribute);
    std::string out = attr.name;
    out += ' ';
    out += op_symbol(c.op);
    out += ' ';
    if (c.op == condition_op::equal && attr.is_nominal()) {
        out += attr.values.at(static_cast<std::size_t>(c.value));
    } else {
        out += format_number(c.value);
    }
    return out;
}

std::string render_rule(const rule_model &model, const rule &r) {
    std::string out;
    if (r.is_default()) {
        out = "OTHERWISE";
    } else {
        out = "IF ";
        for (std::size_t i = 0; i < r.conditions.size(); ++i) {
            if (i > 0) {
                out += " AND ";
            }
            out += render_condition(model, r.conditions[i]);
        }
        out += " THEN";
    }
    char tail[96];
    std::snprintf(tail, sizeof tail, " (coverage %.2f, confidence %.3f)", r.coverage, r.confidence);
    return out + ' ' + model.classes.at(r.consequent) + tail;
}

std::string render_text(const rule_model &model) {
    std::string out;
    for (const auto &r : model.rules) {
        out += render_rule(model, r);
        out += '\n';
    }
    return out;
}

std::string rule_model_to_json(const rule_model &model) {
    using detail::json;
    json doc;
    doc["format"] = "slgb-rules";
    doc["version"] = 1;
    doc["kind"] = std::string{ to_string(model.kind) };
    doc["classes"] = model.classes;
    doc["default_class"] = model.default_class;
    doc["schema"] = detail::schema_to_json(model.schema);
    json rules = json::array();
    for (const auto &r : model.rules) {
        json jr;
        json conds = json::array();
        for (const auto &c : r.conditions) {
            conds.push_back(json{ { "attribute", c.attribute },
                                  { "op", std::string{ op_symbol(c.op) } },
                                  { "value", c.value } });
        }
        jr["conditions"] = std::move(conds);
        jr["consequent"] = r.consequent;
        jr["coverage"] = r.coverage;
        jr["confidence"] = r.confidence;
        rules.push_back(std::move(jr));
    }
    doc["rules"] = std::move(rules);
    return doc.dump(2);
}

rule_model rule_model_from_json(std::string_view text) {
    const auto doc = detail::parse_document(text, "slgb-rules", 1);
    rule_model model;
    try {
        model.kind = kind_from_string(doc.at("kind").get<std::string>());
        model.classes = doc.at("classes").get<std::vector<std::string>>();
        model.default_class = doc.at("default_class").get<std::size_t>();
        model.schema = detail::schema_from_json(doc.at("schema"));
        for (const auto &jr : doc.at("rules")) {
            rule r;
            for (const auto &jc : jr.at("conditions")) {
                r.conditions.push_back(condition{ jc.at("attribute").get<std::size_t>(),
                                                  op_from_symbol(jc.at("op").get<std::string>()),
                                                  jc.at("value").get<double>() });
            }
            r.consequent = jr.at("consequent").get<std::size_t>();
            r.coverage = jr.value("coverage", 0.0);
            r.confidence = jr.value("confidence", 0.0);
            model.rules.push_back(std::move(r));
        }
    } catch (const detail::json::exception &e) {
        throw error(std::string{ "malformed rule model document: " } + e.what());
    }
    if (model.default_class >= model.classes.size()) {
        throw error("rule model default class out of range");
    }
    for (const auto &r : model.rules) {
        if (r.consequent >= model.classes.size()) {
            throw error("rule consequent out of range");
        }
        for (const auto &c : r.conditions) {
            if (c.attribute >= model.schema.size()) {
                throw error("rule condition refers to an unknown attribute");
            }
        }
    }
    return model;
}

}  // namespace slgb
