#include "slgb/dataset.hpp"
#include "slgb/error.hpp"
#include "slgb/experiment.hpp"
#include "slgb/pipeline.hpp"
#include "slgb/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct common_options {
    std::string out;
    std::uint64_t seed{ 1 };
    std::size_t threads{ 1 };
    std::string class_column;
    double alpha{ 0.6 };
    double lambda{ 0.1 };
    double eta{ 30.0 };
    double nu{ 0.5 };
    double epsilon{ 0.98 };
    std::size_t trees{ 100 };
    std::vector<double> ratios{ 0.1, 0.2, 0.3, 0.4 };
    std::size_t folds{ 10 };
    std::vector<std::string> configs{ "rf-part-rst" };
};

slgb::experiment_config to_experiment(const common_options &o, std::vector<std::string> datasets) {
    slgb::experiment_config cfg;
    cfg.datasets = std::move(datasets);
    cfg.ratios = o.ratios;
    cfg.folds = o.folds;
    cfg.configs = o.configs;
    cfg.simplicity.slope = o.lambda;
    cfg.simplicity.shift = o.eta;
    cfg.simplicity.growth = o.nu;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.epsilon = o.epsilon;
    cfg.n_trees = o.trees;
    cfg.threads = o.threads;
    cfg.out_dir = o.out;
    if (!o.class_column.empty()) {
        cfg.class_column = o.class_column;
    }
    return cfg;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw slgb::error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_summary(const slgb::experiment_report &report) {
    if (report.grid) {
        std::printf("%-16s %8s %8s %8s %8s\n", "config", "labeled", "unlab.", "kappa", "rules");
        for (const auto &r : report.summary) {
            std::printf("%-16s %8.3f %8.3f %8.4f %8.2f\n", r.config.c_str(), r.labeled_frac, r.unlabeled_frac,
                        r.kappa_mean, r.rules_mean);
        }
    } else {
        std::printf("%-16s %6s %8s %8s %10s %10s %8s\n", "config", "ratio", "kappa", "rules", "wb kappa", "wb rules",
                    "utility");
        for (const auto &r : report.summary) {
            std::printf("%-16s %6.2f %8.4f %8.2f %10.4f %10.2f %8.4f\n", r.config.c_str(), r.ratio, r.kappa_mean,
                        r.rules_median, r.baseline_kappa_mean, r.baseline_rules_median, r.utility_mean);
        }
    }
    std::size_t failed = 0;
    for (const auto &c : report.cells) {
        failed += c.ok ? 0 : 1;
    }
    if (failed > 0) {
        std::fprintf(stderr, "%zu of %zu cells failed; see cells.csv\n", failed, report.cells.size());
    }
    for (const auto &w : report.warnings) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
}

// Rows to explain usually carry no class column, and the loader would then take their last attribute as the
// class. In that case the CSV is read again with a placeholder class column, which conform() drops.
slgb::dataset load_rows_to_explain(const std::string &path, const slgb::load_options &load,
                                   const slgb::slgb_model &model) {
    auto d = slgb::load_dataset_file(path, load);
    const auto &schema = model.surrogate.schema;
    const bool class_is_attribute =
        !load.class_column &&
        std::any_of(schema.begin(), schema.end(), [&](const auto &a) { return a.name == d.class_name; });
    if (!class_is_attribute || slgb::format_from_path(path) != slgb::data_format::csv) {
        return d;
    }
    constexpr const char *placeholder = "__class__";
    const auto &classes = model.surrogate.classes;
    std::ifstream in(path);
    std::string text;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        // Cycling through the model's classes keeps the placeholder column a valid class domain.
        text += line + ',' + (row == 0 ? std::string{ placeholder } : classes[row % classes.size()]) + '\n';
        ++row;
    }
    std::istringstream reread(text);
    slgb::load_options opts;
    opts.class_column = placeholder;
    return slgb::load_dataset(reread, slgb::data_format::csv, opts);
}

// Re-express `d` in the attribute order and nominal coding of `schema`, matching columns by name.
slgb::dataset conform(const slgb::dataset &d, const std::vector<slgb::attribute_schema> &schema,
                      const std::vector<std::string> &classes) {
    slgb::dataset out;
    out.schema = schema;
    out.classes = classes;
    std::vector<std::size_t> source(schema.size());
    for (std::size_t t = 0; t < schema.size(); ++t) {
        bool found = false;
        for (std::size_t s = 0; s < d.schema.size(); ++s) {
            if (d.schema[s].name == schema[t].name) {
                source[t] = s;
                found = true;
                break;
            }
        }
        if (!found) {
            throw slgb::configuration_error("input lacks attribute '" + schema[t].name + "'");
        }
    }
    for (const auto &inst : d.instances) {
        slgb::instance x;
        for (std::size_t t = 0; t < schema.size(); ++t) {
            const auto &src_attr = d.schema[source[t]];
            const double v = inst.values[source[t]];
            if (slgb::is_missing(v) || schema[t].is_numeric()) {
                x.values.push_back(src_attr.is_numeric() || slgb::is_missing(v) ? v : slgb::missing_value);
                continue;
            }
            const auto text = src_attr.is_nominal() ? src_attr.values[static_cast<std::size_t>(v)] : std::to_string(v);
            const auto idx = schema[t].value_index(text);
            x.values.push_back(idx ? static_cast<double>(*idx) : slgb::missing_value);
        }
        if (inst.label) {
            for (std::size_t c = 0; c < classes.size(); ++c) {
                if (classes[c] == d.classes[*inst.label]) {
                    x.label = c;
                }
            }
        }
        out.instances.push_back(std::move(x));
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Self-labeling grey-box classifier: experiments, statistics and explanations" };
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file", false);
    app.fallthrough();

    common_options o;
    app.add_option("--out", o.out, "Output directory (run, grid) or file (stats, fit)");
    app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--class-column", o.class_column, "Class column name (default: last column)");
    app.add_option("--alpha", o.alpha, "Weight of kappa in the utility score")->capture_default_str();
    app.add_option("--simplicity-lambda", o.lambda, "Slope of the simplicity curve")->capture_default_str();
    app.add_option("--simplicity-eta", o.eta, "Rule count at the simplicity midpoint")->capture_default_str();
    app.add_option("--simplicity-nu", o.nu, "Growth exponent of the simplicity curve")->capture_default_str();
    app.add_option("--epsilon", o.epsilon, "Similarity threshold for RST amending")->capture_default_str();
    app.add_option("--trees", o.trees, "Random forest size")->capture_default_str();
    app.add_option("--ratios", o.ratios, "Labeled ratios")->delimiter(',')->capture_default_str();
    app.add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--configs", o.configs, "Configurations such as rf-part-rst")
        ->delimiter(',')
        ->capture_default_str();

    auto *run = app.add_subcommand("run", "Ratio sweep with cross-validation");
    std::vector<std::string> run_data;
    run->add_option("datasets", run_data, "CSV/ARFF paths or synth:<name> (synth:suite for all)")->required();

    auto *grid = app.add_subcommand("grid", "Labeled x unlabeled fraction study");
    std::vector<std::string> grid_data;
    std::vector<double> fracs{ 0.05, 0.1, 0.2, 0.4, 1.0 };
    std::size_t repeats = 3;
    grid->add_option("datasets", grid_data, "CSV/ARFF paths or synth:<name>")->required();
    grid->add_option("--fracs", fracs, "Fractions of each pool")->delimiter(',')->capture_default_str();
    grid->add_option("--repeats", repeats, "Splits per grid cell")->capture_default_str();

    auto *stats = app.add_subcommand("stats", "Friedman, Wilcoxon and Holm on a score CSV");
    std::string scores_path;
    std::string control;
    stats->add_option("scores", scores_path, "CSV: name column then one column per configuration")
        ->required()
        ->check(CLI::ExistingFile);
    stats->add_option("--control", control, "Control column (default: best average rank)");

    auto *fitcmd = app.add_subcommand("fit", "Train a grey box on a CSV whose unlabeled rows carry '?'");
    std::string fit_data;
    std::string fit_config = "rf-part-rst";
    fitcmd->add_option("data", fit_data, "Training data")->required()->check(CLI::ExistingFile);
    fitcmd->add_option("--model-config", fit_config, "Configuration name")->capture_default_str();

    auto *explaincmd = app.add_subcommand("explain", "Classify rows with a saved model and show the deciding rule");
    std::string model_path;
    std::string explain_data;
    explaincmd->add_option("model", model_path, "Model bundle written by fit")->required()->check(CLI::ExistingFile);
    explaincmd->add_option("data", explain_data, "Rows to classify")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        slgb::load_options load;
        if (!o.class_column.empty()) {
            load.class_column = o.class_column;
        }
        if (*run) {
            const auto report = slgb::run_experiment(to_experiment(o, run_data));
            print_summary(report);
        } else if (*grid) {
            auto cfg = to_experiment(o, grid_data);
            cfg.grid_repeats = repeats;
            const auto report = slgb::run_grid(cfg, fracs);
            print_summary(report);
        } else if (*stats) {
            std::ifstream in(scores_path);
            const auto m = slgb::read_score_matrix(in);
            std::optional<std::size_t> ctrl;
            if (!control.empty()) {
                for (std::size_t j = 0; j < m.columns(); ++j) {
                    if (m.column_names[j] == control) {
                        ctrl = j;
                    }
                }
                if (!ctrl) {
                    throw slgb::parameter_error("unknown control column '" + control + "'");
                }
            }
            const auto battery = slgb::run_test_battery(m, ctrl);
            std::printf("friedman statistic %.6g, p %.6g\n", battery.friedman.statistic, battery.friedman.p_value);
            std::fputs(slgb::battery_to_csv(battery).c_str(), stdout);
            if (!o.out.empty()) {
                std::ofstream(o.out) << slgb::battery_to_json(battery, m);
            }
        } else if (*fitcmd) {
            const auto d = slgb::load_dataset_file(fit_data, load);
            std::vector<std::size_t> lab;
            std::vector<std::size_t> unl;
            for (std::size_t r = 0; r < d.size(); ++r) {
                (d.instances[r].label ? lab : unl).push_back(r);
            }
            slgb::slgb_config base;
            base.seed = o.seed;
            base.epsilon = o.epsilon;
            base.forest.n_trees = o.trees;
            base.forest.threads = o.threads;
            const auto config = slgb::parse_config_name(fit_config, base);
            const auto model = slgb::fit(d.subset(lab), d.subset(unl), config);
            std::fputs(slgb::render_text(model.surrogate).c_str(), stdout);
            for (const auto &w : model.report.warnings) {
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            }
            const auto json = slgb::model_to_json(model);
            if (o.out.empty()) {
                std::fputs(json.c_str(), stdout);
                std::fputc('\n', stdout);
            } else {
                std::ofstream(o.out) << json << '\n';
            }
        } else if (*explaincmd) {
            const auto model = slgb::model_from_json(read_file(model_path));
            const auto raw = load_rows_to_explain(explain_data, load, model);
            const auto rows = conform(raw, model.surrogate.schema, model.surrogate.classes);
            std::printf("row,predicted,rule,default,explanation\n");
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto e = slgb::explain(model, rows.instances[r]);
                std::printf("%zu,%s,%s,%s,\"%s\"\n", r, model.surrogate.classes[e.predicted].c_str(),
                            e.rule_index ? std::to_string(*e.rule_index).c_str() : "",
                            e.is_default ? "yes" : "no", e.text.c_str());
            }
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
