#include "slgb/experiment.hpp"

#include "json_io.hpp"
#include "slgb/error.hpp"
#include "slgb/random.hpp"
#include "slgb/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

namespace slgb {

namespace {

std::uint64_t name_hash(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fixed(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string short_fixed(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + '"';
}

double mean_of(const std::vector<double> &v) {
    if (v.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const double x : v) {
        acc += x;
    }
    return acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double acc = 0.0;
    for (const double x : v) {
        acc += (x - m) * (x - m);
    }
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::ranges::sort(v);
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

double score_kappa(const rule_model &model, const dataset &data, std::span<const std::size_t> truth,
                   double *accuracy_out) {
    std::vector<std::size_t> predicted;
    predicted.reserve(data.size());
    for (const auto &inst : data.instances) {
        predicted.push_back(predict_rules(model, inst));
    }
    const auto cm = confusion_matrix::from_predictions(truth, predicted, data.num_classes());
    if (accuracy_out != nullptr) {
        *accuracy_out = accuracy(cm);
    }
    return kappa(cm);
}

struct split_job {
    std::size_t dataset_index{ 0 };
    double ratio{ 0.0 };
    /// Fold index, or repeat index in grid studies.
    std::size_t fold{ 0 };
    double labeled_frac{ 0.0 };
    double unlabeled_frac{ 0.0 };
    std::uint64_t seed{ 0 };
    /// First slot of this job's cells in the result vector.
    std::size_t first_cell{ 0 };
};

struct loaded {
    std::string name;
    std::optional<dataset> data;
    std::string failure;
};

slgb_config base_config(const experiment_config &cfg, const std::string &name, std::uint64_t seed) {
    slgb_config base;
    base.forest.n_trees = cfg.n_trees;
    base.epsilon = cfg.epsilon;
    base.seed = seed;
    return parse_config_name(name, base);
}

// Evaluate every configured grey box and its labeled-only baseline on one split.
void evaluate_split(const experiment_config &cfg, const semi_supervised_split &split,
                    const split_job &job, std::vector<cell_result> &cells) {
    const std::array<const dataset *, 2> parts{ &split.labeled, &split.unlabeled };
    const auto imputer = mean_imputer::fit(parts);
    const dataset labeled = imputer.apply(split.labeled);
    const dataset unlabeled = imputer.apply(split.unlabeled);
    const dataset test = imputer.apply(split.test);
    const auto test_truth = labels_of(test);
    const auto labeled_weights = balance_weights(labeled);

    std::map<whitebox_kind, std::tuple<double, double, std::size_t>> baselines;
    for (std::size_t c = 0; c < cfg.configs.size(); ++c) {
        cell_result &cell = cells[job.first_cell + c];
        try {
            const auto config = base_config(cfg, cfg.configs[c], job.seed);
            cell.labeled = labeled.size();
            cell.unlabeled = unlabeled.size();
            cell.test = test.size();
            if (test.empty()) {
                throw configuration_error("test partition is empty");
            }
            auto it = baselines.find(config.whitebox);
            if (it == baselines.end()) {
                const auto baseline = train_whitebox(labeled, labeled_weights, config);
                double acc = 0.0;
                const double k = score_kappa(baseline, test, test_truth, &acc);
                it = baselines.emplace(config.whitebox, std::tuple{ k, acc, count_rules(baseline) }).first;
            }
            std::tie(cell.baseline_kappa, cell.baseline_accuracy, cell.baseline_rules) = it->second;

            const auto model = fit(labeled, unlabeled, config);
            cell.kappa = score_kappa(model.surrogate, test, test_truth, &cell.accuracy);
            cell.rules = count_rules(model.surrogate);
            cell.growth = relative_growth(cell.rules, cell.baseline_rules);
            cell.simplicity = simplicity(static_cast<double>(cell.rules), cfg.simplicity);
            cell.utility = utility(cell.kappa, cell.simplicity, cfg.alpha);
            if (!unlabeled.empty()) {
                cell.transductive_kappa = score_kappa(model.surrogate, unlabeled, split.hidden_labels, nullptr);
            }
            cell.ok = true;
            if (!model.report.warnings.empty()) {
                cell.message = model.report.warnings.front();
            }
        } catch (const std::exception &e) {
            cell.ok = false;
            cell.message = e.what();
        }
    }
}

void init_cells(const experiment_config &cfg, const std::string &name, const split_job &job,
                std::vector<cell_result> &cells) {
    for (std::size_t c = 0; c < cfg.configs.size(); ++c) {
        cell_result cell;
        cell.dataset = name;
        cell.config = cfg.configs[c];
        cell.ratio = job.ratio;
        cell.fold = job.fold;
        cell.labeled_frac = job.labeled_frac;
        cell.unlabeled_frac = job.unlabeled_frac;
        cell.seed = job.seed;
        cells.push_back(std::move(cell));
    }
}

void fail_cells(const split_job &job, std::size_t count, const std::string &why, std::vector<cell_result> &cells) {
    for (std::size_t c = 0; c < count; ++c) {
        cells[job.first_cell + c].ok = false;
        cells[job.first_cell + c].message = why;
    }
}

std::vector<loaded> load_all(const experiment_config &cfg) {
    std::vector<loaded> out;
    for (const auto &spec : cfg.datasets) {
        try {
            for (auto &d : resolve_datasets(spec, cfg)) {
                std::string name = d.relation;
                out.push_back(loaded{ std::move(name), std::move(d), {} });
            }
        } catch (const std::exception &e) {
            out.push_back(loaded{ spec, std::nullopt, e.what() });
        }
    }
    return out;
}

template <typename Fn>
void run_jobs(std::size_t count, std::size_t threads, Fn &&fn) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                fn(i);
            }
        });
    }
}

std::string group_key(const cell_result &c, bool grid, bool with_dataset) {
    std::string key = with_dataset ? c.dataset + '\x1f' : std::string{};
    key += grid ? fixed(c.labeled_frac) + '\x1f' + fixed(c.unlabeled_frac) : fixed(c.ratio);
    return key + '\x1f' + c.config;
}

std::vector<aggregate_row> aggregate(const std::vector<cell_result> &cells, bool grid) {
    std::vector<aggregate_row> rows;
    std::vector<std::vector<const cell_result *>> members;
    std::map<std::string, std::size_t> index;
    for (const auto &c : cells) {
        const auto key = group_key(c, grid, true);
        auto [it, inserted] = index.emplace(key, rows.size());
        if (inserted) {
            aggregate_row r;
            r.dataset = c.dataset;
            r.config = c.config;
            r.ratio = c.ratio;
            r.labeled_frac = c.labeled_frac;
            r.unlabeled_frac = c.unlabeled_frac;
            rows.push_back(std::move(r));
            members.emplace_back();
        }
        members[it->second].push_back(&c);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto &r = rows[i];
        std::vector<double> kappa, acc, rules, bkappa, brules, growth, simp, util;
        for (const auto *c : members[i]) {
            ++r.cells;
            if (!c->ok) {
                ++r.failed;
                continue;
            }
            kappa.push_back(c->kappa);
            acc.push_back(c->accuracy);
            rules.push_back(static_cast<double>(c->rules));
            bkappa.push_back(c->baseline_kappa);
            brules.push_back(static_cast<double>(c->baseline_rules));
            growth.push_back(c->growth);
            simp.push_back(c->simplicity);
            util.push_back(c->utility);
        }
        r.kappa_mean = mean_of(kappa);
        r.kappa_sd = sd_of(kappa);
        r.accuracy_mean = mean_of(acc);
        r.rules_mean = mean_of(rules);
        r.rules_median = median_of(rules);
        r.baseline_kappa_mean = mean_of(bkappa);
        r.baseline_rules_median = median_of(brules);
        r.growth_mean = mean_of(growth);
        r.simplicity_mean = mean_of(simp);
        r.utility_mean = mean_of(util);
    }
    return rows;
}

std::vector<aggregate_row> summarize(const std::vector<aggregate_row> &rows, bool grid) {
    std::vector<aggregate_row> out;
    std::vector<std::vector<const aggregate_row *>> members;
    std::map<std::string, std::size_t> index;
    for (const auto &r : rows) {
        if (r.failed == r.cells) {
            continue;
        }
        std::string key = grid ? fixed(r.labeled_frac) + '\x1f' + fixed(r.unlabeled_frac) : fixed(r.ratio);
        key += '\x1f' + r.config;
        auto [it, inserted] = index.emplace(key, out.size());
        if (inserted) {
            aggregate_row s;
            s.dataset = "*";
            s.config = r.config;
            s.ratio = r.ratio;
            s.labeled_frac = r.labeled_frac;
            s.unlabeled_frac = r.unlabeled_frac;
            out.push_back(std::move(s));
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto &s = out[i];
        std::vector<double> kappa, acc, rules, med, bkappa, bmed, growth, simp, util;
        for (const auto *r : members[i]) {
            s.cells += r->cells;
            s.failed += r->failed;
            kappa.push_back(r->kappa_mean);
            acc.push_back(r->accuracy_mean);
            rules.push_back(r->rules_mean);
            med.push_back(r->rules_median);
            bkappa.push_back(r->baseline_kappa_mean);
            bmed.push_back(r->baseline_rules_median);
            growth.push_back(r->growth_mean);
            simp.push_back(r->simplicity_mean);
            util.push_back(r->utility_mean);
        }
        s.kappa_mean = mean_of(kappa);
        s.kappa_sd = sd_of(kappa);
        s.accuracy_mean = mean_of(acc);
        s.rules_mean = mean_of(rules);
        s.rules_median = mean_of(med);
        s.baseline_kappa_mean = mean_of(bkappa);
        s.baseline_rules_median = mean_of(bmed);
        s.growth_mean = mean_of(growth);
        s.simplicity_mean = mean_of(simp);
        s.utility_mean = mean_of(util);
    }
    return out;
}

// Mean kappa per dataset for every config plus one labeled-only column per white box.
std::vector<ratio_stats> build_stats(const experiment_config &cfg, const std::vector<aggregate_row> &rows) {
    std::vector<ratio_stats> out;
    std::vector<std::string> columns = cfg.configs;
    for (const auto &name : cfg.configs) {
        const auto wb = std::string{ to_string(parse_config_name(name).whitebox) } + "-only";
        if (std::ranges::find(columns, wb) == columns.end()) {
            columns.push_back(wb);
        }
    }
    for (const double ratio : cfg.ratios) {
        ratio_stats rs;
        rs.ratio = ratio;
        rs.scores.column_names = columns;
        std::vector<std::string> datasets;
        for (const auto &r : rows) {
            if (std::ranges::find(datasets, r.dataset) == datasets.end()) {
                datasets.push_back(r.dataset);
            }
        }
        for (const auto &name : datasets) {
            std::vector<double> row(columns.size(), std::nan(""));
            for (const auto &r : rows) {
                if (r.dataset != name || fixed(r.ratio) != fixed(ratio) || r.failed > 0) {
                    continue;
                }
                const auto col = std::ranges::find(columns, r.config) - columns.begin();
                row[static_cast<std::size_t>(col)] = r.kappa_mean;
                const auto wb = std::string{ to_string(parse_config_name(r.config).whitebox) } + "-only";
                const auto bcol = std::ranges::find(columns, wb) - columns.begin();
                row[static_cast<std::size_t>(bcol)] = r.baseline_kappa_mean;
            }
            if (std::ranges::all_of(row, [](double v) { return std::isfinite(v); })) {
                rs.scores.row_names.push_back(name);
                rs.scores.scores.push_back(std::move(row));
            }
        }
        if (rs.scores.rows() >= 2 && rs.scores.columns() >= 2) {
            rs.battery = run_test_battery(rs.scores);
        }
        out.push_back(std::move(rs));
    }
    return out;
}

detail::json aggregate_to_json(const aggregate_row &r, bool grid) {
    detail::json j;
    j["dataset"] = r.dataset;
    j["config"] = r.config;
    if (grid) {
        j["labeled_frac"] = r.labeled_frac;
        j["unlabeled_frac"] = r.unlabeled_frac;
    } else {
        j["ratio"] = r.ratio;
    }
    j["cells"] = r.cells;
    j["failed"] = r.failed;
    j["kappa_mean"] = r.kappa_mean;
    j["kappa_sd"] = r.kappa_sd;
    j["accuracy_mean"] = r.accuracy_mean;
    j["rules_mean"] = r.rules_mean;
    j["rules_median"] = r.rules_median;
    j["baseline_kappa_mean"] = r.baseline_kappa_mean;
    j["baseline_rules_median"] = r.baseline_rules_median;
    j["growth_mean"] = r.growth_mean;
    j["simplicity_mean"] = r.simplicity_mean;
    j["utility_mean"] = r.utility_mean;
    return j;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void experiment_config::validate() const {
    if (datasets.empty()) {
        throw parameter_error("no datasets given");
    }
    for (const double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw parameter_error("ratios must lie in (0, 1)");
        }
    }
    if (folds < 2) {
        throw parameter_error("folds must be at least 2");
    }
    if (configs.empty()) {
        throw parameter_error("no configurations given");
    }
    for (const auto &c : configs) {
        (void)parse_config_name(c);
    }
    simplicity.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw parameter_error("alpha must lie in [0, 1]");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw parameter_error("epsilon must lie in (0, 1]");
    }
    if (n_trees == 0) {
        throw parameter_error("n_trees must be positive");
    }
    if (grid_repeats == 0) {
        throw parameter_error("grid_repeats must be positive");
    }
}

std::vector<dataset> resolve_datasets(const std::string &spec, const experiment_config &cfg) {
    constexpr std::string_view prefix = "synth:";
    if (spec.starts_with(prefix)) {
        const auto name = std::string_view{ spec }.substr(prefix.size());
        if (name == "suite") {
            return synthetic_suite(cfg.seed);
        }
        return { make_synthetic(name, cfg.seed) };
    }
    load_options opts;
    opts.class_column = cfg.class_column;
    auto d = load_dataset_file(spec, opts);
    d.relation = std::filesystem::path{ spec }.stem().string();
    if (!d.fully_labeled()) {
        throw configuration_error("dataset '" + spec + "' has unlabeled rows");
    }
    d.validate();
    return { std::move(d) };
}

experiment_report run_experiment(const experiment_config &cfg) {
    cfg.validate();
    experiment_report report;
    report.config = cfg;
    const auto data = load_all(cfg);

    std::vector<split_job> jobs;
    for (std::size_t d = 0; d < data.size(); ++d) {
        const std::uint64_t split_seed = mix_seed(cfg.seed, name_hash(data[d].name));
        for (const double ratio : cfg.ratios) {
            for (std::size_t fold = 0; fold < cfg.folds; ++fold) {
                split_job job;
                job.dataset_index = d;
                job.ratio = ratio;
                job.fold = fold;
                job.seed = split_seed;
                job.first_cell = report.cells.size();
                init_cells(cfg, data[d].name, job, report.cells);
                jobs.push_back(job);
            }
        }
    }
    std::vector<std::vector<std::string>> job_warnings(jobs.size());
    run_jobs(jobs.size(), cfg.threads, [&](std::size_t i) {
        const auto &job = jobs[i];
        const auto &src = data[job.dataset_index];
        if (!src.data) {
            fail_cells(job, cfg.configs.size(), src.failure, report.cells);
            return;
        }
        try {
            const auto split = make_split(*src.data, job.ratio, job.seed, job.fold, cfg.folds);
            for (const auto &w : split.warnings) {
                job_warnings[i].push_back(src.name + ": " + w);
            }
            split_job fit_job = job;
            fit_job.seed = mix_seed(job.seed, static_cast<std::uint64_t>(std::llround(job.ratio * 1000.0)), job.fold);
            for (std::size_t c = 0; c < cfg.configs.size(); ++c) {
                report.cells[job.first_cell + c].seed = fit_job.seed;
            }
            evaluate_split(cfg, split, fit_job, report.cells);
        } catch (const std::exception &e) {
            fail_cells(job, cfg.configs.size(), e.what(), report.cells);
        }
    });
    for (const auto &ws : job_warnings) {
        for (const auto &w : ws) {
            if (std::ranges::find(report.warnings, w) == report.warnings.end()) {
                report.warnings.push_back(w);
            }
        }
    }
    report.aggregates = aggregate(report.cells, false);
    report.summary = summarize(report.aggregates, false);
    report.stats = build_stats(cfg, report.aggregates);
    if (!cfg.out_dir.empty()) {
        write_report(report, cfg.out_dir);
    }
    return report;
}

experiment_report run_grid(const experiment_config &cfg, const std::vector<double> &fracs) {
    cfg.validate();
    if (fracs.empty()) {
        throw parameter_error("grid needs at least one fraction");
    }
    for (const double f : fracs) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw parameter_error("grid fractions must lie in [0, 1]");
        }
    }
    experiment_report report;
    report.config = cfg;
    report.grid = true;
    report.grid_fracs = fracs;
    const auto data = load_all(cfg);

    std::vector<split_job> jobs;
    for (std::size_t d = 0; d < data.size(); ++d) {
        for (const double lf : fracs) {
            for (const double uf : fracs) {
                for (std::size_t rep = 0; rep < cfg.grid_repeats; ++rep) {
                    split_job job;
                    job.dataset_index = d;
                    job.fold = rep;
                    job.labeled_frac = lf;
                    job.unlabeled_frac = uf;
                    // Same pools for every grid cell of a repeat.
                    job.seed = mix_seed(cfg.seed, name_hash(data[d].name), rep);
                    job.first_cell = report.cells.size();
                    init_cells(cfg, data[d].name, job, report.cells);
                    jobs.push_back(job);
                }
            }
        }
    }
    run_jobs(jobs.size(), cfg.threads, [&](std::size_t i) {
        const auto &job = jobs[i];
        const auto &src = data[job.dataset_index];
        if (!src.data) {
            fail_cells(job, cfg.configs.size(), src.failure, report.cells);
            return;
        }
        try {
            const auto split = make_grid_split(*src.data, job.labeled_frac, job.unlabeled_frac, job.seed);
            evaluate_split(cfg, split, job, report.cells);
        } catch (const std::exception &e) {
            fail_cells(job, cfg.configs.size(), e.what(), report.cells);
        }
    });
    report.aggregates = aggregate(report.cells, true);
    report.summary = summarize(report.aggregates, true);
    if (!cfg.out_dir.empty()) {
        write_report(report, cfg.out_dir);
    }
    return report;
}

std::string cells_to_csv(const experiment_report &report) {
    std::string out = report.grid ? "dataset,labeled_frac,unlabeled_frac,repeat" : "dataset,ratio,fold";
    out += ",config,seed,status,labeled,unlabeled,test,kappa,accuracy,rules,baseline_kappa,baseline_accuracy,"
           "baseline_rules,growth,simplicity,utility,transductive_kappa,message\n";
    for (const auto &c : report.cells) {
        out += csv_field(c.dataset) + ',';
        if (report.grid) {
            out += fixed(c.labeled_frac) + ',' + fixed(c.unlabeled_frac) + ',';
        } else {
            out += fixed(c.ratio) + ',';
        }
        out += std::to_string(c.fold) + ',' + csv_field(c.config) + ',' + std::to_string(c.seed) + ',';
        out += c.ok ? "ok," : "failed,";
        out += std::to_string(c.labeled) + ',' + std::to_string(c.unlabeled) + ',' + std::to_string(c.test) + ',';
        if (c.ok) {
            out += fixed(c.kappa) + ',' + fixed(c.accuracy) + ',' + std::to_string(c.rules) + ',' +
                   fixed(c.baseline_kappa) + ',' + fixed(c.baseline_accuracy) + ',' +
                   std::to_string(c.baseline_rules) + ',' + fixed(c.growth) + ',' + fixed(c.simplicity) + ',' +
                   fixed(c.utility) + ',' + (c.transductive_kappa ? fixed(*c.transductive_kappa) : "") + ',';
        } else {
            out += ",,,,,,,,,,";
        }
        out += csv_field(c.message) + '\n';
    }
    return out;
}

std::string aggregates_to_csv(const std::vector<aggregate_row> &rows, bool grid) {
    std::string out = grid ? "dataset,labeled_frac,unlabeled_frac" : "dataset,ratio";
    out += ",config,cells,failed,kappa_mean,kappa_sd,accuracy_mean,rules_mean,rules_median,baseline_kappa_mean,"
           "baseline_rules_median,growth_mean,simplicity_mean,utility_mean\n";
    for (const auto &r : rows) {
        out += csv_field(r.dataset) + ',';
        out += grid ? fixed(r.labeled_frac) + ',' + fixed(r.unlabeled_frac) : fixed(r.ratio);
        out += ',' + csv_field(r.config) + ',' + std::to_string(r.cells) + ',' + std::to_string(r.failed) + ',' +
               fixed(r.kappa_mean) + ',' + fixed(r.kappa_sd) + ',' + fixed(r.accuracy_mean) + ',' +
               fixed(r.rules_mean) + ',' + fixed(r.rules_median) + ',' + fixed(r.baseline_kappa_mean) + ',' +
               fixed(r.baseline_rules_median) + ',' + fixed(r.growth_mean) + ',' + fixed(r.simplicity_mean) + ',' +
               fixed(r.utility_mean) + '\n';
    }
    return out;
}

std::string grid_table_csv(const experiment_report &report) {
    std::string out = "config,labeled_frac,unlabeled_frac,kappa_mean,accuracy_mean,rules_mean,datasets\n";
    for (const auto &r : report.summary) {
        out += csv_field(r.config) + ',' + short_fixed(r.labeled_frac) + ',' + short_fixed(r.unlabeled_frac) + ',' +
               fixed(r.kappa_mean) + ',' + fixed(r.accuracy_mean) + ',' + fixed(r.rules_mean) + ',';
        std::size_t n = 0;
        for (const auto &a : report.aggregates) {
            if (a.config == r.config && a.labeled_frac == r.labeled_frac && a.unlabeled_frac == r.unlabeled_frac &&
                a.failed < a.cells) {
                ++n;
            }
        }
        out += std::to_string(n) + '\n';
    }
    return out;
}

std::string report_to_json(const experiment_report &report, const std::string &timestamp) {
    using detail::json;
    const auto &cfg = report.config;
    json doc;
    doc["format"] = "slgb-report";
    doc["version"] = 1;
    doc["generated_at"] = timestamp;
    doc["kind"] = report.grid ? "grid" : "run";
    json c;
    c["datasets"] = cfg.datasets;
    if (report.grid) {
        c["fracs"] = report.grid_fracs;
        c["repeats"] = cfg.grid_repeats;
    } else {
        c["ratios"] = cfg.ratios;
        c["folds"] = cfg.folds;
    }
    c["configs"] = cfg.configs;
    c["seed"] = cfg.seed;
    c["alpha"] = cfg.alpha;
    c["epsilon"] = cfg.epsilon;
    c["n_trees"] = cfg.n_trees;
    c["simplicity"] = json{ { "lambda", cfg.simplicity.slope },
                            { "eta", cfg.simplicity.shift },
                            { "nu", cfg.simplicity.growth } };
    doc["config"] = std::move(c);
    doc["notes"] = json::array({ "rule counts include the default rule",
                                 "distance attribute weights are information gains on the enlarged set" });
    std::size_t failed = 0;
    for (const auto &cell : report.cells) {
        failed += cell.ok ? 0 : 1;
    }
    doc["cells"] = report.cells.size();
    doc["failed_cells"] = failed;
    json summary = json::array();
    for (const auto &r : report.summary) {
        summary.push_back(aggregate_to_json(r, report.grid));
    }
    doc["summary"] = std::move(summary);
    json aggregates = json::array();
    for (const auto &r : report.aggregates) {
        aggregates.push_back(aggregate_to_json(r, report.grid));
    }
    doc["aggregates"] = std::move(aggregates);
    json stats = json::array();
    for (const auto &rs : report.stats) {
        json s;
        s["ratio"] = rs.ratio;
        s["datasets"] = rs.scores.row_names;
        if (rs.battery) {
            s["tests"] = json::parse(battery_to_json(*rs.battery, rs.scores));
        }
        stats.push_back(std::move(s));
    }
    doc["stats"] = std::move(stats);
    doc["warnings"] = report.warnings;
    return doc.dump(2);
}

void write_report(const experiment_report &report, const std::string &dir) {
    namespace fs = std::filesystem;
    const fs::path root{ dir };
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) {
        throw error("cannot create output directory '" + dir + "': " + ec.message());
    }
    write_file(root / "cells.csv", cells_to_csv(report));
    write_file(root / "aggregates.csv", aggregates_to_csv(report.aggregates, report.grid));
    write_file(root / "summary.csv", aggregates_to_csv(report.summary, report.grid));
    write_file(root / "report.json", report_to_json(report, utc_timestamp()));
    if (report.grid) {
        write_file(root / "grid.csv", grid_table_csv(report));
    }
    for (const auto &rs : report.stats) {
        if (rs.battery) {
            char name[64];
            std::snprintf(name, sizeof name, "stats_ratio_%.2f.csv", rs.ratio);
            write_file(root / name, battery_to_csv(*rs.battery));
        }
    }
}

}  // namespace slgb
