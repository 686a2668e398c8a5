#include "slgb/amending.hpp"
#include "slgb/forest.hpp"
#include "slgb/pipeline.hpp"
#include "slgb/rough.hpp"
#include "slgb/rules.hpp"
#include "slgb/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

const slgb::dataset &sample() {
    static const auto d = slgb::make_synthetic("mixed", 1);
    return d;
}

void forest_training(benchmark::State &state) {
    const auto &d = sample();
    slgb::forest_config cfg;
    cfg.n_trees = static_cast<std::size_t>(state.range(0));
    const std::vector<double> w(d.size(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgb::train_forest(d, w, cfg));
    }
}
BENCHMARK(forest_training)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void similarity_structure(benchmark::State &state) {
    const auto d = slgb::normalize_numeric(sample());
    const std::vector<double> w(d.num_attributes(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgb::build_similarity_structure(d, { w, 0.9 }));
    }
}
BENCHMARK(similarity_structure)->Unit(benchmark::kMillisecond);

void rst_weighting(benchmark::State &state) {
    const auto &d = sample();
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgb::rst_weights(d));
    }
}
BENCHMARK(rst_weighting)->Unit(benchmark::kMillisecond);

void rule_learners(benchmark::State &state) {
    const auto &d = sample();
    const std::vector<double> w(d.size(), 1.0);
    for (auto _ : state) {
        switch (state.range(0)) {
        case 0:
            benchmark::DoNotOptimize(slgb::train_c45(d, w));
            break;
        case 1:
            benchmark::DoNotOptimize(slgb::train_part(d, w));
            break;
        default:
            benchmark::DoNotOptimize(slgb::train_ripper(d, w));
        }
    }
}
BENCHMARK(rule_learners)->ArgName("c45_part_rip")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void grey_box_fit(benchmark::State &state) {
    const auto split = slgb::make_split(sample(), 0.1, 3);
    slgb::slgb_config base;
    base.forest.n_trees = 50;
    const auto cfg = slgb::parse_config_name("rf-rip-rst", base);
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgb::fit(split.labeled, split.unlabeled, cfg));
    }
}
BENCHMARK(grey_box_fit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
