#include "gazeflow/aoi.hpp"
#include "gazeflow/classify.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/random.hpp"
#include "gazeflow/simulate.hpp"
#include "gazeflow/stats.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace gazeflow;

namespace {

std::vector<GazeSample> scanpath(std::size_t n)
{
    Rng rng(1);
    std::vector<GazeSample> s;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += rng.uniform(20.0, 60.0);
        s.push_back({t, rng.uniform(0.0, 1280.0), rng.uniform(0.0, 720.0)});
    }
    return s;
}

std::vector<WordBox> page(std::size_t words)
{
    Rng rng(2);
    std::vector<std::string> text;
    for (std::size_t i = 0; i < words; ++i)
        text.emplace_back(1 + rng.below(9), 'x');
    return expand_boxes(layout_words(text));
}

} // namespace

static void BM_merge_fixations(benchmark::State& state)
{
    const auto s = scanpath(static_cast<std::size_t>(state.range(0)));
    const FixationParams p;
    for (auto _ : state)
        benchmark::DoNotOptimize(merge_fixations(s, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_merge_fixations)->Range(256, 1 << 16);

static void BM_expand_boxes(benchmark::State& state)
{
    auto boxes = page(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(expand_boxes(boxes));
}
BENCHMARK(BM_expand_boxes)->Arg(20)->Arg(60);

static void BM_aoi_lookup(benchmark::State& state)
{
    const auto boxes = page(60);
    const AoiIndex index(boxes);
    Rng rng(3);
    std::vector<std::pair<double, double>> points(4096);
    for (auto& [x, y] : points)
        x = rng.uniform(0.0, 1280.0), y = rng.uniform(0.0, 720.0);
    for (auto _ : state)
        for (const auto& [x, y] : points)
            benchmark::DoNotOptimize(state.range(0) ? index.lookup(x, y) : assign_fixation(x, y, boxes));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points.size()));
}
BENCHMARK(BM_aoi_lookup)->ArgName("indexed")->Arg(0)->Arg(1);

static void BM_spearman(benchmark::State& state)
{
    Rng rng(4);
    std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(rng.below(50));
        y[i] = x[i] + rng.normal(0.0, 10.0);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(spearman(std::span<const double>(x), std::span<const double>(y)));
}
BENCHMARK(BM_spearman)->Range(64, 1 << 14);

static void BM_experiment(benchmark::State& state)
{
    Rng rng(5);
    FeatureMatrix m;
    m.columns = {"a", "b", "c", "d"};
    for (std::size_t i = 0; i < 400; ++i) {
        const int label = static_cast<int>(i % 2);
        std::vector<std::optional<double>> row;
        for (int c = 0; c < 4; ++c)
            row.push_back(rng.normal(label, 1.0));
        m.add_row(std::move(row), label, i);
    }
    const Model model = static_cast<Model>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment(m, std::span<const Model>(&model, 1), 3, 42));
    state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_experiment)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
