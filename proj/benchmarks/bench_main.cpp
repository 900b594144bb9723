#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "apx/evaluation.hpp"
#include "apx/labels.hpp"
#include "apx/parsing.hpp"
#include "apx/prompting.hpp"

namespace {

std::vector<apx::Label> random_labels(std::mt19937& rng, std::size_t count) {
    static const std::vector<std::string> vocabulary = {
        "knife", "fork", "spoon", "oven", "bowl", "grater", "pan",
        "whisk", "tongs", "peeler", "board", "pot", "ladle", "sieve"};
    std::vector<apx::Label> out;
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary.size() - 1);
    for (std::size_t i = 0; i < count; ++i) out.push_back(vocabulary[pick(rng)]);
    return out;
}

void BM_MetricsAtN(benchmark::State& state) {
    std::mt19937 rng(7);
    auto predicted = random_labels(rng, 6);
    auto truth = random_labels(rng, 6);
    for (auto _ : state) {
        auto metrics = apx::metrics_at_n(predicted, truth, 5);
        benchmark::DoNotOptimize(metrics);
    }
}
BENCHMARK(BM_MetricsAtN);

void BM_ParseRankedList(benchmark::State& state) {
    const std::string raw =
        "Sure! Here are the tools: Knife, Fork, Spoon, Oven, Bowl, Grater";
    for (auto _ : state) {
        auto ranked = apx::parse_ranked_list(raw);
        benchmark::DoNotOptimize(ranked);
    }
}
BENCHMARK(BM_ParseRankedList);

void BM_ParsePatternTuples(benchmark::State& state) {
    std::string raw;
    for (int i = 0; i < 100; ++i) {
        raw += std::to_string(i + 1) + ". (cut, person, bread, knife)\n";
    }
    for (auto _ : state) {
        auto report = apx::parse_pattern_tuples(raw);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_ParsePatternTuples);

void BM_RenderSlotPrompt(benchmark::State& state) {
    std::vector<apx::Label> candidates = {"bowl", "oven", "knife", "fork", "pan"};
    for (auto _ : state) {
        auto prompt = apx::render_slot_prompt(apx::ExtractionKind::Tool, "bake",
                                              "bread", candidates);
        benchmark::DoNotOptimize(prompt);
    }
}
BENCHMARK(BM_RenderSlotPrompt);

void BM_NormalizeLabel(benchmark::State& state) {
    for (auto _ : state) {
        auto label = apx::normalize_label("  The   Sharp  KNIFE!  ");
        benchmark::DoNotOptimize(label);
    }
}
BENCHMARK(BM_NormalizeLabel);

}  // namespace

BENCHMARK_MAIN();
