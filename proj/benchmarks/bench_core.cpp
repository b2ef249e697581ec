// Microbenchmarks for the hot paths: skeleton construction, model forward
// passes, and the two end-to-end extractors on a generated page.

#include <benchmark/benchmark.h>

#include <vector>

#include "parabox/datagen.hpp"
#include "parabox/geometry.hpp"
#include "parabox/graphnet.hpp"
#include "parabox/heuristic.hpp"
#include "parabox/pipeline.hpp"
#include "parabox/rng.hpp"

namespace {

using namespace parabox;

// Jittered grid of disjoint boxes, roughly word-sized.
std::vector<Quad> grid_boxes(uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<Quad> boxes;
  int cols = 1;
  while (cols * cols < n) ++cols;
  for (int i = 0; i < n; ++i) {
    double x = (i % cols) * 40.0 + rng.uniform(0.0, 6.0);
    double y = (i / cols) * 18.0 + rng.uniform(0.0, 3.0);
    double w = rng.uniform(18.0, 30.0);
    double h = rng.uniform(8.0, 11.0);
    boxes.push_back(Quad{{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}});
  }
  return boxes;
}

void BM_BetaSkeletonBoxes(benchmark::State& state) {
  std::vector<Quad> boxes = grid_boxes(7, (int)state.range(0));
  for (auto _ : state) {
    PageGraph g = beta_skeleton_boxes(boxes);
    benchmark::DoNotOptimize(g.edges.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BetaSkeletonBoxes)->Range(64, 4096)->Complexity();

void BM_GcnForward(benchmark::State& state) {
  const int n = (int)state.range(0);
  std::vector<Quad> boxes = grid_boxes(11, n);
  PageGraph g = beta_skeleton_boxes(boxes);
  GcnConfig cfg;
  GcnModel model = init_model(cfg, 3);
  FeatureMatrix X(n, cfg.input_width);
  Rng rng(13);
  for (double& x : X.v) x = rng.normal();
  for (auto _ : state) {
    std::vector<double> p = forward(model, X, g);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GcnForward)->Range(128, 2048)->Complexity();

Page benchmark_page() {
  StyleSpec style = sample_style(21);
  style.column_count = 2;
  Page page = generate_page(style, 22);
  return simulate_ocr(page, 23, {});
}

void BM_ExtractParagraphs(benchmark::State& state) {
  Page page = benchmark_page();
  GcnConfig node_cfg;
  node_cfg.head_type = HeadType::node_binary_pair;
  node_cfg.input_width = 29;
  GcnConfig edge_cfg;
  edge_cfg.head_type = HeadType::edge_binary;
  edge_cfg.input_width = 30;
  GcnModel split_model = init_model(node_cfg, 31);
  GcnModel cluster_model = init_model(edge_cfg, 32);
  for (auto _ : state) {
    std::vector<Paragraph> paragraphs =
        extract_paragraphs(page, split_model, cluster_model);
    benchmark::DoNotOptimize(paragraphs.data());
  }
  state.counters["words"] = (double)page.ocr_words.size();
}
BENCHMARK(BM_ExtractParagraphs);

void BM_HeuristicParagraphs(benchmark::State& state) {
  Page page = benchmark_page();
  for (auto _ : state) {
    std::vector<Paragraph> paragraphs =
        heuristic_paragraphs(page.ocr_words, page.ocr_raw_lines);
    benchmark::DoNotOptimize(paragraphs.data());
  }
  state.counters["words"] = (double)page.ocr_words.size();
}
BENCHMARK(BM_HeuristicParagraphs);

}  // namespace

BENCHMARK_MAIN();
