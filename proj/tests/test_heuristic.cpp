#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "parabox/datagen.hpp"
#include "parabox/heuristic.hpp"
#include "parabox/metrics.hpp"
#include "parabox/pipeline.hpp"
#include "parabox/rng.hpp"
#include "test_support.hpp"

using namespace parabox;

namespace {

// ---------------------------------------------------------------------------
// Oracles.
// ---------------------------------------------------------------------------
namespace oracle {

// lower bound on the minimum distance via dense boundary sampling; the true
// minimum can only be smaller
double sampled_quad_distance(const Quad& a, const Quad& b, int steps = 64) {
  auto points = [&](const Quad& q) {
    std::vector<Point> out;
    for (int e = 0; e < 4; ++e) {
      Point p = q.c[e], r = q.c[(e + 1) % 4];
      for (int t = 0; t <= steps; ++t) {
        double f = (double)t / steps;
        out.push_back({p.x + f * (r.x - p.x), p.y + f * (r.y - p.y)});
      }
    }
    return out;
  };
  double best = 1e300;
  for (const Point& p : points(a))
    for (const Point& q : points(b)) best = std::min(best, dist(p, q));
  return best;
}

// transitive closure of the proximity relation, written as plain BFS
std::vector<int> proximity_components(const std::vector<Quad>& boxes,
                                      double factor) {
  int n = (int)boxes.size();
  std::vector<int> comp(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (comp[v] >= 0) continue;
        double limit = factor * std::min(boxes[u].height(), boxes[v].height());
        if (quad_min_distance(boxes[u], boxes[v]) < limit) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace oracle

struct Scene {
  std::vector<Quad> words;
  std::vector<Line> lines;

  // appends one horizontal line of words; returns its line index
  int add_line(std::vector<std::pair<double, double>> spans, double y,
               double h = 10.0) {
    Line l;
    for (auto [x0, x1] : spans) {
      l.words.push_back((int)words.size());
      words.push_back(Quad::rect(x0, y, x1, y + h));
    }
    l.box = tight_line_box(words, l.words);
    lines.push_back(l);
    return (int)lines.size() - 1;
  }
};

std::multiset<std::vector<int>> paragraph_word_sets(const HeuristicDetails& d) {
  std::multiset<std::vector<int>> out;
  for (const auto& para : d.paragraphs) {
    std::vector<int> ws;
    for (int li : para.lines)
      ws.insert(ws.end(), d.merged_lines[li].words.begin(),
                d.merged_lines[li].words.end());
    std::sort(ws.begin(), ws.end());
    out.insert(ws);
  }
  return out;
}

std::vector<int> all_paragraph_words(const HeuristicDetails& d) {
  std::vector<int> out;
  for (const auto& para : d.paragraphs)
    for (int li : para.lines)
      out.insert(out.end(), d.merged_lines[li].words.begin(),
                 d.merged_lines[li].words.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("quad min distance literals and sampled bound") {
  // aligned rects with a clean gap
  CHECK(quad_min_distance(Quad::rect(0, 0, 10, 10), Quad::rect(14, 0, 20, 10)) ==
        doctest::Approx(4.0).epsilon(1e-12));
  // stacked with vertical gap
  CHECK(quad_min_distance(Quad::rect(0, 0, 10, 10), Quad::rect(0, 13, 10, 20)) ==
        doctest::Approx(3.0).epsilon(1e-12));
  // diagonal corner-to-corner
  CHECK(quad_min_distance(Quad::rect(0, 0, 10, 10), Quad::rect(13, 14, 20, 20)) ==
        doctest::Approx(5.0).epsilon(1e-12));
  // touching and overlapping give zero
  CHECK(quad_min_distance(Quad::rect(0, 0, 10, 10), Quad::rect(10, 0, 20, 10)) ==
        0.0);
  CHECK(quad_min_distance(Quad::rect(0, 0, 10, 10), Quad::rect(5, 5, 15, 15)) ==
        0.0);
  // one quad inside the other
  CHECK(quad_min_distance(Quad::rect(0, 0, 20, 20), Quad::rect(5, 5, 8, 8)) ==
        0.0);

  for (uint64_t seed = 0; seed < 30; ++seed) {
    auto boxes = testsup::random_disjoint_boxes(seed, 2, 120.0, 0.6);
    if (boxes.size() < 2) continue;
    double got = quad_min_distance(boxes[0], boxes[1]);
    double sampled = oracle::sampled_quad_distance(boxes[0], boxes[1]);
    // the sampled value sits within one sample spacing above the true
    // minimum: each true closest point is at most half a spacing from a
    // sample on its own edge
    double spacing = 0.0;
    for (const Quad& q : {boxes[0], boxes[1]})
      for (int e = 0; e < 4; ++e)
        spacing = std::max(spacing, dist(q.c[e], q.c[(e + 1) % 4]) / 64.0);
    CHECK(got <= sampled + 1e-9);
    CHECK(got >= sampled - spacing - 1e-9);
  }
}

TEST_CASE("a significantly wider white space splits the line") {
  Scene s;
  // five equal gaps of 4 except one of 12 between words 2 and 3
  s.add_line({{0, 10}, {14, 24}, {28, 38}, {50, 60}, {64, 74}, {78, 88}}, 0);
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  REQUIRE(d.split_lines.size() == 2);
  CHECK(d.split_lines[0].words == std::vector<int>{0, 1, 2});
  CHECK(d.split_lines[1].words == std::vector<int>{3, 4, 5});

  // uniform gaps stay together
  Scene u;
  u.add_line({{0, 10}, {14, 24}, {28, 38}, {42, 52}}, 0);
  HeuristicDetails du = heuristic_paragraphs_with_details(u.words, u.lines);
  CHECK(du.split_lines.size() == 1);
}

TEST_CASE("uniform block with flush lines forms one paragraph") {
  Scene s;
  for (int k = 0; k < 4; ++k)
    s.add_line({{0, 30}, {34, 60}, {64, 90}}, 14.0 * k);
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  REQUIRE(d.paragraphs.size() == 1);
  CHECK(all_paragraph_words(d).size() == s.words.size());
}

TEST_CASE("an indented line starts a new paragraph") {
  Scene s;
  s.add_line({{0, 30}, {34, 60}}, 0);
  s.add_line({{0, 30}, {34, 60}}, 14);
  // word height 10 gives a character estimate of 5; indent by 12 clears it
  s.add_line({{12, 40}, {44, 60}}, 28);
  s.add_line({{0, 30}, {34, 60}}, 42);
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  auto sets = paragraph_word_sets(d);
  std::multiset<std::vector<int>> expect{{0, 1, 2, 3}, {4, 5, 6, 7}};
  CHECK(sets == expect);
}

TEST_CASE("blocks separated by wide vertical gaps become separate paragraphs") {
  Scene s;
  s.add_line({{0, 30}, {34, 60}}, 0);
  s.add_line({{0, 30}, {34, 60}}, 14);
  // 1.5 line heights is 15; this gap is 40
  s.add_line({{0, 30}, {34, 60}}, 64);
  s.add_line({{0, 30}, {34, 60}}, 78);
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  auto sets = paragraph_word_sets(d);
  std::multiset<std::vector<int>> expect{{0, 1, 2, 3}, {4, 5, 6, 7}};
  CHECK(sets == expect);
}

TEST_CASE("fragments in one block remerge on the same straight line") {
  Scene s;
  // a neighboring stack keeps both fragments in one block
  s.add_line({{0, 30}, {34, 64}, {68, 98}}, 0);
  // the 32 gap splits this line, but the halves stay close to the stack
  s.add_line({{0, 12}, {16, 28}, {60, 72}, {76, 88}}, 14);
  s.add_line({{0, 30}, {34, 64}, {68, 98}}, 28);
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  CHECK(d.split_lines.size() == 4);
  REQUIRE(d.merged_lines.size() == 3);
  auto sets = paragraph_word_sets(d);
  std::multiset<std::vector<int>> expect{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  CHECK(sets == expect);
}

TEST_CASE("a wide column gap keeps the columns in separate blocks") {
  Scene s;
  // two columns, 60 apart with line height 10, never bridged
  for (int k = 0; k < 3; ++k) {
    s.add_line({{0, 30}, {34, 60}}, 14.0 * k);
    s.add_line({{120, 150}, {154, 180}}, 14.0 * k);
  }
  HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
  auto sets = paragraph_word_sets(d);
  std::multiset<std::vector<int>> expect{{0, 1, 4, 5, 8, 9},
                                         {2, 3, 6, 7, 10, 11}};
  CHECK(sets == expect);
}

TEST_CASE("block assignment matches the proximity closure oracle") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto boxes = testsup::random_disjoint_boxes(seed + 50, 14, 300.0, 0.0);
    Scene s;
    for (const auto& b : boxes) {
      Line l;
      l.words.push_back((int)s.words.size());
      s.words.push_back(b);
      l.box = b;
      s.lines.push_back(l);
    }
    HeuristicDetails d = heuristic_paragraphs_with_details(s.words, s.lines);
    // no wide spaces inside single-word lines, so fragments == lines, and
    // each merged line tracks one or more fragments of the same block
    std::vector<Quad> fb;
    for (const auto& l : d.split_lines) fb.push_back(l.box);
    std::vector<int> comp = oracle::proximity_components(fb, 1.5);
    // paragraphs never span oracle components
    for (const auto& para : d.paragraphs) {
      std::set<int> comps;
      for (int li : para.lines)
        for (int w : d.merged_lines[li].words) comps.insert(comp[w]);
      CHECK(comps.size() == 1);
    }
  }
}

TEST_CASE("output is a word partition, order independent, and deterministic") {
  for (uint64_t seed : {3u, 4u, 5u}) {
    StyleSpec style = sample_style(seed);
    Page page = generate_page(style, seed * 13 + 1);
    page = simulate_ocr(page, seed, OcrSpec{0.3, 0.05, 0.02});
    HeuristicDetails d =
        heuristic_paragraphs_with_details(page.ocr_words, page.ocr_raw_lines);
    std::vector<int> words = all_paragraph_words(d);
    std::vector<int> expect(page.ocr_words.size());
    for (size_t i = 0; i < expect.size(); ++i) expect[i] = (int)i;
    CHECK(words == expect);

    // permuting the input lines leaves the paragraph word sets unchanged
    std::vector<Line> shuffled = page.ocr_raw_lines;
    std::reverse(shuffled.begin(), shuffled.end());
    HeuristicDetails ds =
        heuristic_paragraphs_with_details(page.ocr_words, shuffled);
    CHECK(paragraph_word_sets(ds) == paragraph_word_sets(d));

    HeuristicDetails again =
        heuristic_paragraphs_with_details(page.ocr_words, page.ocr_raw_lines);
    REQUIRE(again.paragraphs.size() == d.paragraphs.size());
    for (size_t p = 0; p < d.paragraphs.size(); ++p)
      CHECK(again.paragraphs[p].lines == d.paragraphs[p].lines);
  }
}

TEST_CASE("paragraph regions are convex and cover their member lines") {
  Page page = generate_page(sample_style(8), 21);
  HeuristicDetails d =
      heuristic_paragraphs_with_details(page.ocr_words, page.ocr_raw_lines);
  std::vector<Paragraph> plain =
      heuristic_paragraphs(page.ocr_words, page.ocr_raw_lines);
  REQUIRE(plain.size() == d.paragraphs.size());
  for (size_t p = 0; p < d.paragraphs.size(); ++p) {
    const auto& para = d.paragraphs[p];
    REQUIRE(para.region.size() >= 3);
    CHECK(polygon_area(para.region) > 0.0);
    CHECK(plain[p].region.size() == para.region.size());
    for (int li : para.lines) {
      double area = quad_intersection_area(d.merged_lines[li].box,
                                           d.merged_lines[li].box);
      CHECK(simple_polygon_intersection_area(
                para.region, quad_polygon(d.merged_lines[li].box)) ==
            doctest::Approx(area).epsilon(1e-9));
    }
  }
}
