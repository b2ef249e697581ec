#include "parabox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "parabox/util.hpp"

namespace parabox {

namespace {

double quad_area2(const Quad& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += cross(q.c[i], q.c[(i + 1) % 4]);
  return s;
}

// The shared 29-value box descriptor; `out` must hold 29 doubles.
void box_features(const Quad& box, const NormFrame& frame, double* out) {
  double w = box.width() / frame.unit;
  double h = box.height() / frame.unit;
  if (quad_area2(box) == 0.0) h = std::max(h, 1.0);
  double alpha = box.angle();
  double ca = std::cos(alpha), sa = std::sin(alpha);
  out[0] = w;
  out[1] = h;
  out[2] = alpha;
  out[3] = ca;
  out[4] = sa;
  for (int i = 0; i < 4; ++i) {
    Point p = frame.apply(box.c[i]);
    double* t = out + 5 + 6 * i;
    t[0] = p.x;
    t[1] = p.x * ca;
    t[2] = p.x * sa;
    t[3] = p.y;
    t[4] = p.y * ca;
    t[5] = p.y * sa;
  }
}

void check_word_index(int m, size_t word_count, const char* where) {
  if (m < 0 || (size_t)m >= word_count)
    throw std::out_of_range(std::string(where) + ": word index out of range");
}

}  // namespace

NormFrame page_norm_frame(const std::vector<Quad>& boxes) {
  NormFrame f;
  if (boxes.empty()) return f;
  Point sum{0.0, 0.0};
  for (const auto& b : boxes) sum = sum + b.center();
  f.origin = sum * (1.0 / (double)boxes.size());
  double med = median_box_height(boxes);
  f.unit = med > 0.0 ? med : 1.0;
  return f;
}

WordFeatures word_node_features(const Quad& word, const NormFrame& frame) {
  WordFeatures f;
  box_features(word, frame, f.data());
  return f;
}

LineFeatures line_node_features(const Line& line, const std::vector<Quad>& words,
                                const NormFrame& frame) {
  LineFeatures f;
  box_features(line.box, frame, f.data());
  double w1 = f[0];
  if (!line.words.empty() && line.words.front() >= 0 &&
      (size_t)line.words.front() < words.size())
    w1 = std::min(words[line.words.front()].width() / frame.unit, f[0]);
  f[29] = w1;
  return f;
}

FeatureMatrix word_feature_matrix(const std::vector<Quad>& words,
                                  const NormFrame& frame) {
  FeatureMatrix X((int)words.size(), 29);
  for (size_t i = 0; i < words.size(); ++i)
    box_features(words[i], frame, X.row((int)i));
  return X;
}

FeatureMatrix line_feature_matrix(const std::vector<Line>& lines,
                                  const std::vector<Quad>& words,
                                  const NormFrame& frame) {
  FeatureMatrix X((int)lines.size(), 30);
  for (size_t i = 0; i < lines.size(); ++i) {
    LineFeatures f = line_node_features(lines[i], words, frame);
    std::copy(f.begin(), f.end(), X.row((int)i));
  }
  return X;
}

Point longitudinal_direction(const std::vector<Quad>& words,
                             const std::vector<int>& members) {
  Point sum{0.0, 0.0};
  for (int m : members) {
    check_word_index(m, words.size(), "longitudinal_direction");
    const Quad& q = words[m];
    sum = sum + (q.c[1] - q.c[0] + q.c[2] - q.c[3]) * 0.5;
  }
  double len = norm(sum);
  if (len == 0.0) return {1.0, 0.0};
  return sum * (1.0 / len);
}

std::vector<int> reading_order(const std::vector<Quad>& words,
                               std::vector<int> members) {
  Point dir = longitudinal_direction(words, members);
  std::sort(members.begin(), members.end(), [&](int a, int b) {
    double pa = dot(words[a].center(), dir);
    double pb = dot(words[b].center(), dir);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  return members;
}

Quad tight_line_box(const std::vector<Quad>& words,
                    const std::vector<int>& members) {
  if (members.empty()) return {};
  Point u = longitudinal_direction(words, members);
  Point n{-u.y, u.x};
  double smin = 1e300, smax = -1e300, tmin = 1e300, tmax = -1e300;
  for (int m : members)
    for (int i = 0; i < 4; ++i) {
      const Point& p = words[m].c[i];
      double s = dot(p, u), t = dot(p, n);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
  Quad q;
  q.c[0] = u * smin + n * tmin;
  q.c[1] = u * smax + n * tmin;
  q.c[2] = u * smax + n * tmax;
  q.c[3] = u * smin + n * tmax;
  return q;
}

std::vector<Line> apply_line_cuts(const std::vector<Quad>& words,
                                  const std::vector<Line>& raw_lines,
                                  const std::vector<double>& start_prob,
                                  const std::vector<double>& end_prob,
                                  std::vector<std::string>* diagnostics) {
  if (start_prob.size() != words.size() || end_prob.size() != words.size())
    throw std::invalid_argument(
        "apply_line_cuts: probability count does not match word count");
  std::vector<Line> out;
  for (size_t li = 0; li < raw_lines.size(); ++li) {
    const Line& raw = raw_lines[li];
    if (raw.words.empty()) {
      if (diagnostics)
        diagnostics->push_back("raw line " + std::to_string(li) + " is empty, dropped");
      continue;
    }
    for (int m : raw.words) check_word_index(m, words.size(), "apply_line_cuts");
    std::vector<int> order = reading_order(words, raw.words);
    std::vector<int> segment;
    auto flush = [&] {
      Line l;
      l.box = tight_line_box(words, segment);
      l.words = std::move(segment);
      out.push_back(std::move(l));
      segment = {};
    };
    segment.push_back(order[0]);
    for (size_t i = 1; i < order.size(); ++i) {
      int u = order[i - 1], v = order[i];
      if (end_prob[u] >= 0.5 || start_prob[v] >= 0.5) flush();
      segment.push_back(v);
    }
    flush();
  }
  return out;
}

std::vector<Paragraph> apply_edge_clusters(const std::vector<Line>& lines,
                                           const PageGraph& graph,
                                           const std::vector<double>& edge_prob) {
  const int n = (int)lines.size();
  if (graph.node_count != n)
    throw std::invalid_argument(
        "apply_edge_clusters: graph node count does not match line count");
  if (edge_prob.size() != graph.edges.size())
    throw std::invalid_argument(
        "apply_edge_clusters: probability count does not match edge count");
  UnionFind uf(n);
  for (size_t e = 0; e < graph.edges.size(); ++e)
    if (edge_prob[e] >= 0.5) uf.unite(graph.edges[e].u, graph.edges[e].v);

  // members ascend within a group, so group[0] is the smallest line index
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);
  std::vector<int> order;
  for (int r = 0; r < n; ++r)
    if (!groups[r].empty()) order.push_back(r);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return groups[a][0] < groups[b][0]; });

  std::vector<Paragraph> out;
  out.reserve(order.size());
  for (int r : order) {
    Paragraph p;
    p.lines = std::move(groups[r]);
    std::vector<Point> corners;
    corners.reserve(p.lines.size() * 4);
    for (int li : p.lines)
      for (int i = 0; i < 4; ++i) corners.push_back(lines[li].box.c[i]);
    p.region = convex_hull(std::move(corners));
    out.push_back(std::move(p));
  }
  return out;
}

SplitDetails split_lines_with_probs(const std::vector<Quad>& words,
                                    const std::vector<Line>& raw_lines,
                                    const GcnModel& model,
                                    std::vector<std::string>* diagnostics) {
  if (model.config.head_type != HeadType::node_binary_pair)
    throw std::invalid_argument("split_lines: model head must be node_binary_pair");
  SplitDetails d;
  d.start_prob.assign(words.size(), 0.0);
  d.end_prob.assign(words.size(), 0.0);
  if (!words.empty()) {
    d.graph = beta_skeleton_boxes(words);
    NormFrame frame = page_norm_frame(words);
    FeatureMatrix X = word_feature_matrix(words, frame);
    std::vector<double> p = forward(model, X, d.graph);
    for (size_t i = 0; i < words.size(); ++i) {
      d.start_prob[i] = p[2 * i];
      d.end_prob[i] = p[2 * i + 1];
    }
  }
  d.lines = apply_line_cuts(words, raw_lines, d.start_prob, d.end_prob, diagnostics);
  return d;
}

std::vector<Line> split_lines(const std::vector<Quad>& words,
                              const std::vector<Line>& raw_lines,
                              const GcnModel& model,
                              std::vector<std::string>* diagnostics) {
  return split_lines_with_probs(words, raw_lines, model, diagnostics).lines;
}

ClusterDetails cluster_lines_with_probs(const std::vector<Quad>& words,
                                        const std::vector<Line>& lines,
                                        const GcnModel& model) {
  if (model.config.head_type != HeadType::edge_binary)
    throw std::invalid_argument("cluster_lines: model head must be edge_binary");
  ClusterDetails d;
  if (lines.empty()) return d;
  std::vector<Quad> line_boxes;
  line_boxes.reserve(lines.size());
  for (const auto& l : lines) line_boxes.push_back(l.box);
  d.graph = beta_skeleton_boxes(line_boxes);
  NormFrame frame = page_norm_frame(words.empty() ? line_boxes : words);
  FeatureMatrix X = line_feature_matrix(lines, words, frame);
  d.edge_prob = forward(model, X, d.graph);
  d.paragraphs = apply_edge_clusters(lines, d.graph, d.edge_prob);
  return d;
}

std::vector<Paragraph> cluster_lines(const std::vector<Quad>& words,
                                     const std::vector<Line>& lines,
                                     const GcnModel& model) {
  return cluster_lines_with_probs(words, lines, model).paragraphs;
}

PipelineDetails extract_paragraphs_with_details(const Page& page,
                                                const GcnModel& split_model,
                                                const GcnModel& cluster_model,
                                                std::vector<std::string>* diagnostics) {
  PipelineDetails d;
  d.split = split_lines_with_probs(page.ocr_words, page.ocr_raw_lines, split_model,
                                   diagnostics);
  d.cluster = cluster_lines_with_probs(page.ocr_words, d.split.lines, cluster_model);
  return d;
}

std::vector<Paragraph> extract_paragraphs(const Page& page,
                                          const GcnModel& split_model,
                                          const GcnModel& cluster_model,
                                          std::vector<std::string>* diagnostics) {
  return extract_paragraphs_with_details(page, split_model, cluster_model, diagnostics)
      .cluster.paragraphs;
}

}  // namespace parabox
