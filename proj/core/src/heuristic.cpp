#include "parabox/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parabox/pipeline.hpp"

namespace parabox {

namespace {

void validate(const HeuristicParams& p) {
  bool ok = p.wide_space_factor > 0.0 && p.cluster_distance_factor > 0.0 &&
            p.merge_angle_tolerance > 0.0 && p.merge_offset_factor > 0.0 &&
            p.indent_char_widths > 0.0;
  if (!ok) throw std::invalid_argument("heuristic parameters must be positive");
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double point_segment_distance(Point p, Point a, Point b) {
  Point d = b - a;
  double len2 = dot(d, d);
  if (len2 <= 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return dist(p, {a.x + t * d.x, a.y + t * d.y});
}

bool within_bounds(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  int d1 = orient2d_sign(q1, q2, p1);
  int d2 = orient2d_sign(q1, q2, p2);
  int d3 = orient2d_sign(p1, p2, q1);
  int d4 = orient2d_sign(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_bounds(q1, q2, p1)) return true;
  if (d2 == 0 && within_bounds(q1, q2, p2)) return true;
  if (d3 == 0 && within_bounds(p1, p2, q1)) return true;
  if (d4 == 0 && within_bounds(p1, p2, q2)) return true;
  return false;
}

double segment_distance(Point p1, Point p2, Point q1, Point q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  double best = point_segment_distance(p1, q1, q2);
  best = std::min(best, point_segment_distance(p2, q1, q2));
  best = std::min(best, point_segment_distance(q1, p1, p2));
  best = std::min(best, point_segment_distance(q2, p1, p2));
  return best;
}

// step 1: split every raw line at gaps wider than the factor times the
// line's own average gap
std::vector<Line> wide_space_split(const std::vector<Quad>& words,
                                   const std::vector<Line>& raw_lines,
                                   double factor) {
  std::vector<Line> out;
  for (const Line& raw : raw_lines) {
    if (raw.words.empty()) continue;
    std::vector<int> order = reading_order(words, raw.words);
    Point u = longitudinal_direction(words, order);
    int n = (int)order.size();
    std::vector<double> lo(n, std::numeric_limits<double>::max());
    std::vector<double> hi(n, std::numeric_limits<double>::lowest());
    for (int k = 0; k < n; ++k)
      for (const Point& c : words[order[k]].c) {
        double t = dot(c, u);
        lo[k] = std::min(lo[k], t);
        hi[k] = std::max(hi[k], t);
      }
    std::vector<double> gap(std::max(0, n - 1));
    double avg = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      gap[k] = std::max(0.0, lo[k + 1] - hi[k]);
      avg += gap[k];
    }
    if (n > 1) avg /= n - 1;

    auto emit = [&](std::vector<int>& members) {
      Line l;
      l.words = members;
      l.box = tight_line_box(words, members);
      out.push_back(std::move(l));
      members.clear();
    };
    std::vector<int> cur{order[0]};
    for (int k = 1; k < n; ++k) {
      if (avg > 0.0 && gap[k - 1] > factor * avg) emit(cur);
      cur.push_back(order[k]);
    }
    emit(cur);
  }
  return out;
}

double leading_edge(const Quad& box, Point u) {
  double lead = std::numeric_limits<double>::max();
  for (const Point& c : box.c) lead = std::min(lead, dot(c, u));
  return lead;
}

}  // namespace

double quad_min_distance(const Quad& a, const Quad& b) {
  if (quad_intersection_area(a, b) > 0.0) return 0.0;
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      best = std::min(best, segment_distance(a.c[i], a.c[(i + 1) % 4],
                                             b.c[j], b.c[(j + 1) % 4]));
  return best;
}

HeuristicDetails heuristic_paragraphs_with_details(
    const std::vector<Quad>& words, const std::vector<Line>& raw_lines,
    const HeuristicParams& params) {
  validate(params);

  HeuristicDetails out;
  out.split_lines = wide_space_split(words, raw_lines, params.wide_space_factor);
  int nf = (int)out.split_lines.size();
  if (nf == 0) return out;

  // step 2: transitive closure of the proximity relation
  UnionFind blocks(nf);
  for (int i = 0; i < nf; ++i)
    for (int j = i + 1; j < nf; ++j) {
      const Quad& a = out.split_lines[i].box;
      const Quad& b = out.split_lines[j].box;
      double limit =
          params.cluster_distance_factor * std::min(a.height(), b.height());
      if (quad_min_distance(a, b) < limit) blocks.unite(i, j);
    }

  // step 3: within a block, merge lines lying on the same straight line
  UnionFind rows(nf);
  for (int i = 0; i < nf; ++i) {
    const Quad& a = out.split_lines[i].box;
    double aa = a.angle();
    Point ua{std::cos(aa), std::sin(aa)};
    for (int j = i + 1; j < nf; ++j) {
      if (blocks.find(i) != blocks.find(j)) continue;
      const Quad& b = out.split_lines[j].box;
      double ab = b.angle();
      Point ub{std::cos(ab), std::sin(ab)};
      double turn =
          std::acos(std::clamp(std::fabs(dot(ua, ub)), 0.0, 1.0));
      if (turn > params.merge_angle_tolerance) continue;
      Point sep = a.center() - b.center();
      double off = std::max(std::fabs(cross(ua, sep)), std::fabs(cross(ub, sep)));
      if (off <= params.merge_offset_factor * std::min(a.height(), b.height()))
        rows.unite(i, j);
    }
  }

  std::vector<std::vector<int>> groups(nf);
  for (int i = 0; i < nf; ++i) groups[rows.find(i)].push_back(i);
  struct Keyed {
    int min_word;
    int block;
    Line line;
  };
  std::vector<Keyed> keyed;
  for (const auto& group : groups) {
    if (group.empty()) continue;
    std::vector<int> members;
    for (int f : group)
      members.insert(members.end(), out.split_lines[f].words.begin(),
                     out.split_lines[f].words.end());
    Line l;
    l.words = reading_order(words, members);
    l.box = tight_line_box(words, l.words);
    int mw = *std::min_element(l.words.begin(), l.words.end());
    keyed.push_back({mw, blocks.find(group[0]), std::move(l)});
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const Keyed& a, const Keyed& b) { return a.min_word < b.min_word; });

  std::vector<int> block_ids;  // roots in first-appearance order
  for (auto& k : keyed) {
    auto it = std::find(block_ids.begin(), block_ids.end(), k.block);
    if (it == block_ids.end()) {
      block_ids.push_back(k.block);
      it = block_ids.end() - 1;
    }
    out.block_of.push_back((int)(it - block_ids.begin()));
    out.merged_lines.push_back(std::move(k.line));
  }

  // step 4: a new paragraph starts at every indented line of a block
  double char_width = 0.5 * median_box_height(words);
  double indent_limit = params.indent_char_widths * char_width;
  int nm = (int)out.merged_lines.size();
  for (int b = 0; b < (int)block_ids.size(); ++b) {
    std::vector<int> members;
    std::vector<int> line_ids;
    for (int li = 0; li < nm; ++li)
      if (out.block_of[li] == b) {
        line_ids.push_back(li);
        members.insert(members.end(), out.merged_lines[li].words.begin(),
                       out.merged_lines[li].words.end());
      }
    Point u = longitudinal_direction(words, members);
    Point n{-u.y, u.x};
    std::sort(line_ids.begin(), line_ids.end(), [&](int i, int j) {
      double ti = dot(out.merged_lines[i].box.center(), n);
      double tj = dot(out.merged_lines[j].box.center(), n);
      if (ti != tj) return ti < tj;
      return out.merged_lines[i].words[0] < out.merged_lines[j].words[0];
    });
    double block_lead = std::numeric_limits<double>::max();
    for (int li : line_ids)
      block_lead = std::min(block_lead, leading_edge(out.merged_lines[li].box, u));

    Paragraph para;
    auto flush = [&] {
      if (para.lines.empty()) return;
      std::sort(para.lines.begin(), para.lines.end());
      std::vector<Point> corners;
      for (int li : para.lines)
        corners.insert(corners.end(), out.merged_lines[li].box.c,
                       out.merged_lines[li].box.c + 4);
      para.region = convex_hull(std::move(corners));
      out.paragraphs.push_back(std::move(para));
      para = Paragraph{};
    };
    for (int li : line_ids) {
      double indent = leading_edge(out.merged_lines[li].box, u) - block_lead;
      if (indent > indent_limit) flush();
      para.lines.push_back(li);
    }
    flush();
  }
  return out;
}

std::vector<Paragraph> heuristic_paragraphs(const std::vector<Quad>& words,
                                            const std::vector<Line>& raw_lines,
                                            const HeuristicParams& params) {
  return heuristic_paragraphs_with_details(words, raw_lines, params).paragraphs;
}

}  // namespace parabox
