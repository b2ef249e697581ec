#include "parabox/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>

#include "parabox/pipeline.hpp"
#include "parabox/rng.hpp"

namespace parabox {
namespace {

constexpr double kPageWidth = 1024.0;
constexpr double kPageHeight = 1448.0;
constexpr double kBaseWordHeight = 18.0;
constexpr double kTopMarginFraction = 0.06;
constexpr double kWordGapFactor = 0.45;     // natural inter-word gap over h0
constexpr double kIndentFactor = 2.2;       // first-line indent over h0
constexpr double kMinWordFactor = 0.6;
constexpr double kMaxWordFactor = 7.0;
constexpr double kMarkerFactor = 0.9;       // list bullet width over h0
constexpr double kParagraphLeading = 0.7;   // extra pitch between paragraphs

double sample_word_width(Rng& rng, double h0) {
  double w = std::exp(std::log(2.2 * h0) + 0.45 * rng.normal());
  return std::clamp(w, kMinWordFactor * h0, kMaxWordFactor * h0);
}

// One laid-out line before alignment: word extents left to right.
struct PendingLine {
  std::vector<double> x0, x1;
  double y = 0.0;
  bool list_first = false;  // index 0 is a fixed bullet marker
};

PendingLine fill_line(Rng& rng, double x_start, double x_right, double y,
                      double h0) {
  PendingLine pl;
  pl.y = y;
  double gap = kWordGapFactor * h0;
  double cursor = x_start;
  while (true) {
    double w = sample_word_width(rng, h0);
    if (cursor + w > x_right) {
      if (!pl.x0.empty()) break;
      w = x_right - cursor;  // the column always fits at least one word
    }
    pl.x0.push_back(cursor);
    pl.x1.push_back(cursor + w);
    cursor += w + gap;
  }
  return pl;
}

void align_line(PendingLine& pl, Alignment alignment, bool last_of_paragraph,
                double x_right) {
  if (pl.x0.empty()) return;
  double extra = x_right - pl.x1.back();
  if (extra <= 0.0) return;
  size_t n = pl.x0.size();
  switch (alignment) {
    case Alignment::left:
      return;
    case Alignment::right:
      for (size_t k = 0; k < n; ++k) {
        pl.x0[k] += extra;
        pl.x1[k] += extra;
      }
      return;
    case Alignment::center:
      for (size_t k = 0; k < n; ++k) {
        pl.x0[k] += 0.5 * extra;
        pl.x1[k] += 0.5 * extra;
      }
      return;
    case Alignment::justified: {
      if (last_of_paragraph) return;
      size_t fixed = pl.list_first ? 2 : 1;  // marker and flush body stay put
      if (n <= fixed) return;
      double per = extra / (double)(n - fixed);
      for (size_t k = fixed; k < n; ++k) {
        double shift = per * (double)(k - fixed + 1);
        pl.x0[k] += shift;
        pl.x1[k] += shift;
      }
      return;
    }
  }
}

void commit_paragraph(Page& page, const std::vector<PendingLine>& lines,
                      double h0) {
  if (lines.empty()) return;
  std::vector<int> para;
  for (const auto& pl : lines) {
    Line raw;
    for (size_t k = 0; k < pl.x0.size(); ++k) {
      raw.words.push_back((int)page.ocr_words.size());
      page.ocr_words.push_back(Quad::rect(pl.x0[k], pl.y, pl.x1[k], pl.y + h0));
    }
    Quad box = Quad::rect(pl.x0.front(), pl.y, pl.x1.back(), pl.y + h0);
    raw.box = box;
    para.push_back((int)page.gt_lines.size());
    page.gt_lines.push_back(box);
    page.ocr_raw_lines.push_back(std::move(raw));
  }
  page.gt_paragraphs.push_back(std::move(para));
}

// Emits one cell grid with a padded don't-care outline; each row becomes a
// raw line with no gt line.  Returns the cursor after the grid, or y
// unchanged when it does not fit.
double emit_table(Page& page, Rng& rng, double x0, double content, double y,
                  double h0, double pitch, double y_limit) {
  int rows = rng.uniform_int(3, 6);
  int cols = rng.uniform_int(2, 4);
  double cell_gap = 0.5 * h0;
  double cell_w = (content - (cols - 1) * cell_gap) / cols;
  double top = y + 0.5 * h0;
  double bottom = top + rows * pitch;
  if (cell_w < kMinWordFactor * h0 || bottom > y_limit) return y;
  for (int r = 0; r < rows; ++r) {
    Line row_line;
    double cy = top + r * pitch + 0.5 * (pitch - h0);
    for (int c = 0; c < cols; ++c) {
      double cx = x0 + c * (cell_w + cell_gap);
      double w = std::min(sample_word_width(rng, h0), 0.9 * cell_w);
      row_line.words.push_back((int)page.ocr_words.size());
      page.ocr_words.push_back(Quad::rect(cx, cy, cx + w, cy + h0));
    }
    row_line.box = tight_line_box(page.ocr_words, row_line.words);
    page.ocr_raw_lines.push_back(std::move(row_line));
  }
  double pad = 0.3 * h0;
  page.dont_care.push_back(
      Quad::rect(x0 - pad, top - pad, x0 + content + pad, bottom + pad));
  return bottom + 0.5 * h0;
}

void validate_fraction(double v, const char* what) {
  if (!(v > 0.0) || !(v <= 1.0))
    throw std::invalid_argument(std::string("generate_page: ") + what +
                                " must be in (0, 1]");
}

void validate_probability(double v, const char* what, const char* fn) {
  if (!(v >= 0.0) || !(v <= 1.0))
    throw std::invalid_argument(std::string(fn) + ": " + what +
                                " must be in [0, 1]");
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

Point unit_or_x(Point v) {
  double len = std::hypot(v.x, v.y);
  return len > 0.0 ? v * (1.0 / len) : Point{1.0, 0.0};
}

// Row-major 3x3 homography from four corner correspondences, solved by
// elimination with partial pivoting.  False when the corners collapse.
bool homography_from_corners(const std::array<Point, 4>& src,
                             const std::array<Point, 4>& dst,
                             std::array<double, 9>& out) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    double x = src[i].x, y = src[i].y;
    double bx = dst[i].x, by = dst[i].y;
    double* r0 = a[2 * i];
    double* r1 = a[2 * i + 1];
    r0[0] = x;
    r0[1] = y;
    r0[2] = 1.0;
    r0[6] = -x * bx;
    r0[7] = -y * bx;
    r0[8] = bx;
    r1[3] = x;
    r1[4] = y;
    r1[5] = 1.0;
    r1[6] = -x * by;
    r1[7] = -y * by;
    r1[8] = by;
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    if (pivot != col)
      for (int c = 0; c < 9; ++c) std::swap(a[pivot][c], a[col][c]);
    for (int r = col + 1; r < 8; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (int col = 7; col >= 0; --col) {
    double s = a[col][8];
    for (int c = col + 1; c < 8; ++c) s -= a[col][c] * out[c];
    out[col] = s / a[col][col];
  }
  out[8] = 1.0;
  return true;
}

double quad_signed_area(const Quad& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point& a = q.c[i];
    const Point& b = q.c[(i + 1) % 4];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool quad_convex(const Quad& q) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    Point e1 = q.c[(i + 1) % 4] - q.c[i];
    Point e2 = q.c[(i + 2) % 4] - q.c[(i + 1) % 4];
    double cr = cross(e1, e2);
    if (cr == 0.0) continue;
    int s = cr > 0.0 ? 1 : -1;
    if (sign == 0)
      sign = s;
    else if (s != sign)
      return false;
  }
  return sign != 0;
}

// Shortest path between the endpoints of edge `skip` that avoids the edge
// itself; +inf when they disconnect.
double detour_distance(const PageGraph& graph,
                       const std::vector<std::vector<std::pair<int, int>>>& adj,
                       int skip) {
  int src = graph.edges[skip].u;
  int dst = graph.edges[skip].v;
  std::vector<double> dist(graph.node_count,
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    for (auto [v, e] : adj[u]) {
      if (e == skip) continue;
      double nd = d + graph.edges[e].length;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist[dst];
}

}  // namespace

StyleSpec sample_style(uint64_t seed) {
  Rng rng(seed);
  StyleSpec s;
  s.column_count = rng.uniform_int(1, 3);
  s.alignment = static_cast<Alignment>(rng.uniform_int(0, 3));
  s.separator =
      rng.bernoulli(0.5) ? Separator::indent : Separator::vertical_space;
  if (s.alignment == Alignment::right || s.alignment == Alignment::center)
    s.separator = Separator::vertical_space;  // no shared edge to indent from
  s.column_width_fraction = rng.uniform(0.80, 0.94);
  s.left_margin_fraction = rng.uniform(0.04, 0.10);
  s.line_height_factor = rng.uniform(1.15, 1.65);
  s.font_scale = rng.uniform(0.75, 1.25);
  s.list_item_probability = rng.uniform(0.0, 0.30);
  s.table_probability = rng.uniform(0.0, 0.30);
  return s;
}

Page generate_page(const StyleSpec& style, uint64_t seed) {
  if (style.column_count < 1 || style.column_count > 3)
    throw std::invalid_argument("generate_page: column_count must be 1..3");
  validate_fraction(style.column_width_fraction, "column_width_fraction");
  validate_fraction(style.left_margin_fraction, "left_margin_fraction");
  if (!(style.line_height_factor >= 1.0))
    throw std::invalid_argument("generate_page: line_height_factor must be >= 1");
  if (!(style.font_scale > 0.0))
    throw std::invalid_argument("generate_page: font_scale must be positive");
  validate_probability(style.list_item_probability, "list_item_probability",
                       "generate_page");
  validate_probability(style.table_probability, "table_probability",
                       "generate_page");

  double h0 = kBaseWordHeight * style.font_scale;
  double pitch = h0 * style.line_height_factor;
  double margin_x = style.left_margin_fraction * kPageWidth;
  double margin_y = kTopMarginFraction * kPageHeight;
  double slot = (kPageWidth - 2.0 * margin_x) / style.column_count;
  double content = slot * style.column_width_fraction;
  double indent = kIndentFactor * h0;
  double min_line = indent + (2.0 * kMinWordFactor + kWordGapFactor) * h0;
  if (content < min_line || margin_y + h0 > kPageHeight - margin_y)
    throw std::invalid_argument("generate_page: style cannot fit a line");
  double y_limit = kPageHeight - margin_y;

  Page page;
  page.width = kPageWidth;
  page.height = kPageHeight;
  Rng rng(seed);
  bool want_table = rng.bernoulli(style.table_probability);
  int table_col = rng.uniform_int(0, style.column_count - 1);
  int table_after = rng.uniform_int(1, 5);
  bool table_done = false;

  for (int col = 0; col < style.column_count; ++col) {
    double x0 = margin_x + col * slot;
    double x_right = x0 + content;
    double y = margin_y;
    bool first_para = true;
    int paras_in_col = 0;
    while (y + h0 <= y_limit) {
      if (want_table && !table_done && col == table_col &&
          paras_in_col >= table_after) {
        double after = emit_table(page, rng, x0, content, y, h0, pitch, y_limit);
        table_done = true;
        if (after != y) {
          y = after;
          continue;
        }
      }
      if (!first_para && style.separator == Separator::vertical_space) {
        y += kParagraphLeading * pitch;
        if (y + h0 > y_limit) break;
      }
      int target = rng.uniform_int(1, 8);
      bool is_list = rng.bernoulli(style.list_item_probability);
      std::vector<PendingLine> lines;
      for (int li = 0; li < target && y + h0 <= y_limit; ++li) {
        double xs = x0;
        if (is_list)
          xs = x0 + indent;  // hanging indent on every line
        else if (style.separator == Separator::indent && li == 0)
          xs = x0 + indent;
        PendingLine pl = fill_line(rng, xs, x_right, y, h0);
        if (is_list && li == 0) {
          pl.x0.insert(pl.x0.begin(), x0);
          pl.x1.insert(pl.x1.begin(), x0 + kMarkerFactor * h0);
          pl.list_first = true;
        }
        lines.push_back(std::move(pl));
        y += pitch;
      }
      for (size_t k = 0; k < lines.size(); ++k)
        align_line(lines[k], style.alignment, k + 1 == lines.size(), x_right);
      commit_paragraph(page, lines, h0);
      first_para = false;
      ++paras_in_col;
    }
  }
  if (page.gt_lines.empty())
    throw std::invalid_argument("generate_page: style cannot fit a line");
  return page;
}

Page augment_page(const Page& page, const AugmentSpec& spec) {
  if (spec.rotation_range < 0.0 || spec.perspective_range < 0.0 ||
      spec.perspective_range > 0.25)
    throw std::invalid_argument("augment_page: ranges out of bounds");
  if (spec.rotation_range == 0.0 && spec.perspective_range == 0.0) return page;

  Rng rng(spec.seed);
  Point pivot{0.5 * page.width, 0.5 * page.height};
  for (int attempt = 0; attempt < 20; ++attempt) {
    double theta =
        spec.rotation_range > 0.0
            ? rng.uniform(-spec.rotation_range, spec.rotation_range)
            : 0.0;
    bool use_h = spec.perspective_range > 0.0;
    std::array<double, 9> hm = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    if (use_h) {
      std::array<Point, 4> src = {Point{0, 0}, Point{page.width, 0},
                                  Point{page.width, page.height},
                                  Point{0, page.height}};
      std::array<Point, 4> dst = src;
      for (auto& p : dst) {
        p.x += rng.uniform(-spec.perspective_range, spec.perspective_range) *
               page.width;
        p.y += rng.uniform(-spec.perspective_range, spec.perspective_range) *
               page.height;
      }
      if (!homography_from_corners(src, dst, hm)) continue;
    }
    double c = std::cos(theta), s = std::sin(theta);
    bool ok = true;
    auto map_point = [&](Point p) {
      if (use_h) {
        double w = hm[6] * p.x + hm[7] * p.y + hm[8];
        if (std::abs(w) < 1e-9) {
          ok = false;
          w = 1.0;
        }
        p = {(hm[0] * p.x + hm[1] * p.y + hm[2]) / w,
             (hm[3] * p.x + hm[4] * p.y + hm[5]) / w};
      }
      if (theta != 0.0) {
        Point d = p - pivot;
        p = pivot + Point{c * d.x - s * d.y, s * d.x + c * d.y};
      }
      return p;
    };
    auto map_quad = [&](Quad& q) {
      double before = std::abs(quad_signed_area(q));
      for (auto& pt : q.c) pt = map_point(pt);
      if (before <= 0.0) return;
      if (!quad_convex(q) || std::abs(quad_signed_area(q)) < 0.05 * before)
        ok = false;
    };

    Page out = page;
    for (auto& q : out.ocr_words) map_quad(q);
    for (auto& l : out.ocr_raw_lines) map_quad(l.box);
    for (auto& q : out.gt_lines) map_quad(q);
    for (auto& q : out.dont_care) map_quad(q);
    if (ok) return out;
  }
  throw std::runtime_error("augment_page: transform keeps collapsing boxes");
}

Page simulate_ocr(const Page& page, uint64_t seed, const OcrSpec& spec) {
  validate_probability(spec.p_merge, "p_merge", "simulate_ocr");
  validate_probability(spec.p_break, "p_break", "simulate_ocr");
  if (spec.jitter < 0.0 || spec.jitter > 0.5)
    throw std::invalid_argument("simulate_ocr: jitter must be in [0, 0.5]");

  Rng rng(seed);
  std::vector<std::vector<int>> lines;
  for (const auto& l : page.ocr_raw_lines)
    if (!l.words.empty()) lines.push_back(l.words);
  int n = (int)lines.size();

  std::vector<Quad> lb(n);
  std::vector<Point> dir(n), ctr(n);
  std::vector<double> height(n);
  for (int i = 0; i < n; ++i) {
    lb[i] = tight_line_box(page.ocr_words, lines[i]);
    dir[i] = unit_or_x(lb[i].c[1] - lb[i].c[0]);
    ctr[i] = lb[i].center();
    height[i] = lb[i].height();
  }
  auto span = [&](const Quad& q, Point u) {
    double lo = dot(q.c[0], u), hi = lo;
    for (int k = 1; k < 4; ++k) {
      double v = dot(q.c[k], u);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return std::pair<double, double>{lo, hi};
  };

  // same-row lines: nearly parallel, transversally aligned, and separated by
  // a positive but modest longitudinal gap
  double max_gap = 0.35 * std::max(page.width, page.height);
  UnionFind rows(std::max(n, 1));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (dot(dir[i], dir[j]) < std::cos(0.15)) continue;
      Point u = unit_or_x(dir[i] + dir[j]);
      Point nrm{-u.y, u.x};
      if (std::abs(dot(ctr[i], nrm) - dot(ctr[j], nrm)) >
          0.5 * std::min(height[i], height[j]))
        continue;
      auto [ilo, ihi] = span(lb[i], u);
      auto [jlo, jhi] = span(lb[j], u);
      double gap = std::max(jlo - ihi, ilo - jhi);
      if (gap <= 0.0 || gap > max_gap) continue;
      rows.unite(i, j);
    }

  // walk rows in first-member order and merge neighbor junctions
  std::vector<std::vector<int>> row_members(std::max(n, 1));
  for (int i = 0; i < n; ++i) row_members[rows.find(i)].push_back(i);
  UnionFind merged(std::max(n, 1));
  std::vector<char> row_done(std::max(n, 1), 0);
  for (int i = 0; i < n; ++i) {
    int root = rows.find(i);
    if (row_done[root]) continue;
    row_done[root] = 1;
    std::vector<int> members = row_members[root];
    Point u{0.0, 0.0};
    for (int m : members) u = u + dir[m];
    u = unit_or_x(u);
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      double pa = dot(ctr[a], u), pb = dot(ctr[b], u);
      if (pa != pb) return pa < pb;
      return a < b;
    });
    for (size_t k = 1; k < members.size(); ++k)
      if (rng.bernoulli(spec.p_merge)) merged.unite(members[k - 1], members[k]);
  }

  std::vector<std::vector<int>> joined;
  {
    std::vector<std::vector<int>> groups(std::max(n, 1));
    for (int i = 0; i < n; ++i) groups[merged.find(i)].push_back(i);
    for (int i = 0; i < n; ++i) {
      auto& g = groups[merged.find(i)];
      if (g.empty() || g.front() != i) continue;
      std::vector<int> words;
      for (int m : g)
        words.insert(words.end(), lines[m].begin(), lines[m].end());
      joined.push_back(reading_order(page.ocr_words, words));
    }
  }

  std::vector<std::vector<int>> final_lines;
  for (auto& wl : joined) {
    if (wl.size() >= 2 && rng.bernoulli(spec.p_break)) {
      int cut = rng.uniform_int(1, (int)wl.size() - 1);
      final_lines.emplace_back(wl.begin(), wl.begin() + cut);
      final_lines.emplace_back(wl.begin() + cut, wl.end());
    } else {
      final_lines.push_back(std::move(wl));
    }
  }

  Page out = page;
  if (spec.jitter > 0.0) {
    for (auto& q : out.ocr_words) {
      double amp = spec.jitter * q.height();
      for (auto& pt : q.c) {
        pt.x += rng.uniform(-amp, amp);
        pt.y += rng.uniform(-amp, amp);
      }
    }
  }
  out.ocr_raw_lines.clear();
  for (auto& wl : final_lines) {
    Line l;
    l.words = reading_order(out.ocr_words, wl);
    l.box = tight_line_box(out.ocr_words, l.words);
    out.ocr_raw_lines.push_back(std::move(l));
  }
  out.node_labels.clear();
  out.edge_labels.clear();
  return out;
}

std::vector<int> allocate_to_gt(const std::vector<Quad>& boxes,
                                const std::vector<Quad>& gt_lines) {
  struct Aabb {
    double x0, y0, x1, y1;
  };
  auto bound = [](const Quad& q) {
    Aabb b{q.c[0].x, q.c[0].y, q.c[0].x, q.c[0].y};
    for (int k = 1; k < 4; ++k) {
      b.x0 = std::min(b.x0, q.c[k].x);
      b.y0 = std::min(b.y0, q.c[k].y);
      b.x1 = std::max(b.x1, q.c[k].x);
      b.y1 = std::max(b.y1, q.c[k].y);
    }
    return b;
  };
  std::vector<Aabb> gb(gt_lines.size());
  for (size_t g = 0; g < gt_lines.size(); ++g) gb[g] = bound(gt_lines[g]);

  std::vector<int> out(boxes.size(), -1);
  for (size_t i = 0; i < boxes.size(); ++i) {
    Aabb bb = bound(boxes[i]);
    double best = 0.0;
    for (size_t g = 0; g < gt_lines.size(); ++g) {
      if (bb.x1 <= gb[g].x0 || gb[g].x1 <= bb.x0 || bb.y1 <= gb[g].y0 ||
          gb[g].y1 <= bb.y0)
        continue;
      double a = quad_intersection_area(boxes[i], gt_lines[g]);
      if (a > best) {
        best = a;
        out[i] = (int)g;
      }
    }
  }
  return out;
}

std::vector<NodeLabel> derive_split_labels(const Page& page) {
  std::vector<int> alloc = allocate_to_gt(page.ocr_words, page.gt_lines);
  std::vector<NodeLabel> labels(page.ocr_words.size());
  for (size_t i = 0; i < alloc.size(); ++i) {
    bool masked = alloc[i] < 0;
    for (const auto& dc : page.dont_care) {
      if (masked) break;
      if (quad_intersection_area(page.ocr_words[i], dc) > 0.0) masked = true;
    }
    if (masked) {
      labels[i].weight = 0.0f;
      alloc[i] = -1;
    }
  }
  std::vector<std::vector<int>> members(page.gt_lines.size());
  for (size_t i = 0; i < alloc.size(); ++i)
    if (alloc[i] >= 0) members[alloc[i]].push_back((int)i);
  for (size_t g = 0; g < members.size(); ++g) {
    if (members[g].empty()) continue;
    Point u = unit_or_x(page.gt_lines[g].c[1] - page.gt_lines[g].c[0]);
    auto& ms = members[g];
    std::sort(ms.begin(), ms.end(), [&](int a, int b) {
      double pa = dot(page.ocr_words[a].center(), u);
      double pb = dot(page.ocr_words[b].center(), u);
      if (pa != pb) return pa < pb;
      return a < b;
    });
    labels[ms.front()].is_start = true;
    labels[ms.back()].is_end = true;
  }
  return labels;
}

std::vector<Line> label_split_lines(const Page& page) {
  std::vector<NodeLabel> labels = derive_split_labels(page);
  std::vector<double> start(labels.size()), end(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    start[i] = labels[i].is_start ? 1.0 : 0.0;
    end[i] = labels[i].is_end ? 1.0 : 0.0;
  }
  return apply_line_cuts(page.ocr_words, page.ocr_raw_lines, start, end);
}

ClusterLabels derive_cluster_labels(const Page& page,
                                    const std::vector<Line>& split_lines) {
  ClusterLabels out;
  int n = (int)split_lines.size();
  out.graph.node_count = 0;
  if (n == 0) return out;

  std::vector<Quad> boxes(n);
  for (int i = 0; i < n; ++i) boxes[i] = split_lines[i].box;
  out.graph = beta_skeleton_boxes(boxes);

  std::vector<int> alloc = allocate_to_gt(boxes, page.gt_lines);
  for (int i = 0; i < n; ++i) {
    double area = quad_intersection_area(boxes[i], boxes[i]);
    for (const auto& dc : page.dont_care)
      if (quad_intersection_area(boxes[i], dc) > 0.5 * area) alloc[i] = -1;
  }

  std::vector<int> walloc = allocate_to_gt(page.ocr_words, page.gt_lines);
  for (const auto& line : split_lines) {
    int seen = -1;
    for (int w : line.words) {
      if (w < 0 || w >= (int)walloc.size() || walloc[w] < 0) continue;
      if (seen >= 0 && walloc[w] != seen) {
        out.under_split = true;
        break;
      }
      seen = walloc[w];
    }
    if (out.under_split) break;
  }

  std::vector<int> para_of(page.gt_lines.size(), -1);
  for (size_t p = 0; p < page.gt_paragraphs.size(); ++p)
    for (int li : page.gt_paragraphs[p])
      if (li >= 0 && li < (int)para_of.size()) para_of[li] = (int)p;

  std::vector<std::vector<std::pair<int, int>>> adj;
  if (!page.has_line_gt) {
    adj.resize(out.graph.node_count);
    for (size_t e = 0; e < out.graph.edges.size(); ++e) {
      adj[out.graph.edges[e].u].push_back({out.graph.edges[e].v, (int)e});
      adj[out.graph.edges[e].v].push_back({out.graph.edges[e].u, (int)e});
    }
  }

  out.labels.resize(out.graph.edges.size());
  for (size_t e = 0; e < out.graph.edges.size(); ++e) {
    int gi = alloc[out.graph.edges[e].u];
    int gj = alloc[out.graph.edges[e].v];
    EdgeLabel& label = out.labels[e];
    if (gi < 0 || gj < 0) {
      label.weight = 0.0f;
      continue;
    }
    if (page.has_line_gt) {
      bool neighbors = para_of[gi] >= 0 && para_of[gi] == para_of[gj] &&
                       std::abs(gi - gj) == 1;
      label.same_paragraph = gi == gj || neighbors;
    } else {
      // without line-level gt, adjacency means no detour is shorter than
      // the edge itself
      label.same_paragraph =
          para_of[gi] >= 0 && gi == gj &&
          !(detour_distance(out.graph, adj, (int)e) < out.graph.edges[e].length);
    }
  }
  return out;
}

LabeledPage split_training_page(const Page& page) {
  LabeledPage lp;
  lp.features =
      word_feature_matrix(page.ocr_words, page_norm_frame(page.ocr_words));
  size_t n = page.ocr_words.size();
  if (n == 0) return lp;
  lp.graph = beta_skeleton_boxes(page.ocr_words);
  std::vector<NodeLabel> labels = derive_split_labels(page);
  lp.labels.resize(2 * n);
  for (size_t i = 0; i < n; ++i) {
    if (labels[i].weight == 0.0f) {
      lp.labels[2 * i] = -1;
      lp.labels[2 * i + 1] = -1;
    } else {
      lp.labels[2 * i] = labels[i].is_start ? 1 : 0;
      lp.labels[2 * i + 1] = labels[i].is_end ? 1 : 0;
    }
  }
  return lp;
}

std::optional<LabeledPage> cluster_training_page(const Page& page) {
  std::vector<Line> split = label_split_lines(page);
  ClusterLabels cl = derive_cluster_labels(page, split);
  if (cl.under_split) return std::nullopt;
  LabeledPage lp;
  lp.graph = std::move(cl.graph);
  lp.features = line_feature_matrix(split, page.ocr_words,
                                    page_norm_frame(page.ocr_words));
  lp.labels.resize(cl.labels.size());
  for (size_t e = 0; e < cl.labels.size(); ++e) {
    if (cl.labels[e].weight == 0.0f)
      lp.labels[e] = -1;
    else
      lp.labels[e] = cl.labels[e].same_paragraph ? 1 : 0;
  }
  return lp;
}

}  // namespace parabox
