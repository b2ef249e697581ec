#include "parabox/geometry.hpp"
#include "parabox/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace parabox {

double median_box_height(const std::vector<Quad>& boxes) {
  std::vector<double> hs;
  hs.reserve(boxes.size());
  for (const auto& b : boxes) hs.push_back(b.height());
  std::sort(hs.begin(), hs.end());
  const size_t n = hs.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return hs[n / 2];
  return (hs[n / 2 - 1] + hs[n / 2]) / 2.0;
}

std::vector<BoxSample> sample_box_points(const std::vector<Quad>& boxes,
                                         const SkeletonConfig& cfg) {
  double med = median_box_height(boxes);
  if (!(med > 0.0))
    throw std::invalid_argument("sample_box_points: boxes need positive heights");
  if (!(cfg.peripheral_density > 0.0) || !(cfg.midline_density > 0.0))
    throw std::invalid_argument("sample_box_points: densities must be positive");
  const double sp = med / cfg.peripheral_density;
  const double sm = med / cfg.midline_density;

  // ceil with a relative nudge so rotating a box never flips the count when
  // an edge length lands within rounding noise of a multiple of the spacing
  auto segments = [](double len, double spacing) {
    return std::max(1, (int)std::ceil(len / spacing - 1e-9));
  };

  std::vector<BoxSample> out;
  for (int b = 0; b < (int)boxes.size(); ++b) {
    const Quad& q = boxes[b];
    for (int e = 0; e < 4; ++e) {
      Point a = q.c[e];
      Point d = q.c[(e + 1) % 4];
      int cnt = segments(dist(a, d), sp);
      for (int k = 0; k < cnt; ++k)
        out.push_back({a + (d - a) * ((double)k / cnt), b, false});
    }
    Point m0 = (q.c[0] + q.c[3]) * 0.5;
    Point m1 = (q.c[1] + q.c[2]) * 0.5;
    int cnt = segments(dist(m0, m1), sm);
    for (int k = 1; k < cnt; ++k)
      out.push_back({m0 + (m1 - m0) * ((double)k / cnt), b, true});
  }
  return out;
}

namespace {

// uniform grid over box bounding rectangles for point-in-which-box queries
class BoxGrid {
 public:
  explicit BoxGrid(const std::vector<Quad>& boxes) : boxes_(boxes) {
    double max_dim = 0.0;
    for (const auto& b : boxes) {
      auto [lo, hi] = bbox(b);
      max_dim = std::max({max_dim, hi.x - lo.x, hi.y - lo.y});
    }
    cell_ = std::max(max_dim, 1e-9);
    for (int i = 0; i < (int)boxes.size(); ++i) {
      auto [lo, hi] = bbox(boxes_[i]);
      for (int64_t cx = coord(lo.x); cx <= coord(hi.x); ++cx)
        for (int64_t cy = coord(lo.y); cy <= coord(hi.y); ++cy)
          cells_[key(cx, cy)].push_back(i);
    }
  }

  // boxes whose bounding rectangle could cover p
  const std::vector<int>& candidates(const Point& p) const {
    static const std::vector<int> empty;
    auto it = cells_.find(key(coord(p.x), coord(p.y)));
    return it == cells_.end() ? empty : it->second;
  }

  static std::pair<Point, Point> bbox(const Quad& q) {
    Point lo = q.c[0], hi = q.c[0];
    for (int i = 1; i < 4; ++i) {
      lo.x = std::min(lo.x, q.c[i].x);
      lo.y = std::min(lo.y, q.c[i].y);
      hi.x = std::max(hi.x, q.c[i].x);
      hi.y = std::max(hi.y, q.c[i].y);
    }
    return {lo, hi};
  }

 private:
  int64_t coord(double x) const { return (int64_t)std::floor(x / cell_); }
  static uint64_t key(int64_t cx, int64_t cy) {
    return (uint64_t)(uint32_t)cx * 0x9e3779b97f4a7c15ull + (uint64_t)(uint32_t)cy;
  }

  const std::vector<Quad>& boxes_;
  double cell_ = 1.0;
  std::unordered_map<uint64_t, std::vector<int>> cells_;
};

}  // namespace

PageGraph beta_skeleton_boxes(const std::vector<Quad>& boxes,
                              const SkeletonConfig& cfg) {
  const int nb = (int)boxes.size();
  PageGraph g;
  g.node_count = nb;
  if (nb == 0) return g;
  if (cfg.beta != 1.0)
    throw std::invalid_argument("beta_skeleton_boxes: only beta = 1 is supported");
  if (cfg.max_box_diagonal > 0.0) {
    for (const auto& b : boxes) {
      double diag = std::max(dist(b.c[0], b.c[2]), dist(b.c[1], b.c[3]));
      if (diag > cfg.max_box_diagonal)
        throw std::invalid_argument(
            "beta_skeleton_boxes: box diagonal exceeds the configured limit");
    }
  }

  const auto samples = sample_box_points(boxes, cfg);
  const int ns = (int)samples.size();
  std::vector<Point> pts;
  pts.reserve(ns);
  for (const auto& s : samples) pts.push_back(s.p);
  const DelaunayResult dres = delaunay_triangulate(pts);

  // group coincident samples; owners and internality live on the sites
  std::vector<std::vector<int>> box_samples(nb);
  for (int i = 0; i < ns; ++i) box_samples[samples[i].box].push_back(i);
  std::vector<std::vector<int>> site_owners(ns);
  std::vector<std::vector<int>> site_mid_owners(ns);
  for (int i = 0; i < ns; ++i) {
    const int r = dres.representative[i];
    auto& owners = site_owners[r];
    if (std::find(owners.begin(), owners.end(), samples[i].box) == owners.end())
      owners.push_back(samples[i].box);
    if (samples[i].midline) {
      auto& mid = site_mid_owners[r];
      if (std::find(mid.begin(), mid.end(), samples[i].box) == mid.end())
        mid.push_back(samples[i].box);
    }
  }

  // containment of a site in a box it was sampled from is decided by the
  // sample kind, not arithmetic: midline points sit strictly inside their box
  // and peripheral points sit exactly on its boundary, but rounding puts the
  // computed coordinates a last-place unit to either side
  auto inside_box = [&](int b, int site) {
    const auto& mid = site_mid_owners[site];
    if (std::find(mid.begin(), mid.end(), b) != mid.end()) return true;
    const auto& owners = site_owners[site];
    if (std::find(owners.begin(), owners.end(), b) != owners.end()) return false;
    return quad_contains_strict(boxes[b], pts[site]);
  };

  // a site is internal when it lies strictly inside some box; discovered by
  // flooding outward from each box's own samples through the triangulation,
  // moving only across points strictly inside that box
  const auto adj = dres.graph.adjacency();
  std::vector<char> internal(ns, 0);
  std::vector<int> seen(ns, -1);
  std::vector<int> stack;
  for (int b = 0; b < nb; ++b) {
    stack.clear();
    for (int i : box_samples[b]) {
      int r = dres.representative[i];
      if (seen[r] == b) continue;
      seen[r] = b;
      if (inside_box(b, r)) internal[r] = 1;
      stack.push_back(r);
    }
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u]) {
        if (seen[w] == b) continue;
        seen[w] = b;
        if (inside_box(b, w)) {
          internal[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }

  std::map<std::pair<int, int>, double> best;
  auto offer = [&best](int a, int b, double len) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    auto [it, inserted] = best.try_emplace(key, len);
    if (!inserted && len < it->second) it->second = len;
  };

  // boxes that strictly contain another box's peripheral point intersect it;
  // such pairs connect at distance zero.  An excessive number of them means
  // the input is not a plausible page and the quadratic blowup is refused.
  const size_t intersect_cap = 4 * (size_t)nb + 16;
  {
    BoxGrid grid(boxes);
    std::map<std::pair<int, int>, char> hits;
    for (const auto& s : samples) {
      if (s.midline) continue;
      for (int b : grid.candidates(s.p)) {
        if (b == s.box) continue;
        if (!quad_contains_strict(boxes[b], s.p)) continue;
        auto key = std::minmax(s.box, b);
        hits.emplace(key, 1);
        if (hits.size() > intersect_cap)
          throw std::runtime_error(
              "beta_skeleton_boxes: pathological overlap structure "
              "(intersecting pairs exceed 4n + 16)");
      }
    }
    for (const auto& [pair, _] : hits) offer(pair.first, pair.second, 0.0);
  }

  // coincident boundary points of different boxes touch at distance zero
  for (int s = 0; s < ns; ++s) {
    const auto& owners = site_owners[s];
    if (owners.size() < 2 || internal[s]) continue;
    for (size_t i = 0; i < owners.size(); ++i)
      for (size_t j = i + 1; j < owners.size(); ++j)
        offer(owners[i], owners[j], 0.0);
  }

  // diametral-disk filter over the triangulation edges; the flanking apexes
  // are the extremal-angle witnesses, so checking them is exact
  for (size_t idx = 0; idx < dres.graph.edges.size(); ++idx) {
    const GraphEdge& e = dres.graph.edges[idx];
    if (internal[e.u] || internal[e.v]) continue;
    bool blocked = false;
    for (int apex : dres.edge_apex[idx]) {
      if (apex < 0) continue;
      if (diameter_dot_sign(pts[e.u], pts[e.v], pts[apex]) < 0) blocked = true;
    }
    if (blocked) continue;
    for (int a : site_owners[e.u])
      for (int b : site_owners[e.v]) offer(a, b, e.length);
  }

  // midline points block disk tests without being usable as endpoints, so a
  // box cluster can end up cut off from the rest; stitch the components back
  // together with the shortest eligible cross-component site pair per merge
  {
    UnionFind uf(nb);
    int components = nb;
    for (const auto& [pair, len] : best) {
      (void)len;
      if (uf.unite(pair.first, pair.second)) --components;
    }
    std::vector<int> live;
    for (int s = 0; s < ns; ++s)
      if (!site_owners[s].empty() && !internal[s]) live.push_back(s);
    while (components > 1) {
      double bl = 0.0;
      int bu = -1, bv = -1;
      for (size_t i = 0; i < live.size(); ++i) {
        int oa = *std::min_element(site_owners[live[i]].begin(),
                                   site_owners[live[i]].end());
        for (size_t j = i + 1; j < live.size(); ++j) {
          int ob = *std::min_element(site_owners[live[j]].begin(),
                                     site_owners[live[j]].end());
          if (uf.connected(oa, ob)) continue;
          double len = dist(pts[live[i]], pts[live[j]]);
          auto [u, v] = std::minmax(oa, ob);
          if (bu < 0 || len < bl || (len == bl && std::pair{u, v} < std::pair{bu, bv}))
            bl = len, bu = u, bv = v;
        }
      }
      if (bu < 0)
        throw std::logic_error(
            "beta_skeleton_boxes: disconnected components with no eligible "
            "boundary points left to join");
      offer(bu, bv, bl);
      uf.unite(bu, bv);
      --components;
    }
  }

  for (const auto& [pair, len] : best)
    g.edges.push_back({pair.first, pair.second, len});
  return g;
}

namespace {

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// closed test: touching endpoints and collinear overlap both count
bool segments_intersect(const Point& a, const Point& b, const Point& c,
                        const Point& d) {
  int o1 = orient2d_sign(a, b, c);
  int o2 = orient2d_sign(a, b, d);
  int o3 = orient2d_sign(c, d, a);
  int o4 = orient2d_sign(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool quad_contains_closed(const Quad& q, const Point& p) {
  int sign = 0;
  for (int e = 0; e < 4; ++e) {
    int s = orient2d_sign(q.c[e], q.c[(e + 1) % 4], p);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

bool segment_hits_quad(const Point& a, const Point& b, const Quad& q) {
  if (quad_contains_closed(q, a) || quad_contains_closed(q, b)) return true;
  for (int e = 0; e < 4; ++e)
    if (segments_intersect(a, b, q.c[e], q.c[(e + 1) % 4])) return true;
  return false;
}

// span of a quad along a line parallel to one axis: axis 0 means the
// vertical line x = coord, returning the covered y interval
std::optional<std::pair<double, double>> quad_line_span(const Quad& q, int axis,
                                                        double coord) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  auto add = [&](double v) {
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (int e = 0; e < 4; ++e) {
    const Point& c = q.c[e];
    const Point& d = q.c[(e + 1) % 4];
    double ca = axis == 0 ? c.x : c.y;
    double da = axis == 0 ? d.x : d.y;
    double cb = axis == 0 ? c.y : c.x;
    double db = axis == 0 ? d.y : d.x;
    if ((ca < coord && da < coord) || (ca > coord && da > coord)) continue;
    if (ca == da) {  // edge lies on the query line
      add(cb);
      add(db);
      continue;
    }
    double t = (coord - ca) / (da - ca);
    add(cb + t * (db - cb));
  }
  if (!any) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace

PageGraph line_of_sight_graph(const std::vector<Quad>& boxes,
                              LineOfSightMode mode) {
  const int nb = (int)boxes.size();
  PageGraph g;
  g.node_count = nb;
  if (nb < 2) return g;

  SkeletonConfig cfg;
  auto all_samples = sample_box_points(boxes, cfg);
  std::vector<std::vector<Point>> boundary(nb);
  for (const auto& s : all_samples)
    if (!s.midline) boundary[s.box].push_back(s.p);

  std::vector<std::pair<Point, Point>> bboxes(nb);
  for (int k = 0; k < nb; ++k) bboxes[k] = BoxGrid::bbox(boxes[k]);

  auto blocked_by_third = [&](const Point& a, const Point& b, int i, int j) {
    double xlo = std::min(a.x, b.x), xhi = std::max(a.x, b.x);
    double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
    for (int k = 0; k < nb; ++k) {
      if (k == i || k == j) continue;
      if (bboxes[k].second.x < xlo || bboxes[k].first.x > xhi ||
          bboxes[k].second.y < ylo || bboxes[k].first.y > yhi)
        continue;
      if (segment_hits_quad(a, b, boxes[k])) return true;
    }
    return false;
  };

  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      double len = -1.0;
      if (mode == LineOfSightMode::free_sight) {
        for (const Point& a : boundary[i])
          for (const Point& b : boundary[j]) {
            double d = dist(a, b);
            if (len >= 0.0 && d >= len) continue;
            if (!blocked_by_third(a, b, i, j)) len = d;
          }
      } else {
        auto [ilo, ihi] = BoxGrid::bbox(boxes[i]);
        auto [jlo, jhi] = BoxGrid::bbox(boxes[j]);
        for (int axis = 0; axis < 2; ++axis) {
          double lo = axis == 0 ? std::max(ilo.x, jlo.x) : std::max(ilo.y, jlo.y);
          double hi = axis == 0 ? std::min(ihi.x, jhi.x) : std::min(ihi.y, jhi.y);
          if (hi <= lo) continue;
          for (double f : {0.25, 0.5, 0.75}) {
            double coord = lo + (hi - lo) * f;
            auto si = quad_line_span(boxes[i], axis, coord);
            auto sj = quad_line_span(boxes[j], axis, coord);
            if (!si || !sj) continue;
            if (si->first <= sj->second && sj->first <= si->second) {
              len = 0.0;  // boxes meet on this line
              continue;
            }
            double glo = std::min(si->second, sj->second);
            double ghi = std::max(si->first, sj->first);
            double gap = ghi - glo;
            if (len >= 0.0 && gap >= len) continue;
            bool blocked = false;
            for (int k = 0; k < nb && !blocked; ++k) {
              if (k == i || k == j) continue;
              auto sk = quad_line_span(boxes[k], axis, coord);
              if (sk && sk->first <= ghi && glo <= sk->second) blocked = true;
            }
            if (!blocked) len = gap;
          }
        }
      }
      if (len >= 0.0) g.edges.push_back({i, j, len});
    }
  }
  return g;
}

}  // namespace parabox
