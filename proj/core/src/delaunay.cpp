#include "parabox/geometry.hpp"
#include "parabox/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

// Incremental Bowyer-Watson triangulation over exact predicates.  The region
// outside the convex hull is tiled with "ghost" triangles (one per hull edge,
// third vertex symbolic), which lets point location, cavity search and
// retriangulation treat interior and exterior insertions uniformly.

namespace parabox {
namespace {

constexpr int kGhost = -1;

struct Tri {
  int v[3];   // ghost triangles keep kGhost in slot 2
  int nb[3];  // neighbor across the edge opposite v[i]
  bool alive = true;
};

uint64_t coord_bits(double x) {
  if (x == 0.0) x = 0.0;  // collapse -0.0 onto +0.0
  return std::bit_cast<uint64_t>(x);
}

uint64_t point_key(const Point& p) {
  uint64_t h = coord_bits(p.x) * 0x9e3779b97f4a7c15ull;
  h ^= h >> 32;
  return h * 0xd6e8feb86659fd93ull + coord_bits(p.y);
}

struct Mesh {
  const std::vector<Point>& pts;  // site coordinates
  std::vector<Tri> tris;
  int last_real = -1;
  Rng walk_rng{0x51ee7u};  // breaks walk cycles on degenerate grids
  std::vector<int> mark;   // cavity epoch per triangle
  int epoch = 0;

  explicit Mesh(const std::vector<Point>& p) : pts(p) {}

  bool is_ghost(int t) const { return tris[t].v[2] == kGhost; }

  int add_tri(int a, int b, int c) {
    tris.push_back({{a, b, c}, {-1, -1, -1}, true});
    mark.push_back(0);
    return (int)tris.size() - 1;
  }

  // Ghost (x, y, G) stands for hull edge (y -> x) with the interior on its
  // left; a query point belongs to it when it lies strictly left of (x -> y),
  // or on the line strictly between x and y (the on-hull-edge case).
  bool ghost_contains(const Tri& t, const Point& p) const {
    const Point& x = pts[t.v[0]];
    const Point& y = pts[t.v[1]];
    int o = orient2d_sign(x, y, p);
    if (o != 0) return o > 0;
    return diameter_dot_sign(x, y, p) < 0;
  }

  // Cavity membership: strictly inside the circumdisk.  Points exactly on a
  // circumcircle stay out, so cocircular groups keep the diagonal chosen by
  // earlier insertions.
  bool disk_contains(int t, const Point& p) const {
    const Tri& tr = tris[t];
    if (tr.v[2] == kGhost) return ghost_contains(tr, p);
    return incircle_sign(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]], p) > 0;
  }

  void seed(int a, int b, int c) {
    if (orient2d_sign(pts[a], pts[b], pts[c]) < 0) std::swap(a, b);
    int t = add_tri(a, b, c);
    int gab = add_tri(b, a, kGhost);
    int gbc = add_tri(c, b, kGhost);
    int gca = add_tri(a, c, kGhost);
    tris[t].nb[0] = gbc;  // across (b, c)
    tris[t].nb[1] = gca;  // across (c, a)
    tris[t].nb[2] = gab;  // across (a, b)
    tris[gab].nb[0] = gca;
    tris[gab].nb[1] = gbc;
    tris[gab].nb[2] = t;
    tris[gbc].nb[0] = gab;
    tris[gbc].nb[1] = gca;
    tris[gbc].nb[2] = t;
    tris[gca].nb[0] = gbc;
    tris[gca].nb[1] = gab;
    tris[gca].nb[2] = t;
    last_real = t;
  }

  int locate(const Point& p) {
    int cur = last_real;
    size_t guard = 0;
    const size_t limit = 8 * tris.size() + 64;
    while (true) {
      if (++guard > limit) return locate_by_scan(p);
      const Tri& t = tris[cur];
      int exits[3];
      int ne = 0;
      for (int i = 0; i < 3; ++i) {
        const Point& a = pts[t.v[(i + 1) % 3]];
        const Point& b = pts[t.v[(i + 2) % 3]];
        if (orient2d_sign(a, b, p) < 0) exits[ne++] = i;
      }
      if (ne == 0) return cur;  // p inside or on the boundary of cur
      int pick = ne == 1 ? exits[0] : exits[walk_rng.next_u64() % ne];
      int nxt = t.nb[pick];
      if (is_ghost(nxt)) {
        // p is beyond the hull; walk the ghost ring to the edge that sees it
        int g = nxt;
        size_t ring_guard = 0;
        while (!ghost_contains(tris[g], p)) {
          g = tris[g].nb[0];
          if (++ring_guard > tris.size()) return locate_by_scan(p);
        }
        return g;
      }
      cur = nxt;
    }
  }

  int locate_by_scan(const Point& p) {
    for (int t = 0; t < (int)tris.size(); ++t)
      if (tris[t].alive && disk_contains(t, p)) return t;
    throw std::logic_error("delaunay: point location failed");
  }

  void insert(int site) {
    const Point& p = pts[site];
    int start = locate(p);
    // a located real triangle weakly contains p, hence strictly contains it
    // in its circumdisk; a located ghost already passed ghost_contains
    ++epoch;
    std::vector<int> cavity;
    std::vector<int> stack = {start};
    mark[start] = epoch;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int i = 0; i < 3; ++i) {
        int n = tris[t].nb[i];
        if (mark[n] == epoch) continue;
        if (disk_contains(n, p)) {
          mark[n] = epoch;
          stack.push_back(n);
        }
      }
    }

    struct Bnd {
      int x, y, outside, outside_slot;
    };
    std::vector<Bnd> boundary;
    for (int t : cavity) {
      for (int i = 0; i < 3; ++i) {
        int n = tris[t].nb[i];
        if (mark[n] == epoch) continue;
        int x = tris[t].v[(i + 1) % 3];
        int y = tris[t].v[(i + 2) % 3];
        int slot = -1;
        for (int j = 0; j < 3; ++j) {
          int a = tris[n].v[(j + 1) % 3];
          int b = tris[n].v[(j + 2) % 3];
          if ((a == x && b == y) || (a == y && b == x)) slot = j;
        }
        boundary.push_back({x, y, n, slot});
      }
    }

    for (int t : cavity) tris[t].alive = false;

    // fan: one new triangle per boundary edge, ghost vertex kept in slot 2
    std::map<std::pair<int, int>, std::pair<int, int>> open_edge;  // pair -> (tri, slot)
    int new_real = -1;
    for (const Bnd& e : boundary) {
      int t;
      if (e.x == kGhost)
        t = add_tri(e.y, site, kGhost);
      else if (e.y == kGhost)
        t = add_tri(site, e.x, kGhost);
      else
        t = add_tri(e.x, e.y, site);
      if (!is_ghost(t)) new_real = t;

      tris[t].nb[index_of_edge(t, e.x, e.y)] = e.outside;
      tris[e.outside].nb[e.outside_slot] = t;
      for (int i = 0; i < 3; ++i) {
        int a = tris[t].v[(i + 1) % 3];
        int b = tris[t].v[(i + 2) % 3];
        if ((a == e.x && b == e.y) || (a == e.y && b == e.x)) continue;
        auto key = std::minmax(a, b);
        auto it = open_edge.find(key);
        if (it == open_edge.end()) {
          open_edge[key] = {t, i};
        } else {
          tris[t].nb[i] = it->second.first;
          tris[it->second.first].nb[it->second.second] = t;
          open_edge.erase(it);
        }
      }
    }
    if (new_real < 0) throw std::logic_error("delaunay: cavity left no real triangle");
    if (!open_edge.empty()) throw std::logic_error("delaunay: open cavity boundary");
    last_real = new_real;
  }

  int index_of_edge(int t, int x, int y) const {
    for (int i = 0; i < 3; ++i) {
      int a = tris[t].v[(i + 1) % 3];
      int b = tris[t].v[(i + 2) % 3];
      if ((a == x && b == y) || (a == y && b == x)) return i;
    }
    throw std::logic_error("delaunay: edge not found");
  }
};

}  // namespace

DelaunayResult delaunay_triangulate(const std::vector<Point>& points) {
  const int n = (int)points.size();
  DelaunayResult res;
  res.graph.node_count = n;
  res.representative.resize(n);
  res.neighbors.resize(n);
  if (n == 0) return res;

  // merge duplicate coordinates onto their first occurrence
  std::unordered_map<uint64_t, std::vector<int>> buckets;
  std::vector<Point> sites;
  std::vector<int> site_orig;
  for (int i = 0; i < n; ++i) {
    uint64_t key = point_key(points[i]);
    auto& bucket = buckets[key];
    int found = -1;
    for (int s : bucket)
      if (points[site_orig[s]].x == points[i].x &&
          points[site_orig[s]].y == points[i].y) {
        found = s;
        break;
      }
    if (found < 0) {
      found = (int)sites.size();
      sites.push_back({points[i].x == 0.0 ? 0.0 : points[i].x,
                       points[i].y == 0.0 ? 0.0 : points[i].y});
      site_orig.push_back(i);
      bucket.push_back(found);
    }
    res.representative[i] = site_orig[found];
  }
  const int m = (int)sites.size();

  std::vector<std::pair<int, int>> pairs;  // site index pairs
  std::vector<std::array<int, 2>> pair_apex;

  auto push_edges_sorted = [&]() {
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [u, v] : pairs) {
      int a = site_orig[u];
      int b = site_orig[v];
      res.graph.edges.push_back({a, b, dist(points[a], points[b])});
    }
  };

  if (m == 1) {
    // nothing to connect
  } else if (m == 2) {
    pairs.push_back({0, 1});
    pair_apex.push_back({-1, -1});
    push_edges_sorted();
    res.edge_apex = pair_apex;
  } else {
    int k0 = -1;
    for (int j = 2; j < m && k0 < 0; ++j)
      if (orient2d_sign(sites[0], sites[1], sites[j]) != 0) k0 = j;

    if (k0 < 0) {
      // all sites collinear: the triangulation degenerates to the path along
      // the carrier line
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sites[a].x != sites[b].x ? sites[a].x < sites[b].x
                                        : sites[a].y < sites[b].y;
      });
      for (int i = 0; i + 1 < m; ++i) {
        auto [u, v] = std::minmax(order[i], order[i + 1]);
        pairs.push_back({u, v});
      }
      std::sort(pairs.begin(), pairs.end());
      pair_apex.assign(pairs.size(), {-1, -1});
      push_edges_sorted();
      res.edge_apex = pair_apex;
    } else {
      Mesh mesh(sites);
      mesh.seed(0, 1, k0);
      for (int j = 2; j < m; ++j) {
        if (j == k0) continue;
        mesh.insert(j);
      }

      // collect unique edges of the real triangles
      for (const Tri& t : mesh.tris) {
        if (!t.alive || t.v[2] == kGhost) continue;
        for (int i = 0; i < 3; ++i) {
          auto [u, v] = std::minmax(t.v[i], t.v[(i + 1) % 3]);
          pairs.push_back({u, v});
        }
      }
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      pair_apex.assign(pairs.size(), {-1, -1});

      for (const Tri& t : mesh.tris) {
        if (!t.alive || t.v[2] == kGhost) continue;
        for (int i = 0; i < 3; ++i) {
          std::pair<int, int> key = std::minmax(t.v[(i + 1) % 3], t.v[(i + 2) % 3]);
          size_t idx = std::lower_bound(pairs.begin(), pairs.end(), key) -
                       pairs.begin();
          auto& slots = pair_apex[idx];
          if (slots[0] == -1)
            slots[0] = t.v[i];
          else
            slots[1] = t.v[i];
        }
      }
      push_edges_sorted();
      // apexes were collected against site indices; map them alongside edges
      res.edge_apex = pair_apex;
    }
  }

  // translate apex site indices to original point indices
  for (auto& ap : res.edge_apex)
    for (int s = 0; s < 2; ++s)
      if (ap[s] >= 0) ap[s] = site_orig[ap[s]];

  // per-node neighbor lists, counterclockwise by angle
  for (const auto& e : res.graph.edges) {
    res.neighbors[e.u].push_back(e.v);
    res.neighbors[e.v].push_back(e.u);
  }
  for (int v = 0; v < n; ++v) {
    const Point& pv = points[v];
    std::sort(res.neighbors[v].begin(), res.neighbors[v].end(),
              [&](int a, int b) {
                return std::atan2(points[a].y - pv.y, points[a].x - pv.x) <
                       std::atan2(points[b].y - pv.y, points[b].x - pv.x);
              });
  }
  return res;
}

PageGraph beta_skeleton_points(const std::vector<Point>& points,
                               const DelaunayResult& delaunay) {
  PageGraph g;
  g.node_count = (int)points.size();
  for (size_t i = 0; i < delaunay.graph.edges.size(); ++i) {
    const GraphEdge& e = delaunay.graph.edges[i];
    bool blocked = false;
    for (int apex : delaunay.edge_apex[i]) {
      if (apex < 0) continue;
      if (diameter_dot_sign(points[e.u], points[e.v], points[apex]) < 0)
        blocked = true;
    }
    if (!blocked) g.edges.push_back(e);
  }
  for (int i = 0; i < (int)points.size(); ++i)
    if (delaunay.representative[i] != i)
      g.edges.push_back({delaunay.representative[i], i, 0.0});
  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return g;
}

}  // namespace parabox
