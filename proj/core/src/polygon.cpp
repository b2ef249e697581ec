#include "parabox/geometry.hpp"
#include "parabox/util.hpp"

#include <algorithm>
#include <cmath>

namespace parabox {

double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }

double dist(Point a, Point b) { return norm(a - b); }

Point Quad::center() const {
  return {(c[0].x + c[1].x + c[2].x + c[3].x) / 4.0,
          (c[0].y + c[1].y + c[2].y + c[3].y) / 4.0};
}

double Quad::width() const { return (dist(c[0], c[1]) + dist(c[3], c[2])) / 2.0; }

double Quad::height() const { return (dist(c[0], c[3]) + dist(c[1], c[2])) / 2.0; }

double Quad::angle() const {
  return std::atan2(c[1].y - c[0].y, c[1].x - c[0].x);
}

Quad Quad::rect(double x0, double y0, double x1, double y1) {
  Quad q;
  q.c[0] = {x0, y0};
  q.c[1] = {x1, y0};
  q.c[2] = {x1, y1};
  q.c[3] = {x0, y1};
  return q;
}

Quad Quad::oriented(Point center, double w, double h, double angle) {
  Point u{std::cos(angle), std::sin(angle)};
  Point n{-u.y, u.x};
  Point ex = u * (w / 2.0);
  Point ey = n * (h / 2.0);
  Quad q;
  q.c[0] = center - ex - ey;
  q.c[1] = center + ex - ey;
  q.c[2] = center + ex + ey;
  q.c[3] = center - ex + ey;
  return q;
}

std::vector<std::vector<int>> PageGraph::adjacency() const {
  std::vector<std::vector<int>> adj(node_count);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

bool PageGraph::connected() const {
  if (node_count <= 1) return true;
  UnionFind uf(node_count);
  for (const auto& e : edges) uf.unite(e.u, e.v);
  return uf.component_count() == 1;
}

bool quad_contains_strict(const Quad& q, const Point& p) {
  int sign = 0;
  for (int e = 0; e < 4; ++e) {
    int s = orient2d_sign(q.c[e], q.c[(e + 1) % 4], p);
    if (s == 0) return false;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const int n = (int)pts.size();
  if (n <= 2) return pts;

  std::vector<Point> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && orient2d_sign(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lo && orient2d_sign(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

namespace {

double signed_area2(const std::vector<Point>& poly) {
  double s = 0.0;
  const int n = (int)poly.size();
  for (int i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return s;
}

// clip a polygon against the left half-plane of directed line (p, q)
std::vector<Point> clip_halfplane(const std::vector<Point>& poly, Point p, Point q) {
  std::vector<Point> out;
  const int n = (int)poly.size();
  out.reserve(n + 1);
  Point dir = q - p;
  for (int i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % n];
    double dc = cross(dir, cur - p);
    double dn = cross(dir, nxt - p);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc >= 0.0) != (dn >= 0.0)) {
      double t = dc / (dc - dn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

}  // namespace

double polygon_area(const std::vector<Point>& poly) {
  if (poly.size() < 3) return 0.0;
  return std::fabs(signed_area2(poly)) / 2.0;
}

double polygon_intersection_area(const std::vector<Point>& a,
                                 const std::vector<Point>& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  double sa = signed_area2(a);
  double sb = signed_area2(b);
  if (sa == 0.0 || sb == 0.0) return 0.0;

  std::vector<Point> subject = a;
  if (sa < 0.0) std::reverse(subject.begin(), subject.end());
  std::vector<Point> clipper = b;
  if (sb < 0.0) std::reverse(clipper.begin(), clipper.end());

  const int m = (int)clipper.size();
  for (int i = 0; i < m && subject.size() >= 3; ++i)
    subject = clip_halfplane(subject, clipper[i], clipper[(i + 1) % m]);
  if (subject.size() < 3) return 0.0;
  return std::fabs(signed_area2(subject)) / 2.0;
}

std::vector<Point> quad_polygon(const Quad& q) {
  std::vector<Point> poly = {q.c[0], q.c[1], q.c[2], q.c[3]};
  if (signed_area2(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

double quad_intersection_area(const Quad& a, const Quad& b) {
  return polygon_intersection_area(quad_polygon(a), quad_polygon(b));
}

}  // namespace parabox
