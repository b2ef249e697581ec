#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace parabox {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a);
double dist(Point a, Point b);

// Convex quadrilateral with a reading orientation: corner 0 -> corner 1 runs
// along the longitudinal (reading) axis, corners continue around the outline
// (0=start/top, 1=end/top, 2=end/bottom, 3=start/bottom for level text).
struct Quad {
  Point c[4];

  Point center() const;
  double width() const;   // mean length of the two longitudinal sides
  double height() const;  // mean length of the two cross sides
  double angle() const;   // atan2 of c[1]-c[0], in (-pi, pi]

  // axis-aligned rectangle, x0<x1 left-to-right, y0<y1 top-to-bottom
  static Quad rect(double x0, double y0, double x1, double y1);
  static Quad oriented(Point center, double w, double h, double angle);
};

struct GraphEdge {
  int u = 0;  // u < v
  int v = 0;
  double length = 0.0;
};

struct PageGraph {
  int node_count = 0;
  std::vector<GraphEdge> edges;  // unique pairs, sorted by (u, v)

  std::vector<std::vector<int>> adjacency() const;
  bool connected() const;  // true for node_count <= 1
};

// ---------------------------------------------------------------------------
// Sign-exact predicates.  Double arithmetic with a forward error filter; the
// rare indeterminate cases fall back to exact rational evaluation, so the
// returned sign is always the sign of the true real value.
// ---------------------------------------------------------------------------

// +1 if a,b,c turn counterclockwise (y-up axes), -1 clockwise, 0 collinear
int orient2d_sign(const Point& a, const Point& b, const Point& c);

// +1 if d is strictly inside the circumcircle of CCW triangle (a,b,c),
// -1 strictly outside, 0 on the circle
int incircle_sign(const Point& a, const Point& b, const Point& c, const Point& d);

// sign of (a-c).(b-c); negative means c lies strictly inside the open disk
// with diameter ab (Thales)
int diameter_dot_sign(const Point& a, const Point& b, const Point& c);

// ---------------------------------------------------------------------------
// Delaunay triangulation
// ---------------------------------------------------------------------------

struct DelaunayResult {
  // One node per input point.  Duplicate coordinates are merged onto their
  // lowest-index representative; the extra indices end up isolated in the
  // graph and are recorded in `representative`.
  PageGraph graph;
  std::vector<int> representative;         // representative[i] <= i
  std::vector<std::vector<int>> neighbors; // per node, sorted CCW by angle
  // Opposite vertex of the one or two triangles flanking each graph edge
  // (-1 for a missing side on the hull), aligned with graph.edges.  These are
  // the only candidate blockers the diametral-disk filter has to examine.
  std::vector<std::array<int, 2>> edge_apex;
};

DelaunayResult delaunay_triangulate(const std::vector<Point>& points);

// beta = 1 skeleton (Gabriel graph): keeps the Delaunay edges whose open
// diametral disk contains no other point strictly inside.  Duplicate points
// are attached to their representative with length-0 edges so the result
// stays connected.
PageGraph beta_skeleton_points(const std::vector<Point>& points,
                               const DelaunayResult& delaunay);

// ---------------------------------------------------------------------------
// Box-level skeleton
// ---------------------------------------------------------------------------

struct SkeletonConfig {
  double beta = 1.0;                // only 1.0 supported
  double peripheral_density = 2.0;  // sample points per median-box-height unit
  double midline_density = 2.0;
  double max_box_diagonal = 0.0;    // > 0: reject boxes with a longer diagonal
};

// One sampled point with its owning box; midline samples are strictly inside
// the owner by construction.
struct BoxSample {
  Point p;
  int box = -1;
  bool midline = false;
};

double median_box_height(const std::vector<Quad>& boxes);

// Peripheral boundary samples (corners always included) plus interior points
// along the longitudinal middle line of every box.  Shared between the
// skeleton construction and its brute-force test oracle.
std::vector<BoxSample> sample_box_points(const std::vector<Quad>& boxes,
                                         const SkeletonConfig& cfg);

// Exact: true iff p lies strictly inside q.
bool quad_contains_strict(const Quad& q, const Point& p);

PageGraph beta_skeleton_boxes(const std::vector<Quad>& boxes,
                              const SkeletonConfig& cfg = {});

enum class LineOfSightMode { free_sight, axis_aligned };

// Ablation graph: boxes see each other when a straight segment between their
// boundaries crosses no third box (sampled approximation); axis_aligned
// restricts segments to the page axes.
PageGraph line_of_sight_graph(const std::vector<Quad>& boxes, LineOfSightMode mode);

// ---------------------------------------------------------------------------
// Polygon primitives
// ---------------------------------------------------------------------------

// CCW hull, collinear interior points removed; 1- and 2-point inputs yield
// degenerate 1- or 2-vertex results.
std::vector<Point> convex_hull(std::vector<Point> pts);

double polygon_area(const std::vector<Point>& poly);

// Exact for convex CCW inputs (Sutherland-Hodgman clip + shoelace).
double polygon_intersection_area(const std::vector<Point>& a,
                                 const std::vector<Point>& b);

std::vector<Point> quad_polygon(const Quad& q);  // CCW outline of q
double quad_intersection_area(const Quad& a, const Quad& b);

}  // namespace parabox
