#include "parabox/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace parabox {
namespace {

double signed_area2(const std::vector<Point>& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s;
}

bool is_convex(const std::vector<Point>& poly) {
  int sign = 0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Point e1 = poly[(i + 1) % n] - poly[i];
    Point e2 = poly[(i + 2) % n] - poly[(i + 1) % n];
    double cr = cross(e1, e2);
    if (cr == 0.0) continue;
    int s = cr > 0.0 ? 1 : -1;
    if (sign == 0)
      sign = s;
    else if (s != sign)
      return false;
  }
  return true;
}

// Inside or on the boundary of a CCW triangle; vertices coincident with a
// corner never block (an ear is valid with another vertex touching a corner,
// but not with one on or inside the ear).
bool blocks_ear(const Point& p, const Point& a, const Point& b,
                const Point& c) {
  auto same = [](const Point& u, const Point& v) {
    return u.x == v.x && u.y == v.y;
  };
  if (same(p, a) || same(p, b) || same(p, c)) return false;
  double d1 = cross(b - a, p - a);
  double d2 = cross(c - b, p - b);
  double d3 = cross(a - c, p - c);
  return d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
}

// Convex decomposition: the polygon itself when already convex, otherwise
// CCW ear-clipped triangles.
std::vector<std::vector<Point>> convex_pieces(std::vector<Point> poly) {
  // drop consecutive duplicates
  std::vector<Point> clean;
  for (const Point& p : poly) {
    if (!clean.empty() && clean.back().x == p.x && clean.back().y == p.y)
      continue;
    clean.push_back(p);
  }
  while (clean.size() > 1 && clean.front().x == clean.back().x &&
         clean.front().y == clean.back().y)
    clean.pop_back();
  if (clean.size() < 3) return {};
  if (signed_area2(clean) < 0.0) std::reverse(clean.begin(), clean.end());
  if (is_convex(clean)) return {std::move(clean)};

  std::vector<std::vector<Point>> out;
  std::vector<Point> ring = std::move(clean);
  while (ring.size() > 3) {
    size_t n = ring.size();
    size_t clipped = n;
    // collinear vertices vanish without emitting anything
    for (size_t i = 0; i < n && clipped == n; ++i) {
      const Point& a = ring[(i + n - 1) % n];
      const Point& c = ring[(i + 1) % n];
      if (cross(ring[i] - a, c - ring[i]) == 0.0) clipped = i;
    }
    for (size_t i = 0; i < n && clipped == n; ++i) {
      const Point& a = ring[(i + n - 1) % n];
      const Point& b = ring[i];
      const Point& c = ring[(i + 1) % n];
      if (cross(b - a, c - b) <= 0.0) continue;  // reflex corner
      bool blocked = false;
      for (size_t k = 0; k < n && !blocked; ++k) {
        if (k == i || k == (i + n - 1) % n || k == (i + 1) % n) continue;
        blocked = blocks_ear(ring[k], a, b, c);
      }
      if (blocked) continue;
      out.push_back({a, b, c});
      clipped = i;
    }
    if (clipped == n) {
      // numerically stuck; emit the remainder as a fan and stop
      for (size_t i = 1; i + 1 < ring.size(); ++i)
        out.push_back({ring[0], ring[i], ring[i + 1]});
      return out;
    }
    ring.erase(ring.begin() + (long)clipped);
  }
  if (ring.size() == 3 && signed_area2(ring) > 0.0) out.push_back(ring);
  return out;
}

struct PairTable {
  std::vector<int> kept;                 // original prediction indices
  std::vector<std::vector<double>> iou;  // kept.size() x gts
  size_t n_gts = 0;
};

PairTable build_pairs(const std::vector<std::vector<Point>>& preds,
                      const std::vector<GtParagraph>& gts,
                      const std::vector<std::vector<Point>>& dont_care) {
  PairTable t;
  t.n_gts = gts.size();
  for (size_t p = 0; p < preds.size(); ++p) {
    std::vector<double> row(gts.size(), 0.0);
    double best_gt = 0.0;
    for (size_t g = 0; g < gts.size(); ++g) {
      row[g] = polygon_iou(preds[p], gts[g].region);
      best_gt = std::max(best_gt, row[g]);
    }
    double best_dc = 0.0;
    for (const auto& dc : dont_care)
      best_dc = std::max(best_dc, polygon_iou(preds[p], dc));
    if (best_dc > best_gt && best_dc > 0.0) continue;
    t.kept.push_back((int)p);
    t.iou.push_back(std::move(row));
  }
  return t;
}

MatchScores run_match(const PairTable& t, const std::vector<double>& thresholds) {
  std::vector<std::tuple<double, int, int>> triples;
  for (size_t r = 0; r < t.iou.size(); ++r)
    for (size_t g = 0; g < t.n_gts; ++g)
      if (t.iou[r][g] > 0.0) triples.push_back({-t.iou[r][g], (int)r, (int)g});
  std::sort(triples.begin(), triples.end());

  MatchScores s;
  s.considered_preds = (int)t.kept.size();
  s.n_gts = (int)t.n_gts;
  std::vector<char> used_pred(t.iou.size(), 0), used_gt(t.n_gts, 0);
  for (const auto& [neg_iou, r, g] : triples) {
    if (used_pred[r] || used_gt[g]) continue;
    if (-neg_iou < thresholds[g]) continue;
    used_pred[r] = 1;
    used_gt[g] = 1;
    s.matches.push_back({t.kept[r], g, -neg_iou});
    ++s.matched;
  }
  s.precision = s.considered_preds == 0 ? 1.0
                                        : (double)s.matched / s.considered_preds;
  s.recall = s.n_gts == 0 ? 1.0 : (double)s.matched / s.n_gts;
  double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

std::vector<double> uniform_thresholds(size_t n, double t) {
  return std::vector<double>(n, t);
}

std::vector<double> per_gt_thresholds(const std::vector<GtParagraph>& gts) {
  std::vector<double> out(gts.size());
  for (size_t g = 0; g < gts.size(); ++g)
    out[g] = variable_iou_threshold(std::max(1, gts[g].n_lines));
  return out;
}

}  // namespace

double variable_iou_threshold(int n_lines) {
  if (n_lines < 1)
    throw std::invalid_argument("variable_iou_threshold: n_lines must be >= 1");
  return std::min(1.0 - 1.0 / (1.0 + n_lines), 0.95);
}

double simple_polygon_intersection_area(const std::vector<Point>& a,
                                        const std::vector<Point>& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  std::vector<std::vector<Point>> pa = convex_pieces(a);
  std::vector<std::vector<Point>> pb = convex_pieces(b);
  double total = 0.0;
  for (const auto& pieceA : pa)
    for (const auto& pieceB : pb)
      total += polygon_intersection_area(pieceA, pieceB);
  return total;
}

double polygon_iou(const std::vector<Point>& a, const std::vector<Point>& b) {
  double inter = simple_polygon_intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  double uni = polygon_area(a) + polygon_area(b) - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

std::vector<GtParagraph> gt_paragraphs_of(const Page& page) {
  std::vector<GtParagraph> out;
  out.reserve(page.gt_paragraphs.size());
  for (const auto& para : page.gt_paragraphs) {
    GtParagraph g;
    g.n_lines = std::max(1, (int)para.size());
    std::vector<Point> corners;
    corners.reserve(4 * para.size());
    for (int li : para)
      if (li >= 0 && li < (int)page.gt_lines.size())
        for (const Point& c : page.gt_lines[li].c) corners.push_back(c);
    g.region = convex_hull(std::move(corners));
    out.push_back(std::move(g));
  }
  return out;
}

MatchScores match_paragraphs_fixed(const std::vector<std::vector<Point>>& preds,
                                   const std::vector<GtParagraph>& gts,
                                   const std::vector<std::vector<Point>>& dont_care,
                                   double iou_threshold) {
  PairTable t = build_pairs(preds, gts, dont_care);
  return run_match(t, uniform_thresholds(gts.size(), iou_threshold));
}

MatchScores match_paragraphs_variable(
    const std::vector<std::vector<Point>>& preds,
    const std::vector<GtParagraph>& gts,
    const std::vector<std::vector<Point>>& dont_care) {
  PairTable t = build_pairs(preds, gts, dont_care);
  return run_match(t, per_gt_thresholds(gts));
}

double map_fixed_range(const std::vector<std::vector<Point>>& preds,
                       const std::vector<GtParagraph>& gts,
                       const std::vector<std::vector<Point>>& dont_care) {
  PairTable t = build_pairs(preds, gts, dont_care);
  double sum = 0.0;
  for (int k = 0; k < 10; ++k) {
    double threshold = 0.50 + 0.05 * k;
    MatchScores s = run_match(t, uniform_thresholds(gts.size(), threshold));
    sum += s.precision * s.recall;
  }
  return sum / 10.0;
}

EvalReport evaluate_page(const std::vector<std::vector<Point>>& preds,
                         const std::vector<GtParagraph>& gts,
                         const std::vector<std::vector<Point>>& dont_care) {
  PairTable t = build_pairs(preds, gts, dont_care);
  EvalReport report;
  for (int k = 0; k < 10; ++k) {
    double threshold = 0.50 + 0.05 * k;
    MatchScores s = run_match(t, uniform_thresholds(gts.size(), threshold));
    report.thresholds.push_back(threshold);
    report.precision.push_back(s.precision);
    report.recall.push_back(s.recall);
    report.ap.push_back(s.precision * s.recall);
    report.map += s.precision * s.recall;
    if (k == 0) report.f1_at_half = s.f1;
  }
  report.map /= 10.0;
  report.variable = run_match(t, per_gt_thresholds(gts));
  report.f1_var = report.variable.f1;
  return report;
}

PrCounts classification_pr(const std::vector<double>& probs,
                           const std::vector<signed char>& labels) {
  if (probs.size() != labels.size())
    throw std::invalid_argument(
        "classification_pr: probabilities and labels differ in length");
  PrCounts pr;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] < 0) continue;
    bool positive = probs[i] >= 0.5;
    bool truth = labels[i] > 0;
    if (positive && truth)
      ++pr.tp;
    else if (positive && !truth)
      ++pr.fp;
    else if (!positive && truth)
      ++pr.fn;
    else
      ++pr.tn;
  }
  if (pr.tp + pr.fp == 0) {
    pr.precision_defined = false;
    pr.precision = 0.0;
  } else {
    pr.precision = (double)pr.tp / (pr.tp + pr.fp);
  }
  if (pr.tp + pr.fn == 0) {
    pr.recall_defined = false;
    pr.recall = 0.0;
  } else {
    pr.recall = (double)pr.tp / (pr.tp + pr.fn);
  }
  return pr;
}

}  // namespace parabox
