#pragma once

// Detection-style evaluation: polygon IoU, greedy one-to-one matching under
// fixed or per-paragraph IoU thresholds, the averaged-precision range score,
// and classification precision/recall for the node and edge tasks.

#include <vector>

#include "parabox/geometry.hpp"
#include "parabox/page.hpp"

namespace parabox {

// min(1 - 1/(1 + n_lines), 0.95); throws std::invalid_argument when
// n_lines < 1.  Single-line paragraphs get 0.5, five-line ones 0.833.
double variable_iou_threshold(int n_lines);

// Intersection area of two simple polygons; non-convex inputs are
// triangulated internally.  Degenerate inputs give 0.
double simple_polygon_intersection_area(const std::vector<Point>& a,
                                        const std::vector<Point>& b);

// Intersection over union; 0 when either polygon is degenerate.
double polygon_iou(const std::vector<Point>& a, const std::vector<Point>& b);

struct GtParagraph {
  std::vector<Point> region;
  int n_lines = 1;  // drives the variable threshold
};

// Paragraph regions of a page: the convex hull of each paragraph's line
// corners plus the member count.  Pages without line-level gt report one
// line per paragraph, which makes the variable threshold the fixed 0.5.
std::vector<GtParagraph> gt_paragraphs_of(const Page& page);

struct MatchEntry {
  int pred = -1;
  int gt = -1;
  double iou = 0.0;
};

struct MatchScores {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  int considered_preds = 0;  // predictions left after don't-care exclusion
  int n_gts = 0;
  int matched = 0;
  std::vector<MatchEntry> matches;  // original prediction indices
};

// Greedy descending-IoU one-to-one matching; a pair is accepted iff its IoU
// meets the threshold (fixed, or per-gt in the variable mode).  Predictions
// whose best IoU lands on a don't-care region are excluded from both counts.
// Empty predictions and gts score as all ones.
MatchScores match_paragraphs_fixed(const std::vector<std::vector<Point>>& preds,
                                   const std::vector<GtParagraph>& gts,
                                   const std::vector<std::vector<Point>>& dont_care,
                                   double iou_threshold);
MatchScores match_paragraphs_variable(
    const std::vector<std::vector<Point>>& preds,
    const std::vector<GtParagraph>& gts,
    const std::vector<std::vector<Point>>& dont_care);

// Mean over thresholds {0.50, 0.55, ..., 0.95} of AP_t = P_t * R_t, the
// single-operating-point average precision of a hard prediction set.
double map_fixed_range(const std::vector<std::vector<Point>>& preds,
                       const std::vector<GtParagraph>& gts,
                       const std::vector<std::vector<Point>>& dont_care);

struct EvalReport {
  std::vector<double> thresholds;  // the ten fixed levels
  std::vector<double> precision;   // per threshold
  std::vector<double> recall;
  std::vector<double> ap;
  double map = 0.0;
  double f1_var = 0.0;
  double f1_at_half = 0.0;
  MatchScores variable;  // match list under variable thresholds
};

// All scores of one page in a single pass over the IoU table.
EvalReport evaluate_page(const std::vector<std::vector<Point>>& preds,
                         const std::vector<GtParagraph>& gts,
                         const std::vector<std::vector<Point>>& dont_care);

struct PrCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;  // false when nothing was predicted positive
  bool recall_defined = true;     // false when no positive labels exist
};

// Positive-class precision/recall at threshold 0.5 (inclusive).  Labels
// follow the training convention: 1 positive, 0 negative, -1 excluded.
// Throws std::invalid_argument on length mismatch.
PrCounts classification_pr(const std::vector<double>& probs,
                           const std::vector<signed char>& labels);

}  // namespace parabox
