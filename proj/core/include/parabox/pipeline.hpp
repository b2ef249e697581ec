#pragma once

// Feature extraction and the two-stage paragraph extractor: a node model
// splits raw OCR lines at column boundaries, then an edge model clusters the
// refined lines into paragraphs.

#include <array>
#include <string>
#include <vector>

#include "parabox/geometry.hpp"
#include "parabox/graphnet.hpp"
#include "parabox/page.hpp"

namespace parabox {

// Normalized page frame: the centroid of the box centers maps to the origin
// and one unit equals the median box height (1.0 when that degenerates).
struct NormFrame {
  Point origin{};
  double unit = 1.0;

  Point apply(Point p) const {
    return {(p.x - origin.x) / unit, (p.y - origin.y) / unit};
  }
};

NormFrame page_norm_frame(const std::vector<Quad>& boxes);

// Per-node input features: [w, h, alpha, cos alpha, sin alpha], then for
// each of the 4 corners (x, y) the six values [x, x cos alpha, x sin alpha,
// y, y cos alpha, y sin alpha], all in the normalized frame.  A zero-area
// box has its height clamped to one normalization unit.  A line appends the
// first word's width w1 (clamped to the line width) as a 30th value.
using WordFeatures = std::array<double, 29>;
using LineFeatures = std::array<double, 30>;

WordFeatures word_node_features(const Quad& word, const NormFrame& frame);
LineFeatures line_node_features(const Line& line, const std::vector<Quad>& words,
                                const NormFrame& frame);

FeatureMatrix word_feature_matrix(const std::vector<Quad>& words,
                                  const NormFrame& frame);
FeatureMatrix line_feature_matrix(const std::vector<Line>& lines,
                                  const std::vector<Quad>& words,
                                  const NormFrame& frame);

// Unit vector along the aggregate longitudinal direction of the member
// words; +x when every member is degenerate.
Point longitudinal_direction(const std::vector<Quad>& words,
                             const std::vector<int>& members);

// Member indices sorted by center projection onto the longitudinal
// direction; equal projections keep index order.
std::vector<int> reading_order(const std::vector<Quad>& words,
                               std::vector<int> members);

// Tight oriented bound of the member words along their longitudinal
// direction.
Quad tight_line_box(const std::vector<Quad>& words,
                    const std::vector<int>& members);

// ---------------------------------------------------------------------------
// Decision layers, driven by per-item probabilities so they can be exercised
// without a model.
// ---------------------------------------------------------------------------

// Orders each raw line along its longitudinal direction and cuts between
// consecutive words (u, v) when end_prob[u] >= 0.5 or start_prob[v] >= 0.5.
// Every word is kept; an empty raw line is dropped with a diagnostic.
std::vector<Line> apply_line_cuts(const std::vector<Quad>& words,
                                  const std::vector<Line>& raw_lines,
                                  const std::vector<double>& start_prob,
                                  const std::vector<double>& end_prob,
                                  std::vector<std::string>* diagnostics = nullptr);

// Unions lines across edges with probability >= 0.5; every connected
// component becomes one paragraph whose region is the convex hull of the
// member line boxes.  Paragraphs are ordered by smallest member line index.
std::vector<Paragraph> apply_edge_clusters(const std::vector<Line>& lines,
                                           const PageGraph& graph,
                                           const std::vector<double>& edge_prob);

// ---------------------------------------------------------------------------
// Model-driven stages
// ---------------------------------------------------------------------------

struct SplitDetails {
  std::vector<Line> lines;
  PageGraph graph;  // skeleton over the word boxes
  std::vector<double> start_prob;  // per word
  std::vector<double> end_prob;
};

struct ClusterDetails {
  std::vector<Paragraph> paragraphs;
  PageGraph graph;                // skeleton over the line boxes
  std::vector<double> edge_prob;  // aligned with graph.edges
};

// Node model pass over the word skeleton, then the cut rule above.  The
// model head must be node_binary_pair.
std::vector<Line> split_lines(const std::vector<Quad>& words,
                              const std::vector<Line>& raw_lines,
                              const GcnModel& model,
                              std::vector<std::string>* diagnostics = nullptr);
SplitDetails split_lines_with_probs(const std::vector<Quad>& words,
                                    const std::vector<Line>& raw_lines,
                                    const GcnModel& model,
                                    std::vector<std::string>* diagnostics = nullptr);

// Edge model pass over the line skeleton, then the clustering rule above.
// The model head must be edge_binary.  `words` supplies the w1 feature and
// the normalization frame; the line boxes stand in when it is empty.
std::vector<Paragraph> cluster_lines(const std::vector<Quad>& words,
                                     const std::vector<Line>& lines,
                                     const GcnModel& model);
ClusterDetails cluster_lines_with_probs(const std::vector<Quad>& words,
                                        const std::vector<Line>& lines,
                                        const GcnModel& model);

// split_lines then cluster_lines over the page's OCR words and raw lines.
std::vector<Paragraph> extract_paragraphs(const Page& page,
                                          const GcnModel& split_model,
                                          const GcnModel& cluster_model,
                                          std::vector<std::string>* diagnostics = nullptr);

struct PipelineDetails {
  SplitDetails split;
  ClusterDetails cluster;
};
PipelineDetails extract_paragraphs_with_details(
    const Page& page, const GcnModel& split_model, const GcnModel& cluster_model,
    std::vector<std::string>* diagnostics = nullptr);

}  // namespace parabox
