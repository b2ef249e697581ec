#pragma once

// Synthetic page generator with randomized typography, geometric
// augmentation, OCR simulation, and ground-truth label derivation.

#include <cstdint>
#include <optional>
#include <vector>

#include "parabox/geometry.hpp"
#include "parabox/graphnet.hpp"
#include "parabox/page.hpp"

namespace parabox {

enum class Separator { indent, vertical_space };
enum class Alignment { left, right, center, justified };

struct StyleSpec {
  int column_count = 1;  // 1..3
  Separator separator = Separator::vertical_space;
  Alignment alignment = Alignment::left;
  double column_width_fraction = 0.88;  // content share of each column slot
  double left_margin_fraction = 0.06;
  double line_height_factor = 1.4;  // line pitch over word height, >= 1
  double font_scale = 1.0;
  double list_item_probability = 0.1;
  double table_probability = 0.1;  // chance of one don't-care cell grid
};

// Independent randomized style; deterministic per seed.
StyleSpec sample_style(uint64_t seed);

// Lays pseudo-words into lines, lines into paragraphs and columns.  Fills
// ocr_words with the clean word boxes and ocr_raw_lines with one identity
// line per gt line; simulate_ocr later replaces both.  Throws
// std::invalid_argument for styles that cannot fit a single line.
Page generate_page(const StyleSpec& style, uint64_t seed);

struct AugmentSpec {
  double rotation_range = 0.0;     // radians, uniform in [-r, r]
  double perspective_range = 0.0;  // corner displacement, fraction of page size
  uint64_t seed = 0;
};

// One random perspective projection followed by one random rotation, applied
// to every quad.  Zero ranges return the page bit-identical.  Transforms that
// degenerate a box are resampled a bounded number of times.
Page augment_page(const Page& page, const AugmentSpec& spec);

struct OcrSpec {
  double p_merge = 0.5;   // chance to merge each same-row neighbor junction
  double p_break = 0.08;  // chance to fragment a raw line
  double jitter = 0.04;   // corner noise, fraction of word height
};

// Replaces the OCR fields: words get corner jitter, same-row lines across
// columns merge with probability p_merge, and lines occasionally break into
// two (the over-split repair case).  Raw line boxes are recomputed from the
// member words.
Page simulate_ocr(const Page& page, uint64_t seed, const OcrSpec& spec = {});

// For each box the gt line with maximum intersection area (ties to the
// lowest index), -1 when nothing intersects.
std::vector<int> allocate_to_gt(const std::vector<Quad>& boxes,
                                const std::vector<Quad>& gt_lines);

// Per word: allocate to the max-intersection gt line; the extremal words of
// each line (along its longitudinal axis) are start/end, interior words are
// negative, and words intersecting a don't-care region or no gt line at all
// get weight 0.
std::vector<NodeLabel> derive_split_labels(const Page& page);

// The refined lines a perfect splitting stage would produce: raw lines cut
// wherever the derived node labels mark an end or a following start.
std::vector<Line> label_split_lines(const Page& page);

struct ClusterLabels {
  PageGraph graph;  // skeleton over the split line boxes
  std::vector<EdgeLabel> labels;  // aligned with graph.edges
  bool under_split = false;  // some line's words cover two gt lines
};

// Per skeleton edge over the split lines: positive when both endpoints map
// to the same gt line (over-split fragments) or to consecutive lines of one
// paragraph; weight 0 when either endpoint maps to no gt line.  Pages
// without line GT replace the consecutive-index test with the condition
// that no graph path is shorter than the edge.
ClusterLabels derive_cluster_labels(const Page& page,
                                    const std::vector<Line>& split_lines);

// Training views: graph, features, and flattened labels for one page.
// Cluster pages come back empty when under-splitting disqualifies the page.
LabeledPage split_training_page(const Page& page);
std::optional<LabeledPage> cluster_training_page(const Page& page);

}  // namespace parabox
