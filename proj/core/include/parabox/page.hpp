#pragma once

// Shared document domain types: refined text lines, paragraphs, per-item
// training labels, and the page record that moves between the generator,
// the pipeline, and the dataset files.

#include <vector>

#include "parabox/geometry.hpp"

namespace parabox {

// A text line: word indices in reading order plus a tight oriented bound of
// the member words.
struct Line {
  std::vector<int> words;
  Quad box;
};

// A paragraph: member line indices (ascending) plus the convex hull of the
// member line outlines, counterclockwise.
struct Paragraph {
  std::vector<int> lines;
  std::vector<Point> region;
};

// Node label for the line splitting task, one per OCR word.  Weight 0 marks
// a don't-care item (word inside a table region, or allocated to no ground
// truth line).
struct NodeLabel {
  bool is_start = false;
  bool is_end = false;
  float weight = 1.0f;
};

// Edge label for the line clustering task, aligned with the skeleton edge
// order over the labeled lines.
struct EdgeLabel {
  bool same_paragraph = false;
  float weight = 1.0f;
};

struct Page {
  double width = 0.0;
  double height = 0.0;
  std::vector<Quad> ocr_words;
  std::vector<Line> ocr_raw_lines;
  std::vector<Quad> gt_lines;
  std::vector<std::vector<int>> gt_paragraphs;  // sets of gt line indices
  std::vector<Quad> dont_care;                  // table and figure regions

  // false for ingested sets carrying paragraph regions but no per-line GT;
  // such pages store one pseudo gt line per paragraph region
  bool has_line_gt = true;

  std::vector<NodeLabel> node_labels;  // per ocr word
  std::vector<EdgeLabel> edge_labels;  // per skeleton edge over labeled lines
  bool under_split = false;  // an OCR line covers two gt lines; the page is
                             // unusable for cluster training
};

}  // namespace parabox
