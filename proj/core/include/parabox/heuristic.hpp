#pragma once

// Rule-based paragraph extraction used as the reference baseline.  Four
// passes over the OCR lines: split each line at white spaces significantly
// wider than its average gap, cluster nearby lines into blocks, merge block
// lines that sit on the same straight line, then start a new paragraph at
// every indented line of a block.

#include <vector>

#include "parabox/geometry.hpp"
#include "parabox/page.hpp"

namespace parabox {

struct HeuristicParams {
  // a gap splits its line when wider than this multiple of the line average
  double wide_space_factor = 2.0;
  // lines closer than this multiple of the smaller line height share a block
  double cluster_distance_factor = 1.5;
  // same-straight-line merge: max angle between the lines, radians
  double merge_angle_tolerance = 0.1;
  // and max transverse center offset as a multiple of the smaller height
  double merge_offset_factor = 0.5;
  // a line is indented when its leading edge sits further than this many
  // character widths past the block edge; a character width is estimated as
  // half the median word height
  double indent_char_widths = 1.0;
};

// Minimum distance between the outlines, 0 when the quads touch or overlap.
double quad_min_distance(const Quad& a, const Quad& b);

struct HeuristicDetails {
  std::vector<Line> split_lines;   // after the wide-space pass, input order
  std::vector<Line> merged_lines;  // final lines, ordered by smallest word
  std::vector<int> block_of;       // block id per merged line
  std::vector<Paragraph> paragraphs;  // line indices into merged_lines
};

// All parameters must be positive.  The output paragraphs partition the
// words referenced by the input lines and do not depend on the ordering of
// raw_lines.
HeuristicDetails heuristic_paragraphs_with_details(
    const std::vector<Quad>& words, const std::vector<Line>& raw_lines,
    const HeuristicParams& params = {});

std::vector<Paragraph> heuristic_paragraphs(const std::vector<Quad>& words,
                                            const std::vector<Line>& raw_lines,
                                            const HeuristicParams& params = {});

}  // namespace parabox
