#pragma once

// Per-page overlay rendering: word boxes, raw-line boxes and paragraph
// outlines in distinct colors on a white canvas, written as lossless PNG.

#include <array>
#include <vector>

#include "parabox/page.hpp"

namespace parabox {

inline constexpr std::array<unsigned char, 3> kWordColor{40, 160, 40};
inline constexpr std::array<unsigned char, 3> kLineColor{50, 80, 230};
inline constexpr std::array<unsigned char, 3> kParagraphColor{230, 50, 50};

// 8-bit truecolor PNG, filter 0 rows; rgb holds width*height*3 bytes.
std::vector<unsigned char> encode_png_rgb(int width, int height,
                                          const std::vector<unsigned char>& rgb);

// The canvas matches the page size, scaled down when the long side exceeds
// max_dim.  Line boxes are drawn slightly inflated so coincident word and
// line outlines stay distinguishable.
std::vector<unsigned char> render_overlay_png(
    const Page& page, const std::vector<Paragraph>& paragraphs,
    double max_dim = 1600.0);

}  // namespace parabox
