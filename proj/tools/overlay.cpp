#include "overlay.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace parabox {

namespace {

void push_be32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back((unsigned char)(v >> 24));
  out.push_back((unsigned char)(v >> 16));
  out.push_back((unsigned char)(v >> 8));
  out.push_back((unsigned char)v);
}

void push_chunk(std::vector<unsigned char>& out, const char type[4],
                const std::vector<unsigned char>& data) {
  push_be32(out, (uint32_t)data.size());
  size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uint32_t crc = crc32(0, out.data() + type_at, (uInt)(4 + data.size()));
  push_be32(out, crc);
}

struct Canvas {
  int width = 0;
  int height = 0;
  double scale = 1.0;
  std::vector<unsigned char> rgb;

  void set(int x, int y, const std::array<unsigned char, 3>& c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    unsigned char* p = &rgb[((size_t)y * width + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void segment(Point a, Point b, const std::array<unsigned char, 3>& c) {
    a = a * scale;
    b = b * scale;
    int steps = (int)std::ceil(2.0 * dist(a, b)) + 1;
    for (int s = 0; s <= steps; ++s) {
      double t = (double)s / steps;
      set((int)std::lround(a.x + t * (b.x - a.x)),
          (int)std::lround(a.y + t * (b.y - a.y)), c);
    }
  }

  void outline(const std::vector<Point>& poly,
               const std::array<unsigned char, 3>& c) {
    for (size_t i = 0; i < poly.size(); ++i)
      segment(poly[i], poly[(i + 1) % poly.size()], c);
  }
};

std::vector<Point> quad_outline(const Quad& q, double pad) {
  Point center = q.center();
  std::vector<Point> out;
  for (int i = 0; i < 4; ++i) {
    Point d = q.c[i] - center;
    double len = norm(d);
    if (len > 1e-9) d = d * ((len + pad) / len);
    out.push_back(center + d);
  }
  return out;
}

}  // namespace

std::vector<unsigned char> encode_png_rgb(int width, int height,
                                          const std::vector<unsigned char>& rgb) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != (size_t)width * height * 3)
    throw std::invalid_argument("encode_png_rgb: bad dimensions");

  size_t stride = (size_t)width * 3 + 1;
  std::vector<unsigned char> raw(stride * height);
  for (int r = 0; r < height; ++r) {
    raw[r * stride] = 0;  // filter: none
    std::memcpy(&raw[r * stride + 1], &rgb[(size_t)r * width * 3],
                (size_t)width * 3);
  }
  uLongf bound = compressBound((uLong)raw.size());
  std::vector<unsigned char> packed(bound);
  if (compress2(packed.data(), &bound, raw.data(), (uLong)raw.size(), 6) != Z_OK)
    throw std::runtime_error("encode_png_rgb: deflate failed");
  packed.resize(bound);

  static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<unsigned char> out(sig, sig + 8);
  std::vector<unsigned char> ihdr;
  push_be32(ihdr, (uint32_t)width);
  push_be32(ihdr, (uint32_t)height);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", packed);
  push_chunk(out, "IEND", {});
  return out;
}

std::vector<unsigned char> render_overlay_png(
    const Page& page, const std::vector<Paragraph>& paragraphs,
    double max_dim) {
  double w = std::max(1.0, page.width);
  double h = std::max(1.0, page.height);
  Canvas canvas;
  canvas.scale = std::min(1.0, max_dim / std::max(w, h));
  canvas.width = std::max(1, (int)std::lround(w * canvas.scale));
  canvas.height = std::max(1, (int)std::lround(h * canvas.scale));
  canvas.rgb.assign((size_t)canvas.width * canvas.height * 3, 255);

  for (const Paragraph& para : paragraphs)
    canvas.outline(para.region, kParagraphColor);
  for (const Line& line : page.ocr_raw_lines)
    canvas.outline(quad_outline(line.box, 2.0 / canvas.scale), kLineColor);
  for (const Quad& word : page.ocr_words)
    canvas.outline(quad_outline(word, 0.0), kWordColor);

  return encode_png_rgb(canvas.width, canvas.height, canvas.rgb);
}

}  // namespace parabox
