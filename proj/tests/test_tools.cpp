#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coco_ingest.hpp"
#include "dataset_io.hpp"
#include "json.hpp"
#include "overlay.hpp"
#include "parabox/datagen.hpp"
#include "run_config.hpp"

using namespace parabox;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/parabox_test_") + name;
}

bool same_quad(const Quad& a, const Quad& b) {
  for (int i = 0; i < 4; ++i)
    if (a.c[i].x != b.c[i].x || a.c[i].y != b.c[i].y) return false;
  return true;
}

Page full_page() {
  Page p;
  p.width = 200;
  p.height = 100;
  p.ocr_words = {Quad::rect(10, 10, 50, 20), Quad::rect(55, 10, 90, 20),
                 Quad::rect(10, 30, 90, 40)};
  p.ocr_raw_lines = {{{0, 1}, Quad::rect(10, 10, 90, 20)},
                     {{2}, Quad::rect(10, 30, 90, 40)}};
  p.gt_lines = {Quad::rect(10, 10, 90, 20), Quad::rect(10, 30, 90, 40)};
  p.gt_paragraphs = {{0, 1}};
  p.dont_care = {Quad::rect(120, 10, 180, 60)};
  p.node_labels = {{true, false, 1.0f}, {false, true, 1.0f}, {true, true, 0.0f}};
  p.edge_labels = {{true, 1.0f}, {false, 0.5f}};
  p.under_split = true;
  return p;
}

// ---------------------------------------------------------------------------
// Minimal PNG reader used as the overlay oracle: chunk walk, zlib inflate,
// filter-0 rows.
// ---------------------------------------------------------------------------
struct DecodedPng {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<unsigned char> rgb;
};

uint32_t be32(const unsigned char* p) {
  return ((uint32_t)p[0] << 24) | ((uint32_t)p[1] << 16) | ((uint32_t)p[2] << 8) |
         p[3];
}

DecodedPng decode_png(const std::vector<unsigned char>& bytes) {
  static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  REQUIRE(bytes.size() > 8);
  REQUIRE(std::memcmp(bytes.data(), sig, 8) == 0);
  DecodedPng out;
  std::vector<unsigned char> idat;
  size_t at = 8;
  while (at + 8 <= bytes.size()) {
    uint32_t len = be32(&bytes[at]);
    std::string type((const char*)&bytes[at + 4], 4);
    REQUIRE(at + 12 + len <= bytes.size());
    const unsigned char* data = &bytes[at + 8];
    uint32_t stored_crc = be32(&bytes[at + 8 + len]);
    uint32_t crc = crc32(0, &bytes[at + 4], len + 4);
    REQUIRE(crc == stored_crc);
    if (type == "IHDR") {
      out.width = be32(data);
      out.height = be32(data + 4);
      REQUIRE(data[8] == 8);   // bit depth
      REQUIRE(data[9] == 2);   // truecolor
      REQUIRE(data[12] == 0);  // no interlace
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      break;
    }
    at += 12 + len;
  }
  size_t stride = (size_t)out.width * 3 + 1;
  std::vector<unsigned char> raw(stride * out.height);
  uLongf rawlen = raw.size();
  REQUIRE(uncompress(raw.data(), &rawlen, idat.data(), idat.size()) == Z_OK);
  REQUIRE(rawlen == raw.size());
  out.rgb.resize((size_t)out.width * out.height * 3);
  for (uint32_t r = 0; r < out.height; ++r) {
    REQUIRE(raw[r * stride] == 0);  // writer emits filter 0 only
    std::memcpy(&out.rgb[(size_t)r * out.width * 3], &raw[r * stride + 1],
                (size_t)out.width * 3);
  }
  return out;
}

int count_color(const DecodedPng& img, const std::array<unsigned char, 3>& c) {
  int n = 0;
  for (size_t i = 0; i + 2 < img.rgb.size(); i += 3)
    if (img.rgb[i] == c[0] && img.rgb[i + 1] == c[1] && img.rgb[i + 2] == c[2])
      ++n;
  return n;
}

}  // namespace

TEST_CASE("dataset round trip is lossless and byte identical") {
  std::vector<Page> pages;
  pages.push_back(full_page());

  Page ingested;  // no-line-GT shape: pseudo lines, no words
  ingested.width = 500;
  ingested.height = 700;
  ingested.gt_lines = {Quad::rect(50, 50, 450, 250)};
  ingested.gt_paragraphs = {{0}};
  ingested.has_line_gt = false;
  pages.push_back(ingested);

  StyleSpec style = sample_style(4);
  Page generated = simulate_ocr(generate_page(style, 11), 5, OcrSpec{});
  pages.push_back(generated);

  DatasetHeader header;
  header.seed = 123456789012345ull;
  header.generator = {{"command", "gen"}, {"pages", 3}};

  std::string path = tmp_path("roundtrip.jsonl");
  write_dataset(path, header, pages);
  Dataset back = read_dataset(path);

  CHECK(back.header.version == kDatasetVersion);
  CHECK(back.header.seed == header.seed);
  CHECK(back.header.generator == header.generator);
  REQUIRE(back.pages.size() == pages.size());
  for (size_t p = 0; p < pages.size(); ++p) {
    const Page& a = pages[p];
    const Page& b = back.pages[p];
    CHECK(a.width == b.width);
    CHECK(a.height == b.height);
    REQUIRE(a.ocr_words.size() == b.ocr_words.size());
    for (size_t i = 0; i < a.ocr_words.size(); ++i)
      CHECK(same_quad(a.ocr_words[i], b.ocr_words[i]));
    REQUIRE(a.ocr_raw_lines.size() == b.ocr_raw_lines.size());
    for (size_t i = 0; i < a.ocr_raw_lines.size(); ++i) {
      CHECK(a.ocr_raw_lines[i].words == b.ocr_raw_lines[i].words);
      CHECK(same_quad(a.ocr_raw_lines[i].box, b.ocr_raw_lines[i].box));
    }
    REQUIRE(a.gt_lines.size() == b.gt_lines.size());
    for (size_t i = 0; i < a.gt_lines.size(); ++i)
      CHECK(same_quad(a.gt_lines[i], b.gt_lines[i]));
    CHECK(a.gt_paragraphs == b.gt_paragraphs);
    REQUIRE(a.dont_care.size() == b.dont_care.size());
    for (size_t i = 0; i < a.dont_care.size(); ++i)
      CHECK(same_quad(a.dont_care[i], b.dont_care[i]));
    CHECK(a.has_line_gt == b.has_line_gt);
    CHECK(a.under_split == b.under_split);
    REQUIRE(a.node_labels.size() == b.node_labels.size());
    for (size_t i = 0; i < a.node_labels.size(); ++i) {
      CHECK(a.node_labels[i].is_start == b.node_labels[i].is_start);
      CHECK(a.node_labels[i].is_end == b.node_labels[i].is_end);
      CHECK(a.node_labels[i].weight == b.node_labels[i].weight);
    }
    REQUIRE(a.edge_labels.size() == b.edge_labels.size());
    for (size_t i = 0; i < a.edge_labels.size(); ++i) {
      CHECK(a.edge_labels[i].same_paragraph == b.edge_labels[i].same_paragraph);
      CHECK(a.edge_labels[i].weight == b.edge_labels[i].weight);
    }
  }

  std::string path2 = tmp_path("roundtrip2.jsonl");
  write_dataset(path2, header, pages);
  CHECK(slurp(path) == slurp(path2));

  // writing what was read reproduces the file byte for byte
  std::string path3 = tmp_path("roundtrip3.jsonl");
  write_dataset(path3, back.header, back.pages);
  CHECK(slurp(path) == slurp(path3));
}

TEST_CASE("dataset reader validates structure") {
  auto expect_error = [](const std::string& name, const std::string& text,
                         const std::string& needle) {
    std::string path = tmp_path(name);
    spit(path, text);
    try {
      read_dataset(path);
      FAIL_CHECK("no error for " << name);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_error("no_header.jsonl", "{\"words\":[]}\n", "header");
  expect_error("bad_version.jsonl",
               "{\"format\":\"parabox-dataset\",\"version\":99,\"seed\":0,"
               "\"generator\":null,\"pages\":0}\n",
               "version");
  expect_error("bad_format.jsonl",
               "{\"format\":\"other\",\"version\":1,\"seed\":0,"
               "\"generator\":null,\"pages\":0}\n",
               "format");
  std::string header =
      "{\"format\":\"parabox-dataset\",\"version\":1,\"seed\":0,"
      "\"generator\":null,\"pages\":1}\n";
  expect_error("count_short.jsonl", header, "count");
  expect_error("bad_json.jsonl", header + "{not json\n", "line 2");
  expect_error("word_bounds.jsonl",
               header +
                   "{\"size\":[10,10],\"words\":[[0,0,1,0,1,1,0,1]],"
                   "\"raw_lines\":[[0,1]],\"gt_lines\":[],"
                   "\"gt_paragraphs\":[]}\n",
               "raw line");
  expect_error("word_dup.jsonl",
               header +
                   "{\"size\":[10,10],\"words\":[[0,0,1,0,1,1,0,1]],"
                   "\"raw_lines\":[[0],[0]],\"gt_lines\":[],"
                   "\"gt_paragraphs\":[]}\n",
               "raw line");
  expect_error("para_bounds.jsonl",
               header +
                   "{\"size\":[10,10],\"words\":[],\"raw_lines\":[],"
                   "\"gt_lines\":[],\"gt_paragraphs\":[[0]]}\n",
               "paragraph");
  expect_error("label_len.jsonl",
               header +
                   "{\"size\":[10,10],\"words\":[[0,0,1,0,1,1,0,1]],"
                   "\"raw_lines\":[[0]],\"gt_lines\":[],\"gt_paragraphs\":[],"
                   "\"node_labels\":[[1,0,1.0],[0,1,1.0]]}\n",
               "node_labels");
  expect_error("quad_len.jsonl",
               header +
                   "{\"size\":[10,10],\"words\":[[0,0,1,0]],"
                   "\"raw_lines\":[[0]],\"gt_lines\":[],"
                   "\"gt_paragraphs\":[]}\n",
               "quad");
}

TEST_CASE("coco ingest maps categories per the contract") {
  nlohmann::json coco = {
      {"images",
       {{{"id", 7}, {"width", 400}, {"height", 600}},
        {{"id", 3}, {"width", 300}, {"height", 500}}}},
      {"annotations",
       {
           {{"id", 1}, {"image_id", 7}, {"category_id", 1},
            {"bbox", {40, 50, 200, 100}}},
           {{"id", 2}, {"image_id", 7}, {"category_id", 4},
            {"bbox", {40, 300, 200, 150}}},
           // polygon with two points: skipped, counted
           {{"id", 3}, {"image_id", 7}, {"category_id", 1},
            {"bbox", {0, 0, 10, 10}},
            {"segmentation", {{1.0, 2.0, 3.0, 4.0}}}},
           // malformed: no usable geometry
           {{"id", 4}, {"image_id", 7}, {"category_id", 1}},
           // malformed: unknown image
           {{"id", 5}, {"image_id", 99}, {"category_id", 1},
            {"bbox", {0, 0, 5, 5}}},
       }},
      {"categories",
       {{{"id", 1}, {"name", "text"}}, {{"id", 4}, {"name", "table"}}}}};
  std::string path = tmp_path("coco.json");
  spit(path, coco.dump());

  CategoryMapping mapping;
  mapping.roles[1] = CategoryRole::paragraph;
  mapping.roles[4] = CategoryRole::dont_care;
  IngestStats stats;
  Dataset ds = ingest_coco_layout(path, mapping, &stats);

  CHECK(stats.pages_in == 2);
  CHECK(stats.pages_out == 2);
  CHECK(stats.malformed_records == 2);
  CHECK(stats.skipped_polygons == 1);

  REQUIRE(ds.pages.size() == 2);  // ordered by image id
  const Page& empty = ds.pages[0];
  CHECK(empty.width == 300);
  CHECK(empty.gt_lines.empty());
  CHECK(empty.gt_paragraphs.empty());
  CHECK(empty.has_line_gt == false);

  const Page& page = ds.pages[1];
  CHECK(page.width == 400);
  CHECK(page.height == 600);
  CHECK(page.has_line_gt == false);
  REQUIRE(page.gt_lines.size() == 1);  // one paragraph pseudo line
  CHECK(same_quad(page.gt_lines[0], Quad::rect(40, 50, 240, 150)));
  REQUIRE(page.gt_paragraphs.size() == 1);
  CHECK(page.gt_paragraphs[0] == std::vector<int>{0});
  REQUIRE(page.dont_care.size() == 1);
  CHECK(same_quad(page.dont_care[0], Quad::rect(40, 300, 240, 450)));
  CHECK(page.ocr_words.empty());
}

TEST_CASE("coco ingest accepts polygon geometry") {
  nlohmann::json coco = {
      {"images", {{{"id", 1}, {"width", 100}, {"height", 100}}}},
      {"annotations",
       {{{"id", 1}, {"image_id", 1}, {"category_id", 2},
         {"segmentation", {{10.0, 20.0, 60.0, 20.0, 60.0, 70.0, 10.0, 70.0}}}}}},
      {"categories", {{{"id", 2}, {"name", "title"}}}}};
  std::string path = tmp_path("coco_poly.json");
  spit(path, coco.dump());
  CategoryMapping mapping;
  mapping.roles[2] = CategoryRole::paragraph;
  Dataset ds = ingest_coco_layout(path, mapping, nullptr);
  REQUIRE(ds.pages.size() == 1);
  REQUIRE(ds.pages[0].gt_lines.size() == 1);
  CHECK(same_quad(ds.pages[0].gt_lines[0], Quad::rect(10, 20, 60, 70)));
}

TEST_CASE("coco ingest rejects unknown category ids") {
  nlohmann::json coco = {
      {"images", {{{"id", 1}, {"width", 100}, {"height", 100}}}},
      {"annotations",
       {{{"id", 1}, {"image_id", 1}, {"category_id", 31}, {"bbox", {0, 0, 5, 5}}},
        {{"id", 2}, {"image_id", 1}, {"category_id", 77},
         {"bbox", {0, 0, 5, 5}}}}},
      {"categories", {}}};
  std::string path = tmp_path("coco_bad_cat.json");
  spit(path, coco.dump());
  try {
    ingest_coco_layout(path, CategoryMapping{}, nullptr);
    FAIL_CHECK("unknown categories were accepted");
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    CHECK(what.find("31") != std::string::npos);
    CHECK(what.find("77") != std::string::npos);
  }
}

TEST_CASE("overlay renders a valid png with one color per layer") {
  Page page;
  page.width = 120;
  page.height = 80;
  page.ocr_words = {Quad::rect(10, 10, 50, 20)};
  page.ocr_raw_lines = {{{0}, Quad::rect(10, 10, 50, 20)}};
  std::vector<Paragraph> paragraphs(1);
  paragraphs[0].lines = {0};
  paragraphs[0].region = {{60, 40}, {110, 40}, {110, 70}, {60, 70}};

  std::vector<unsigned char> png = render_overlay_png(page, paragraphs);
  DecodedPng img = decode_png(png);
  CHECK(img.width == 120);
  CHECK(img.height == 80);
  // background stays white
  CHECK(img.rgb[0] == 255);
  CHECK(img.rgb[1] == 255);
  CHECK(img.rgb[2] == 255);
  CHECK(count_color(img, kWordColor) > 50);
  CHECK(count_color(img, kLineColor) > 20);
  CHECK(count_color(img, kParagraphColor) > 50);

  CHECK(render_overlay_png(page, paragraphs) == png);

  // oversized pages are scaled down to the cap
  Page big;
  big.width = 4000;
  big.height = 2000;
  DecodedPng small = decode_png(render_overlay_png(big, {}, 1000.0));
  CHECK(small.width == 1000);
  CHECK(small.height == 500);
}

TEST_CASE("config resolution applies flag over file over default") {
  nlohmann::json defaults = {{"epochs", 40}, {"seed", 0}, {"out", "a.bin"}};
  nlohmann::json file = {{"epochs", 10}, {"seed", 5}};
  nlohmann::json flags = {{"seed", 9}};
  nlohmann::json resolved = resolve_config(defaults, file, flags);
  CHECK(resolved["epochs"] == 10);
  CHECK(resolved["seed"] == 9);
  CHECK(resolved["out"] == "a.bin");

  nlohmann::json unknown = {{"epchs", 10}};
  CHECK_THROWS_WITH_AS(resolve_config(defaults, unknown, flags),
                       doctest::Contains("epchs"), std::runtime_error);
}

TEST_CASE("derived seeds are deterministic and distinct") {
  uint64_t a = derive_seed(42, 1, 0);
  uint64_t b = derive_seed(42, 1, 1);
  uint64_t c = derive_seed(42, 2, 0);
  uint64_t d = derive_seed(43, 1, 0);
  CHECK(a == derive_seed(42, 1, 0));
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(b != c);
}
