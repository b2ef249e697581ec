#include "dataset_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "parabox/pipeline.hpp"

namespace parabox {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("dataset " + where + ": " + what);
}

double number_at(const json& j, size_t i, const std::string& where) {
  if (!j[i].is_number()) fail(where, "expected a number");
  return j[i].get<double>();
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an index array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number_integer()) fail(where, "expected an integer index");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

json quad_to_json(const Quad& q) {
  json out = json::array();
  for (int i = 0; i < 4; ++i) {
    out.push_back(q.c[i].x);
    out.push_back(q.c[i].y);
  }
  return out;
}

Quad quad_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 8) fail(where, "quad needs 8 numbers");
  Quad q;
  for (int i = 0; i < 4; ++i) {
    q.c[i].x = number_at(j, 2 * i, where);
    q.c[i].y = number_at(j, 2 * i + 1, where);
  }
  return q;
}

json page_to_json(const Page& page) {
  json out;
  out["size"] = {page.width, page.height};
  json words = json::array();
  for (const Quad& w : page.ocr_words) words.push_back(quad_to_json(w));
  out["words"] = std::move(words);
  json raw = json::array();
  for (const Line& l : page.ocr_raw_lines) raw.push_back(l.words);
  out["raw_lines"] = std::move(raw);
  json gtl = json::array();
  for (const Quad& l : page.gt_lines) gtl.push_back(quad_to_json(l));
  out["gt_lines"] = std::move(gtl);
  out["gt_paragraphs"] = page.gt_paragraphs;
  if (!page.dont_care.empty()) {
    json dc = json::array();
    for (const Quad& q : page.dont_care) dc.push_back(quad_to_json(q));
    out["dc"] = std::move(dc);
  }
  if (!page.has_line_gt) out["has_line_gt"] = false;
  if (page.under_split) out["under_split"] = true;
  if (!page.node_labels.empty()) {
    json labels = json::array();
    for (const NodeLabel& l : page.node_labels)
      labels.push_back({l.is_start ? 1 : 0, l.is_end ? 1 : 0, l.weight});
    out["node_labels"] = std::move(labels);
  }
  if (!page.edge_labels.empty()) {
    json labels = json::array();
    for (const EdgeLabel& l : page.edge_labels)
      labels.push_back({l.same_paragraph ? 1 : 0, l.weight});
    out["edge_labels"] = std::move(labels);
  }
  return out;
}

Page page_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a page object");
  Page page;
  const json& size = j.at("size");
  if (!size.is_array() || size.size() != 2) fail(where, "bad size");
  page.width = number_at(size, 0, where);
  page.height = number_at(size, 1, where);

  for (const auto& w : j.at("words"))
    page.ocr_words.push_back(quad_from_json(w, where));
  for (const auto& l : j.at("gt_lines"))
    page.gt_lines.push_back(quad_from_json(l, where));
  if (j.contains("dc"))
    for (const auto& q : j.at("dc"))
      page.dont_care.push_back(quad_from_json(q, where));

  std::set<int> used;
  for (const auto& entry : j.at("raw_lines")) {
    Line line;
    line.words = int_list(entry, where);
    for (int w : line.words) {
      if (w < 0 || w >= (int)page.ocr_words.size())
        fail(where, "raw line word index out of range");
      if (!used.insert(w).second) fail(where, "raw line reuses a word");
    }
    if (!line.words.empty())
      line.box = tight_line_box(page.ocr_words, line.words);
    page.ocr_raw_lines.push_back(std::move(line));
  }

  std::set<int> used_lines;
  for (const auto& entry : j.at("gt_paragraphs")) {
    std::vector<int> members = int_list(entry, where);
    for (int l : members) {
      if (l < 0 || l >= (int)page.gt_lines.size())
        fail(where, "paragraph line index out of range");
      if (!used_lines.insert(l).second) fail(where, "paragraph reuses a line");
    }
    page.gt_paragraphs.push_back(std::move(members));
  }

  page.has_line_gt = j.value("has_line_gt", true);
  page.under_split = j.value("under_split", false);

  if (j.contains("node_labels")) {
    const json& labels = j.at("node_labels");
    if (labels.size() != page.ocr_words.size())
      fail(where, "node_labels count differs from the word count");
    for (const auto& entry : labels) {
      if (!entry.is_array() || entry.size() != 3)
        fail(where, "node_labels entry needs [start, end, weight]");
      NodeLabel l;
      l.is_start = number_at(entry, 0, where) != 0.0;
      l.is_end = number_at(entry, 1, where) != 0.0;
      l.weight = (float)number_at(entry, 2, where);
      page.node_labels.push_back(l);
    }
  }
  if (j.contains("edge_labels")) {
    for (const auto& entry : j.at("edge_labels")) {
      if (!entry.is_array() || entry.size() != 2)
        fail(where, "edge_labels entry needs [positive, weight]");
      EdgeLabel l;
      l.same_paragraph = number_at(entry, 0, where) != 0.0;
      l.weight = (float)number_at(entry, 1, where);
      page.edge_labels.push_back(l);
    }
  }
  return page;
}

void write_dataset(const std::string& path, const DatasetHeader& header,
                   const std::vector<Page>& pages) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  json h;
  h["format"] = "parabox-dataset";
  h["version"] = header.version;
  h["seed"] = header.seed;
  h["generator"] = header.generator;
  h["pages"] = pages.size();
  out << h.dump() << "\n";
  for (const Page& page : pages) out << page_to_json(page).dump() << "\n";
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot read " + path);
  std::string text;
  if (!std::getline(in, text)) fail("header", "empty file");

  json h = json::parse(text, nullptr, false);
  if (h.is_discarded() || !h.is_object()) fail("header", "not a JSON object");
  if (h.value("format", "") != "parabox-dataset")
    fail("header", "bad format marker");
  Dataset ds;
  ds.header.version = h.value("version", -1);
  if (ds.header.version != kDatasetVersion)
    fail("header", "unsupported version " + std::to_string(ds.header.version));
  ds.header.seed = h.value("seed", (uint64_t)0);
  ds.header.generator = h.value("generator", json());
  size_t expected = h.value("pages", (size_t)0);

  size_t lineno = 1;
  while (std::getline(in, text)) {
    ++lineno;
    if (text.empty()) continue;
    std::string where = "line " + std::to_string(lineno);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(where, "JSON parse error");
    ds.pages.push_back(page_from_json(j, where));
  }
  if (ds.pages.size() != expected)
    fail("file", "page count mismatch (header " + std::to_string(expected) +
                     ", found " + std::to_string(ds.pages.size()) + ")");
  return ds;
}

}  // namespace parabox
