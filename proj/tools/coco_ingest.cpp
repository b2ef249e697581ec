#include "coco_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace parabox {

namespace {

using nlohmann::json;

bool finite_number(const json& j) {
  return j.is_number() && std::isfinite(j.get<double>());
}

// geometry of one annotation: the polygon when segmentation is present (a
// short polygon voids the record), otherwise the bbox
enum class Geometry { ok, short_polygon, malformed };

Geometry annotation_quad(const json& ann, Quad* out) {
  if (ann.contains("segmentation")) {
    const json& seg = ann.at("segmentation");
    if (!seg.is_array() || seg.empty() || !seg[0].is_array())
      return Geometry::malformed;
    const json& poly = seg[0];
    if (poly.size() < 6) return Geometry::short_polygon;
    if (poly.size() % 2 != 0) return Geometry::malformed;
    double x0 = std::numeric_limits<double>::max(), y0 = x0;
    double x1 = std::numeric_limits<double>::lowest(), y1 = x1;
    for (size_t i = 0; i + 1 < poly.size(); i += 2) {
      if (!finite_number(poly[i]) || !finite_number(poly[i + 1]))
        return Geometry::malformed;
      x0 = std::min(x0, poly[i].get<double>());
      x1 = std::max(x1, poly[i].get<double>());
      y0 = std::min(y0, poly[i + 1].get<double>());
      y1 = std::max(y1, poly[i + 1].get<double>());
    }
    *out = Quad::rect(x0, y0, x1, y1);
    return Geometry::ok;
  }
  if (!ann.contains("bbox")) return Geometry::malformed;
  const json& bbox = ann.at("bbox");
  if (!bbox.is_array() || bbox.size() != 4) return Geometry::malformed;
  for (const auto& v : bbox)
    if (!finite_number(v)) return Geometry::malformed;
  double x = bbox[0].get<double>(), y = bbox[1].get<double>();
  double w = bbox[2].get<double>(), h = bbox[3].get<double>();
  if (w < 0.0 || h < 0.0) return Geometry::malformed;
  *out = Quad::rect(x, y, x + w, y + h);
  return Geometry::ok;
}

}  // namespace

Dataset ingest_coco_layout(const std::string& annotation_path,
                           const CategoryMapping& mapping, IngestStats* stats) {
  std::ifstream in(annotation_path, std::ios::binary);
  if (!in.good())
    throw std::runtime_error("cannot read " + annotation_path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw std::runtime_error(annotation_path + ": not a JSON object");

  IngestStats local;
  IngestStats& st = stats ? *stats : local;

  std::map<int, Page> pages;  // image id -> page, ascending
  for (const auto& img : doc.value("images", json::array())) {
    ++st.pages_in;
    if (!img.is_object() || !img.contains("id") ||
        !img["id"].is_number_integer() || !finite_number(img.value("width", json())) ||
        !finite_number(img.value("height", json()))) {
      ++st.malformed_records;
      continue;
    }
    Page page;
    page.width = img["width"].get<double>();
    page.height = img["height"].get<double>();
    page.has_line_gt = false;
    pages[img["id"].get<int>()] = std::move(page);
  }

  const json annotations = doc.value("annotations", json::array());

  std::set<int> unknown;
  for (const auto& ann : annotations) {
    if (!ann.is_object() || !ann.contains("category_id") ||
        !ann["category_id"].is_number_integer())
      continue;  // handled as malformed below
    int cat = ann["category_id"].get<int>();
    if (!mapping.roles.count(cat)) unknown.insert(cat);
  }
  if (!unknown.empty()) {
    std::string ids;
    for (int id : unknown) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw std::runtime_error("unknown category ids: " + ids);
  }

  for (const auto& ann : annotations) {
    if (!ann.is_object() || !ann.contains("category_id") ||
        !ann["category_id"].is_number_integer() || !ann.contains("image_id") ||
        !ann["image_id"].is_number_integer()) {
      ++st.malformed_records;
      continue;
    }
    auto it = pages.find(ann["image_id"].get<int>());
    if (it == pages.end()) {
      ++st.malformed_records;
      continue;
    }
    Quad quad;
    switch (annotation_quad(ann, &quad)) {
      case Geometry::short_polygon:
        ++st.skipped_polygons;
        continue;
      case Geometry::malformed:
        ++st.malformed_records;
        continue;
      case Geometry::ok:
        break;
    }
    Page& page = it->second;
    CategoryRole role = mapping.roles.at(ann["category_id"].get<int>());
    if (role == CategoryRole::paragraph) {
      page.gt_lines.push_back(quad);
      page.gt_paragraphs.push_back({(int)page.gt_lines.size() - 1});
    } else {
      page.dont_care.push_back(quad);
    }
  }

  Dataset ds;
  ds.header.generator = {{"command", "ingest"}, {"source", annotation_path}};
  for (auto& [id, page] : pages) {
    (void)id;
    ds.pages.push_back(std::move(page));
    ++st.pages_out;
  }
  return ds;
}

}  // namespace parabox
