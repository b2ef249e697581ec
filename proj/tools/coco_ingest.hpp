#pragma once

// COCO-style layout ingestion: paragraph categories (text, title) become
// ground-truth paragraphs with one pseudo line each, the rest become
// don't-care regions.  Ingested pages carry no per-line ground truth.

#include <map>
#include <string>

#include "dataset_io.hpp"

namespace parabox {

enum class CategoryRole { paragraph, dont_care };

struct CategoryMapping {
  std::map<int, CategoryRole> roles;
};

struct IngestStats {
  int pages_in = 0;           // image records listed
  int pages_out = 0;          // pages emitted
  int malformed_records = 0;  // skipped image or annotation records
  int skipped_polygons = 0;   // segmentation polygons with < 3 points
};

// Annotations referencing a category id outside the mapping reject the whole
// file, listing the unknown ids.  Malformed records are skipped and counted;
// pages are never dropped silently.
Dataset ingest_coco_layout(const std::string& annotation_path,
                           const CategoryMapping& mapping,
                           IngestStats* stats = nullptr);

}  // namespace parabox
