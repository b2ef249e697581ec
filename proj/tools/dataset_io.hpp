#pragma once

// Dataset files: newline-delimited JSON records, UTF-8, one versioned header
// record followed by one record per page.  Line boxes are not stored; they
// are rebuilt from the member words on read.  Writing the same pages twice
// produces byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "parabox/page.hpp"

namespace parabox {

inline constexpr int kDatasetVersion = 1;

struct DatasetHeader {
  int version = kDatasetVersion;
  uint64_t seed = 0;
  nlohmann::json generator;  // resolved run config echo, null when absent
};

struct Dataset {
  DatasetHeader header;
  std::vector<Page> pages;
};

void write_dataset(const std::string& path, const DatasetHeader& header,
                   const std::vector<Page>& pages);

// Validates the header, the per-page counts and every index bound; throws
// std::runtime_error naming the offending line.
Dataset read_dataset(const std::string& path);

// Record codecs, shared with the result and report writers.
nlohmann::json quad_to_json(const Quad& q);
Quad quad_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json page_to_json(const Page& page);
Page page_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace parabox
