#pragma once

// Run configuration plumbing: config files merge under explicit flags, and
// every random stream derives from the single per-run seed.

#include <cstdint>
#include <string>

#include "json.hpp"

namespace parabox {

// flags > file > defaults; a file key absent from the defaults is rejected
nlohmann::json resolve_config(const nlohmann::json& defaults,
                              const nlohmann::json& file_values,
                              const nlohmann::json& flag_values);

// {} for an empty path; parse errors throw with the path in the message
nlohmann::json load_config_file(const std::string& path);

// Counter-based stream splitter: (master, stream, index) -> independent seed.
uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index);

}  // namespace parabox
