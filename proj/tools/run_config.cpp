#include "run_config.hpp"

#include <fstream>
#include <stdexcept>

#include "parabox/rng.hpp"

namespace parabox {

nlohmann::json resolve_config(const nlohmann::json& defaults,
                              const nlohmann::json& file_values,
                              const nlohmann::json& flag_values) {
  nlohmann::json out = defaults;
  for (const auto& [key, value] : file_values.items()) {
    if (!defaults.contains(key))
      throw std::runtime_error("unknown config key: " + key);
    out[key] = value;
  }
  for (const auto& [key, value] : flag_values.items()) out[key] = value;
  return out;
}

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot read config " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::runtime_error(path + ": config must be a JSON object");
  return j;
}

uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index) {
  return Rng(master).split(stream).split(index).next_u64();
}

}  // namespace parabox
