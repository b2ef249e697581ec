#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "parabox/graphnet.hpp"

namespace parabox {

namespace {

constexpr char kMagic[8] = {'P', 'B', 'X', 'G', 'C', 'N', '1', '\n'};
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<char>& buf, uint32_t x) {
  char b[4] = {(char)(x & 0xff), (char)((x >> 8) & 0xff), (char)((x >> 16) & 0xff),
               (char)((x >> 24) & 0xff)};
  buf.insert(buf.end(), b, b + 4);
}

void put_i32(std::vector<char>& buf, int32_t x) { put_u32(buf, (uint32_t)x); }

struct Reader {
  const char* p;
  const char* end;

  uint32_t u32() {
    if (end - p < 4)
      throw std::runtime_error("load_model: truncated file");
    uint32_t x = (uint8_t)p[0] | ((uint8_t)p[1] << 8) | ((uint8_t)p[2] << 16) |
                 ((uint32_t)(uint8_t)p[3] << 24);
    p += 4;
    return x;
  }
  int32_t i32() { return (int32_t)u32(); }
  void bytes(void* out, size_t n) {
    if ((size_t)(end - p) < n)
      throw std::runtime_error("load_model: truncated file");
    std::memcpy(out, p, n);
    p += n;
  }
};

uint32_t checksum(const char* data, size_t n) {
  return (uint32_t)crc32(crc32(0L, Z_NULL, 0), (const Bytef*)data, (uInt)n);
}

const char* head_name(HeadType h) {
  return h == HeadType::node_binary_pair ? "node_binary_pair" : "edge_binary";
}

}  // namespace

void save_model(const GcnModel& model, const std::string& path) {
  std::vector<char> payload;
  put_u32(payload, kVersion);
  put_i32(payload, model.config.steps);
  put_i32(payload, model.config.hidden_width);
  put_i32(payload, model.config.heads);
  put_i32(payload, model.config.pooling == Pooling::attention ? 1 : 0);
  put_i32(payload, model.config.head_type == HeadType::edge_binary ? 1 : 0);
  put_i32(payload, model.config.input_width);
  model.visit([&](const Tensor& t) {
    put_i32(payload, t.rows);
    put_i32(payload, t.cols);
    const char* raw = reinterpret_cast<const char*>(t.v.data());
    payload.insert(payload.end(), raw, raw + t.v.size() * sizeof(float));
  });

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  out.write(payload.data(), (std::streamsize)payload.size());
  std::vector<char> crc;
  put_u32(crc, checksum(payload.data(), payload.size()));
  out.write(crc.data(), 4);
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

GcnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::vector<char> file((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  if (file.size() < sizeof(kMagic) + 8)
    throw std::runtime_error("load_model: truncated file");
  if (std::memcmp(file.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_model: bad magic, not a model file");

  const char* payload = file.data() + sizeof(kMagic);
  const size_t payload_len = file.size() - sizeof(kMagic) - 4;
  Reader r{payload, payload + payload_len};

  // version before checksum so an incompatible format is named as such
  const uint32_t version = r.u32();
  if (version != kVersion)
    throw std::runtime_error("load_model: version mismatch (file has " +
                             std::to_string(version) + ", expected " +
                             std::to_string(kVersion) + ")");

  Reader tail{file.data() + file.size() - 4, file.data() + file.size()};
  const uint32_t want_crc = tail.u32();
  if (checksum(payload, payload_len) != want_crc)
    throw std::runtime_error("load_model: checksum mismatch, file is corrupted");

  GcnConfig cfg;
  cfg.steps = r.i32();
  cfg.hidden_width = r.i32();
  cfg.heads = r.i32();
  cfg.pooling = r.i32() ? Pooling::attention : Pooling::average;
  cfg.head_type = r.i32() ? HeadType::edge_binary : HeadType::node_binary_pair;
  cfg.input_width = r.i32();

  GcnModel m = init_model(cfg, 0);
  m.visit([&](Tensor& t) {
    const int rows = r.i32();
    const int cols = r.i32();
    if (rows != t.rows || cols != t.cols)
      throw std::runtime_error("load_model: tensor shape does not match config");
    r.bytes(t.v.data(), t.v.size() * sizeof(float));
  });
  if (r.p != r.end)
    throw std::runtime_error("load_model: trailing bytes after tensor data");
  return m;
}

GcnModel load_model(const std::string& path, HeadType expected) {
  GcnModel m = load_model(path);
  if (m.config.head_type != expected)
    throw std::runtime_error(std::string("load_model: head_type mismatch (file has ") +
                             head_name(m.config.head_type) + ", expected " +
                             head_name(expected) + ")");
  return m;
}

}  // namespace parabox
