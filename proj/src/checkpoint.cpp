#include "rbseg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rbseg/errors.hpp"
#include "rbseg/hash.hpp"

namespace rbseg::io {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'R', 'B', 'C', 'K', 'P', 'T', '\0', '\0'};

std::string payload_bytes(const std::vector<float>& params) {
  std::string out;
  out.reserve(params.size() * 4);
  for (float f : params) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    out.push_back(static_cast<char>(bits & 0xff));
    out.push_back(static_cast<char>((bits >> 8) & 0xff));
    out.push_back(static_cast<char>((bits >> 16) & 0xff));
    out.push_back(static_cast<char>((bits >> 24) & 0xff));
  }
  return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  if (ckpt.params.size() != neural::parameter_count(ckpt.spec))
    throw NumericError("checkpoint parameter vector does not match its spec");
  const std::string payload = payload_bytes(ckpt.params);
  json h;
  h["format_version"] = 1;
  h["architecture"] = neural::arch_name(ckpt.spec.arch);
  h["width_factor"] = ckpt.spec.width_factor;
  h["levels"] = ckpt.spec.levels;
  h["blocks_per_group"] = ckpt.spec.blocks_per_group;
  h["in_channels"] = ckpt.spec.in_channels;
  h["init_seed"] = ckpt.spec.init_seed;
  h["train_seed"] = ckpt.train_seed;
  h["param_count"] = ckpt.params.size();
  h["payload_crc32"] = crc32(payload.data(), payload.size());
  const std::string header = h.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 8);
  const std::uint32_t len = static_cast<std::uint32_t>(header.size());
  char lenb[4] = {static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                  static_cast<char>((len >> 16) & 0xff),
                  static_cast<char>((len >> 24) & 0xff)};
  out.write(lenb, 4);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not a checkpoint file: " + path);
  unsigned char lenb[4];
  in.read(reinterpret_cast<char*>(lenb), 4);
  if (!in) throw IoError("truncated checkpoint header: " + path);
  const std::uint32_t len = static_cast<std::uint32_t>(lenb[0]) |
                            (static_cast<std::uint32_t>(lenb[1]) << 8) |
                            (static_cast<std::uint32_t>(lenb[2]) << 16) |
                            (static_cast<std::uint32_t>(lenb[3]) << 24);
  if (len > (1u << 20)) throw IoError("implausible checkpoint header: " + path);
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw IoError("truncated checkpoint header: " + path);

  Checkpoint ckpt;
  std::size_t declared_count = 0;
  std::uint32_t declared_crc = 0;
  try {
    const json h = json::parse(text);
    if (h.at("format_version").get<int>() != 1)
      throw IoError("unsupported checkpoint format version: " + path);
    ckpt.spec.arch = neural::arch_from_name(h.at("architecture").get<std::string>());
    ckpt.spec.width_factor = h.at("width_factor").get<double>();
    ckpt.spec.levels = h.at("levels").get<int>();
    ckpt.spec.blocks_per_group = h.at("blocks_per_group").get<int>();
    ckpt.spec.in_channels = h.at("in_channels").get<int>();
    ckpt.spec.init_seed = h.at("init_seed").get<std::uint64_t>();
    ckpt.train_seed = h.at("train_seed").get<std::uint64_t>();
    declared_count = h.at("param_count").get<std::size_t>();
    declared_crc = h.at("payload_crc32").get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw IoError("bad checkpoint header in " + path + ": " + e.what());
  }

  const std::size_t expected = neural::parameter_count(ckpt.spec);
  if (declared_count != expected)
    throw IoError("checkpoint shape error in " + path + ": header declares " +
                  std::to_string(declared_count) + " parameters but the " +
                  "declared architecture requires " + std::to_string(expected));

  std::vector<unsigned char> raw(expected * 4);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!in) throw IoError("truncated checkpoint payload: " + path);
  if (crc32(raw.data(), raw.size()) != declared_crc)
    throw IoError("checkpoint payload checksum mismatch: " + path);

  ckpt.params.resize(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                               (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
    ckpt.params[i] = std::bit_cast<float>(bits);
  }
  return ckpt;
}

}  // namespace rbseg::io
