#include "rbseg/rbv_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rbseg/errors.hpp"

namespace rbseg::io {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'R', 'B', 'V', 'O', 'L', '\0', '\0', '\0'};

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::string header_json(const Dims& dims, int channels, const Spacing& sp,
                        const char* dtype) {
  json h;
  h["dims"] = {dims.x, dims.y, dims.z};
  h["channels"] = channels;
  h["spacing_mm"] = {sp[0], sp[1], sp[2]};
  h["dtype"] = dtype;
  return h.dump();
}

void write_file(const std::string& path, const std::string& header,
                const void* payload, std::size_t payload_bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::string prefix(kMagic, kMagic + 8);
  put_u32le(prefix, static_cast<std::uint32_t>(header.size()));
  out.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(payload),
            static_cast<std::streamsize>(payload_bytes));
  if (!out) throw IoError("write failed: " + path);
}

struct Header {
  Dims dims;
  int channels = 0;
  Spacing spacing{};
  std::string dtype;
};

Header read_header(std::ifstream& in, const std::string& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not an RBV file: " + path);
  unsigned char lenb[4];
  in.read(reinterpret_cast<char*>(lenb), 4);
  if (!in) throw IoError("truncated RBV header: " + path);
  const std::uint32_t len = static_cast<std::uint32_t>(lenb[0]) |
                            (static_cast<std::uint32_t>(lenb[1]) << 8) |
                            (static_cast<std::uint32_t>(lenb[2]) << 16) |
                            (static_cast<std::uint32_t>(lenb[3]) << 24);
  if (len > (1u << 20)) throw IoError("implausible RBV header length: " + path);
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw IoError("truncated RBV header: " + path);
  json h;
  try {
    h = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError("bad RBV header JSON in " + path + ": " + e.what());
  }
  Header out;
  try {
    out.dims = {h.at("dims").at(0).get<int>(), h.at("dims").at(1).get<int>(),
                h.at("dims").at(2).get<int>()};
    out.channels = h.at("channels").get<int>();
    out.spacing = {h.at("spacing_mm").at(0).get<double>(),
                   h.at("spacing_mm").at(1).get<double>(),
                   h.at("spacing_mm").at(2).get<double>()};
    out.dtype = h.at("dtype").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError("bad RBV header fields in " + path + ": " + e.what());
  }
  if (out.dims.x < 1 || out.dims.y < 1 || out.dims.z < 1 || out.channels < 1)
    throw IoError("bad RBV dims in " + path);
  return out;
}

static_assert(sizeof(float) == 4, "float must be 32-bit");

}  // namespace

void write_rbv(const std::string& path, const Volume& volume) {
  const std::string header =
      header_json(volume.dims, volume.channels, volume.spacing_mm, "f32le");
  // Serialize floats explicitly as little-endian regardless of host order.
  std::string payload;
  payload.reserve(volume.voxels.size() * 4);
  for (float f : volume.voxels) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    put_u32le(payload, bits);
  }
  write_file(path, header, payload.data(), payload.size());
}

void write_rbv(const std::string& path, const MaskVolume& mask) {
  const std::string header = header_json(mask.dims, 1, mask.spacing_mm, "u8");
  write_file(path, header, mask.voxels.data(), mask.voxels.size());
}

Volume read_rbv_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  const Header h = read_header(in, path);
  if (h.dtype != "f32le")
    throw IoError("RBV dtype mismatch (expected f32le, got " + h.dtype +
                  "): " + path);
  Volume v(h.dims, h.channels, h.spacing);
  std::vector<unsigned char> raw(v.voxels.size() * 4);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!in) throw IoError("truncated RBV payload: " + path);
  for (std::size_t i = 0; i < v.voxels.size(); ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                               (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
    v.voxels[i] = std::bit_cast<float>(bits);
  }
  return v;
}

MaskVolume read_rbv_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  const Header h = read_header(in, path);
  if (h.dtype != "u8")
    throw IoError("RBV dtype mismatch (expected u8, got " + h.dtype +
                  "): " + path);
  if (h.channels != 1)
    throw IoError("mask RBV must have exactly 1 channel: " + path);
  MaskVolume m(h.dims, h.spacing);
  in.read(reinterpret_cast<char*>(m.voxels.data()),
          static_cast<std::streamsize>(m.voxels.size()));
  if (!in) throw IoError("truncated RBV payload: " + path);
  for (auto v : m.voxels) {
    if (v > 1) throw IoError("mask RBV has non-binary voxel values: " + path);
  }
  return m;
}

}  // namespace rbseg::io
