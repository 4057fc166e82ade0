#ifndef RBSEG_VOLUME_HPP
#define RBSEG_VOLUME_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "rbseg/errors.hpp"

namespace rbseg {

struct Coord {
  int x = 0, y = 0, z = 0;
  bool operator==(const Coord&) const = default;
  bool operator<(const Coord& o) const {
    if (z != o.z) return z < o.z;
    if (y != o.y) return y < o.y;
    return x < o.x;
  }
};

struct Dims {
  int x = 0, y = 0, z = 0;
  bool operator==(const Dims&) const = default;
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
};

using Spacing = std::array<double, 3>;  // mm per voxel along x, y, z

// Binary annotation mask. Voxel layout is z-major, x fastest.
struct MaskVolume {
  Dims dims;
  Spacing spacing_mm{1.0, 1.0, 1.0};
  std::vector<std::uint8_t> voxels;  // values exactly {0, 1}

  MaskVolume() = default;
  MaskVolume(Dims d, Spacing s)
      : dims(d), spacing_mm(s), voxels(d.voxel_count(), 0) {
    validate_shape();
  }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * dims.y + y) * dims.x + x;
  }
  std::uint8_t at(int x, int y, int z) const { return voxels[index(x, y, z)]; }
  void set(int x, int y, int z, std::uint8_t v) { voxels[index(x, y, z)] = v; }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims.x && y < dims.y && z < dims.z;
  }

  std::size_t foreground_count() const {
    std::size_t n = 0;
    for (auto v : voxels) n += v;
    return n;
  }

  void validate_shape() const {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1)
      throw ConfigError("mask dims must all be >= 1");
    if (spacing_mm[0] <= 0 || spacing_mm[1] <= 0 || spacing_mm[2] <= 0)
      throw ConfigError("mask spacing must be strictly positive");
  }
};

// Multi-channel scalar field; carries patient images and probability maps.
// Layout is channel-major, then z, y, x (x fastest) -- identical to the RBV
// payload order.
struct Volume {
  Dims dims;
  int channels = 1;
  Spacing spacing_mm{1.0, 1.0, 1.0};
  std::vector<float> voxels;

  Volume() = default;
  Volume(Dims d, int c, Spacing s)
      : dims(d), channels(c), spacing_mm(s),
        voxels(d.voxel_count() * static_cast<std::size_t>(c), 0.0f) {
    if (c < 1) throw ConfigError("volume must have >= 1 channel");
  }

  std::size_t index(int c, int x, int y, int z) const {
    return ((static_cast<std::size_t>(c) * dims.z + z) * dims.y + y) * dims.x + x;
  }
  float at(int c, int x, int y, int z) const { return voxels[index(c, x, y, z)]; }
  float& at(int c, int x, int y, int z) { return voxels[index(c, x, y, z)]; }
};

}  // namespace rbseg

#endif  // RBSEG_VOLUME_HPP
