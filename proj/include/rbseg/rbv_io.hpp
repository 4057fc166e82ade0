#ifndef RBSEG_RBV_IO_HPP
#define RBSEG_RBV_IO_HPP

#include <string>

#include "rbseg/volume.hpp"

namespace rbseg::io {

// RBV container: 8-byte magic "RBVOL\0\0\0", u32 little-endian header
// length, UTF-8 JSON header {dims, channels, spacing_mm, dtype}, raw payload
// in channel-major then z, y, x order (x fastest). dtype "f32le" carries
// float volumes, "u8" carries binary masks.
void write_rbv(const std::string& path, const Volume& volume);
void write_rbv(const std::string& path, const MaskVolume& mask);

Volume read_rbv_volume(const std::string& path);      // requires dtype f32le
MaskVolume read_rbv_mask(const std::string& path);    // requires dtype u8

}  // namespace rbseg::io

#endif  // RBSEG_RBV_IO_HPP
