#include "rbseg/neural/input_stack.hpp"

#include <algorithm>

#include "rbseg/errors.hpp"

namespace rbseg::neural {

Tensor make_input_stack(const Volume& image, int z_center, int z_slices) {
  if (z_slices < 1 || z_slices % 2 == 0)
    throw ConfigError("z_slices must be a positive odd number");
  if (z_center < 0 || z_center >= image.dims.z)
    throw ConfigError("input stack z_center out of range");
  const int r = z_slices / 2;
  const int ch = image.channels;
  Tensor out(ch * z_slices, image.dims.y, image.dims.x);
  for (int dz = -r; dz <= r; ++dz) {
    const int sz = std::clamp(z_center + dz, 0, image.dims.z - 1);
    for (int c = 0; c < ch; ++c) {
      double* plane = out.plane((dz + r) * ch + c);
      for (int y = 0; y < image.dims.y; ++y) {
        for (int x = 0; x < image.dims.x; ++x) {
          plane[static_cast<std::size_t>(y) * image.dims.x + x] =
              image.at(c, x, y, sz);
        }
      }
    }
  }
  return out;
}

}  // namespace rbseg::neural
