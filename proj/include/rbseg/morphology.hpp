#ifndef RBSEG_MORPHOLOGY_HPP
#define RBSEG_MORPHOLOGY_HPP

#include <array>
#include <vector>

#include "rbseg/volume.hpp"

namespace rbseg::morph {

enum class Connectivity { Faces6 = 6, Full26 = 26 };

// One maximal connected foreground component. Ids start at 1 and follow the
// raster-scan order (z, then y, then x) of each component's first voxel.
struct Component {
  int id = 0;
  std::vector<Coord> voxel_list;          // sorted in raster order
  std::array<double, 3> centroid_mm{};    // mean of voxel centers * spacing
  std::size_t volume_voxels = 0;
};

std::vector<Component> label_components(const MaskVolume& mask,
                                        Connectivity connectivity);

// Minimum Euclidean distance (mm) from point c to any foreground voxel
// center. Throws NumericError("no annotation voxels") on an empty mask.
double centroid_to_mask_distance(const std::array<double, 3>& c_mm,
                                 const MaskVolume& mask);

// Same, against an explicit voxel list (used for per-lesion matching).
double point_to_voxels_distance(const std::array<double, 3>& c_mm,
                                const std::vector<Coord>& voxels,
                                const Spacing& spacing_mm);

// 2|a n b| / (|a| + |b|); both sets empty -> 1.0 by convention (vacuous
// agreement; true-positive components are never empty so the convention is
// never load-bearing).
double dice(const std::vector<Coord>& a, const std::vector<Coord>& b);

// Voxel center of (x,y,z) in mm: (index + 0.5) * spacing.
inline std::array<double, 3> voxel_center_mm(const Coord& v, const Spacing& s) {
  return {(v.x + 0.5) * s[0], (v.y + 0.5) * s[1], (v.z + 0.5) * s[2]};
}

}  // namespace rbseg::morph

#endif  // RBSEG_MORPHOLOGY_HPP
