#include "rbseg/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "rbseg/errors.hpp"

namespace rbseg::morph {

namespace {

// Union-find over provisional labels, path-halving.
struct DisjointSet {
  std::vector<std::uint32_t> parent;
  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a; else parent[a] = b;
  }
};

// Offsets into the already-scanned half-space for the raster order (z,y,x).
std::vector<Coord> half_neighborhood(Connectivity conn) {
  std::vector<Coord> out;
  if (conn == Connectivity::Faces6) {
    out = {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  } else {
    for (int dz = -1; dz <= 0; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
          out.push_back({dx, dy, dz});
        }
  }
  return out;
}

}  // namespace

std::vector<Component> label_components(const MaskVolume& mask,
                                        Connectivity connectivity) {
  mask.validate_shape();
  const auto neigh = half_neighborhood(connectivity);
  const std::size_t n = mask.voxels.size();
  std::vector<std::uint32_t> label(n, 0);  // 0 = background, provisional + 1
  DisjointSet ds;

  // First pass: provisional labels + equivalences.
  std::size_t idx = 0;
  for (int z = 0; z < mask.dims.z; ++z) {
    for (int y = 0; y < mask.dims.y; ++y) {
      for (int x = 0; x < mask.dims.x; ++x, ++idx) {
        if (!mask.voxels[idx]) continue;
        std::uint32_t assigned = 0;
        bool has = false;
        for (const auto& d : neigh) {
          const int nx = x + d.x, ny = y + d.y, nz = z + d.z;
          if (!mask.in_bounds(nx, ny, nz)) continue;
          const std::uint32_t nl = label[mask.index(nx, ny, nz)];
          if (!nl) continue;
          if (!has) {
            assigned = nl;
            has = true;
          } else {
            ds.unite(assigned - 1, nl - 1);
          }
        }
        if (!has) assigned = ds.make() + 1;
        label[idx] = assigned;
      }
    }
  }

  // Second pass: components in raster-scan-of-first-voxel order.
  std::vector<Component> components;
  std::unordered_map<std::uint32_t, int> root_to_id;  // root -> index into components
  idx = 0;
  for (int z = 0; z < mask.dims.z; ++z) {
    for (int y = 0; y < mask.dims.y; ++y) {
      for (int x = 0; x < mask.dims.x; ++x, ++idx) {
        if (!label[idx]) continue;
        const std::uint32_t root = ds.find(label[idx] - 1);
        auto it = root_to_id.find(root);
        if (it == root_to_id.end()) {
          it = root_to_id.emplace(root, static_cast<int>(components.size())).first;
          components.push_back(Component{});
          components.back().id = static_cast<int>(components.size());
        }
        components[it->second].voxel_list.push_back({x, y, z});
      }
    }
  }

  for (auto& comp : components) {
    comp.volume_voxels = comp.voxel_list.size();
    double cx = 0, cy = 0, cz = 0;
    for (const auto& v : comp.voxel_list) {
      cx += v.x + 0.5;
      cy += v.y + 0.5;
      cz += v.z + 0.5;
    }
    const double inv = 1.0 / static_cast<double>(comp.voxel_list.size());
    comp.centroid_mm = {cx * inv * mask.spacing_mm[0],
                        cy * inv * mask.spacing_mm[1],
                        cz * inv * mask.spacing_mm[2]};
  }
  return components;
}

double point_to_voxels_distance(const std::array<double, 3>& c_mm,
                                const std::vector<Coord>& voxels,
                                const Spacing& spacing_mm) {
  if (voxels.empty()) throw NumericError("no annotation voxels");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : voxels) {
    const double dx = (v.x + 0.5) * spacing_mm[0] - c_mm[0];
    const double dy = (v.y + 0.5) * spacing_mm[1] - c_mm[1];
    const double dz = (v.z + 0.5) * spacing_mm[2] - c_mm[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) best = d2;
  }
  return std::sqrt(best);
}

double centroid_to_mask_distance(const std::array<double, 3>& c_mm,
                                 const MaskVolume& mask) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  bool any = false;
  for (int z = 0; z < mask.dims.z; ++z) {
    for (int y = 0; y < mask.dims.y; ++y) {
      for (int x = 0; x < mask.dims.x; ++x, ++idx) {
        if (!mask.voxels[idx]) continue;
        any = true;
        const double dx = (x + 0.5) * mask.spacing_mm[0] - c_mm[0];
        const double dy = (y + 0.5) * mask.spacing_mm[1] - c_mm[1];
        const double dz = (z + 0.5) * mask.spacing_mm[2] - c_mm[2];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best) best = d2;
      }
    }
  }
  if (!any) throw NumericError("no annotation voxels");
  return std::sqrt(best);
}

double dice(const std::vector<Coord>& a, const std::vector<Coord>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  auto sorted = [](const std::vector<Coord>& v) {
    return std::is_sorted(v.begin(), v.end());
  };
  std::vector<Coord> sa, sb;
  const std::vector<Coord>* pa = &a;
  const std::vector<Coord>* pb = &b;
  if (!sorted(a)) {
    sa = a;
    std::sort(sa.begin(), sa.end());
    pa = &sa;
  }
  if (!sorted(b)) {
    sb = b;
    std::sort(sb.begin(), sb.end());
    pb = &sb;
  }
  const std::vector<Coord>& A = *pa;
  const std::vector<Coord>& B = *pb;
  std::size_t i = 0, j = 0, both = 0;
  while (i < A.size() && j < B.size()) {
    if (A[i] == B[j]) {
      ++both;
      ++i;
      ++j;
    } else if (A[i] < B[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(both) /
         static_cast<double>(A.size() + B.size());
}

}  // namespace rbseg::morph
