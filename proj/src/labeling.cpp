#include "lesionq/labeling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    std::int32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::int32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller id becomes root so roots stay the earliest-seen provisional label.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::int32_t> parent_;
};

// Neighbor offsets that precede the current voxel in raster order.
std::vector<std::array<int, 3>> backward_offsets(Connectivity connectivity) {
  std::vector<std::array<int, 3>> out;
  for (int dz = -1; dz <= 0; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
        const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (connectivity == Connectivity::Six && manhattan > 1) continue;
        if (connectivity == Connectivity::Eighteen && manhattan > 2) continue;
        out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

}  // namespace

Connectivity connectivity_from_int(int n) {
  switch (n) {
    case 6:
      return Connectivity::Six;
    case 18:
      return Connectivity::Eighteen;
    case 26:
      return Connectivity::TwentySix;
  }
  throw InvalidArgument("connectivity must be 6, 18 or 26, got " + std::to_string(n));
}

LesionLabelMap label_components(const MaskVolume& mask, Connectivity connectivity) {
  validate(mask);
  const auto [nx, ny, nz] = mask.grid.dims;
  LesionLabelMap out{mask.grid, std::vector<std::int32_t>(mask.data.size(), 0), 0};
  const auto offsets = backward_offsets(connectivity);

  // Provisional labels start at 1; slot 0 of the set is a dummy.
  DisjointSet sets;
  sets.make();
  for (std::int64_t z = 0; z < nz; ++z) {
    for (std::int64_t y = 0; y < ny; ++y) {
      for (std::int64_t x = 0; x < nx; ++x) {
        const std::size_t i = mask.grid.index(x, y, z);
        if (!mask.data[i]) continue;
        std::int32_t current = 0;
        for (const auto& o : offsets) {
          const std::int64_t xx = x + o[0], yy = y + o[1], zz = z + o[2];
          if (!mask.grid.contains(xx, yy, zz)) continue;
          const std::int32_t neighbor = out.labels[mask.grid.index(xx, yy, zz)];
          if (neighbor == 0) continue;
          if (current == 0) {
            current = neighbor;
          } else if (neighbor != current) {
            sets.unite(current, neighbor);
          }
        }
        out.labels[i] = current != 0 ? current : sets.make();
      }
    }
  }

  // Final labels follow raster order of each component's first voxel.
  std::vector<std::int32_t> final_label;
  for (auto& label : out.labels) {
    if (label == 0) continue;
    const auto root = static_cast<std::size_t>(sets.find(label));
    if (root >= final_label.size()) final_label.resize(root + 1, 0);
    if (final_label[root] == 0) final_label[root] = ++out.lesion_count;
    label = final_label[root];
  }
  return out;
}

std::vector<LesionRecord> extract_lesions(const LesionLabelMap& map, std::int64_t min_voxels) {
  struct Accum {
    std::int64_t count = 0;
    std::size_t first = std::numeric_limits<std::size_t>::max();
    BoundingCube cube;
  };
  std::int32_t max_label = 0;
  for (auto l : map.labels) max_label = std::max(max_label, l);
  std::vector<Accum> acc(static_cast<std::size_t>(max_label) + 1);

  const auto [nx, ny, nz] = map.grid.dims;
  std::size_t i = 0;
  for (std::int64_t z = 0; z < nz; ++z) {
    for (std::int64_t y = 0; y < ny; ++y) {
      for (std::int64_t x = 0; x < nx; ++x, ++i) {
        const std::int32_t l = map.labels[i];
        if (l <= 0) continue;
        Accum& a = acc[static_cast<std::size_t>(l)];
        const std::array<std::int64_t, 3> p{x, y, z};
        if (a.count == 0) {
          a.first = i;
          a.cube.min = p;
          a.cube.max = p;
        } else {
          for (int k = 0; k < 3; ++k) {
            a.cube.min[k] = std::min(a.cube.min[k], p[k]);
            a.cube.max[k] = std::max(a.cube.max[k], p[k]);
          }
        }
        ++a.count;
      }
    }
  }

  std::vector<std::pair<std::size_t, LesionRecord>> kept;
  const double voxel_mm3 = map.grid.voxel_volume_mm3();
  for (std::int32_t l = 1; l <= max_label; ++l) {
    const Accum& a = acc[static_cast<std::size_t>(l)];
    if (a.count == 0 || a.count < min_voxels) continue;
    LesionRecord r;
    r.label = l;
    r.voxel_count = a.count;
    r.volume_mm3 = static_cast<double>(a.count) * voxel_mm3;
    r.cube = a.cube;
    kept.emplace_back(a.first, r);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.voxel_count, a.first) < std::tie(b.second.voxel_count, b.first);
  });

  std::vector<LesionRecord> out;
  out.reserve(kept.size());
  for (auto& [first, r] : kept) {
    r.index = static_cast<std::int32_t>(out.size()) + 1;
    out.push_back(r);
  }
  return out;
}

std::array<double, 3> lesion_center(const BoundingCube& cube) {
  return {0.5 * static_cast<double>(cube.min[0] + cube.max[0]), 0.5 * static_cast<double>(cube.min[1] + cube.max[1]),
          0.5 * static_cast<double>(cube.min[2] + cube.max[2])};
}

}  // namespace lesionq
