#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lesionq/volume.hpp"

namespace lesionq {

enum class Connectivity { Six = 6, Eighteen = 18, TwentySix = 26 };

/// Throws InvalidArgument for anything other than 6, 18 or 26.
Connectivity connectivity_from_int(int n);

/// Per-voxel lesion labels, 0 = background. After label_components the
/// labels are exactly 1..lesion_count; after resampling, surviving labels
/// keep their original identities and may leave gaps.
struct LesionLabelMap {
  Grid grid;
  std::vector<std::int32_t> labels;
  std::int32_t lesion_count = 0;

  std::int32_t at(std::int64_t x, std::int64_t y, std::int64_t z) const { return labels[grid.index(x, y, z)]; }
  bool operator==(const LesionLabelMap&) const = default;
};

/// Axis-aligned voxel-index box, both corners inclusive.
struct BoundingCube {
  std::array<std::int64_t, 3> min{0, 0, 0};
  std::array<std::int64_t, 3> max{0, 0, 0};

  std::int64_t voxel_count() const {
    return (max[0] - min[0] + 1) * (max[1] - min[1] + 1) * (max[2] - min[2] + 1);
  }
  bool operator==(const BoundingCube&) const = default;
};

struct LesionRecord {
  std::int32_t index = 0;  // 1-based, ascending voxel_count order
  std::int32_t label = 0;  // label value in the map the record was extracted from
  std::int64_t voxel_count = 0;
  double volume_mm3 = 0.0;
  BoundingCube cube;

  bool operator==(const LesionRecord&) const = default;
};

/// Two-pass union-find labeling. Labels are assigned in raster order of each
/// component's first voxel, so the result is deterministic.
LesionLabelMap label_components(const MaskVolume& mask, Connectivity connectivity = Connectivity::TwentySix);

/// One record per label with at least min_voxels voxels, sorted by ascending
/// voxel count (ties: earlier first voxel in raster order), indexed 1..K.
std::vector<LesionRecord> extract_lesions(const LesionLabelMap& map, std::int64_t min_voxels = 0);

/// Midpoint of the cube in voxel coordinates; may be half-integer.
std::array<double, 3> lesion_center(const BoundingCube& cube);

}  // namespace lesionq
