#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace lesionq {

/// Voxel grid geometry. Voxel (i, j, k) sits at physical point
/// (i * sx, j * sy, k * sz) in mm; data is stored x-fastest.
struct Grid {
  std::array<std::int64_t, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  }
  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((z * dims[1] + y) * dims[0] + x);
  }
  bool contains(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }
  double voxel_volume_mm3() const { return spacing[0] * spacing[1] * spacing[2]; }
  /// Physical center of the grid in mm.
  std::array<double, 3> center_mm() const {
    return {0.5 * static_cast<double>(dims[0] - 1) * spacing[0],
            0.5 * static_cast<double>(dims[1] - 1) * spacing[1],
            0.5 * static_cast<double>(dims[2] - 1) * spacing[2]};
  }

  bool operator==(const Grid&) const = default;
};

/// Throws InvalidArgument unless dims are positive and spacing finite and > 0.
void validate_grid(const Grid& grid);

enum class DType { U8, I16, U16, F32 };

std::string_view dtype_name(DType dtype);

/// Scalar 3D image. Every supported storage type is exactly representable
/// as float, so samples are held as float and the tag records the on-disk type.
struct Volume {
  Grid grid;
  DType dtype = DType::F32;
  std::vector<float> data;

  float at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[grid.index(x, y, z)];
  }
  bool operator==(const Volume&) const = default;
};

/// Binary volume, 0 = background, 1 = foreground.
struct MaskVolume {
  Grid grid;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[grid.index(x, y, z)];
  }
  std::size_t foreground_count() const;
  bool operator==(const MaskVolume&) const = default;
};

/// Checks size, spacing and (for Volume) absence of NaN; throws InvalidArgument.
void validate(const Volume& volume);
void validate(const MaskVolume& mask);

/// Foreground where value > threshold.
MaskVolume binarize(const Volume& volume, double threshold);

/// Default binarization threshold: half of the largest sample, but never
/// below 0.5, so that both {0,1} and {0,255} encodings binarize correctly.
double default_mask_threshold(const Volume& volume);

/// Volume with data converted from a mask (dtype u8, values 0/1).
Volume to_volume(const MaskVolume& mask);

}  // namespace lesionq
