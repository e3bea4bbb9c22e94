#include "lesionq/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lesionq/errors.hpp"

namespace lesionq {

void validate_grid(const Grid& grid) {
  for (int a = 0; a < 3; ++a) {
    if (grid.dims[a] <= 0) {
      throw InvalidArgument("grid dimension " + std::to_string(a) + " is not positive");
    }
    if (!std::isfinite(grid.spacing[a]) || grid.spacing[a] <= 0.0) {
      throw InvalidArgument("grid spacing " + std::to_string(a) + " must be finite and > 0");
    }
  }
}

std::string_view dtype_name(DType dtype) {
  switch (dtype) {
    case DType::U8:
      return "u8";
    case DType::I16:
      return "i16";
    case DType::U16:
      return "u16";
    case DType::F32:
      return "f32";
  }
  return "?";
}

std::size_t MaskVolume::foreground_count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

void validate(const Volume& volume) {
  validate_grid(volume.grid);
  if (volume.data.size() != volume.grid.voxel_count()) {
    throw InvalidArgument("volume data length does not match dims");
  }
  if (std::any_of(volume.data.begin(), volume.data.end(), [](float v) { return std::isnan(v); })) {
    throw InvalidArgument("volume contains NaN");
  }
}

void validate(const MaskVolume& mask) {
  validate_grid(mask.grid);
  if (mask.data.size() != mask.grid.voxel_count()) {
    throw InvalidArgument("mask data length does not match dims");
  }
  if (std::any_of(mask.data.begin(), mask.data.end(), [](std::uint8_t v) { return v > 1; })) {
    throw InvalidArgument("mask contains values other than 0 and 1");
  }
}

MaskVolume binarize(const Volume& volume, double threshold) {
  MaskVolume mask{volume.grid, std::vector<std::uint8_t>(volume.data.size())};
  std::transform(volume.data.begin(), volume.data.end(), mask.data.begin(),
                 [threshold](float v) { return static_cast<std::uint8_t>(v > threshold); });
  return mask;
}

double default_mask_threshold(const Volume& volume) {
  double peak = 0.0;
  for (float v : volume.data) peak = std::max(peak, static_cast<double>(v));
  return std::max(0.5, 0.5 * peak);
}

Volume to_volume(const MaskVolume& mask) {
  Volume v{mask.grid, DType::U8, std::vector<float>(mask.data.begin(), mask.data.end())};
  return v;
}

}  // namespace lesionq
