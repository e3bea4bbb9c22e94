#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "lesionq/image2d.hpp"
#include "lesionq/volume.hpp"

namespace lesionq {

/// Builds a 3D mask from a directory of 2D slice images (PNG/PGM). Files are
/// ordered lexicographically by name, so numbering must be zero-padded;
/// slice k becomes plane z = k. A pixel is foreground when it exceeds the
/// threshold; without one, half of the largest pixel value (minimum 0.5) is used.
///
/// Throws EmptyDirectory, InconsistentDimensions, UnreadableImage.
MaskVolume stack_slices(const std::filesystem::path& dir, const std::array<double, 3>& spacing,
                        std::optional<double> threshold = std::nullopt);

/// Stacks grayscale slices into a Volume (dtype u8 or u16 by bit depth),
/// with the same ordering and errors as stack_slices.
Volume stack_image_slices(const std::filesystem::path& dir, const std::array<double, 3>& spacing);

/// Plane z of a mask as an 8-bit 0/255 image.
Image2D mask_slice(const MaskVolume& mask, std::int64_t z);

/// Writes each z plane as <dir>/<prefix><zzz>.png, 0/255.
void write_slices(const MaskVolume& mask, const std::filesystem::path& dir, const std::string& prefix = "slice_");

}  // namespace lesionq
