#pragma once

#include <filesystem>

#include "lesionq/volume.hpp"

namespace lesionq {

// Single-file NIfTI-1 (.nii) subset: 3D only, datatypes u8/i16/u16/f32,
// spacing from pixdim[1..3]. Orientation (qform/sform) is ignored.

/// Reads either byte order. Applies scl_slope/scl_inter when the slope is
/// nonzero and not the identity, in which case the result is tagged f32.
Volume read_nifti(const std::filesystem::path& path);

/// Writes host byte order, vox_offset 352, scl_slope 1, scl_inter 0.
/// Validates the volume first and writes nothing if it is invalid.
void write_nifti(const Volume& volume, const std::filesystem::path& path);

MaskVolume read_nifti_mask(const std::filesystem::path& path, double threshold);
void write_nifti_mask(const MaskVolume& mask, const std::filesystem::path& path);

}  // namespace lesionq
