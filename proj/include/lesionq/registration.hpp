#pragma once

#include <array>
#include <vector>

#include "lesionq/labeling.hpp"
#include "lesionq/volume.hpp"

namespace lesionq {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// 6-DoF rigid transform mapping fixed-space physical points to moving-space
/// physical points (pull-back convention):
///
///   T(p) = R (p - center) + center + translation,  R = Rz(rz) Ry(ry) Rx(rx)
///
/// with angles in degrees (intrinsic Z-Y-X).
struct RigidTransform {
  Vec3 rotation_deg{0, 0, 0};
  Vec3 translation_mm{0, 0, 0};
  Vec3 center_mm{0, 0, 0};

  Mat3 rotation_matrix() const;
  Vec3 apply(const Vec3& p) const;
  Vec3 apply_inverse(const Vec3& q) const;

  static RigidTransform identity(const Vec3& center) { return {{0, 0, 0}, {0, 0, 0}, center}; }
  bool operator==(const RigidTransform&) const = default;
};

struct RegistrationParams {
  int pyramid_levels = 3;  // downsample factors 2^(levels-1) ... 1
  double initial_translation_step_mm = 8.0;
  double initial_rotation_step_deg = 4.0;
  double min_translation_step_mm = 0.1;
  double min_rotation_step_deg = 0.05;
  int max_iterations_per_level = 200;
};

/// Throws InvalidArgument on levels < 1 or steps out of order.
void validate(const RegistrationParams& params);

struct RegistrationResult {
  RigidTransform transform;
  double final_ncc = 0.0;  // at full resolution
  bool converged = true;   // false when any level stopped at the iteration cap
  int iterations = 0;
  /// Metric after every accepted move, per pyramid level (coarsest first).
  std::vector<std::vector<double>> accepted_ncc;
};

/// Maximizes NCC(fixed, moving o T) by coordinate pattern search over a box
/// pyramid, starting from the transform that aligns the two grid centers.
/// Deterministic. Throws DegenerateInput for constant volumes and NoOverlap
/// when the initial alignment leaves no overlapping voxels.
RegistrationResult register_rigid(const Volume& fixed, const Volume& moving, const RegistrationParams& params = {});

/// NCC between fixed and moving sampled through T over the overlap region.
/// Returns NaN when the overlap is empty or either side has zero variance.
double normalized_cross_correlation(const Volume& fixed, const Volume& moving, const RigidTransform& transform);

/// Trilinear pull-back of moving onto the reference grid; zero outside.
Volume resample_volume(const Volume& moving, const RigidTransform& transform, const Grid& reference);

/// Nearest-neighbor pull-back. Label values are kept as-is, lesion_count is
/// the number of distinct labels that survive.
LesionLabelMap resample_labelmap(const LesionLabelMap& labels, const RigidTransform& transform, const Grid& reference);

/// Inverse map: a moving-space physical point to fixed space.
Vec3 map_moving_point_to_fixed(const RigidTransform& transform, const Vec3& q);

/// Voxel index coordinates <-> physical mm on a grid with origin at voxel 0.
Vec3 voxel_to_physical(const Grid& grid, const Vec3& v);
Vec3 physical_to_voxel(const Grid& grid, const Vec3& p);

}  // namespace lesionq
