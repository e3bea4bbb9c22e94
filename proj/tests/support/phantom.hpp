#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lesionq/registration.hpp"
#include "lesionq/volume.hpp"

namespace lesionq::testing {

/// Smooth synthetic "brain": soft-edged ellipsoid with asymmetric Gaussian
/// texture, evaluated analytically at physical points (mm).
struct BrainPhantom {
  Vec3 center{31.5, 31.5, 31.5};
  Vec3 radii{24.0, 26.0, 19.0};
  double edge_mm = 1.5;

  double value(const Vec3& p) const;
};

/// Samples `phantom` at T^-1(q) for every voxel q of `grid`, i.e. the
/// returned image satisfies fixed(p) == moving(T(p)) for the sampled fixed.
Volume sample_phantom(const BrainPhantom& phantom, const Grid& grid, const RigidTransform& moving_from_fixed);

Volume sample_phantom(const BrainPhantom& phantom, const Grid& grid);

/// Uniform random binary mask.
MaskVolume random_mask(std::mt19937_64& rng, const std::array<std::int64_t, 3>& dims, double density);

/// Ellipsoidal lesion in baseline physical space.
struct LesionShape {
  int id = 0;
  Vec3 center{};
  Vec3 radii{};
};

/// Two-examination phantom with a known rigid transform and known lesion
/// changes. Follow-up shapes carry the id of the baseline shape they
/// descend from, or no parent for newly added lesions.
struct LongitudinalPhantom {
  Grid grid;
  RigidTransform transform;  // baseline (fixed) -> follow-up (moving)
  std::vector<LesionShape> baseline;
  struct FollowShape {
    LesionShape shape;
    std::optional<int> parent;  // baseline id
  };
  std::vector<FollowShape> follow;

  std::vector<int> grown, shrunk, deleted, split;  // baseline ids
  std::vector<int> added;                          // follow ids

  Volume prev_image, follow_image;
  MaskVolume prev_mask, follow_mask;
  /// Follow-up shape id per voxel (0 = none), on the follow-up grid.
  std::vector<int> follow_shape_ids;
  std::vector<int> prev_shape_ids;
};

/// 12 baseline lesions; follow-up = rigid motion + 3 grown, 3 shrunk,
/// 2 deleted, 2 added and 1 lesion split into 3 parts.
LongitudinalPhantom make_longitudinal_phantom(const RigidTransform* transform = nullptr);

}  // namespace lesionq::testing
