#pragma once

#include <optional>
#include <vector>

#include "lesionq/config.hpp"
#include "lesionq/labeling.hpp"
#include "lesionq/matching.hpp"
#include "lesionq/registration.hpp"
#include "lesionq/volume.hpp"

namespace lesionq {

struct LesionStats {
  LesionLabelMap map;
  std::vector<LesionRecord> lesions;  // filtered by min_voxels
};

LesionStats lesion_statistics(const MaskVolume& mask, Connectivity connectivity, std::int64_t min_voxels);

struct ExamComparison {
  RegistrationResult registration;
  LesionStats prev;
  LesionStats follow;
  LesionLabelMap follow_on_prev_grid;             // native labels carried onto the baseline grid
  std::vector<LesionRecord> follow_registered;    // cubes on the baseline grid, keyed by native label
  ComparisonReport report;
};

/// Two-examination comparison: label both masks, register the follow-up
/// image to the baseline (or reuse `transform`), carry the follow-up labels
/// into baseline space, match by IoC and classify. Volumes in the report
/// come from the native grids. Throws ShapeMismatch when an image and its
/// mask disagree on the grid.
ExamComparison compare_exams(const Volume& prev_image, const MaskVolume& prev_mask, const Volume& follow_image,
                             const MaskVolume& follow_mask, const RunConfig& config,
                             const std::optional<RigidTransform>& transform = std::nullopt);

}  // namespace lesionq
