#include "lesionq/pipeline.hpp"

#include "lesionq/errors.hpp"

namespace lesionq {

LesionStats lesion_statistics(const MaskVolume& mask, Connectivity connectivity, std::int64_t min_voxels) {
  LesionStats stats;
  stats.map = label_components(mask, connectivity);
  stats.lesions = extract_lesions(stats.map, min_voxels);
  return stats;
}

ExamComparison compare_exams(const Volume& prev_image, const MaskVolume& prev_mask, const Volume& follow_image,
                             const MaskVolume& follow_mask, const RunConfig& config,
                             const std::optional<RigidTransform>& transform) {
  validate(config);
  if (prev_image.grid.dims != prev_mask.grid.dims) {
    throw ShapeMismatch("baseline image and mask grids differ");
  }
  if (follow_image.grid.dims != follow_mask.grid.dims) {
    throw ShapeMismatch("follow-up image and mask grids differ");
  }
  const Connectivity conn = connectivity_from_int(config.connectivity);

  ExamComparison out;
  out.prev = lesion_statistics(prev_mask, conn, config.min_voxels);
  out.follow = lesion_statistics(follow_mask, conn, config.min_voxels);

  // The baseline examination is the fixed reference.
  if (transform) {
    out.registration.transform = *transform;
    out.registration.final_ncc = normalized_cross_correlation(prev_image, follow_image, *transform);
    out.registration.converged = true;
  } else {
    out.registration = register_rigid(prev_image, follow_image, config.registration);
  }

  out.follow_on_prev_grid = resample_labelmap(out.follow.map, out.registration.transform, prev_image.grid);
  out.follow_registered = extract_lesions(out.follow_on_prev_grid, 0);

  const MatchResult matches = match_lesions(out.prev.lesions, out.follow_registered, out.follow.lesions, config.min_ioc);
  MatchParams params{config.connectivity, config.min_voxels, config.stability_tolerance, config.min_ioc};
  out.report = classify_matches(matches, out.prev.lesions, params);
  return out;
}

}  // namespace lesionq
