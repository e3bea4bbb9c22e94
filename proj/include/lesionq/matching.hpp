#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "lesionq/labeling.hpp"

namespace lesionq {

/// Intersection over Boundary Cube as an exact ratio of voxel counts:
/// overlap of the two inclusive boxes over the larger box.
struct IocRatio {
  std::int64_t intersection = 0;
  std::int64_t larger = 1;

  double value() const { return static_cast<double>(intersection) / static_cast<double>(larger); }
};

IocRatio ioc_ratio(const BoundingCube& a, const BoundingCube& b);
double ioc(const BoundingCube& a, const BoundingCube& b);

enum class ChangeCategory { Grow, Shrink, Stable };
std::string_view category_name(ChangeCategory c);

struct LesionMatch {
  std::int32_t prev_index = 0;
  std::int32_t follow_index = 0;
  double ioc = 0.0;
  std::int64_t prev_voxels = 0;
  std::int64_t follow_voxels = 0;
  ChangeCategory category = ChangeCategory::Stable;

  bool operator==(const LesionMatch&) const = default;
};

struct EmergeEntry {
  std::int32_t follow_index = 0;
  std::int64_t follow_voxels = 0;
  bool resampling_loss = false;  // label disappeared entirely during resampling

  bool operator==(const EmergeEntry&) const = default;
};

struct VanishEntry {
  std::int32_t prev_index = 0;
  std::int64_t prev_voxels = 0;

  bool operator==(const VanishEntry&) const = default;
};

struct MatchResult {
  std::vector<LesionMatch> matched;  // ordered by follow_index
  std::vector<EmergeEntry> emerge;   // ordered by follow_index
};

struct MatchParams {
  int connectivity = 26;
  std::int64_t min_voxels = 0;
  double stability_tolerance = 0.0;
  double min_ioc = 0.0;  // a pair matches when IoC > min_ioc
};

struct ComparisonReport {
  std::vector<LesionMatch> matched;
  std::vector<EmergeEntry> emerge;
  std::vector<VanishEntry> vanish;  // ordered by prev_index
  MatchParams params;
};

/// Matches every follow-up lesion independently to the baseline lesion with
/// the largest IoC between its registered cube and the baseline cube
/// (ties go to the smaller baseline index). Lesions with no IoC above
/// min_ioc, or whose label did not survive resampling, go to emerge.
/// Registered records are paired with native ones through their `label`.
/// Volume pairs always use native voxel counts.
MatchResult match_lesions(const std::vector<LesionRecord>& prev, const std::vector<LesionRecord>& follow_registered,
                          const std::vector<LesionRecord>& follow_native, double min_ioc = 0.0);

ChangeCategory classify_change(std::int64_t prev_voxels, std::int64_t follow_voxels, double tolerance);

/// Assigns grow/shrink/stable and collects baseline lesions that no
/// follow-up lesion selected.
ComparisonReport classify_matches(const MatchResult& matches, const std::vector<LesionRecord>& prev,
                                  const MatchParams& params);

}  // namespace lesionq
