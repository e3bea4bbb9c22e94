#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lesionq/image2d.hpp"
#include "lesionq/labeling.hpp"
#include "lesionq/matching.hpp"
#include "lesionq/volume.hpp"

namespace lesionq {

// ---- contours -------------------------------------------------------------

struct Pixel {
  int x = 0, y = 0;
  bool operator==(const Pixel&) const = default;
};

/// Closed boundary polyline (front() == back()) of one 8-connected region.
struct Contour {
  std::int32_t label = 0;
  bool outer = true;  // false for the boundary around a hole
  std::vector<Pixel> points;
};

struct ContourSet {
  std::vector<Contour> contours;
};

/// One z plane of a label map.
struct LabelSlice {
  int width = 0, height = 0;
  std::vector<std::int32_t> labels;

  std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

LabelSlice label_slice(const LesionLabelMap& map, std::int64_t z);

/// Moore-neighbor boundary following. Each 8-connected same-label region
/// yields its outer contour, started at its topmost-leftmost pixel, plus
/// one contour per hole. Regions are visited in raster order.
ContourSet trace_contours(const LabelSlice& slice);

// ---- collage --------------------------------------------------------------

struct SliceRange {
  std::int64_t first = 0;
  std::int64_t last = 0;  // inclusive
};

struct CollageOptions {
  int columns = 4;
  int rows_per_page = 8;  // 0 puts every row on one page
};

struct CollageTile {
  std::int64_t z = -1;  // -1 for padding tiles
  bool has_contour = false;
  std::vector<std::int32_t> indices;  // lesion numerals drawn on this tile
};

struct CollagePage {
  RgbImage image;
  std::vector<CollageTile> tiles;  // row-major
};

/// Grayscale slices (window = volume min..max) in a grid of `columns`
/// tiles, with 1-px red lesion contours and the lesion index next to each
/// contoured region. Only labels present in `lesions` are drawn. The last
/// row is padded with blank tiles. Throws EmptyRange / ShapeMismatch.
std::vector<CollagePage> render_collage(const Volume& volume, const LesionLabelMap& labels,
                                        const std::vector<LesionRecord>& lesions, SliceRange range,
                                        const CollageOptions& options);

// ---- charts ---------------------------------------------------------------

struct ChartData {
  struct Pair {
    std::int64_t prev = 0;
    std::int64_t follow = 0;
    bool operator==(const Pair&) const = default;
  };
  std::vector<Pair> matched;           // ascending by prev volume
  std::vector<std::int64_t> unmatched;  // ascending
  std::int64_t floor = 0;
};

/// Matched pairs with max(prev, follow) > floor, emerge volumes > floor,
/// each sorted ascending.
ChartData chart_data(const ComparisonReport& report, std::int64_t floor = 100);

/// Two-panel SVG line chart (matched pairs | unmatched lesions).
std::string render_line_chart(const ChartData& data);

// ---- tables ---------------------------------------------------------------

struct VolumeBins {
  std::vector<double> thresholds;
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  std::vector<double> proportions;  // exact, sums to 1 (all 0 when empty)
};

/// Bins lesions by voxel count: <= t1, then (t_i, t_i+1] between interior
/// thresholds, and >= tk last (a single threshold gives <= t1, > t1). With
/// two thresholds this is <= t1, (t1, t2), >= t2. Throws InvalidArgument unless
/// thresholds are positive and strictly ascending.
VolumeBins volume_bin_stats(const std::vector<LesionRecord>& lesions, const std::vector<double>& thresholds);

/// Proportions rounded half-up to whole percent.
std::vector<int> display_percentages(const VolumeBins& bins);

/// Plain-text rendering, one "range count (pct%)" line per bin.
std::string format_bins(const VolumeBins& bins);

struct VolumeTableRow {
  std::int32_t lesion = 0;  // follow-up index
  bool matched = false;
  std::int32_t prev_index = 0;
  std::int64_t prev_voxels = 0;
  std::int64_t follow_voxels = 0;
  std::string category;  // grow/shrink/stable/emerge

  /// "639" for single volumes, "[1196, 1127]" for pairs.
  std::string volume_text() const;
};

/// One row per follow-up lesion, ordered by index.
std::vector<VolumeTableRow> volume_table(const ComparisonReport& report);
std::string volume_table_csv(const std::vector<VolumeTableRow>& rows);

}  // namespace lesionq
