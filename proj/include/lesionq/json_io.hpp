#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lesionq/bbts.hpp"
#include "lesionq/config.hpp"
#include "lesionq/labeling.hpp"
#include "lesionq/matching.hpp"
#include "lesionq/metrics.hpp"
#include "lesionq/registration.hpp"
#include "lesionq/report.hpp"

namespace lesionq {

using Json = nlohmann::ordered_json;

Json config_to_json(const RunConfig& config);
/// Applies the keys present in `j` on top of `base`. Unknown keys and
/// wrongly typed values throw InvalidArgument.
RunConfig config_from_json(const Json& j, RunConfig base = {});

Json lesions_to_json(const Grid& grid, const std::vector<LesionRecord>& lesions, int connectivity,
                     std::int64_t min_voxels);
std::vector<LesionRecord> lesions_from_json(const Json& j);

Json transform_to_json(const RigidTransform& transform, double final_ncc, bool converged);
/// Throws FormatError on missing or malformed fields.
RigidTransform transform_from_json(const Json& j);

Json comparison_to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(const Json& j);

Json bins_to_json(const VolumeBins& bins);
Json volume_table_to_json(const std::vector<VolumeTableRow>& rows);
Json scores_to_json(const ScoreTable& table);

/// [{"x0", "y0", "x1", "y1", "threshold"?}, ...]
std::vector<BoundingBox2D> boxes_from_json(const Json& j);

/// Reads and parses a JSON file; throws IoFailure / FormatError.
Json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const Json& j, const std::filesystem::path& path);
void write_text_file(const std::string& text, const std::filesystem::path& path);

}  // namespace lesionq
