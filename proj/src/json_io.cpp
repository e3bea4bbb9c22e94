#include "lesionq/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(where + ": field \"" + key + "\" has the wrong type");
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void apply(const Json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(where + ": \"" + key + "\" has the wrong type");
  }
}

Json cube_to_json(const BoundingCube& c) { return Json{{"min", c.min}, {"max", c.max}}; }

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json reg{{"pyramid_levels", c.registration.pyramid_levels},
           {"initial_translation_step_mm", c.registration.initial_translation_step_mm},
           {"initial_rotation_step_deg", c.registration.initial_rotation_step_deg},
           {"min_translation_step_mm", c.registration.min_translation_step_mm},
           {"min_rotation_step_deg", c.registration.min_rotation_step_deg},
           {"max_iterations_per_level", c.registration.max_iterations_per_level}};
  Json j{{"connectivity", c.connectivity},
         {"min_voxels", c.min_voxels},
         {"stability_tolerance", c.stability_tolerance},
         {"min_ioc", c.min_ioc},
         {"chart_floor", c.chart_floor},
         {"bins", c.bins},
         {"registration", reg},
         {"out_dir", c.out_dir},
         {"mask_threshold", nullptr},
         {"slice_spacing", c.slice_spacing},
         {"columns", c.columns},
         {"rows_per_page", c.rows_per_page}};
  if (c.mask_threshold) j["mask_threshold"] = *c.mask_threshold;
  return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  const std::string where = "config";
  reject_unknown(j,
                 {"connectivity", "min_voxels", "stability_tolerance", "min_ioc", "chart_floor", "bins",
                  "registration", "out_dir", "mask_threshold", "slice_spacing", "columns", "rows_per_page"},
                 where);
  apply(j, "connectivity", c.connectivity, where);
  apply(j, "min_voxels", c.min_voxels, where);
  apply(j, "stability_tolerance", c.stability_tolerance, where);
  apply(j, "min_ioc", c.min_ioc, where);
  apply(j, "chart_floor", c.chart_floor, where);
  apply(j, "bins", c.bins, where);
  apply(j, "out_dir", c.out_dir, where);
  apply(j, "slice_spacing", c.slice_spacing, where);
  apply(j, "columns", c.columns, where);
  apply(j, "rows_per_page", c.rows_per_page, where);
  if (j.contains("mask_threshold")) {
    if (j["mask_threshold"].is_null()) {
      c.mask_threshold.reset();
    } else {
      double t = 0;
      apply(j, "mask_threshold", t, where);
      c.mask_threshold = t;
    }
  }
  if (j.contains("registration")) {
    const Json& r = j["registration"];
    const std::string rw = "config.registration";
    reject_unknown(r,
                   {"pyramid_levels", "initial_translation_step_mm", "initial_rotation_step_deg",
                    "min_translation_step_mm", "min_rotation_step_deg", "max_iterations_per_level"},
                   rw);
    apply(r, "pyramid_levels", c.registration.pyramid_levels, rw);
    apply(r, "initial_translation_step_mm", c.registration.initial_translation_step_mm, rw);
    apply(r, "initial_rotation_step_deg", c.registration.initial_rotation_step_deg, rw);
    apply(r, "min_translation_step_mm", c.registration.min_translation_step_mm, rw);
    apply(r, "min_rotation_step_deg", c.registration.min_rotation_step_deg, rw);
    apply(r, "max_iterations_per_level", c.registration.max_iterations_per_level, rw);
  }
  return c;
}

Json lesions_to_json(const Grid& grid, const std::vector<LesionRecord>& lesions, int connectivity,
                     std::int64_t min_voxels) {
  Json arr = Json::array();
  for (const auto& r : lesions) {
    arr.push_back({{"index", r.index},
                   {"label", r.label},
                   {"voxel_count", r.voxel_count},
                   {"volume_mm3", r.volume_mm3},
                   {"cube", cube_to_json(r.cube)}});
  }
  return Json{{"dims", grid.dims},
              {"spacing", grid.spacing},
              {"connectivity", connectivity},
              {"min_voxels", min_voxels},
              {"lesion_count", lesions.size()},
              {"lesions", arr}};
}

std::vector<LesionRecord> lesions_from_json(const Json& j) {
  std::vector<LesionRecord> out;
  const std::string where = "lesions.json";
  for (const auto& e : get_field<Json>(j, "lesions", where)) {
    LesionRecord r;
    r.index = get_field<std::int32_t>(e, "index", where);
    r.label = e.value("label", r.index);
    r.voxel_count = get_field<std::int64_t>(e, "voxel_count", where);
    r.volume_mm3 = get_field<double>(e, "volume_mm3", where);
    const Json cube = get_field<Json>(e, "cube", where);
    r.cube.min = get_field<std::array<std::int64_t, 3>>(cube, "min", where);
    r.cube.max = get_field<std::array<std::int64_t, 3>>(cube, "max", where);
    out.push_back(r);
  }
  return out;
}

Json transform_to_json(const RigidTransform& t, double final_ncc, bool converged) {
  return Json{{"rotation_deg", t.rotation_deg},
              {"translation_mm", t.translation_mm},
              {"center_mm", t.center_mm},
              {"convention", "fixed-to-moving, intrinsic ZYX, pull-back"},
              {"final_ncc", final_ncc},
              {"converged", converged}};
}

RigidTransform transform_from_json(const Json& j) {
  const std::string where = "transform.json";
  RigidTransform t;
  t.rotation_deg = get_field<Vec3>(j, "rotation_deg", where);
  t.translation_mm = get_field<Vec3>(j, "translation_mm", where);
  t.center_mm = get_field<Vec3>(j, "center_mm", where);
  return t;
}

Json comparison_to_json(const ComparisonReport& report) {
  Json matched = Json::array();
  for (const auto& m : report.matched) {
    matched.push_back({{"prev_index", m.prev_index},
                       {"follow_index", m.follow_index},
                       {"ioc", m.ioc},
                       {"prev_voxels", m.prev_voxels},
                       {"follow_voxels", m.follow_voxels},
                       {"category", category_name(m.category)}});
  }
  Json emerge = Json::array();
  for (const auto& e : report.emerge) {
    Json entry{{"follow_index", e.follow_index}, {"follow_voxels", e.follow_voxels}};
    if (e.resampling_loss) entry["resampling_loss"] = true;
    emerge.push_back(entry);
  }
  Json vanish = Json::array();
  for (const auto& v : report.vanish) vanish.push_back({{"prev_index", v.prev_index}, {"prev_voxels", v.prev_voxels}});
  return Json{{"matched", matched},
              {"emerge", emerge},
              {"vanish", vanish},
              {"params",
               {{"connectivity", report.params.connectivity},
                {"min_voxels", report.params.min_voxels},
                {"stability_tolerance", report.params.stability_tolerance},
                {"min_ioc", report.params.min_ioc}}}};
}

ComparisonReport comparison_from_json(const Json& j) {
  const std::string where = "comparison.json";
  ComparisonReport r;
  for (const auto& m : get_field<Json>(j, "matched", where)) {
    LesionMatch lm;
    lm.prev_index = get_field<std::int32_t>(m, "prev_index", where);
    lm.follow_index = get_field<std::int32_t>(m, "follow_index", where);
    lm.ioc = get_field<double>(m, "ioc", where);
    lm.prev_voxels = get_field<std::int64_t>(m, "prev_voxels", where);
    lm.follow_voxels = get_field<std::int64_t>(m, "follow_voxels", where);
    const auto cat = get_field<std::string>(m, "category", where);
    if (cat == "grow") {
      lm.category = ChangeCategory::Grow;
    } else if (cat == "shrink") {
      lm.category = ChangeCategory::Shrink;
    } else if (cat == "stable") {
      lm.category = ChangeCategory::Stable;
    } else {
      throw FormatError(where + ": unknown category \"" + cat + "\"");
    }
    r.matched.push_back(lm);
  }
  for (const auto& e : get_field<Json>(j, "emerge", where)) {
    r.emerge.push_back({get_field<std::int32_t>(e, "follow_index", where),
                        get_field<std::int64_t>(e, "follow_voxels", where), e.value("resampling_loss", false)});
  }
  for (const auto& v : get_field<Json>(j, "vanish", where)) {
    r.vanish.push_back({get_field<std::int32_t>(v, "prev_index", where), get_field<std::int64_t>(v, "prev_voxels", where)});
  }
  const Json params = get_field<Json>(j, "params", where);
  r.params.connectivity = get_field<int>(params, "connectivity", where);
  r.params.min_voxels = get_field<std::int64_t>(params, "min_voxels", where);
  r.params.stability_tolerance = get_field<double>(params, "stability_tolerance", where);
  r.params.min_ioc = params.value("min_ioc", 0.0);
  return r;
}

Json bins_to_json(const VolumeBins& bins) {
  Json arr = Json::array();
  const auto pct = display_percentages(bins);
  for (std::size_t i = 0; i < bins.counts.size(); ++i) {
    arr.push_back({{"range", bins.labels[i]},
                   {"count", bins.counts[i]},
                   {"proportion", bins.proportions[i]},
                   {"percent", pct[i]}});
  }
  std::int64_t total = 0;
  for (auto c : bins.counts) total += c;
  return Json{{"thresholds", bins.thresholds}, {"lesion_count", total}, {"bins", arr}};
}

Json volume_table_to_json(const std::vector<VolumeTableRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json row{{"lesion", r.lesion}, {"volume", r.volume_text()}, {"category", r.category}};
    if (r.matched) {
      row["prev_index"] = r.prev_index;
      row["prev_voxels"] = r.prev_voxels;
    }
    row["follow_voxels"] = r.follow_voxels;
    arr.push_back(row);
  }
  return Json{{"rows", arr}};
}

Json scores_to_json(const ScoreTable& table) {
  auto scores_json = [](const Scores& s) {
    return Json{{"dice", s.dice}, {"miou", s.miou}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  auto counts_json = [](const ConfusionCounts& c) {
    return Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
  };
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"image", r.name}, {"counts", counts_json(r.counts)}, {"scores", scores_json(r.scores)}});
  }
  return Json{{"mode", table.mode == Aggregation::Micro ? "micro" : "macro"},
              {"images", rows},
              {"aggregate", {{"counts", counts_json(table.total)}, {"scores", scores_json(table.aggregate)}}}};
}

std::vector<BoundingBox2D> boxes_from_json(const Json& j) {
  const std::string where = "boxes.json";
  if (!j.is_array()) throw FormatError(where + ": expected an array of boxes");
  std::vector<BoundingBox2D> out;
  for (const auto& e : j) {
    BoundingBox2D b;
    b.x0 = get_field<int>(e, "x0", where);
    b.y0 = get_field<int>(e, "y0", where);
    b.x1 = get_field<int>(e, "x1", where);
    b.y1 = get_field<int>(e, "y1", where);
    if (e.contains("threshold") && !e["threshold"].is_null()) b.threshold = get_field<double>(e, "threshold", where);
    out.push_back(b);
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) { write_text_file(j.dump(2) + "\n", path); }

void write_text_file(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace lesionq
