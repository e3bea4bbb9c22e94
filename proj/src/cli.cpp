#include "lesionq/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lesionq/bbts.hpp"
#include "lesionq/errors.hpp"
#include "lesionq/json_io.hpp"
#include "lesionq/metrics.hpp"
#include "lesionq/nifti.hpp"
#include "lesionq/pipeline.hpp"
#include "lesionq/report.hpp"
#include "lesionq/slices.hpp"

namespace lesionq::cli {
namespace fs = std::filesystem;

namespace {

// Options shared by every subcommand. Values are applied on top of the
// --config file only when the flag was given explicitly.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  bool to_stdout = false;
  int connectivity = 26;
  std::int64_t min_voxels = 0;
  double tolerance = 0.0;
  double min_ioc = 0.0;
  std::int64_t chart_floor = 100;
  std::vector<double> bins;
  std::vector<double> spacing;
  double mask_threshold = 0.0;
  int columns = 4;
  int rows_per_page = 8;

  CLI::Option* connectivity_opt = nullptr;
  CLI::Option* min_voxels_opt = nullptr;
  CLI::Option* tolerance_opt = nullptr;
  CLI::Option* min_ioc_opt = nullptr;
  CLI::Option* chart_floor_opt = nullptr;
  CLI::Option* bins_opt = nullptr;
  CLI::Option* spacing_opt = nullptr;
  CLI::Option* mask_threshold_opt = nullptr;
  CLI::Option* columns_opt = nullptr;
  CLI::Option* rows_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file; explicit flags override it");
  f.out_opt = app->add_option("--out", f.out_dir, "Output directory");
  app->add_flag("--stdout", f.to_stdout, "Also print the primary JSON output to stdout");
  f.connectivity_opt = app->add_option("--connectivity", f.connectivity, "Voxel connectivity {6|18|26}");
  f.min_voxels_opt = app->add_option("--min-voxels", f.min_voxels, "Ignore lesions smaller than N voxels");
  f.bins_opt = app->add_option("--bins", f.bins, "Volume bin thresholds, e.g. 200,3500")->delimiter(',');
  f.spacing_opt =
      app->add_option("--spacing", f.spacing, "Voxel spacing sx,sy,sz for slice directories")->delimiter(',');
  f.mask_threshold_opt =
      app->add_option("--mask-threshold", f.mask_threshold, "Mask binarization threshold (default: half max)");
}

RunConfig effective_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config_path.empty()) c = config_from_json(read_json_file(f.config_path));
  auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
  if (given(f.connectivity_opt)) c.connectivity = f.connectivity;
  if (given(f.min_voxels_opt)) c.min_voxels = f.min_voxels;
  if (given(f.tolerance_opt)) c.stability_tolerance = f.tolerance;
  if (given(f.min_ioc_opt)) c.min_ioc = f.min_ioc;
  if (given(f.chart_floor_opt)) c.chart_floor = f.chart_floor;
  if (given(f.bins_opt)) c.bins = f.bins;
  if (given(f.spacing_opt)) {
    if (f.spacing.size() != 3) throw InvalidArgument("--spacing needs three values sx,sy,sz");
    c.slice_spacing = {f.spacing[0], f.spacing[1], f.spacing[2]};
  }
  if (given(f.mask_threshold_opt)) c.mask_threshold = f.mask_threshold;
  if (given(f.columns_opt)) c.columns = f.columns;
  if (given(f.rows_opt)) c.rows_per_page = f.rows_per_page;
  if (given(f.out_opt)) c.out_dir = f.out_dir;
  validate(c);
  return c;
}

Volume load_image(const fs::path& path, const RunConfig& c) {
  if (fs::is_directory(path)) return stack_image_slices(path, c.slice_spacing);
  return read_nifti(path);
}

MaskVolume load_mask(const fs::path& path, const RunConfig& c) {
  if (fs::is_directory(path)) return stack_slices(path, c.slice_spacing, c.mask_threshold);
  const Volume v = read_nifti(path);
  return binarize(v, c.mask_threshold.value_or(default_mask_threshold(v)));
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path out(c.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoFailure("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

void emit(const Json& doc, const fs::path& path, bool to_stdout) {
  write_json_file(doc, path);
  std::cerr << "wrote " << path.string() << "\n";
  if (to_stdout) std::cout << doc.dump(2) << "\n";
}

// The output location is left out so that results do not depend on where
// they were written.
Json with_config(Json doc, const RunConfig& c) {
  Json cfg = config_to_json(c);
  cfg.erase("out_dir");
  doc["config"] = std::move(cfg);
  return doc;
}

int cmd_label(const std::string& mask_path, const CommonFlags& flags) {
  const RunConfig c = effective_config(flags);
  const MaskVolume mask = load_mask(mask_path, c);
  const LesionStats stats = lesion_statistics(mask, connectivity_from_int(c.connectivity), c.min_voxels);
  const fs::path out = prepare_out(c);
  std::cerr << "labeled " << stats.map.lesion_count << " components, " << stats.lesions.size() << " lesions kept\n";
  emit(with_config(lesions_to_json(mask.grid, stats.lesions, c.connectivity, c.min_voxels), c), out / "lesions.json",
       flags.to_stdout);
  write_json_file(with_config(bins_to_json(volume_bin_stats(stats.lesions, c.bins)), c), out / "bins.json");
  return kOk;
}

struct CompareInputs {
  std::string prev_image, prev_mask, follow_image, follow_mask, transform;
};

int cmd_compare(const CompareInputs& in, const CommonFlags& flags) {
  const RunConfig c = effective_config(flags);
  const Volume prev_image = load_image(in.prev_image, c);
  const MaskVolume prev_mask = load_mask(in.prev_mask, c);
  const Volume follow_image = load_image(in.follow_image, c);
  const MaskVolume follow_mask = load_mask(in.follow_mask, c);
  std::optional<RigidTransform> reuse;
  if (!in.transform.empty()) reuse = transform_from_json(read_json_file(in.transform));

  const ExamComparison cmp = compare_exams(prev_image, prev_mask, follow_image, follow_mask, c, reuse);
  if (!cmp.registration.converged) {
    std::cerr << "warning: registration hit the iteration cap; using the best transform found\n";
  }
  const fs::path out = prepare_out(c);
  write_json_file(with_config(transform_to_json(cmp.registration.transform, cmp.registration.final_ncc,
                                                cmp.registration.converged),
                              c),
                  out / "transform.json");
  write_json_file(with_config(lesions_to_json(prev_mask.grid, cmp.prev.lesions, c.connectivity, c.min_voxels), c),
                  out / "lesions_prev.json");
  write_json_file(
      with_config(lesions_to_json(follow_mask.grid, cmp.follow.lesions, c.connectivity, c.min_voxels), c),
      out / "lesions_follow.json");
  std::cerr << "matched " << cmp.report.matched.size() << ", emerge " << cmp.report.emerge.size() << ", vanish "
            << cmp.report.vanish.size() << "\n";
  emit(with_config(comparison_to_json(cmp.report), c), out / "comparison.json", flags.to_stdout);
  return kOk;
}

struct ReportInputs {
  std::string comparison, follow_image, follow_mask, stem = "report";
  std::vector<std::int64_t> slices;
};

int cmd_report(const ReportInputs& in, CommonFlags flags) {
  const Json doc = read_json_file(in.comparison);
  const ComparisonReport report = comparison_from_json(doc);
  // Labeling must reproduce the indices used by the comparison.
  RunConfig c = effective_config(flags);
  c.connectivity = report.params.connectivity;
  c.min_voxels = report.params.min_voxels;
  validate(c);

  const fs::path out = prepare_out(c);
  const auto rows = volume_table(report);
  write_text_file(volume_table_csv(rows), out / (in.stem + "_table.csv"));
  write_json_file(with_config(volume_table_to_json(rows), c), out / (in.stem + "_table.json"));
  write_text_file(render_line_chart(chart_data(report, c.chart_floor)), out / (in.stem + "_chart.svg"));

  if (!in.follow_image.empty() && !in.follow_mask.empty()) {
    const Volume image = load_image(in.follow_image, c);
    const MaskVolume mask = load_mask(in.follow_mask, c);
    if (image.grid.dims != mask.grid.dims) throw ShapeMismatch("follow-up image and mask grids differ");
    const LesionStats stats = lesion_statistics(mask, connectivity_from_int(c.connectivity), c.min_voxels);
    write_json_file(with_config(bins_to_json(volume_bin_stats(stats.lesions, c.bins)), c),
                    out / (in.stem + "_bins.json"));
    SliceRange range{0, image.grid.dims[2] - 1};
    if (!in.slices.empty()) {
      if (in.slices.size() != 2) throw InvalidArgument("--slices needs first,last");
      range = {in.slices[0], in.slices[1]};
    }
    const auto pages = render_collage(image, stats.map, stats.lesions, range, {c.columns, c.rows_per_page});
    for (std::size_t p = 0; p < pages.size(); ++p) {
      char name[64];
      std::snprintf(name, sizeof(name), "_collage_%03zu.png", p + 1);
      write_png(pages[p].image, out / (in.stem + name));
    }
    std::cerr << "wrote " << pages.size() << " collage page(s)\n";
  } else {
    // Bins over follow-up lesions known from the comparison alone.
    std::vector<LesionRecord> follow;
    for (const auto& m : report.matched) follow.push_back({m.follow_index, m.follow_index, m.follow_voxels, 0.0, {}});
    for (const auto& e : report.emerge) follow.push_back({e.follow_index, e.follow_index, e.follow_voxels, 0.0, {}});
    write_json_file(with_config(bins_to_json(volume_bin_stats(follow, c.bins)), c), out / (in.stem + "_bins.json"));
    std::cerr << "no --follow-image/--follow-mask given; collages skipped\n";
  }
  if (flags.to_stdout) std::cout << volume_table_csv(rows);
  return kOk;
}

int cmd_eval(const std::string& pred, const std::string& gt, const std::string& mode, const CommonFlags& flags) {
  const RunConfig c = effective_config(flags);
  const Aggregation agg = mode == "macro" ? Aggregation::Macro : Aggregation::Micro;
  const ScoreTable table = evaluate_set(pred, gt, agg);
  const fs::path out = prepare_out(c);
  write_text_file(score_table_csv(table), out / "scores.csv");
  emit(with_config(scores_to_json(table), c), out / "scores.json", flags.to_stdout);
  return kOk;
}

int cmd_bbts(const std::string& image_path, const std::string& boxes_path, const std::string& polarity,
             std::optional<double> threshold, const std::string& output, const CommonFlags& flags) {
  const RunConfig c = effective_config(flags);
  const Image2D image = read_image(image_path);
  const auto boxes = boxes_from_json(read_json_file(boxes_path));
  const BbtsResult result =
      bbts_segment(image, boxes, polarity == "bright" ? Polarity::Bright : Polarity::Dark, threshold);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  const fs::path out = prepare_out(c);
  const fs::path target = out / (output.empty() ? fs::path(image_path).stem().string() + "_mask.png" : output);
  write_png(result.mask, target);
  std::cerr << "wrote " << target.string() << "\n";
  return kOk;
}

int cmd_register(const std::string& fixed_path, const std::string& moving_path, const CommonFlags& flags,
                 const RegistrationParams* override_params) {
  RunConfig c = effective_config(flags);
  if (override_params) c.registration = *override_params;
  const Volume fixed = load_image(fixed_path, c);
  const Volume moving = load_image(moving_path, c);
  const RegistrationResult r = register_rigid(fixed, moving, c.registration);
  if (!r.converged) std::cerr << "warning: registration hit the iteration cap\n";
  const fs::path out = prepare_out(c);
  emit(with_config(transform_to_json(r.transform, r.final_ncc, r.converged), c), out / "transform.json",
       flags.to_stdout);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Lesion counting, volumetry and two-examination comparison for 3D segmentation masks"};
  app.require_subcommand(1);

  CommonFlags label_flags, compare_flags, report_flags, eval_flags, bbts_flags, register_flags;

  auto* label = app.add_subcommand("label", "Label lesions in a mask and write lesions.json + bins.json");
  std::string label_mask;
  label->add_option("mask", label_mask, "Mask (.nii or slice directory)")->required();
  add_common(label, label_flags);

  auto* compare = app.add_subcommand("compare", "Register, match and compare two examinations");
  CompareInputs compare_in;
  compare->add_option("--prev-image", compare_in.prev_image, "Baseline image")->required();
  compare->add_option("--prev-mask", compare_in.prev_mask, "Baseline mask")->required();
  compare->add_option("--follow-image", compare_in.follow_image, "Follow-up image")->required();
  compare->add_option("--follow-mask", compare_in.follow_mask, "Follow-up mask")->required();
  compare->add_option("--transform", compare_in.transform, "Reuse a saved transform.json instead of registering");
  add_common(compare, compare_flags);
  compare_flags.tolerance_opt =
      compare->add_option("--tolerance", compare_flags.tolerance, "Relative volume change counted as stable");
  compare_flags.min_ioc_opt = compare->add_option("--min-ioc", compare_flags.min_ioc, "Match only when IoC > this");

  auto* report = app.add_subcommand("report", "Render collages, chart and tables from comparison.json");
  ReportInputs report_in;
  report->add_option("comparison", report_in.comparison, "comparison.json")->required();
  report->add_option("--follow-image", report_in.follow_image, "Follow-up image for collages");
  report->add_option("--follow-mask", report_in.follow_mask, "Follow-up mask for collages");
  report->add_option("--stem", report_in.stem, "Output file stem");
  report->add_option("--slices", report_in.slices, "Slice range first,last")->delimiter(',');
  add_common(report, report_flags);
  report_flags.columns_opt = report->add_option("--columns", report_flags.columns, "Collage tiles per row");
  report_flags.rows_opt = report->add_option("--rows-per-page", report_flags.rows_per_page, "Rows per collage page");
  report_flags.chart_floor_opt =
      report->add_option("--chart-floor", report_flags.chart_floor, "Chart only lesions above N voxels");

  auto* eval = app.add_subcommand("eval", "Segmentation scores (Dice, mIoU, precision, recall, F1)");
  std::string eval_pred, eval_gt, eval_mode = "micro";
  eval->add_option("pred", eval_pred, "Prediction directory")->required();
  eval->add_option("gt", eval_gt, "Ground-truth directory")->required();
  eval->add_option("--mode", eval_mode, "micro or macro")->check(CLI::IsMember({"micro", "macro"}));
  add_common(eval, eval_flags);

  auto* bbts = app.add_subcommand("bbts", "Box binarization threshold segmentation of a 2D image");
  std::string bbts_image, bbts_boxes, bbts_polarity = "dark", bbts_output;
  std::optional<double> bbts_threshold;
  bbts->add_option("image", bbts_image, "Grayscale PNG/PGM image")->required();
  bbts->add_option("boxes", bbts_boxes, "boxes.json")->required();
  bbts->add_option("--polarity", bbts_polarity, "dark or bright")->check(CLI::IsMember({"dark", "bright"}));
  bbts->add_option("--threshold", bbts_threshold, "Manual threshold for every box");
  bbts->add_option("--output", bbts_output, "Mask file name inside --out");
  add_common(bbts, bbts_flags);

  auto* reg = app.add_subcommand("register", "Rigidly register a moving image to a fixed image");
  std::string reg_fixed, reg_moving;
  int reg_levels = 3, reg_iters = 200;
  reg->add_option("fixed", reg_fixed, "Fixed (baseline) image")->required();
  reg->add_option("moving", reg_moving, "Moving (follow-up) image")->required();
  auto* levels_opt = reg->add_option("--levels", reg_levels, "Pyramid levels");
  auto* iters_opt = reg->add_option("--max-iterations", reg_iters, "Iteration cap per level");
  add_common(reg, register_flags);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFormatError;
  }

  try {
    if (*label) return cmd_label(label_mask, label_flags);
    if (*compare) return cmd_compare(compare_in, compare_flags);
    if (*report) return cmd_report(report_in, report_flags);
    if (*eval) return cmd_eval(eval_pred, eval_gt, eval_mode, eval_flags);
    if (*bbts) return cmd_bbts(bbts_image, bbts_boxes, bbts_polarity, bbts_threshold, bbts_output, bbts_flags);
    if (*reg) {
      RegistrationParams params;
      const RegistrationParams* override_params = nullptr;
      if (levels_opt->count() || iters_opt->count()) {
        RunConfig base = register_flags.config_path.empty() ? RunConfig{}
                                                            : config_from_json(read_json_file(register_flags.config_path));
        params = base.registration;
        if (levels_opt->count()) params.pyramid_levels = reg_levels;
        if (iters_opt->count()) params.max_iterations_per_level = reg_iters;
        override_params = &params;
      }
      return cmd_register(reg_fixed, reg_moving, register_flags, override_params);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormatError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormatError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kDomainError;
}

}  // namespace lesionq::cli
