#include "lesionq/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "lesionq/errors.hpp"
#include "lesionq/nifti.hpp"

namespace lesionq {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, const ConfusionCounts& c) {
  if (den == 0) return c.fp + c.fn == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::uint8_t> load_binary(const std::filesystem::path& path, std::array<std::int64_t, 3>& shape) {
  std::vector<std::uint8_t> out;
  if (path.extension() == ".nii") {
    const Volume v = read_nifti(path);
    shape = v.grid.dims;
    const MaskVolume m = binarize(v, default_mask_threshold(v));
    return m.data;
  }
  const Image2D img = read_image(path);
  shape = {img.width, img.height, 1};
  std::uint16_t peak = 0;
  for (auto p : img.pixels) peak = std::max(peak, p);
  const double cut = std::max(0.5, 0.5 * peak);
  out.resize(img.pixels.size());
  std::transform(img.pixels.begin(), img.pixels.end(), out.begin(),
                 [cut](std::uint16_t v) { return static_cast<std::uint8_t>(v > cut); });
  return out;
}

std::map<std::string, std::filesystem::path> mask_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoFailure(dir.string() + " is not a directory");
  std::map<std::string, std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (is_image_file(e.path()) || e.path().extension() == ".nii") out.emplace(e.path().filename().string(), e.path());
  }
  return out;
}

}  // namespace

ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt) {
  if (pred.size() != gt.size()) {
    throw ShapeMismatch("prediction has " + std::to_string(pred.size()) + " elements, ground truth " +
                        std::to_string(gt.size()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gt[i] != 0;
    if (p && g) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

ConfusionCounts confusion(const MaskVolume& pred, const MaskVolume& gt) {
  if (pred.grid.dims != gt.grid.dims) throw ShapeMismatch("mask dimensions differ");
  return confusion(std::span<const std::uint8_t>(pred.data), std::span<const std::uint8_t>(gt.data));
}

Scores scores(const ConfusionCounts& c) {
  Scores s;
  s.dice = ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp, c);
  s.miou = ratio(c.tp, c.tp + c.fn + c.fp, c);
  s.precision = ratio(c.tp, c.tp + c.fp, c);
  s.recall = ratio(c.tp, c.tp + c.fn, c);
  const double pr = s.precision + s.recall;
  if (pr == 0.0) {
    s.f1 = c.fp + c.fn == 0 ? 1.0 : 0.0;
  } else {
    s.f1 = 2.0 * s.recall * s.precision / pr;
  }
  return s;
}

ScoreTable aggregate_scores(std::vector<ImageScore> rows, Aggregation mode) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  ScoreTable table;
  table.mode = mode;
  for (const auto& r : rows) table.total += r.counts;
  if (mode == Aggregation::Micro || rows.empty()) {
    table.aggregate = scores(table.total);
  } else {
    Scores sum;
    for (const auto& r : rows) {
      sum.dice += r.scores.dice;
      sum.miou += r.scores.miou;
      sum.precision += r.scores.precision;
      sum.recall += r.scores.recall;
      sum.f1 += r.scores.f1;
    }
    const auto n = static_cast<double>(rows.size());
    table.aggregate = {sum.dice / n, sum.miou / n, sum.precision / n, sum.recall / n, sum.f1 / n};
  }
  table.rows = std::move(rows);
  return table;
}

ScoreTable evaluate_set(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir, Aggregation mode) {
  const auto preds = mask_files(pred_dir);
  const auto gts = mask_files(gt_dir);
  for (const auto& [name, path] : gts) {
    if (!preds.contains(name)) throw MissingPair("no prediction for ground truth " + name);
  }
  std::vector<ImageScore> rows;
  for (const auto& [name, path] : preds) {
    const auto it = gts.find(name);
    if (it == gts.end()) throw MissingPair("no ground truth for prediction " + name);
    std::array<std::int64_t, 3> ps{}, gs{};
    const auto p = load_binary(path, ps);
    const auto g = load_binary(it->second, gs);
    if (ps != gs) throw ShapeMismatch(name + ": prediction and ground truth shapes differ");
    ImageScore row{name, confusion(p, g), {}};
    row.scores = scores(row.counts);
    rows.push_back(std::move(row));
  }
  return aggregate_scores(std::move(rows), mode);
}

std::string score_table_csv(const ScoreTable& table) {
  std::ostringstream out;
  auto line = [&out](const std::string& name, const ConfusionCounts& c, const Scores& s) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), ",%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  static_cast<unsigned long long>(c.tp), static_cast<unsigned long long>(c.fp),
                  static_cast<unsigned long long>(c.fn), static_cast<unsigned long long>(c.tn), s.dice, s.miou,
                  s.precision, s.recall, s.f1);
    out << name << buf;
  };
  out << "image,tp,fp,fn,tn,dice,miou,precision,recall,f1\n";
  for (const auto& r : table.rows) line(r.name, r.counts, r.scores);
  line(table.mode == Aggregation::Micro ? "__micro__" : "__macro__", table.total, table.aggregate);
  return out.str();
}

}  // namespace lesionq
