#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lesionq/image2d.hpp"
#include "lesionq/volume.hpp"

namespace lesionq {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Scores {
  double dice = 0, miou = 0, precision = 0, recall = 0, f1 = 0;
};

/// Voxelwise tallies over two binary arrays (nonzero = foreground).
/// Throws ShapeMismatch when sizes differ.
ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt);
ConfusionCounts confusion(const MaskVolume& pred, const MaskVolume& gt);

/// Dice, mIoU, precision, recall and F1 from the counts. A 0/0 ratio scores
/// 1 when fp + fn == 0 (both empty, perfect agreement) and 0 otherwise.
Scores scores(const ConfusionCounts& counts);

enum class Aggregation { Micro, Macro };

struct ImageScore {
  std::string name;
  ConfusionCounts counts;
  Scores scores;
};

struct ScoreTable {
  std::vector<ImageScore> rows;  // sorted by name
  Aggregation mode = Aggregation::Micro;
  ConfusionCounts total;
  Scores aggregate;
};

/// Micro: scores of the summed counts. Macro: mean of per-row scores.
ScoreTable aggregate_scores(std::vector<ImageScore> rows, Aggregation mode);

/// Pairs files by name across the two directories (PNG, PGM or .nii masks,
/// binarized at half their maximum, minimum 0.5). Throws MissingPair when a
/// file has no partner, ShapeMismatch when a pair differs in size.
ScoreTable evaluate_set(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir, Aggregation mode);

/// CSV with one row per image plus a final aggregate row.
std::string score_table_csv(const ScoreTable& table);

}  // namespace lesionq
