#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lesionq/image2d.hpp"

namespace lesionq {

/// Inclusive pixel box: (x0, y0) top-left, (x1, y1) bottom-right.
struct BoundingBox2D {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  std::optional<double> threshold;  // operator-tuned override for this box

  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct OtsuResult {
  /// Midpoint between the last value of the lower class and the first value
  /// of the upper class; equals the patch value when the patch is constant.
  double threshold = 0.0;
  bool degenerate = false;
};

/// Otsu's threshold over the exact histogram of the patch values.
OtsuResult otsu_threshold(std::span<const std::uint16_t> patch);

enum class Polarity { Dark, Bright };

struct BbtsResult {
  Image2D mask;  // 8-bit, 0/255, same size as the input image
  std::vector<std::string> warnings;
  std::vector<double> thresholds;  // per box, NaN when the box was skipped
};

/// Thresholds each box independently (manual threshold if given, else Otsu
/// on the box patch) and ORs the results onto a zero canvas. Dark polarity
/// keeps pixels <= threshold, bright keeps pixels >= threshold. A constant
/// patch without a manual threshold is skipped with a warning.
/// Throws InvalidArgument for boxes outside the image or with x0 > x1 / y0 > y1.
BbtsResult bbts_segment(const Image2D& image, const std::vector<BoundingBox2D>& boxes,
                        Polarity polarity = Polarity::Dark, std::optional<double> manual_threshold = std::nullopt);

}  // namespace lesionq
