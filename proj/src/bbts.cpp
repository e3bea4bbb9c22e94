#include "lesionq/bbts.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "lesionq/errors.hpp"

namespace lesionq {

OtsuResult otsu_threshold(std::span<const std::uint16_t> patch) {
  if (patch.empty()) throw InvalidArgument("otsu_threshold on an empty patch");
  std::map<std::uint16_t, std::uint64_t> hist;
  for (auto v : patch) ++hist[v];
  if (hist.size() == 1) return {static_cast<double>(hist.begin()->first), true};

  const auto total = static_cast<double>(patch.size());
  double sum_all = 0.0;
  for (const auto& [v, n] : hist) sum_all += static_cast<double>(v) * static_cast<double>(n);

  // Split after each distinct value except the largest; keep the first maximum.
  double best_var = -1.0;
  double best_threshold = 0.0;
  double w0 = 0.0, sum0 = 0.0;
  for (auto it = hist.begin(); std::next(it) != hist.end(); ++it) {
    w0 += static_cast<double>(it->second);
    sum0 += static_cast<double>(it->first) * static_cast<double>(it->second);
    const double w1 = total - w0;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best_var) {
      best_var = between;
      best_threshold = 0.5 * (static_cast<double>(it->first) + static_cast<double>(std::next(it)->first));
    }
  }
  return {best_threshold, false};
}

BbtsResult bbts_segment(const Image2D& image, const std::vector<BoundingBox2D>& boxes, Polarity polarity,
                        std::optional<double> manual_threshold) {
  BbtsResult out;
  out.mask.width = image.width;
  out.mask.height = image.height;
  out.mask.bit_depth = 8;
  out.mask.pixels.assign(image.pixels.size(), 0);

  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& box = boxes[b];
    if (box.x0 > box.x1 || box.y0 > box.y1 || box.x0 < 0 || box.y0 < 0 || box.x1 >= image.width ||
        box.y1 >= image.height) {
      throw InvalidArgument("box " + std::to_string(b) + " is inverted or outside the " +
                            std::to_string(image.width) + "x" + std::to_string(image.height) + " image");
    }
    std::optional<double> threshold = box.threshold ? box.threshold : manual_threshold;
    if (!threshold) {
      std::vector<std::uint16_t> patch;
      patch.reserve(static_cast<std::size_t>(box.x1 - box.x0 + 1) * (box.y1 - box.y0 + 1));
      for (int y = box.y0; y <= box.y1; ++y)
        for (int x = box.x0; x <= box.x1; ++x) patch.push_back(image.at(x, y));
      const OtsuResult otsu = otsu_threshold(patch);
      if (otsu.degenerate) {
        out.warnings.push_back("box " + std::to_string(b) + " skipped: constant patch (value " +
                               std::to_string(static_cast<int>(otsu.threshold)) + ") and no manual threshold");
        out.thresholds.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      threshold = otsu.threshold;
    }
    out.thresholds.push_back(*threshold);
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) {
        const double v = image.at(x, y);
        const bool fg = polarity == Polarity::Dark ? v <= *threshold : v >= *threshold;
        if (fg) out.mask.at(x, y) = 255;
      }
    }
  }
  return out;
}

}  // namespace lesionq
