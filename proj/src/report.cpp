#include "lesionq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

// 3x5 bitmap digits, one row per entry, bit 2 = leftmost column.
constexpr std::uint8_t kDigits[10][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
};
constexpr int kGlyphW = 3;
constexpr int kGlyphH = 5;

void draw_number(RgbImage& img, int ox, int oy, int tile_w, int tile_h, int left, int top, std::int32_t value) {
  const std::string text = std::to_string(value);
  const int tw = static_cast<int>(text.size()) * (kGlyphW + 1) - 1;
  int tx = std::clamp(ox, 0, std::max(0, tile_w - tw));
  int ty = std::clamp(oy, 0, std::max(0, tile_h - kGlyphH));
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto& glyph = kDigits[text[i] - '0'];
    for (int gy = 0; gy < kGlyphH; ++gy) {
      for (int gx = 0; gx < kGlyphW; ++gx) {
        if (!(glyph[gy] & (4 >> gx))) continue;
        const int px = tx + static_cast<int>(i) * (kGlyphW + 1) + gx;
        const int py = ty + gy;
        if (px < tile_w && py < tile_h) img.set(left + px, top + py, 255, 255, 0);
      }
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double nice_ceiling(double v) {
  if (v <= 0) return 1.0;
  const double base = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * base >= v) return m * base;
  }
  return 10.0 * base;
}

struct Panel {
  double x, y, w, h;  // plot area
};

void svg_axes(std::ostringstream& out, const Panel& p, double ymax, std::size_t n, const std::string& title) {
  out << "  <text x=\"" << fmt(p.x + p.w / 2) << "\" y=\"" << fmt(p.y - 16)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  out << "  <line x1=\"" << fmt(p.x) << "\" y1=\"" << fmt(p.y + p.h) << "\" x2=\"" << fmt(p.x + p.w) << "\" y2=\""
      << fmt(p.y + p.h) << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << fmt(p.x) << "\" y1=\"" << fmt(p.y) << "\" x2=\"" << fmt(p.x) << "\" y2=\""
      << fmt(p.y + p.h) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = ymax * t / 5.0;
    const double y = p.y + p.h - p.h * t / 5.0;
    out << "  <line x1=\"" << fmt(p.x - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(p.x) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt(p.x - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
        << static_cast<long long>(std::llround(v)) << "</text>\n";
  }
  const std::size_t stride = n <= 20 ? 1 : (n + 19) / 20;
  for (std::size_t i = 0; i < n; i += stride) {
    const double x = p.x + p.w * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out << "  <text x=\"" << fmt(x) << "\" y=\"" << fmt(p.y + p.h + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << i + 1 << "</text>\n";
  }
  out << "  <text x=\"" << fmt(p.x + p.w / 2) << "\" y=\"" << fmt(p.y + p.h + 30)
      << "\" text-anchor=\"middle\" font-size=\"11\">lesion (ascending volume)</text>\n";
}

void svg_series(std::ostringstream& out, const Panel& p, double ymax, const std::vector<double>& values,
                const std::string& color, const std::string& name) {
  const std::size_t n = values.size();
  if (n == 0) return;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.emplace_back(p.x + p.w * (static_cast<double>(i) + 0.5) / static_cast<double>(n),
                     p.y + p.h - p.h * values[i] / ymax);
  }
  out << "  <polyline class=\"" << name << "\" fill=\"none\" stroke=\"" << color << "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << fmt(pts[i].first) << "," << fmt(pts[i].second);
  out << "\"/>\n";
  for (const auto& [x, y] : pts) {
    out << "  <circle class=\"" << name << "\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
  }
}

void svg_legend(std::ostringstream& out, double x, double y, const std::string& color, const std::string& text) {
  out << "  <rect x=\"" << fmt(x) << "\" y=\"" << fmt(y - 8) << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/>\n";
  out << "  <text x=\"" << fmt(x + 14) << "\" y=\"" << fmt(y + 1) << "\" font-size=\"11\">" << text << "</text>\n";
}

}  // namespace

std::vector<CollagePage> render_collage(const Volume& volume, const LesionLabelMap& labels,
                                        const std::vector<LesionRecord>& lesions, SliceRange range,
                                        const CollageOptions& options) {
  if (volume.grid.dims != labels.grid.dims) throw ShapeMismatch("volume and label map grids differ");
  if (options.columns < 1) throw InvalidArgument("columns must be positive");
  if (options.rows_per_page < 0) throw InvalidArgument("rows_per_page must be >= 0");
  if (range.first < 0 || range.last >= volume.grid.dims[2] || range.first > range.last) {
    throw EmptyRange("slice range [" + std::to_string(range.first) + ", " + std::to_string(range.last) +
                     "] is empty or outside 0.." + std::to_string(volume.grid.dims[2] - 1));
  }

  std::map<std::int32_t, std::int32_t> index_of_label;
  for (const auto& r : lesions) index_of_label[r.label] = r.index;

  float lo = volume.data.empty() ? 0.0f : *std::min_element(volume.data.begin(), volume.data.end());
  float hi = volume.data.empty() ? 1.0f : *std::max_element(volume.data.begin(), volume.data.end());
  const double span = hi > lo ? static_cast<double>(hi) - lo : 1.0;

  const int tw = static_cast<int>(volume.grid.dims[0]);
  const int th = static_cast<int>(volume.grid.dims[1]);
  const auto slices = static_cast<int>(range.last - range.first + 1);
  const int cols = options.columns;
  const int rows = (slices + cols - 1) / cols;
  const int rows_per_page = options.rows_per_page == 0 ? rows : options.rows_per_page;

  std::vector<CollagePage> pages;
  for (int row0 = 0; row0 < rows; row0 += rows_per_page) {
    const int page_rows = std::min(rows_per_page, rows - row0);
    CollagePage page;
    page.image = RgbImage(tw * cols, th * page_rows);
    for (int r = 0; r < page_rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int k = (row0 + r) * cols + c;
        CollageTile tile;
        const int left = c * tw, top = r * th;
        if (k < slices) {
          tile.z = range.first + k;
          for (int y = 0; y < th; ++y) {
            for (int x = 0; x < tw; ++x) {
              const double g = (static_cast<double>(volume.at(x, y, tile.z)) - lo) / span * 255.0;
              const auto v = static_cast<std::uint8_t>(std::clamp(std::lround(g), 0L, 255L));
              page.image.set(left + x, top + y, v, v, v);
            }
          }
          const ContourSet contours = trace_contours(label_slice(labels, tile.z));
          for (const auto& contour : contours.contours) {
            const auto it = index_of_label.find(contour.label);
            if (it == index_of_label.end()) continue;
            tile.has_contour = true;
            int bx0 = tw, by0 = th;
            for (const Pixel p : contour.points) {
              page.image.set(left + p.x, top + p.y, 255, 0, 0);
              bx0 = std::min(bx0, p.x);
              by0 = std::min(by0, p.y);
            }
            if (contour.outer) {
              const int digits = static_cast<int>(std::to_string(it->second).size());
              const int text_w = digits * (kGlyphW + 1) - 1;
              draw_number(page.image, bx0 - 2 - text_w, by0 - 2 - kGlyphH, tw, th, left, top, it->second);
              tile.indices.push_back(it->second);
            }
          }
        }
        page.tiles.push_back(std::move(tile));
      }
    }
    pages.push_back(std::move(page));
  }
  return pages;
}

ChartData chart_data(const ComparisonReport& report, std::int64_t floor) {
  ChartData data;
  data.floor = floor;
  std::vector<const LesionMatch*> matches;
  for (const auto& m : report.matched) {
    if (std::max(m.prev_voxels, m.follow_voxels) > floor) matches.push_back(&m);
  }
  std::stable_sort(matches.begin(), matches.end(), [](auto* a, auto* b) {
    return std::tie(a->prev_voxels, a->follow_voxels) < std::tie(b->prev_voxels, b->follow_voxels);
  });
  for (const auto* m : matches) data.matched.push_back({m->prev_voxels, m->follow_voxels});
  for (const auto& e : report.emerge) {
    if (e.follow_voxels > floor) data.unmatched.push_back(e.follow_voxels);
  }
  std::sort(data.unmatched.begin(), data.unmatched.end());
  return data;
}

std::string render_line_chart(const ChartData& data) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"400\" viewBox=\"0 0 960 400\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"960\" height=\"400\" fill=\"white\"/>\n";

  const Panel left{70, 60, 380, 280};
  const Panel right{550, 60, 380, 280};

  std::vector<double> prev, follow, single;
  double left_max = 0, right_max = 0;
  for (const auto& p : data.matched) {
    prev.push_back(static_cast<double>(p.prev));
    follow.push_back(static_cast<double>(p.follow));
    left_max = std::max({left_max, prev.back(), follow.back()});
  }
  for (auto v : data.unmatched) {
    single.push_back(static_cast<double>(v));
    right_max = std::max(right_max, single.back());
  }
  left_max = nice_ceiling(left_max);
  right_max = nice_ceiling(right_max);

  out << "  <g id=\"matched\">\n";
  svg_axes(out, left, left_max, prev.size(), "Successfully matched lesions");
  svg_series(out, left, left_max, prev, "#1f77b4", "previous");
  svg_series(out, left, left_max, follow, "#d62728", "follow-up");
  svg_legend(out, left.x + 10, left.y + 10, "#1f77b4", "previous inspection");
  svg_legend(out, left.x + 10, left.y + 26, "#d62728", "follow-up inspection");
  out << "  </g>\n";

  out << "  <g id=\"unmatched\">\n";
  svg_axes(out, right, right_max, single.size(), "Unsuccessfully matched lesions");
  svg_series(out, right, right_max, single, "#2ca02c", "unmatched");
  svg_legend(out, right.x + 10, right.y + 10, "#2ca02c", "follow-up inspection");
  out << "  </g>\n";
  out << "</svg>\n";
  return out.str();
}

VolumeBins volume_bin_stats(const std::vector<LesionRecord>& lesions, const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw InvalidArgument("at least one bin threshold is required");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0) || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw InvalidArgument("bin thresholds must be positive and strictly ascending");
    }
  }
  const std::size_t k = thresholds.size();
  VolumeBins bins;
  bins.thresholds = thresholds;
  bins.counts.assign(k + 1, 0);

  auto num = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  bins.labels.push_back("<=" + num(thresholds.front()));
  for (std::size_t i = 1; i < k; ++i) bins.labels.push_back(num(thresholds[i - 1]) + "-" + num(thresholds[i]));
  bins.labels.push_back((k == 1 ? ">" : ">=") + num(thresholds.back()));

  for (const auto& r : lesions) {
    const auto v = static_cast<double>(r.voxel_count);
    std::size_t bin;
    if (v <= thresholds.front()) {
      bin = 0;
    } else if (k > 1 && v >= thresholds.back()) {
      bin = k;
    } else {
      bin = static_cast<std::size_t>(std::lower_bound(thresholds.begin(), thresholds.end(), v) - thresholds.begin());
    }
    ++bins.counts[bin];
  }
  const auto total = static_cast<double>(lesions.size());
  for (auto c : bins.counts) bins.proportions.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
  return bins;
}

std::vector<int> display_percentages(const VolumeBins& bins) {
  std::vector<int> out;
  for (double p : bins.proportions) out.push_back(static_cast<int>(std::floor(p * 100.0 + 0.5)));
  return out;
}

std::string format_bins(const VolumeBins& bins) {
  std::ostringstream out;
  const auto pct = display_percentages(bins);
  for (std::size_t i = 0; i < bins.counts.size(); ++i) {
    out << bins.labels[i] << ' ' << bins.counts[i] << " (" << pct[i] << "%)\n";
  }
  return out.str();
}

std::string VolumeTableRow::volume_text() const {
  if (!matched) return std::to_string(follow_voxels);
  return "[" + std::to_string(prev_voxels) + ", " + std::to_string(follow_voxels) + "]";
}

std::vector<VolumeTableRow> volume_table(const ComparisonReport& report) {
  std::vector<VolumeTableRow> rows;
  for (const auto& m : report.matched) {
    rows.push_back({m.follow_index, true, m.prev_index, m.prev_voxels, m.follow_voxels,
                    std::string(category_name(m.category))});
  }
  for (const auto& e : report.emerge) rows.push_back({e.follow_index, false, 0, 0, e.follow_voxels, "emerge"});
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.lesion < b.lesion; });
  return rows;
}

std::string volume_table_csv(const std::vector<VolumeTableRow>& rows) {
  std::ostringstream out;
  out << "lesion,volume,prev_index,prev_voxels,follow_voxels,category\n";
  for (const auto& r : rows) {
    out << r.lesion << ",\"" << r.volume_text() << "\",";
    if (r.matched) out << r.prev_index << ',' << r.prev_voxels;
    else out << ',';
    out << ',' << r.follow_voxels << ',' << r.category << '\n';
  }
  return out.str();
}

}  // namespace lesionq
